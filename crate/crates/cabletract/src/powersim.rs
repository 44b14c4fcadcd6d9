//! Hourly PV, wind and battery dispatch under the operating duty cycle.

use rayon::prelude::*;

use crate::climate::{HourlyWeather, HOURS_PER_YEAR};
use crate::error::{domain, Result};
use crate::stats::percentile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPlant {
    pub pv_area_m2: f64,
    pub pv_eff: f64,
    pub temp_coeff: f64,
    pub derate_a: f64,
    pub derate_b: f64,
    /// Cell temperature rise per W/m² of irradiance.
    pub noct_coeff: f64,
    pub wind_rated_w: f64,
    pub swept_area_m2: f64,
    pub cp: f64,
    pub cut_in_ms: f64,
    pub cut_out_ms: f64,
    pub air_density: f64,
}

impl Default for PowerPlant {
    fn default() -> Self {
        Self {
            pv_area_m2: 15.0,
            pv_eff: 0.20,
            temp_coeff: 0.004,
            derate_a: 0.95,
            derate_b: 0.96,
            noct_coeff: 0.03,
            wind_rated_w: 600.0,
            swept_area_m2: 2.0,
            cp: 0.30,
            cut_in_ms: 2.5,
            cut_out_ms: 25.0,
            air_density: 1.225,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Battery {
    pub capacity_kwh: f64,
    pub charge_eff: f64,
    pub discharge_eff: f64,
    pub power_limit_w: f64,
    pub soc_min: f64,
    pub soc_max: f64,
}

impl Default for Battery {
    fn default() -> Self {
        Self {
            capacity_kwh: 9.0,
            charge_eff: 0.96,
            discharge_eff: 0.96,
            power_limit_w: 5000.0,
            soc_min: 0.10,
            soc_max: 0.95,
        }
    }
}

impl Battery {
    fn validate(&self) -> Result<()> {
        let effs_ok = [self.charge_eff, self.discharge_eff]
            .iter()
            .all(|e| *e > 0.0 && *e <= 1.0);
        if !(self.capacity_kwh > 0.0 && self.power_limit_w > 0.0 && effs_ok) {
            return Err(domain("battery needs positive capacity, power and efficiencies"));
        }
        if !(0.0 <= self.soc_min && self.soc_min < self.soc_max && self.soc_max <= 1.0) {
            return Err(domain("battery SOC band must satisfy 0 <= min < max <= 1"));
        }
        Ok(())
    }
}

/// Constant operating draw inside a daily window, idle draw outside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DutyCycle {
    pub operating_w: f64,
    pub idle_w: f64,
    pub start_hour: u32,
    pub end_hour: u32,
}

impl Default for DutyCycle {
    fn default() -> Self {
        Self {
            operating_w: 2000.0,
            idle_w: 50.0,
            start_hour: 9,
            end_hour: 15,
        }
    }
}

impl DutyCycle {
    pub fn load_w(&self, hour_of_day: u32) -> f64 {
        if (self.start_hour..self.end_hour).contains(&hour_of_day) {
            self.operating_w
        } else {
            self.idle_w
        }
    }

    pub fn daily_wh(&self) -> f64 {
        (0..24).map(|h| self.load_w(h)).sum()
    }
}

pub fn cell_temperature(air_c: f64, ghi_w_m2: f64, plant: &PowerPlant) -> f64 {
    air_c + plant.noct_coeff * ghi_w_m2
}

pub fn pv_power(ghi_w_m2: f64, cell_temp_c: f64, plant: &PowerPlant) -> f64 {
    let p = ghi_w_m2
        * plant.pv_area_m2
        * plant.pv_eff
        * (1.0 - plant.temp_coeff * (cell_temp_c - 25.0))
        * plant.derate_a
        * plant.derate_b;
    p.max(0.0)
}

pub fn wind_power(v_ms: f64, plant: &PowerPlant) -> f64 {
    if v_ms < plant.cut_in_ms || v_ms > plant.cut_out_ms {
        return 0.0;
    }
    let p = 0.5 * plant.air_density * plant.swept_area_m2 * v_ms.powi(3) * plant.cp;
    p.min(plant.wind_rated_w)
}

/// Hour-by-hour energy flows; every field is an average power over the hour.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HourlyLedger {
    pub pv_w: Vec<f64>,
    pub wind_w: Vec<f64>,
    pub batt_in_w: Vec<f64>,
    pub batt_out_w: Vec<f64>,
    /// State of charge at the end of the hour.
    pub soc: Vec<f64>,
    pub grid_w: Vec<f64>,
    pub load_w: Vec<f64>,
    /// Harvest that neither the load nor the battery could take.
    pub curtailed_w: Vec<f64>,
}

impl HourlyLedger {
    pub fn len(&self) -> usize {
        self.load_w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.load_w.is_empty()
    }

    /// load − (pv + wind − curtailed + batt_out − batt_in + grid) at hour `h`.
    pub fn balance_residual(&self, h: usize) -> f64 {
        self.load_w[h]
            - (self.pv_w[h] + self.wind_w[h] - self.curtailed_w[h] + self.batt_out_w[h]
                - self.batt_in_w[h]
                + self.grid_w[h])
    }

    pub fn grid_hours(&self) -> usize {
        self.grid_w.iter().filter(|g| **g > GRID_EPS_W).count()
    }

    pub fn grid_kwh(&self) -> f64 {
        self.grid_w.iter().sum::<f64>() / 1000.0
    }

    pub fn pv_kwh(&self) -> f64 {
        self.pv_w.iter().sum::<f64>() / 1000.0
    }

    pub fn wind_kwh(&self) -> f64 {
        self.wind_w.iter().sum::<f64>() / 1000.0
    }

    pub fn load_kwh(&self) -> f64 {
        self.load_w.iter().sum::<f64>() / 1000.0
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "hour", "pv_W", "wind_W", "batt_in_W", "batt_out_W", "soc", "grid_W", "load_W",
            "curtailed_W",
        ])?;
        for h in 0..self.len() {
            w.write_record(&[
                h.to_string(),
                fmt(self.pv_w[h]),
                fmt(self.wind_w[h]),
                fmt(self.batt_in_w[h]),
                fmt(self.batt_out_w[h]),
                format!("{:.6}", self.soc[h]),
                fmt(self.grid_w[h]),
                fmt(self.load_w[h]),
                fmt(self.curtailed_w[h]),
            ])?;
        }
        w.flush().map_err(crate::error::io_err("ledger"))?;
        Ok(())
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.4}")
}

/// Import below this is treated as zero when counting grid hours.
pub const GRID_EPS_W: f64 = 1e-9;

fn dispatch(
    weather: &HourlyWeather,
    plant: &PowerPlant,
    battery: &Battery,
    duty: &DutyCycle,
    soc0: f64,
    keep: bool,
) -> (HourlyLedger, f64) {
    let n = weather.ghi_w_m2.len();
    let cap_wh = battery.capacity_kwh * 1000.0;
    let mut ledger = HourlyLedger::default();
    if keep {
        for v in [
            &mut ledger.pv_w,
            &mut ledger.wind_w,
            &mut ledger.batt_in_w,
            &mut ledger.batt_out_w,
            &mut ledger.soc,
            &mut ledger.grid_w,
            &mut ledger.load_w,
            &mut ledger.curtailed_w,
        ] {
            v.reserve(n);
        }
    }
    let mut soc = soc0;
    for h in 0..n {
        let g = weather.ghi_w_m2[h];
        let pv = pv_power(g, cell_temperature(weather.temp_c[h], g, plant), plant);
        let wind = wind_power(weather.wind_ms[h], plant);
        let load = duty.load_w((h % 24) as u32);
        let harvest = pv + wind;
        let (mut b_in, mut b_out, mut grid, mut curtailed) = (0.0, 0.0, 0.0, 0.0);
        if harvest >= load {
            let surplus = harvest - load;
            let room = ((battery.soc_max - soc) * cap_wh / battery.charge_eff).max(0.0);
            b_in = surplus.min(battery.power_limit_w).min(room);
            soc = (soc + b_in * battery.charge_eff / cap_wh).min(battery.soc_max);
            curtailed = surplus - b_in;
        } else {
            let deficit = load - harvest;
            let avail = ((soc - battery.soc_min) * cap_wh * battery.discharge_eff).max(0.0);
            b_out = deficit.min(battery.power_limit_w).min(avail);
            soc = (soc - b_out / battery.discharge_eff / cap_wh).max(battery.soc_min);
            grid = deficit - b_out;
        }
        if keep {
            ledger.pv_w.push(pv);
            ledger.wind_w.push(wind);
            ledger.batt_in_w.push(b_in);
            ledger.batt_out_w.push(b_out);
            ledger.soc.push(soc);
            ledger.grid_w.push(grid);
            ledger.load_w.push(load);
            ledger.curtailed_w.push(curtailed);
        }
    }
    (ledger, soc)
}

/// Runs one year. The starting state of charge is the end state of a
/// preliminary pass, so the year closes on itself.
pub fn simulate_year(
    weather: &HourlyWeather,
    plant: &PowerPlant,
    battery: &Battery,
    duty: &DutyCycle,
) -> Result<HourlyLedger> {
    battery.validate()?;
    let n = weather.ghi_w_m2.len();
    if n != HOURS_PER_YEAR || weather.wind_ms.len() != n || weather.temp_c.len() != n {
        return Err(domain(format!("expected {HOURS_PER_YEAR}-hour weather, got {n}")));
    }
    let (_, soc_end) = dispatch(weather, plant, battery, duty, battery.soc_min, false);
    Ok(dispatch(weather, plant, battery, duty, soc_end, true).0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageStats {
    pub per_day_decares: Vec<f64>,
    pub p10: f64,
    pub p50: f64,
    pub p90: f64,
}

/// Decares per day that harvest and battery alone could have served.
pub fn daily_coverage_stats(ledger: &HourlyLedger, energy_wh_per_decare: f64) -> Result<CoverageStats> {
    if !(energy_wh_per_decare > 0.0) {
        return Err(domain("energy intensity must be positive"));
    }
    if ledger.is_empty() {
        return Err(domain("empty ledger"));
    }
    let per_day: Vec<f64> = ledger
        .load_w
        .chunks(24)
        .zip(ledger.grid_w.chunks(24))
        .map(|(l, g)| {
            let served: f64 = l.iter().zip(g).map(|(l, g)| l - g).sum();
            served / energy_wh_per_decare
        })
        .collect();
    Ok(CoverageStats {
        p10: percentile(&per_day, 10.0),
        p50: percentile(&per_day, 50.0),
        p90: percentile(&per_day, 90.0),
        per_day_decares: per_day,
    })
}

/// First day index of the 7-day window with the largest GHI sum.
pub fn brightest_week_start(weather: &HourlyWeather) -> usize {
    let daily = weather.daily_ghi_wh_m2();
    let mut best = (0, f64::NEG_INFINITY);
    for start in 0..=daily.len().saturating_sub(7) {
        let s: f64 = daily[start..start + 7].iter().sum();
        if s > best.1 {
            best = (start, s);
        }
    }
    best.0
}

pub fn grid_import_wh(ledger: &HourlyLedger, first_day: usize, days: usize) -> f64 {
    let lo = first_day * 24;
    let hi = ((first_day + days) * 24).min(ledger.len());
    ledger.grid_w[lo..hi].iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityCell {
    pub pv_area_m2: f64,
    pub battery_kwh: f64,
    pub grid_hours: usize,
    pub grid_kwh: f64,
}

/// Grid-import hours for every (panel area, battery capacity) pair.
pub fn feasibility_map(
    weather: &HourlyWeather,
    plant: &PowerPlant,
    battery: &Battery,
    duty: &DutyCycle,
    panel_areas: &[f64],
    capacities: &[f64],
) -> Result<Vec<FeasibilityCell>> {
    let cells: Vec<(f64, f64)> = panel_areas
        .iter()
        .flat_map(|a| capacities.iter().map(move |c| (*a, *c)))
        .collect();
    cells
        .par_iter()
        .map(|&(area, cap)| {
            let p = PowerPlant { pv_area_m2: area, ..*plant };
            let b = Battery { capacity_kwh: cap, ..*battery };
            let l = simulate_year(weather, &p, &b, duty)?;
            Ok(FeasibilityCell {
                pv_area_m2: area,
                battery_kwh: cap,
                grid_hours: l.grid_hours(),
                grid_kwh: l.grid_kwh(),
            })
        })
        .collect()
}

/// Default sweep: panels 4–30 m², batteries 2–24 kWh, unit steps.
pub fn default_sweep() -> (Vec<f64>, Vec<f64>) {
    ((4..=30).map(f64::from).collect(), (2..=24).map(f64::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pv_hand_values() {
        let p = PowerPlant::default();
        assert_relative_eq!(pv_power(1000.0, 25.0, &p), 2736.0, max_relative = 1e-12);
        assert_eq!(pv_power(0.0, 25.0, &p), 0.0);
        assert_relative_eq!(pv_power(1000.0, 35.0, &p) / pv_power(1000.0, 25.0, &p), 0.96);
    }

    #[test]
    fn wind_hand_values() {
        let p = PowerPlant::default();
        assert_eq!(wind_power(2.0, &p), 0.0);
        assert_relative_eq!(wind_power(8.0, &p), 188.16, epsilon = 1e-9);
        assert_eq!(wind_power(20.0, &p), 600.0);
        assert_eq!(wind_power(26.0, &p), 0.0);
    }

    #[test]
    fn dark_year_imports_everything_beyond_battery() {
        let w = HourlyWeather::calm_dark("none");
        let duty = DutyCycle::default();
        let l = simulate_year(&w, &PowerPlant::default(), &Battery::default(), &duty).unwrap();
        assert_relative_eq!(l.grid_kwh(), l.load_kwh(), max_relative = 1e-12);
        let cov = daily_coverage_stats(&l, 921.0).unwrap();
        assert!(cov.per_day_decares.iter().all(|d| *d == 0.0));
    }

    #[test]
    fn duty_energy() {
        assert_eq!(DutyCycle::default().daily_wh(), 12_900.0);
    }
}
