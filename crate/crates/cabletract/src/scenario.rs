//! Scenario parameters, the single-pass energy model and the daily
//! throughput closure.
//!
//! A round is one loaded forward leg of the carriage across the span,
//! an unloaded return leg of equal duration, and one setup step in which
//! both end stations move one strip width along the headland.

use crate::error::{domain, Error, Result};

const SECONDS_PER_HOUR: f64 = 3600.0;
const M2_PER_DECARE: f64 = 1000.0;
const HOURS_PER_YEAR: f64 = 8760.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapexItem {
    pub name: String,
    pub cents: i64,
}

impl CapexItem {
    pub fn new(name: &str, eur: i64) -> Self {
        Self {
            name: name.to_string(),
            cents: eur * 100,
        }
    }
}

/// Bill of materials for the single-span reference system.
pub fn reference_capex() -> Vec<CapexItem> {
    vec![
        CapexItem::new("main_unit", 17_500),
        CapexItem::new("anchor", 7_500),
        CapexItem::new("battery_9kwh", 3_420),
        CapexItem::new("pv_array_15m2", 1_650),
        CapexItem::new("wind_turbine_600w", 1_500),
        CapexItem::new("crating_logistics", 4_000),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub span_m: f64,
    pub strip_width_m: f64,
    /// Rolling and cable drag of the carriage, N.
    pub carriage_load_n: f64,
    /// Implement draft, N.
    pub draft_load_n: f64,
    /// Load to move both end stations one strip width, N.
    pub system_travel_load_n: f64,
    pub drivetrain_efficiency: f64,
    pub operating_speed_kmh: f64,
    pub pv_area_m2: f64,
    pub wind_rated_w: f64,
    pub setup_time_s: f64,
    pub battery_kwh: f64,
    pub op_window_h_per_day: f64,
    pub op_days_per_yr: f64,
    pub diesel_l_per_decare: f64,
    pub diesel_price_eur_per_l: f64,
    pub grid_price_eur_per_kwh: f64,
    pub capex_items: Vec<CapexItem>,
    pub maintenance_frac_per_yr: f64,
    pub battery_replacement_yr: u32,
    pub horizon_yr: u32,
    pub discount_rate: f64,
    /// r_o: share of usable time spent on loaded passes.
    pub operation_time_fraction: f64,
    /// Field area over swept area for the strip layout.
    pub shape_efficiency: f64,
    /// Housekeeping draw while not pulling, W.
    pub idle_power_w: f64,
    /// Reference irradiance for peak-sun-hour accounting, W/m².
    pub solar_power_w_m2: f64,
    /// Equivalent full-irradiance hours per day at the reference site.
    pub solar_hours_per_day: f64,
    /// Annual PV yield per unit irradiation per unit area.
    pub pv_yield_fraction: f64,
    pub wind_capacity_factor: f64,
    pub soc_min: f64,
    pub soc_max: f64,
    pub sales_margin_frac: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            span_m: 50.0,
            strip_width_m: 1.5,
            carriage_load_n: 600.0,
            draft_load_n: 1800.0,
            system_travel_load_n: 2200.0,
            drivetrain_efficiency: 0.50,
            operating_speed_kmh: 1.5,
            pv_area_m2: 15.0,
            wind_rated_w: 600.0,
            setup_time_s: 60.0,
            battery_kwh: 9.0,
            op_window_h_per_day: 10.0,
            op_days_per_yr: 170.0,
            diesel_l_per_decare: 1.2,
            diesel_price_eur_per_l: 1.40,
            grid_price_eur_per_kwh: 0.18,
            capex_items: reference_capex(),
            maintenance_frac_per_yr: 0.04,
            battery_replacement_yr: 8,
            horizon_yr: 15,
            discount_rate: 0.08,
            operation_time_fraction: 0.8,
            shape_efficiency: 0.77,
            idle_power_w: 50.0,
            solar_power_w_m2: 1000.0,
            solar_hours_per_day: 4.65,
            pv_yield_fraction: 0.169,
            wind_capacity_factor: 0.042,
            soc_min: 0.10,
            soc_max: 0.95,
            sales_margin_frac: 0.0,
        }
    }
}

macro_rules! float_keys {
    ($($key:literal => $field:ident),* $(,)?) => {
        const FLOAT_KEYS: &[&str] = &[$($key),*];

        fn set_float(p: &mut ScenarioParams, key: &str, v: f64) -> bool {
            match key {
                $($key => p.$field = v,)*
                _ => return false,
            }
            true
        }

        fn get_float(p: &ScenarioParams, key: &str) -> Option<f64> {
            match key {
                $($key => Some(p.$field),)*
                _ => None,
            }
        }
    };
}

float_keys! {
    "span_m" => span_m,
    "strip_width_m" => strip_width_m,
    "carriage_load_N" => carriage_load_n,
    "draft_load_N" => draft_load_n,
    "system_travel_load_N" => system_travel_load_n,
    "drivetrain_efficiency" => drivetrain_efficiency,
    "operating_speed_kmh" => operating_speed_kmh,
    "pv_area_m2" => pv_area_m2,
    "wind_rated_W" => wind_rated_w,
    "setup_time_s" => setup_time_s,
    "battery_kWh" => battery_kwh,
    "op_window_h_per_day" => op_window_h_per_day,
    "op_days_per_yr" => op_days_per_yr,
    "diesel_l_per_decare" => diesel_l_per_decare,
    "diesel_price_eur_per_l" => diesel_price_eur_per_l,
    "grid_price_eur_per_kWh" => grid_price_eur_per_kwh,
    "maintenance_frac_per_yr" => maintenance_frac_per_yr,
    "discount_rate" => discount_rate,
    "operation_time_fraction" => operation_time_fraction,
    "shape_efficiency" => shape_efficiency,
    "idle_power_W" => idle_power_w,
    "solar_power_W_m2" => solar_power_w_m2,
    "solar_hours_per_day" => solar_hours_per_day,
    "pv_yield_fraction" => pv_yield_fraction,
    "wind_capacity_factor" => wind_capacity_factor,
    "soc_min" => soc_min,
    "soc_max" => soc_max,
    "sales_margin_frac" => sales_margin_frac,
}

impl ScenarioParams {
    pub fn capex_cents(&self) -> i64 {
        self.capex_items.iter().map(|c| c.cents).sum()
    }

    pub fn capex_eur(&self) -> f64 {
        self.capex_cents() as f64 / 100.0
    }

    pub fn speed_m_s(&self) -> f64 {
        self.operating_speed_kmh / 3.6
    }

    /// Duration of one loaded leg across the span, s.
    pub fn forward_leg_s(&self) -> f64 {
        self.span_m / self.speed_m_s()
    }

    pub fn round_area_m2(&self) -> f64 {
        self.span_m * self.strip_width_m
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        match key {
            "battery_replacement_yr" => Some(self.battery_replacement_yr as f64),
            "horizon_yr" => Some(self.horizon_yr as f64),
            "capex_eur" => Some(self.capex_eur()),
            _ => get_float(self, key),
        }
    }

    /// Sets one parameter by its override-file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let parse_err = |m: String| Error::Parse {
            location: key.to_string(),
            message: m,
        };
        match key {
            "battery_replacement_yr" | "horizon_yr" => {
                let v: u32 = value
                    .parse()
                    .map_err(|e| parse_err(format!("{value}: {e}")))?;
                if key == "horizon_yr" {
                    self.horizon_yr = v;
                } else {
                    self.battery_replacement_yr = v;
                }
            }
            "capex_eur" => {
                let v: f64 = value
                    .parse()
                    .map_err(|e| parse_err(format!("{value}: {e}")))?;
                self.scale_capex_to(v)?;
            }
            _ if key.starts_with("capex.") => {
                let name = &key["capex.".len()..];
                let eur: f64 = value
                    .parse()
                    .map_err(|e| parse_err(format!("{value}: {e}")))?;
                let cents = (eur * 100.0).round() as i64;
                match self.capex_items.iter_mut().find(|c| c.name == name) {
                    Some(item) => item.cents = cents,
                    None => self.capex_items.push(CapexItem {
                        name: name.to_string(),
                        cents,
                    }),
                }
            }
            _ => {
                let v: f64 = value
                    .parse()
                    .map_err(|e| parse_err(format!("{value}: {e}")))?;
                if !set_float(self, key, v) {
                    return Err(Error::Unknown {
                        kind: "parameter",
                        name: key.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Rescales every capex line so the total equals `eur`.
    pub fn scale_capex_to(&mut self, eur: f64) -> Result<()> {
        let total = self.capex_cents();
        if total <= 0 || !(eur > 0.0) {
            return Err(domain("capex rescale needs positive totals"));
        }
        let k = eur * 100.0 / total as f64;
        for item in &mut self.capex_items {
            item.cents = (item.cents as f64 * k).round() as i64;
        }
        Ok(())
    }

    /// Applies a flat `key = value` override text. `#` starts a comment.
    pub fn apply_overrides(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                location: format!("line {}", i + 1),
                message: format!("expected key=value, got `{line}`"),
            })?;
            self.set(k.trim(), v.trim())?;
        }
        self.validate()
    }

    pub fn from_overrides(text: &str) -> Result<Self> {
        let mut p = Self::default();
        p.apply_overrides(text)?;
        Ok(p)
    }

    pub fn float_keys() -> &'static [&'static str] {
        FLOAT_KEYS
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("span_m", self.span_m),
            ("strip_width_m", self.strip_width_m),
            ("operating_speed_kmh", self.operating_speed_kmh),
        ];
        for (k, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(format!("{k} must be positive, got {v}")));
            }
        }
        if !(self.drivetrain_efficiency > 0.0 && self.drivetrain_efficiency <= 1.0) {
            return Err(domain(format!(
                "drivetrain_efficiency must be in (0, 1], got {}",
                self.drivetrain_efficiency
            )));
        }
        if !(0.0..=1.0).contains(&self.operation_time_fraction) {
            return Err(domain("operation_time_fraction must be in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.shape_efficiency) {
            return Err(domain("shape_efficiency must be in [0, 1]"));
        }
        if !(0.0 <= self.soc_min && self.soc_min < self.soc_max && self.soc_max <= 1.0) {
            return Err(domain("need 0 <= soc_min < soc_max <= 1"));
        }
        if !(0.0..=24.0).contains(&self.op_window_h_per_day) {
            return Err(domain("op_window_h_per_day must be in [0, 24]"));
        }
        let loads = [
            self.carriage_load_n,
            self.draft_load_n,
            self.system_travel_load_n,
            self.setup_time_s,
            self.idle_power_w,
        ];
        if loads.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(domain("loads, setup time and idle power must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundEnergy {
    pub mechanical_j: f64,
    /// Electrical energy at the battery, including return-leg idle draw.
    pub electrical_j: f64,
}

pub fn round_energy(p: &ScenarioParams) -> Result<RoundEnergy> {
    p.validate()?;
    let mechanical_j = p.draft_load_n * p.span_m
        + p.carriage_load_n * p.span_m
        + p.system_travel_load_n * p.strip_width_m;
    let return_leg_j = p.idle_power_w * p.forward_leg_s();
    Ok(RoundEnergy {
        mechanical_j,
        electrical_j: mechanical_j / p.drivetrain_efficiency + return_leg_j,
    })
}

/// Electrical energy per swept decare, Wh.
pub fn energy_per_decare(p: &ScenarioParams) -> Result<f64> {
    let e = round_energy(p)?;
    Ok(e.electrical_j / SECONDS_PER_HOUR / (p.round_area_m2() / M2_PER_DECARE))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSplit {
    pub usable_s: f64,
    pub operating_s: f64,
    pub travel_s: f64,
}

/// Splits a working day after `rounds` setups into loaded and travel time.
pub fn daily_time_split(
    window_s: f64,
    rounds: f64,
    setup_s: f64,
    operation_fraction: f64,
) -> Result<TimeSplit> {
    if !(0.0..=1.0).contains(&operation_fraction) {
        return Err(domain("operation fraction must be in [0, 1]"));
    }
    let setup_total = rounds * setup_s;
    if setup_total > window_s {
        return Err(domain(format!(
            "setup time {setup_total} s exceeds window {window_s} s"
        )));
    }
    let usable_s = window_s - setup_total;
    Ok(TimeSplit {
        usable_s,
        operating_s: operation_fraction * usable_s,
        travel_s: (1.0 - operation_fraction) * usable_s,
    })
}

/// Rounds per day when loaded legs exactly fill the operating share.
pub fn rounds_per_day(p: &ScenarioParams) -> f64 {
    let window_s = p.op_window_h_per_day * SECONDS_PER_HOUR;
    let r = p.operation_time_fraction;
    let denom = p.forward_leg_s() + r * p.setup_time_s;
    if window_s <= 0.0 || denom <= 0.0 {
        return 0.0;
    }
    r * window_s / denom
}

/// Battery band plus one mean day of harvest, Wh.
pub fn daily_energy_budget_wh(p: &ScenarioParams) -> f64 {
    p.battery_kwh * 1000.0 * (p.soc_max - p.soc_min) + daily_harvest_wh(p)
}

pub fn daily_harvest_wh(p: &ScenarioParams) -> f64 {
    let pv = p.pv_yield_fraction * p.pv_area_m2 * p.solar_power_w_m2 * p.solar_hours_per_day;
    let wind = p.wind_rated_w * p.wind_capacity_factor * 24.0;
    pv + wind
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Throughput {
    pub time_limited_swept_dec: f64,
    pub energy_limited_swept_dec: f64,
    /// Field decares per operating day.
    pub field_dec: f64,
}

impl Throughput {
    pub fn swept_dec(&self) -> f64 {
        self.time_limited_swept_dec.min(self.energy_limited_swept_dec)
    }

    pub fn energy_limited(&self) -> bool {
        self.energy_limited_swept_dec < self.time_limited_swept_dec
    }
}

pub fn daily_throughput(p: &ScenarioParams) -> Result<Throughput> {
    let e_dec = energy_per_decare(p)?;
    let time_limited = rounds_per_day(p) * p.round_area_m2() / M2_PER_DECARE;
    let energy_limited = if e_dec > 0.0 {
        daily_energy_budget_wh(p) / e_dec
    } else {
        f64::INFINITY
    };
    let swept = time_limited.min(energy_limited);
    Ok(Throughput {
        time_limited_swept_dec: time_limited,
        energy_limited_swept_dec: energy_limited,
        field_dec: swept * p.shape_efficiency,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub throughput_decares_per_day: f64,
    pub energy_wh_per_decare: f64,
    pub capex_eur: f64,
    pub simple_payback_months: f64,
    pub surplus_power_w: f64,
}

pub fn run_single(p: &ScenarioParams) -> Result<RunSummary> {
    let e_dec = energy_per_decare(p)?;
    let t = daily_throughput(p)?;
    let capex = p.capex_eur();

    let fuel_savings =
        t.field_dec * p.op_days_per_yr * p.diesel_l_per_decare * p.diesel_price_eur_per_l;
    let simple_payback_months = if fuel_savings > 0.0 {
        capex * (1.0 + p.sales_margin_frac) / fuel_savings * 12.0
    } else {
        f64::INFINITY
    };

    let op_hours = p.op_days_per_yr * p.op_window_h_per_day;
    let load_wh = p.op_days_per_yr * t.swept_dec() * e_dec
        + p.idle_power_w * (HOURS_PER_YEAR - op_hours).max(0.0);
    let harvest_wh = daily_harvest_wh(p) * 365.0;
    let surplus_power_w = (harvest_wh - load_wh) / HOURS_PER_YEAR;

    Ok(RunSummary {
        throughput_decares_per_day: t.field_dec,
        energy_wh_per_decare: e_dec,
        capex_eur: capex,
        simple_payback_months,
        surplus_power_w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_round_energy() {
        let e = round_energy(&ScenarioParams::default()).unwrap();
        assert_relative_eq!(e.mechanical_j, 123_300.0);
        // 246.6 kJ through the chain plus 50 W over a 120 s return leg
        assert_relative_eq!(e.electrical_j, 246_600.0 + 6_000.0);
    }

    #[test]
    fn pure_draft_at_unit_efficiency() {
        let p = ScenarioParams {
            drivetrain_efficiency: 1.0,
            carriage_load_n: 0.0,
            system_travel_load_n: 0.0,
            idle_power_w: 0.0,
            ..Default::default()
        };
        assert_relative_eq!(energy_per_decare(&p).unwrap(), 333.333, epsilon = 1e-3);
    }

    #[test]
    fn time_split_example() {
        let s = daily_time_split(36_000.0, 100.0, 60.0, 0.8).unwrap();
        assert_relative_eq!(s.usable_s, 30_000.0);
        assert_relative_eq!(s.operating_s, 24_000.0);
        assert_relative_eq!(s.travel_s, 6_000.0, epsilon = 1e-9);
        assert!(daily_time_split(3_600.0, 100.0, 60.0, 0.8).is_err());
    }

    #[test]
    fn closed_window_gives_zero() {
        let p = ScenarioParams {
            op_window_h_per_day: 0.0,
            ..Default::default()
        };
        assert_eq!(run_single(&p).unwrap().throughput_decares_per_day, 0.0);
    }

    #[test]
    fn capex_is_exact() {
        assert_eq!(ScenarioParams::default().capex_cents(), 3_557_000);
    }

    #[test]
    fn rounds_fill_operating_share() {
        let p = ScenarioParams::default();
        let n = rounds_per_day(&p);
        let split = daily_time_split(36_000.0, n, p.setup_time_s, 0.8).unwrap();
        assert_relative_eq!(split.operating_s, n * p.forward_leg_s(), max_relative = 1e-12);
    }

    #[test]
    fn overrides() {
        let p = ScenarioParams::from_overrides("draft_load_N = 3000 # heavier\n\nhorizon_yr=20").unwrap();
        assert_eq!(p.draft_load_n, 3000.0);
        assert_eq!(p.horizon_yr, 20);
        assert!(matches!(
            ScenarioParams::from_overrides("bogus = 1"),
            Err(Error::Unknown { .. })
        ));
        assert!(ScenarioParams::from_overrides("drivetrain_efficiency = 0").is_err());
    }
}
