//! Discounted cash flow against a used diesel tractor, farm-size sweeps
//! and amortised life-cycle CO₂.

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{domain, Error, Result};
use crate::scenario::{daily_throughput, energy_per_decare, ScenarioParams};

pub const HOURS_PER_YEAR: f64 = 8760.0;
pub const DECARES_PER_HA: f64 = 10.0;
pub const FARM_SIZES_HA: [f64; 6] = [1.0, 5.0, 10.0, 25.0, 50.0, 100.0];
pub const DISCOUNT_RATES: [f64; 3] = [0.05, 0.08, 0.12];

/// The diesel comparator and the reference harvest site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DieselBaseline {
    pub capex_eur: f64,
    /// Fitted; the only free calibration constant in the cash flow.
    pub maintenance_frac_per_yr: f64,
    /// Annual GHI at the reference site, kWh/m².
    pub reference_ghi_kwh_m2: f64,
}

impl Default for DieselBaseline {
    fn default() -> Self {
        Self {
            capex_eur: 35_000.0,
            maintenance_frac_per_yr: 0.05,
            reference_ghi_kwh_m2: 1696.0,
        }
    }
}

/// Annual PV harvest from the linear yield model, kWh.
pub fn linear_harvest_kwh(alpha: f64, pv_area_m2: f64, ghi_kwh_m2: f64) -> f64 {
    alpha * pv_area_m2 * ghi_kwh_m2
}

/// Working hours a farm needs in a year, clamped to the season.
pub fn operating_hours(p: &ScenarioParams, farm_ha: f64) -> Result<f64> {
    let t = daily_throughput(p)?;
    let season_h = p.op_days_per_yr * p.op_window_h_per_day;
    if t.field_dec <= 0.0 {
        return Ok(season_h);
    }
    Ok((farm_ha * DECARES_PER_HA / t.field_dec * p.op_window_h_per_day).clamp(0.0, season_h))
}

/// Field energy plus idle draw for the rest of the year, kWh.
pub fn annual_demand_kwh(p: &ScenarioParams, farm_ha: f64) -> Result<f64> {
    let e_dec = energy_per_decare(p)?;
    let op_h = operating_hours(p, farm_ha)?;
    Ok(e_dec * farm_ha * DECARES_PER_HA / 1000.0 + p.idle_power_w * (HOURS_PER_YEAR - op_h) / 1000.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnualSavings {
    pub fuel_avoided_eur: f64,
    /// Diesel maintenance minus the cable system's maintenance.
    pub maintenance_delta_eur: f64,
    pub grid_kwh: f64,
    pub grid_cost_eur: f64,
}

impl AnnualSavings {
    pub fn net_eur(&self) -> f64 {
        self.fuel_avoided_eur + self.maintenance_delta_eur - self.grid_cost_eur
    }
}

pub fn annual_savings(p: &ScenarioParams, base: &DieselBaseline, farm_ha: f64, ghi_kwh_m2: f64) -> Result<AnnualSavings> {
    let fuel = farm_ha * DECARES_PER_HA * p.diesel_l_per_decare * p.diesel_price_eur_per_l;
    let maint = base.maintenance_frac_per_yr * base.capex_eur - p.maintenance_frac_per_yr * p.capex_eur();
    let demand = annual_demand_kwh(p, farm_ha)?;
    let harvest = linear_harvest_kwh(p.pv_yield_fraction, p.pv_area_m2, ghi_kwh_m2);
    let grid_kwh = (demand - harvest).max(0.0);
    Ok(AnnualSavings {
        fuel_avoided_eur: fuel,
        maintenance_delta_eur: maint,
        grid_kwh,
        grid_cost_eur: grid_kwh * p.grid_price_eur_per_kwh,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CashflowResult {
    pub npv_eur: f64,
    pub discounted_payback_yr: Option<f64>,
    /// Nominal net savings for years 1..=horizon, replacement included.
    pub annual_net_savings: Vec<f64>,
    pub capex_delta_eur: f64,
}

fn battery_cost_eur(p: &ScenarioParams) -> f64 {
    p.capex_items
        .iter()
        .filter(|i| i.name.starts_with("battery"))
        .map(|i| i.cents)
        .sum::<i64>() as f64
        / 100.0
}

/// Discounts a constant savings stream with a one-off battery charge and
/// finds the first crossing of cumulative discounted savings over the
/// capex delta, interpolated linearly inside the crossing year.
pub fn discounted_cashflow(
    savings_eur: f64,
    capex_delta_eur: f64,
    battery_eur: f64,
    battery_year: u32,
    horizon_yr: u32,
    rate: f64,
) -> Result<CashflowResult> {
    if !(rate >= 0.0) {
        return Err(domain("discount rate must be non-negative"));
    }
    if horizon_yr == 0 {
        return Err(domain("horizon must be at least one year"));
    }
    let mut cum = -capex_delta_eur;
    let mut payback = if cum >= 0.0 { Some(0.0) } else { None };
    let mut flows = Vec::with_capacity(horizon_yr as usize);
    for t in 1..=horizon_yr {
        let flow = savings_eur - if t == battery_year { battery_eur } else { 0.0 };
        let disc = flow / (1.0 + rate).powi(t as i32);
        if payback.is_none() && cum + disc >= 0.0 && disc > 0.0 {
            payback = Some((t - 1) as f64 + (-cum) / disc);
        }
        cum += disc;
        flows.push(flow);
    }
    Ok(CashflowResult {
        npv_eur: cum,
        discounted_payback_yr: payback,
        annual_net_savings: flows,
        capex_delta_eur,
    })
}

pub fn npv_vs_diesel_at(p: &ScenarioParams, base: &DieselBaseline, farm_ha: f64, rate: f64, ghi_kwh_m2: f64) -> Result<CashflowResult> {
    if !(farm_ha > 0.0) {
        return Err(domain("farm size must be positive"));
    }
    let s = annual_savings(p, base, farm_ha, ghi_kwh_m2)?;
    discounted_cashflow(
        s.net_eur(),
        p.capex_eur() - base.capex_eur,
        battery_cost_eur(p),
        p.battery_replacement_yr,
        p.horizon_yr,
        rate,
    )
}

pub fn npv_vs_diesel(p: &ScenarioParams, farm_ha: f64, rate: f64) -> Result<CashflowResult> {
    let base = DieselBaseline::default();
    npv_vs_diesel_at(p, &base, farm_ha, rate, base.reference_ghi_kwh_m2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FarmSizeRow {
    pub farm_ha: f64,
    /// One NPV per swept rate, in sweep order.
    pub npv_eur: Vec<f64>,
    pub payback_yr_at_8pct: Option<f64>,
}

pub fn farm_size_sweep(p: &ScenarioParams, sizes: &[f64], rates: &[f64]) -> Result<Vec<FarmSizeRow>> {
    sizes
        .par_iter()
        .map(|&ha| {
            let npv = rates
                .iter()
                .map(|&r| npv_vs_diesel(p, ha, r).map(|c| c.npv_eur))
                .collect::<Result<Vec<_>>>()?;
            Ok(FarmSizeRow {
                farm_ha: ha,
                npv_eur: npv,
                payback_yr_at_8pct: npv_vs_diesel(p, ha, 0.08)?.discounted_payback_yr,
            })
        })
        .collect()
}

/// NPV of the savings the system earns at its full annual coverage
/// capacity, rather than over a fixed farm.
pub fn gross_savings_npv(p: &ScenarioParams, rate: f64) -> Result<f64> {
    let t = daily_throughput(p)?;
    let capacity_ha = t.field_dec * p.op_days_per_yr / DECARES_PER_HA;
    if capacity_ha <= 0.0 {
        return Ok(-(p.capex_eur() - DieselBaseline::default().capex_eur));
    }
    Ok(npv_vs_diesel(p, capacity_ha, rate)?.npv_eur)
}

#[derive(Debug, Deserialize)]
struct IntensityRow {
    key: String,
    kg_co2e_per_unit: f64,
    #[allow(dead_code)]
    unit: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct BomLine {
    pub vehicle: String,
    pub phase: String,
    pub item: String,
    pub intensity_key: String,
    pub quantity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CarbonData {
    pub intensities: Vec<(String, f64)>,
    pub bom: Vec<BomLine>,
}

impl CarbonData {
    pub fn load(intensity_csv: &str, bom_csv: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(intensity_csv.as_bytes());
        let intensities = rdr
            .deserialize::<IntensityRow>()
            .map(|r| r.map(|r| (r.key, r.kg_co2e_per_unit)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let mut rdr = csv::Reader::from_reader(bom_csv.as_bytes());
        let bom = rdr.deserialize().collect::<std::result::Result<Vec<BomLine>, _>>()?;
        let data = Self { intensities, bom };
        for line in &data.bom {
            data.intensity(&line.intensity_key)?;
        }
        Ok(data)
    }

    pub fn bundled() -> Self {
        Self::load(crate::data::CO2_INTENSITY_CSV, crate::data::BOM_CSV).expect("bundled carbon tables parse")
    }

    pub fn intensity(&self, key: &str) -> Result<f64> {
        self.intensities
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::Unknown {
                kind: "CO2 intensity",
                name: key.to_string(),
            })
    }

    fn phase_total(&self, vehicle: &str, phase: &str) -> Result<f64> {
        self.bom
            .iter()
            .filter(|l| l.vehicle == vehicle && l.phase == phase)
            .map(|l| Ok(l.quantity * self.intensity(&l.intensity_key)?))
            .sum()
    }

    /// Embodied kg CO₂e for one vehicle.
    pub fn embodied_kg(&self, vehicle: &str) -> Result<f64> {
        self.phase_total(vehicle, "embodied")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcaRow {
    pub vehicle: String,
    pub embodied_kg_per_ha_yr: f64,
    pub operational_kg_per_ha_yr: f64,
    pub total_kg_per_ha_yr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcaResult {
    pub rows: Vec<LcaRow>,
}

impl LcaResult {
    pub fn get(&self, vehicle: &str) -> Option<&LcaRow> {
        self.rows.iter().find(|r| r.vehicle == vehicle)
    }
}

pub fn lifecycle_co2_with(p: &ScenarioParams, data: &CarbonData, farm_ha: f64) -> Result<LcaResult> {
    if !(farm_ha > 0.0) {
        return Err(domain("farm size must be positive"));
    }
    let amort = p.horizon_yr as f64 * farm_ha;
    let base = DieselBaseline::default();
    let grid = data.intensity("grid_electricity")?;
    let ct_grid_kwh_ha = annual_savings(p, &base, farm_ha, base.reference_ghi_kwh_m2)?.grid_kwh / farm_ha;
    let diesel_op = p.diesel_l_per_decare * DECARES_PER_HA * data.intensity("diesel_combustion")?;
    let rows = [
        ("cabletract", ct_grid_kwh_ha * grid),
        ("diesel_tractor", diesel_op),
        ("electric_tractor", data.phase_total("electric_tractor", "operational_per_ha")?),
    ]
    .into_iter()
    .map(|(v, op)| {
        let emb = data.embodied_kg(v)? / amort;
        Ok(LcaRow {
            vehicle: v.to_string(),
            embodied_kg_per_ha_yr: emb,
            operational_kg_per_ha_yr: op,
            total_kg_per_ha_yr: emb + op,
        })
    })
    .collect::<Result<Vec<_>>>()?;
    Ok(LcaResult { rows })
}

pub fn lifecycle_co2(p: &ScenarioParams, farm_ha: f64) -> Result<LcaResult> {
    lifecycle_co2_with(p, &CarbonData::bundled(), farm_ha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn harvest_hand_value() {
        assert_relative_eq!(linear_harvest_kwh(0.169, 15.0, 1696.0), 4299.36, epsilon = 1e-9);
        assert_eq!(linear_harvest_kwh(0.169, 0.0, 2000.0), 0.0);
    }

    #[test]
    fn zero_rate_reduces_to_simple_payback() {
        let c = discounted_cashflow(747.2, 570.0, 3420.0, 8, 15, 0.0).unwrap();
        assert_relative_eq!(c.discounted_payback_yr.unwrap(), 570.0 / 747.2, max_relative = 1e-12);
        let sum: f64 = c.annual_net_savings.iter().sum();
        assert_relative_eq!(c.npv_eur, sum - 570.0, max_relative = 1e-12);
    }

    #[test]
    fn never_paying_back() {
        let c = discounted_cashflow(10.0, 1000.0, 0.0, 8, 15, 0.08).unwrap();
        assert!(c.discounted_payback_yr.is_none());
        assert!(c.npv_eur < 0.0);
        assert!(discounted_cashflow(10.0, 0.0, 0.0, 8, 15, -0.1).is_err());
    }

    #[test]
    fn reference_farm() {
        let p = ScenarioParams::default();
        let c = npv_vs_diesel(&p, 25.0, 0.08).unwrap();
        assert_relative_eq!(c.capex_delta_eur, 570.0);
        assert!((c.npv_eur - 3978.0).abs() < 0.05 * 3978.0, "{}", c.npv_eur);
        assert!((c.discounted_payback_yr.unwrap() - 0.82).abs() < 0.1);
    }

    #[test]
    fn lca_sums() {
        let r = lifecycle_co2(&ScenarioParams::default(), 25.0).unwrap();
        for row in &r.rows {
            assert_eq!(row.total_kg_per_ha_yr, row.embodied_kg_per_ha_yr + row.operational_kg_per_ha_yr);
        }
        assert_relative_eq!(r.get("diesel_tractor").unwrap().embodied_kg_per_ha_yr, 320.0 / 375.0);
    }
}
