//! Operating envelope over annual GHI and farm size using the linear
//! PV harvest model.

use rayon::prelude::*;

use crate::econ::{annual_demand_kwh, npv_vs_diesel_at, DieselBaseline};
use crate::error::{domain, Result};
use crate::scenario::ScenarioParams;

pub use crate::econ::linear_harvest_kwh;

pub const GHI_RANGE: (f64, f64) = (800.0, 2300.0);
pub const FARM_RANGE_HA: (f64, f64) = (1.0, 1000.0);
pub const GRID_N: usize = 60;
pub const ENVELOPE_RATE: f64 = 0.08;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeCell {
    pub ghi_kwh_m2_yr: f64,
    pub farm_ha_per_yr: f64,
    pub annual_demand_kwh: f64,
    pub annual_harvest_kwh: f64,
    pub surplus_kwh: f64,
    /// Share of demand met from the grid.
    pub grid_share: f64,
    pub npv_eur: f64,
    pub payback_yr: Option<f64>,
}

impl EnvelopeCell {
    pub fn off_grid(&self) -> bool {
        self.surplus_kwh >= 0.0
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` log-spaced points with both endpoints included.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect();
    if n > 1 {
        v[0] = lo;
        v[n - 1] = hi;
    }
    v
}

pub fn evaluate_cell(p: &ScenarioParams, ghi: f64, farm_ha: f64) -> Result<EnvelopeCell> {
    let demand = annual_demand_kwh(p, farm_ha)?;
    let harvest = linear_harvest_kwh(p.pv_yield_fraction, p.pv_area_m2, ghi);
    let cf = npv_vs_diesel_at(p, &DieselBaseline::default(), farm_ha, ENVELOPE_RATE, ghi)?;
    Ok(EnvelopeCell {
        ghi_kwh_m2_yr: ghi,
        farm_ha_per_yr: farm_ha,
        annual_demand_kwh: demand,
        annual_harvest_kwh: harvest,
        surplus_kwh: harvest - demand,
        grid_share: if demand > 0.0 { ((demand - harvest) / demand).clamp(0.0, 1.0) } else { 0.0 },
        npv_eur: cf.npv_eur,
        payback_yr: cf.discounted_payback_yr,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub ghi_axis: Vec<f64>,
    pub farm_axis: Vec<f64>,
    /// Row-major: `cells[i_farm * ghi_axis.len() + i_ghi]`.
    pub cells: Vec<EnvelopeCell>,
}

impl Envelope {
    pub fn cell(&self, i_farm: usize, i_ghi: usize) -> &EnvelopeCell {
        &self.cells[i_farm * self.ghi_axis.len() + i_ghi]
    }

    pub fn npv_positive_fraction(&self) -> f64 {
        self.cells.iter().filter(|c| c.npv_eur > 0.0).count() as f64 / self.cells.len() as f64
    }

    pub fn off_grid_fraction(&self) -> f64 {
        self.cells.iter().filter(|c| c.off_grid()).count() as f64 / self.cells.len() as f64
    }

    pub fn paybacks(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.payback_yr.unwrap_or(f64::INFINITY)).collect()
    }

    /// Lowest off-grid GHI per farm-size row, if any cell in the row is off-grid.
    pub fn breakeven_contour(&self) -> Vec<Option<f64>> {
        (0..self.farm_axis.len())
            .map(|r| {
                (0..self.ghi_axis.len())
                    .map(|c| self.cell(r, c))
                    .find(|c| c.off_grid())
                    .map(|c| c.ghi_kwh_m2_yr)
            })
            .collect()
    }

    /// Every row is one off-grid run reaching the high-GHI edge, and the
    /// run start never moves left as farms grow.
    pub fn contour_is_monotone(&self) -> bool {
        let nc = self.ghi_axis.len();
        let mut prev_start = 0;
        for r in 0..self.farm_axis.len() {
            let flags: Vec<bool> = (0..nc).map(|c| self.cell(r, c).off_grid()).collect();
            let start = flags.iter().position(|f| *f).unwrap_or(nc);
            if flags[start..].iter().any(|f| !f) || start < prev_start {
                return false;
            }
            prev_start = start;
        }
        true
    }
}

pub fn sweep_with(p: &ScenarioParams, ghi_axis: Vec<f64>, farm_axis: Vec<f64>) -> Result<Envelope> {
    if ghi_axis.is_empty() || farm_axis.is_empty() {
        return Err(domain("envelope axes must be non-empty"));
    }
    let coords: Vec<(f64, f64)> = farm_axis
        .iter()
        .flat_map(|f| ghi_axis.iter().map(move |g| (*g, *f)))
        .collect();
    let cells = coords
        .par_iter()
        .map(|(g, f)| evaluate_cell(p, *g, *f))
        .collect::<Result<_>>()?;
    Ok(Envelope {
        ghi_axis,
        farm_axis,
        cells,
    })
}

pub fn sweep(p: &ScenarioParams) -> Result<Envelope> {
    sweep_with(
        p,
        linspace(GHI_RANGE.0, GHI_RANGE.1, GRID_N),
        logspace(FARM_RANGE_HA.0, FARM_RANGE_HA.1, GRID_N),
    )
}

/// α that makes the linear model match a simulated annual PV yield.
pub fn refit_alpha(simulated_pv_kwh: f64, pv_area_m2: f64, ghi_kwh_m2: f64) -> Result<f64> {
    if !(pv_area_m2 > 0.0 && ghi_kwh_m2 > 0.0) {
        return Err(domain("refit needs positive area and irradiation"));
    }
    Ok(simulated_pv_kwh / (pv_area_m2 * ghi_kwh_m2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn axes() {
        let f = logspace(1.0, 1000.0, 60);
        assert_eq!(f.len(), 60);
        assert_eq!(f[0], 1.0);
        assert_eq!(f[59], 1000.0);
        assert!(f.windows(2).all(|w| w[1] > w[0]));
        let g = linspace(800.0, 2300.0, 60);
        assert_relative_eq!(g[1] - g[0], 1500.0 / 59.0, max_relative = 1e-12);
    }

    #[test]
    fn small_grid_is_monotone() {
        let p = ScenarioParams::default();
        let e = sweep_with(&p, linspace(800.0, 2300.0, 8), logspace(1.0, 1000.0, 8)).unwrap();
        assert!(e.contour_is_monotone());
        for r in 0..8 {
            for c in 1..8 {
                assert!(e.cell(r, c).surplus_kwh > e.cell(r, c - 1).surplus_kwh);
            }
        }
    }
}
