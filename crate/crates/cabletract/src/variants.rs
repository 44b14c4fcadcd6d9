//! Architectural variants expressed as field deltas over the reference
//! parameters and evaluated through `run_single`.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::scenario::{run_single, CapexItem, RunSummary, ScenarioParams};

pub const REGEN_CAP: f64 = 0.95;
/// Share of return-leg energy recovered.
pub const REGEN_RECOVERY: f64 = 0.35;
pub const RETURN_LEG_SHARE: f64 = 0.5;
pub const SETUP_OVERHEAD_REDUCTION: f64 = 0.6;
pub const GEOMETRIC_LOAD_SPLIT: f64 = 0.707;
pub const PLUS_WIDTH_FACTOR: f64 = 1.5;
pub const PLUS_MAIN_UNITS: i64 = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum Delta {
    Scale { key: &'static str, factor: f64 },
    ScaleCapped { key: &'static str, factor: f64, cap: f64 },
    Set { key: &'static str, value: f64 },
    Capex(Vec<CapexItem>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantSpec {
    pub name: &'static str,
    pub deltas: Vec<Delta>,
}

pub const VARIANT_NAMES: [&str; 3] = ["baseline", "cabletract_plus", "regen_return"];

fn plus_capex(reference: &[CapexItem]) -> Vec<CapexItem> {
    reference
        .iter()
        .filter(|i| i.name != "anchor")
        .map(|i| {
            if i.name == "main_unit" {
                CapexItem {
                    name: "main_unit_x4".to_string(),
                    cents: i.cents * PLUS_MAIN_UNITS,
                }
            } else {
                i.clone()
            }
        })
        .collect()
}

pub fn variant(name: &str, reference: &ScenarioParams) -> Result<VariantSpec> {
    let deltas = match name {
        "baseline" => vec![],
        "cabletract_plus" => vec![
            Delta::Scale {
                key: "setup_time_s",
                factor: 1.0 - SETUP_OVERHEAD_REDUCTION,
            },
            Delta::Scale {
                key: "draft_load_N",
                factor: GEOMETRIC_LOAD_SPLIT,
            },
            Delta::Scale {
                key: "strip_width_m",
                factor: PLUS_WIDTH_FACTOR,
            },
            // four mains square the field, so strips meet no ragged edges
            Delta::Set {
                key: "shape_efficiency",
                value: 1.0,
            },
            Delta::Capex(plus_capex(&reference.capex_items)),
        ],
        "regen_return" => vec![Delta::ScaleCapped {
            key: "drivetrain_efficiency",
            factor: 1.0 / (1.0 - REGEN_RECOVERY * RETURN_LEG_SHARE),
            cap: REGEN_CAP,
        }],
        other => {
            return Err(Error::Unknown {
                kind: "variant",
                name: other.to_string(),
            })
        }
    };
    let name = VARIANT_NAMES.iter().find(|n| **n == name).copied().unwrap_or("baseline");
    Ok(VariantSpec { name, deltas })
}

/// Prior values overwritten by a variant, in application order.
#[derive(Debug, Clone, PartialEq)]
pub struct Undo {
    floats: Vec<(&'static str, f64)>,
    capex: Option<Vec<CapexItem>>,
}

impl Undo {
    pub fn restore(&self, p: &ScenarioParams) -> Result<ScenarioParams> {
        let mut out = p.clone();
        for (key, v) in self.floats.iter().rev() {
            out.set(key, &v.to_string())?;
        }
        if let Some(items) = &self.capex {
            out.capex_items = items.clone();
        }
        Ok(out)
    }
}

fn get(p: &ScenarioParams, key: &str) -> Result<f64> {
    p.get(key).ok_or_else(|| domain(format!("variant touches unknown key {key}")))
}

pub fn apply_with_undo(p: &ScenarioParams, spec: &VariantSpec) -> Result<(ScenarioParams, Undo)> {
    let mut out = p.clone();
    let mut undo = Undo {
        floats: Vec::new(),
        capex: None,
    };
    for d in &spec.deltas {
        match d {
            Delta::Scale { key, factor } => {
                let old = get(&out, key)?;
                undo.floats.push((key, old));
                out.set(key, &(old * factor).to_string())?;
            }
            Delta::ScaleCapped { key, factor, cap } => {
                let old = get(&out, key)?;
                undo.floats.push((key, old));
                out.set(key, &(old * factor).min(*cap).to_string())?;
            }
            Delta::Set { key, value } => {
                undo.floats.push((key, get(&out, key)?));
                out.set(key, &value.to_string())?;
            }
            Delta::Capex(items) => {
                undo.capex.get_or_insert_with(|| out.capex_items.clone());
                out.capex_items = items.clone();
            }
        }
    }
    out.validate()?;
    Ok((out, undo))
}

pub fn apply_variant(p: &ScenarioParams, spec: &VariantSpec) -> Result<ScenarioParams> {
    apply_with_undo(p, spec).map(|(q, _)| q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantRow {
    pub name: &'static str,
    pub params: ScenarioParams,
    pub result: RunSummary,
}

pub fn compare_variants(p: &ScenarioParams) -> Result<Vec<VariantRow>> {
    VARIANT_NAMES
        .par_iter()
        .map(|name| {
            let spec = variant(name, p)?;
            let params = apply_variant(p, &spec)?;
            let result = run_single(&params)?;
            Ok(VariantRow { name, params, result })
        })
        .collect()
}

/// Five comparison metrics, each oriented so larger is better.
pub fn pareto_metrics(r: &RunSummary) -> [f64; 5] {
    [
        r.throughput_decares_per_day,
        -r.energy_wh_per_decare,
        -r.capex_eur,
        -r.simple_payback_months,
        r.surplus_power_w,
    ]
}

pub fn strictly_dominates(a: &RunSummary, b: &RunSummary) -> bool {
    pareto_metrics(a).iter().zip(pareto_metrics(b)).all(|(x, y)| *x > y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn regen_factor_and_cap() {
        let p = ScenarioParams::default();
        let spec = variant("regen_return", &p).unwrap();
        let q = apply_variant(&p, &spec).unwrap();
        assert_relative_eq!(q.drivetrain_efficiency, 0.606, epsilon = 1e-3);
        let hi = ScenarioParams {
            drivetrain_efficiency: 0.9,
            ..Default::default()
        };
        assert_eq!(apply_variant(&hi, &spec).unwrap().drivetrain_efficiency, REGEN_CAP);
    }

    #[test]
    fn plus_capex_is_exact() {
        let p = ScenarioParams::default();
        let q = apply_variant(&p, &variant("cabletract_plus", &p).unwrap()).unwrap();
        assert_eq!(q.capex_cents(), 80_570 * 100);
    }

    #[test]
    fn undo_restores_reference() {
        let p = ScenarioParams::default();
        for name in VARIANT_NAMES {
            let (q, undo) = apply_with_undo(&p, &variant(name, &p).unwrap()).unwrap();
            assert_eq!(undo.restore(&q).unwrap(), p, "{name}");
        }
    }

    #[test]
    fn unknown_variant() {
        assert!(variant("drone_alignment", &ScenarioParams::default()).is_err());
    }
}
