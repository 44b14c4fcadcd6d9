//! Cable statics, drivetrain losses, anchor sizing and motor power.

use serde::Deserialize;

use crate::error::{domain, Result};

pub const GRAVITY: f64 = 9.81;
/// Drum pulley height above ground and the crop clearance it must keep, m.
pub const PULLEY_HEIGHT_M: f64 = 2.0;
pub const CLEARANCE_MIN_M: f64 = 0.5;
/// Midspan sag tolerated by implement depth control, m.
pub const DEPTH_CONTROL_SAG_M: f64 = 0.02;
/// Upper-decile draft of the codesigned library, sizing peak motor power.
pub const REFERENCE_PEAK_DRAFT_N: f64 = 3000.0;

/// Above this value of L/(2a) cosh overflows long before it matters.
const COSH_ARG_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CableSpec {
    pub name: String,
    pub diameter_mm: f64,
    #[serde(rename = "linear_weight_N_per_m")]
    pub linear_weight_n_per_m: f64,
    #[serde(rename = "mbl_N")]
    pub mbl_n: f64,
}

pub fn load_cables(csv_text: &str) -> Result<Vec<CableSpec>> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let c: CableSpec = row?;
        if !(c.linear_weight_n_per_m > 0.0 && c.mbl_n > 0.0) {
            return Err(domain(format!("cable {} needs positive w and MBL", c.name)));
        }
        out.push(c);
    }
    Ok(out)
}

pub fn bundled_cables() -> Vec<CableSpec> {
    load_cables(crate::data::CABLES_CSV).expect("bundled cable table parses")
}

pub fn bundled_cable(name: &str) -> Result<CableSpec> {
    bundled_cables()
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| crate::Error::Unknown {
            kind: "cable",
            name: name.to_string(),
        })
}

fn check_sag_inputs(w: f64, span: f64, tension: f64) -> Result<()> {
    if !(tension > 0.0) {
        return Err(domain(format!("horizontal tension must be positive, got {tension}")));
    }
    if !(w >= 0.0) || !(span > 0.0) {
        return Err(domain("need w >= 0 and span > 0"));
    }
    Ok(())
}

/// Midspan sag of a level catenary. Returns +inf once cosh would overflow.
pub fn catenary_sag_exact(w: f64, span: f64, tension: f64) -> Result<f64> {
    check_sag_inputs(w, span, tension)?;
    if w == 0.0 {
        return Ok(0.0);
    }
    let a = tension / w;
    let x = span / (2.0 * a);
    if x > COSH_ARG_LIMIT {
        return Ok(f64::INFINITY);
    }
    // a(cosh x - 1) = 2a sinh²(x/2), which keeps precision at small x
    let s = (x / 2.0).sinh();
    Ok(2.0 * a * s * s)
}

pub fn catenary_sag_parabolic(w: f64, span: f64, tension: f64) -> Result<f64> {
    check_sag_inputs(w, span, tension)?;
    Ok(w * span * span / (8.0 * tension))
}

/// Smallest horizontal tension whose exact sag fits inside `budget`.
pub fn min_tension_for_sag(w: f64, span: f64, budget: f64) -> Result<f64> {
    if !(budget > 0.0) {
        return Err(domain(format!("sag budget must be positive, got {budget}")));
    }
    if !(w > 0.0) || !(span > 0.0) {
        return Err(domain("need w > 0 and span > 0"));
    }
    let mut lo = w * span / 1e6;
    let mut hi = 1e7;
    if catenary_sag_exact(w, span, hi)? > budget {
        return Err(domain(format!(
            "sag budget {budget} m unreachable below {hi} N"
        )));
    }
    if catenary_sag_exact(w, span, lo)? <= budget {
        return Ok(lo);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if catenary_sag_exact(w, span, mid)? > budget {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-9 * hi {
            break;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensionRegime {
    DraftBound,
    SagBound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensionBalance {
    pub regime: TensionRegime,
    pub main_tension_n: f64,
    pub anchor_tension_n: f64,
}

/// The cable must carry the draft and also hang clear of the crop.
pub fn tension_balance(
    draft_n: f64,
    cable: &CableSpec,
    span: f64,
    pulley_height_m: f64,
    clearance_min_m: f64,
) -> Result<TensionBalance> {
    let budget = pulley_height_m - clearance_min_m;
    if !(budget > 0.0) {
        return Err(domain(format!(
            "pulley height {pulley_height_m} m leaves no clearance above {clearance_min_m} m"
        )));
    }
    let w = cable.linear_weight_n_per_m;
    let draft_ok = draft_n > 0.0 && catenary_sag_exact(w, span, draft_n)? <= budget;
    if draft_ok {
        return Ok(TensionBalance {
            regime: TensionRegime::DraftBound,
            main_tension_n: draft_n,
            anchor_tension_n: draft_n,
        });
    }
    let t = min_tension_for_sag(w, span, budget)?.max(draft_n);
    Ok(TensionBalance {
        regime: TensionRegime::SagBound,
        main_tension_n: t,
        anchor_tension_n: t,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivetrainChain {
    pub motor_eff: f64,
    pub inverter_eff: f64,
    pub gearbox_eff: f64,
    pub drum_eff: f64,
    pub pulley_eff: f64,
    pub cable_eff: f64,
}

impl DrivetrainChain {
    pub fn baseline() -> Self {
        Self {
            motor_eff: 0.85,
            inverter_eff: 0.92,
            gearbox_eff: 0.88,
            drum_eff: 0.88,
            pulley_eff: 0.90,
            cable_eff: 0.92,
        }
    }

    pub fn premium() -> Self {
        Self {
            motor_eff: 0.93,
            inverter_eff: 0.96,
            gearbox_eff: 0.95,
            drum_eff: 0.95,
            pulley_eff: 0.95,
            cable_eff: 0.97,
        }
    }

    pub fn components(&self) -> [f64; 6] {
        [
            self.motor_eff,
            self.inverter_eff,
            self.gearbox_eff,
            self.drum_eff,
            self.pulley_eff,
            self.cable_eff,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if self.components().iter().all(|e| *e > 0.0 && *e <= 1.0) {
            Ok(())
        } else {
            Err(domain("every drivetrain stage efficiency must lie in (0, 1]"))
        }
    }
}

pub fn chain_efficiency(chain: &DrivetrainChain) -> f64 {
    chain.components().iter().product()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorEnvelope {
    pub per_auger_capacity_n: f64,
    pub safety_factor: f64,
    pub installed_augers: u32,
}

impl AnchorEnvelope {
    /// Loose sand, free head, strict deflection limit.
    pub fn loose_sand() -> Self {
        Self {
            per_auger_capacity_n: 400.0,
            safety_factor: 1.15,
            installed_augers: 9,
        }
    }

    /// Medium-dense sand, fixed head.
    pub fn medium_dense() -> Self {
        Self {
            per_auger_capacity_n: 2000.0,
            safety_factor: 1.15,
            installed_augers: 9,
        }
    }

    pub fn required(&self, reaction_n: f64) -> u32 {
        augers_required(reaction_n, self.per_auger_capacity_n, self.safety_factor)
    }

    /// Largest reaction the installed cluster resists.
    pub fn ceiling_n(&self) -> f64 {
        self.installed_augers as f64 * self.per_auger_capacity_n / self.safety_factor
    }
}

pub fn augers_required(reaction_n: f64, per_auger_capacity_n: f64, safety_factor: f64) -> u32 {
    assert!(per_auger_capacity_n > 0.0, "auger capacity must be positive");
    let x = reaction_n.max(0.0) * safety_factor / per_auger_capacity_n;
    // strip rounding noise so exact multiples do not round up
    (x - 1e-9 * x.max(1.0)).ceil().max(0.0) as u32
}

/// Shaft power to pull `force_n` at `speed_kmh` through efficiency `eta`, W.
pub fn motor_power(force_n: f64, speed_kmh: f64, eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(domain(format!("efficiency must be in (0, 1], got {eta}")));
    }
    Ok(force_n * speed_kmh / (3.6 * eta))
}

pub const REGEN_EFFICIENCY: f64 = 0.55;
pub const ROLLING_RESISTANCE: f64 = 0.06;

/// Recoverable energy on a downhill return leg, J.
pub fn regen_energy(mass_kg: f64, slope_rad: f64, distance_m: f64, eta_regen: f64, mu_r: f64) -> f64 {
    let mg = mass_kg * GRAVITY;
    let e = eta_regen * (mg * slope_rad.sin() - mg * slope_rad.cos() * mu_r) * distance_m.max(0.0);
    e.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sag_hand_values() {
        assert_relative_eq!(catenary_sag_exact(1.0, 50.0, 1000.0).unwrap(), 0.312516, epsilon = 1e-6);
        assert_relative_eq!(catenary_sag_parabolic(1.0, 50.0, 1000.0).unwrap(), 0.3125);
        assert_eq!(catenary_sag_parabolic(0.0, 50.0, 1000.0).unwrap(), 0.0);
        assert!(catenary_sag_exact(1.0, 50.0, 0.0).is_err());
        assert!(catenary_sag_exact(1.0, 1000.0, 1.0).unwrap().is_infinite());
    }

    #[test]
    fn inverse_pair() {
        let t = min_tension_for_sag(0.39, 100.0, 0.02).unwrap();
        let s = catenary_sag_exact(0.39, 100.0, t).unwrap();
        assert!((s - 0.02).abs() < 1e-6 && s <= 0.02);
    }

    #[test]
    fn chain_presets() {
        assert_relative_eq!(chain_efficiency(&DrivetrainChain::baseline()), 0.50, epsilon = 0.005);
        assert_relative_eq!(chain_efficiency(&DrivetrainChain::premium()), 0.7425, epsilon = 5e-4);
    }

    #[test]
    fn auger_counts() {
        assert_eq!(augers_required(1800.0, 400.0, 1.15), 6);
        assert_eq!(augers_required(3000.0, 400.0, 1.15), 9);
        assert_eq!(augers_required(14000.0, 400.0, 1.15), 41);
        assert_eq!(augers_required(7250.0, 2000.0, 1.15), 5);
        assert_eq!(augers_required(800.0, 400.0, 1.0), 2);
    }

    #[test]
    fn motor_table() {
        assert_eq!(motor_power(1800.0, 1.5, 0.5).unwrap(), 1500.0);
        assert_eq!(motor_power(3000.0, 1.5, 0.5).unwrap(), 2500.0);
        assert_relative_eq!(motor_power(1800.0, 1.5, 0.71).unwrap(), 1056.34, epsilon = 0.01);
    }

    #[test]
    fn tension_regimes() {
        let dyneema = bundled_cable("dyneema_sk78").unwrap();
        let b = tension_balance(1800.0, &dyneema, 50.0, PULLEY_HEIGHT_M, CLEARANCE_MIN_M).unwrap();
        assert_eq!(b.regime, TensionRegime::DraftBound);
        assert_eq!(b.anchor_tension_n, 1800.0);
        let b = tension_balance(10.0, &dyneema, 50.0, PULLEY_HEIGHT_M, CLEARANCE_MIN_M).unwrap();
        assert_eq!(b.regime, TensionRegime::SagBound);
        assert!(b.main_tension_n > 10.0);
        assert!(tension_balance(1800.0, &dyneema, 50.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn fibre_rope_holds_depth_envelope() {
        let c = bundled_cable("dyneema_sk78").unwrap();
        for span in [25.0, 50.0, 100.0] {
            let s = catenary_sag_exact(c.linear_weight_n_per_m, span, 5000.0).unwrap();
            assert!(s <= DEPTH_CONTROL_SAG_M, "{span} {s}");
        }
    }

    #[test]
    fn regen_hand_value() {
        assert_eq!(regen_energy(250.0, 0.0, 50.0, REGEN_EFFICIENCY, ROLLING_RESISTANCE), 0.0);
        assert_relative_eq!(
            regen_energy(250.0, 0.10, 50.0, REGEN_EFFICIENCY, ROLLING_RESISTANCE),
            2706.73,
            epsilon = 0.01
        );
    }
}
