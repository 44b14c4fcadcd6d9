//! ASABE D497 implement draft, the bundled implement libraries and the
//! stochastic draft sampler.

use rand::Rng;
use serde::Deserialize;

use crate::error::{domain, Error, Result};
use crate::stats::{percentile_sorted, stream_rng};

/// Sampled operating speed band, km/h.
pub const SAMPLE_SPEED_KMH: (f64, f64) = (1.0, 4.0);
/// Half-width of the sampled depth band around the nominal depth, cm.
pub const DEPTH_JITTER_CM: f64 = 5.0;
/// Volumetric moisture band and its reference value.
pub const MOISTURE_BAND: (f64, f64) = (0.12, 0.28);
pub const MOISTURE_REF: f64 = 0.20;
pub const MOISTURE_SLOPE: f64 = 0.8;
pub const DEFAULT_SAMPLES: usize = 5000;
/// Implements spanning the coefficient regimes, for speed-dependence curves.
pub const SPEED_CURVE_IMPLEMENTS: [&str; 3] = ["codesigned_planter_4_row", "narrow_chisel_4_tool", "narrow_ripper_1_shank"];
pub const SPEED_CURVE_DEPTH_CM: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperationClass {
    PrimaryTillage,
    SecondaryTillage,
    Seeding,
    Weeding,
    Spraying,
    Mowing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Library {
    Conventional,
    Codesigned,
    /// Not part of either paired library; used for canonical checks.
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Soil {
    Fine,
    Medium,
    Coarse,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Implement {
    pub name: String,
    pub class: OperationClass,
    pub library: Library,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub width_units: f64,
    /// Nominal working depth; 0 marks draft that does not scale with depth.
    pub depth_cm: f64,
    #[serde(rename = "Fi_fine")]
    pub fi_fine: f64,
    #[serde(rename = "Fi_medium")]
    pub fi_medium: f64,
    #[serde(rename = "Fi_coarse")]
    pub fi_coarse: f64,
    pub v_lo: f64,
    pub v_hi: f64,
    #[serde(default)]
    pub pair: String,
    #[serde(default)]
    pub provenance: String,
}

impl Implement {
    pub fn texture_multiplier(&self, soil: Soil) -> f64 {
        match soil {
            Soil::Fine => self.fi_fine,
            Soil::Medium => self.fi_medium,
            Soil::Coarse => self.fi_coarse,
        }
    }

    pub fn depth_scaled(&self) -> bool {
        self.depth_cm > 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(domain(format!("implement {}: {m}", self.name)));
        if self.a < 0.0 {
            return bad("A must be non-negative");
        }
        if !(self.width_units > 0.0) {
            return bad("width must be positive");
        }
        if self.depth_cm < 0.0 {
            return bad("depth must be non-negative");
        }
        if !(self.v_lo < self.v_hi) {
            return bad("speed range must satisfy lo < hi");
        }
        if [self.fi_fine, self.fi_medium, self.fi_coarse].iter().any(|f| !(*f > 0.0)) {
            return bad("texture multipliers must be positive");
        }
        Ok(())
    }
}

pub fn load_implements(csv_text: &str) -> Result<Vec<Implement>> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let mut out: Vec<Implement> = Vec::new();
    for row in rdr.deserialize() {
        let imp: Implement = row?;
        imp.validate()?;
        if out.iter().any(|o| o.name == imp.name) {
            return Err(domain(format!("duplicate implement {}", imp.name)));
        }
        out.push(imp);
    }
    Ok(out)
}

pub fn bundled_implements() -> Vec<Implement> {
    load_implements(crate::data::IMPLEMENTS_CSV).expect("bundled implement table parses")
}

pub fn library(all: &[Implement], which: Library) -> Vec<Implement> {
    all.iter().filter(|i| i.library == which).cloned().collect()
}

pub fn find<'a>(all: &'a [Implement], name: &str) -> Result<&'a Implement> {
    all.iter().find(|i| i.name == name).ok_or_else(|| Error::Unknown {
        kind: "implement",
        name: name.to_string(),
    })
}

/// D = F_i (A + B v + C v²) W T, with v in km/h and T in cm.
pub fn d497_draft(imp: &Implement, speed_kmh: f64, depth_cm: f64, soil: Soil) -> Result<f64> {
    imp.validate()?;
    if !(speed_kmh >= 0.0) {
        return Err(domain(format!("speed must be non-negative, got {speed_kmh}")));
    }
    if !(depth_cm >= 0.0) {
        return Err(domain(format!("depth must be non-negative, got {depth_cm}")));
    }
    Ok(draft_unchecked(imp, speed_kmh, depth_cm, imp.texture_multiplier(soil)))
}

fn draft_unchecked(imp: &Implement, v: f64, depth_cm: f64, multiplier: f64) -> f64 {
    let t = if imp.depth_scaled() { depth_cm } else { 1.0 };
    multiplier * (imp.a + imp.b * v + imp.c * v * v) * imp.width_units * t
}

/// Speed band actually sampled for an implement.
pub fn sample_speed_band(imp: &Implement) -> (f64, f64) {
    let (lo, hi) = SAMPLE_SPEED_KMH;
    match imp.library {
        Library::Codesigned => (lo.max(imp.v_lo), hi.min(imp.v_hi)),
        _ => (lo, hi),
    }
}

/// Draws `n` draft samples; sample i depends only on (seed, i).
pub fn draft_samples(imp: &Implement, soil: Soil, n: usize, seed: u64) -> Result<Vec<f64>> {
    imp.validate()?;
    let (v_lo, v_hi) = sample_speed_band(imp);
    if !(v_lo < v_hi) {
        return Err(domain(format!("implement {} has an empty sampled speed band", imp.name)));
    }
    let fi = imp.texture_multiplier(soil);
    let out = (0..n as u64)
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let v = rng.random_range(v_lo..v_hi);
            let t = rng
                .random_range(imp.depth_cm - DEPTH_JITTER_CM..imp.depth_cm + DEPTH_JITTER_CM)
                .max(1.0);
            let theta = rng.random_range(MOISTURE_BAND.0..MOISTURE_BAND.1);
            let m = fi * (1.0 + MOISTURE_SLOPE * (theta - MOISTURE_REF));
            draft_unchecked(imp, v, t, m)
        })
        .collect();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DraftDistribution {
    pub implement: String,
    pub p10_n: f64,
    pub p50_n: f64,
    pub p90_n: f64,
    pub sample_count: usize,
}

pub fn sample_draft(imp: &Implement, soil: Soil, n: usize, seed: u64) -> Result<DraftDistribution> {
    if n == 0 {
        return Err(domain("draft sampler needs n >= 1"));
    }
    let mut s = draft_samples(imp, soil, n, seed)?;
    s.sort_by(|a, b| a.total_cmp(b));
    Ok(DraftDistribution {
        implement: imp.name.clone(),
        p10_n: percentile_sorted(&s, 10.0),
        p50_n: percentile_sorted(&s, 50.0),
        p90_n: percentile_sorted(&s, 90.0),
        sample_count: n,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionRow {
    pub class: OperationClass,
    pub conventional: DraftDistribution,
    pub codesigned: DraftDistribution,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub rows: Vec<ReductionRow>,
    pub median_ratio: f64,
}

/// Pairs each codesigned implement with the conventional one it replaces.
pub fn library_reduction_report(
    conventional: &[Implement],
    codesigned: &[Implement],
    soil: Soil,
    n: usize,
    seed: u64,
) -> Result<ReductionReport> {
    let mut rows = Vec::new();
    let mut used = vec![false; conventional.len()];
    for cod in codesigned {
        let idx = conventional
            .iter()
            .position(|c| c.name == cod.pair)
            .ok_or_else(|| domain(format!("codesigned {} has no conventional pair", cod.name)))?;
        if used[idx] {
            return Err(domain(format!("conventional {} paired twice", cod.pair)));
        }
        used[idx] = true;
        let conv = &conventional[idx];
        if conv.class != cod.class {
            return Err(domain(format!("{} and {} differ in operation", conv.name, cod.name)));
        }
        let c = sample_draft(conv, soil, n, seed)?;
        let d = sample_draft(cod, soil, n, seed)?;
        let ratio = d.p50_n / c.p50_n;
        rows.push(ReductionRow {
            class: cod.class,
            conventional: c,
            codesigned: d,
            ratio,
        });
    }
    if let Some(i) = used.iter().position(|u| !u) {
        return Err(domain(format!("conventional {} has no codesigned pair", conventional[i].name)));
    }
    if rows.is_empty() {
        return Err(domain("empty implement libraries"));
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let median_ratio = crate::stats::median(&ratios);
    Ok(ReductionReport { rows, median_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lib() -> Vec<Implement> {
        bundled_implements()
    }

    #[test]
    fn moldboard_canonical_value() {
        let all = lib();
        let plow = find(&all, "moldboard_plow").unwrap();
        // (652 + 5.1·64) N/(m·cm) over 1 m at 15 cm in fine soil
        assert_relative_eq!(d497_draft(plow, 8.0, 15.0, Soil::Fine).unwrap(), 14_676.0, max_relative = 0.01);
    }

    #[test]
    fn zero_speed_keeps_static_term() {
        let all = lib();
        let plow = find(&all, "moldboard_plow").unwrap();
        assert_relative_eq!(d497_draft(plow, 0.0, 10.0, Soil::Fine).unwrap(), 6520.0);
        assert!(d497_draft(plow, -1.0, 10.0, Soil::Fine).is_err());
    }

    #[test]
    fn planter_is_speed_independent() {
        let all = lib();
        let p = find(&all, "codesigned_planter_4_row").unwrap();
        let a = d497_draft(p, 1.0, 5.0, Soil::Medium).unwrap();
        let b = d497_draft(p, 9.0, 5.0, Soil::Medium).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampler_is_reproducible_and_ordered() {
        let all = lib();
        let imp = find(&all, "narrow_sweep_1_5m").unwrap();
        let a = sample_draft(imp, Soil::Medium, 500, 7).unwrap();
        let b = sample_draft(imp, Soil::Medium, 500, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.p10_n <= a.p50_n && a.p50_n <= a.p90_n);
        let one = sample_draft(imp, Soil::Medium, 1, 7).unwrap();
        assert_eq!(one.p10_n, one.p90_n);
    }

    #[test]
    fn identical_libraries_give_unit_ratios() {
        let all = lib();
        let conv = library(&all, Library::Conventional);
        let mut twin = conv.clone();
        for t in &mut twin {
            t.pair = t.name.clone();
            t.library = Library::Codesigned;
            t.v_lo = 1.0;
            t.v_hi = 4.0;
        }
        let r = library_reduction_report(&conv, &twin, Soil::Medium, 200, 3).unwrap();
        assert!(r.rows.iter().all(|row| (row.ratio - 1.0).abs() < 1e-12));
    }

    #[test]
    fn unpaired_library_is_rejected() {
        let all = lib();
        let conv = library(&all, Library::Conventional);
        let mut cod = library(&all, Library::Codesigned);
        cod.pop();
        assert!(library_reduction_report(&conv, &cod, Soil::Medium, 10, 1).is_err());
    }
}
