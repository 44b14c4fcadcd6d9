//! Joint uncertainty over 20 scenario inputs: Monte Carlo percentiles,
//! Saltelli cross-sampled Sobol indices and a one-at-a-time NPV tornado.
//!
//! Samples come from an Owen-scrambled Sobol sequence so results depend
//! only on the seed and the sample index, never on thread scheduling.

use rayon::prelude::*;
use serde::Deserialize;

use crate::econ::gross_savings_npv;
use crate::error::{domain, Result};
use crate::scenario::{run_single, RunSummary, ScenarioParams};
use crate::stats::{mean, percentile};

pub const OUTPUT_NAMES: [&str; 4] = [
    "throughput_dec_per_day",
    "energy_wh_per_decare",
    "payback_months",
    "surplus_power_w",
];
pub const CAPEX_SCALE_KEY: &str = "capex_scale";
pub const DEFAULT_MC_SAMPLES: usize = 1000;
pub const DEFAULT_SOBOL_BASE: usize = 256;

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct UncertainParameter {
    /// Override-file key, or `capex_scale` for a multiplier on every capex line.
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub units: String,
}

impl UncertainParameter {
    fn new(name: &str, lower: f64, upper: f64, units: &str) -> Self {
        Self {
            name: name.to_string(),
            lower,
            upper,
            units: units.to_string(),
        }
    }

    pub fn at(&self, u: f64) -> f64 {
        self.lower + u * (self.upper - self.lower)
    }
}

pub fn default_problem() -> Vec<UncertainParameter> {
    use UncertainParameter as U;
    vec![
        U::new("drivetrain_efficiency", 0.35, 0.65, "-"),
        U::new("draft_load_N", 1500.0, 4500.0, "N"),
        U::new("shape_efficiency", 0.55, 1.0, "-"),
        U::new("pv_area_m2", 10.0, 30.0, "m2"),
        U::new("battery_kWh", 5.0, 25.0, "kWh"),
        U::new("diesel_price_eur_per_l", 0.8, 1.8, "EUR/L"),
        U::new("diesel_l_per_decare", 1.0, 3.0, "L/decare"),
        U::new("strip_width_m", 1.5, 3.0, "m"),
        U::new("solar_power_W_m2", 800.0, 1100.0, "W/m2"),
        U::new("solar_hours_per_day", 3.5, 6.0, "h"),
        U::new("op_days_per_yr", 120.0, 220.0, "d"),
        U::new("carriage_load_N", 400.0, 900.0, "N"),
        U::new(CAPEX_SCALE_KEY, 0.8, 1.3, "-"),
        U::new("wind_rated_W", 300.0, 900.0, "W"),
        U::new("span_m", 30.0, 80.0, "m"),
        U::new("system_travel_load_N", 1500.0, 3000.0, "N"),
        U::new("setup_time_s", 30.0, 180.0, "s"),
        U::new("operating_speed_kmh", 1.0, 2.5, "km/h"),
        U::new("op_window_h_per_day", 8.0, 12.0, "h"),
        U::new("operation_time_fraction", 0.7, 0.9, "-"),
    ]
}

pub fn validate_problem(problem: &[UncertainParameter]) -> Result<()> {
    if problem.is_empty() {
        return Err(domain("uncertainty problem is empty"));
    }
    let probe = ScenarioParams::default();
    for u in problem {
        if !(u.lower < u.upper) {
            return Err(domain(format!("{}: need lower < upper", u.name)));
        }
        if u.name != CAPEX_SCALE_KEY && probe.get(&u.name).is_none() {
            return Err(domain(format!("{}: not a scenario parameter", u.name)));
        }
    }
    Ok(())
}

/// Reads `name,lower,upper,units` rows.
pub fn load_problem(csv_text: &str) -> Result<Vec<UncertainParameter>> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let problem = rdr.deserialize().collect::<std::result::Result<Vec<UncertainParameter>, _>>()?;
    validate_problem(&problem)?;
    Ok(problem)
}

/// Parameters with each named input set to its value in `x`.
pub fn apply_sample(reference: &ScenarioParams, problem: &[UncertainParameter], x: &[f64]) -> Result<ScenarioParams> {
    let mut p = reference.clone();
    for (u, v) in problem.iter().zip(x) {
        if u.name == CAPEX_SCALE_KEY {
            p.scale_capex_to(reference.capex_eur() * v)?;
        } else {
            p.set(&u.name, &v.to_string())?;
        }
    }
    p.validate()?;
    Ok(p)
}

pub fn outputs(r: &RunSummary) -> [f64; 4] {
    [
        r.throughput_decares_per_day,
        r.energy_wh_per_decare,
        r.simple_payback_months,
        r.surplus_power_w,
    ]
}

fn seed32(seed: u64) -> u32 {
    (seed ^ (seed >> 32)) as u32
}

/// Point `i` of a scrambled Sobol sequence in [0,1)^dims.
pub fn qmc_point(i: usize, dims: usize, seed: u64) -> Vec<f64> {
    assert!(dims as u32 <= sobol_burley::NUM_DIMENSIONS, "too many dimensions");
    (0..dims)
        .map(|d| sobol_burley::sample(i as u32, d as u32, seed32(seed)) as f64)
        .collect()
}

fn scale_point(problem: &[UncertainParameter], u: &[f64]) -> Vec<f64> {
    problem.iter().zip(u).map(|(p, u)| p.at(*u)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Percentiles {
    pub p10: f64,
    pub p50: f64,
    pub p90: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McResult {
    pub inputs: Vec<Vec<f64>>,
    pub outputs: Vec<[f64; 4]>,
    pub percentiles: [Percentiles; 4],
}

impl McResult {
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.outputs.iter().map(|o| o[k]).collect()
    }
}

pub fn monte_carlo(reference: &ScenarioParams, problem: &[UncertainParameter], n: usize, seed: u64) -> Result<McResult> {
    validate_problem(problem)?;
    if n < 2 {
        return Err(domain("Monte Carlo needs at least two samples"));
    }
    let inputs: Vec<Vec<f64>> = (0..n).map(|i| scale_point(problem, &qmc_point(i, problem.len(), seed))).collect();
    let outs: Vec<[f64; 4]> = inputs
        .par_iter()
        .map(|x| Ok(outputs(&run_single(&apply_sample(reference, problem, x)?)?)))
        .collect::<Result<_>>()?;
    let pct = |k: usize| {
        let col: Vec<f64> = outs.iter().map(|o| o[k]).collect();
        Percentiles {
            p10: percentile(&col, 10.0),
            p50: percentile(&col, 50.0),
            p90: percentile(&col, 90.0),
        }
    };
    Ok(McResult {
        inputs,
        percentiles: [pct(0), pct(1), pct(2), pct(3)],
        outputs: outs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SobolResult {
    pub parameters: Vec<String>,
    pub outputs: Vec<String>,
    /// `s1[param][output]`, unclipped.
    pub s1: Vec<Vec<f64>>,
    pub st: Vec<Vec<f64>>,
    pub n_base: usize,
    pub evaluations: usize,
}

/// Indexed `[input][output]`.
pub type IndexTable = Vec<Vec<f64>>;

pub fn saltelli_evaluations(n_base: usize, k: usize) -> usize {
    n_base * (2 * k + 2)
}

/// Saltelli cross-sampling over `bounds`: rows A, B, then AB_i and BA_i
/// for each input. S1 uses the Saltelli 2010 estimator and ST the Jansen
/// form, each averaged over the A-based and B-based halves.
pub fn saltelli<F>(bounds: &[(f64, f64)], n_base: usize, seed: u64, n_out: usize, f: F) -> Result<(IndexTable, IndexTable, usize)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let k = bounds.len();
    if n_base < 2 || !n_base.is_power_of_two() {
        return Err(domain("Sobol base sample count must be a power of two"));
    }
    if k == 0 || 2 * k > sobol_burley::NUM_DIMENSIONS as usize {
        return Err(domain("unsupported Sobol dimension"));
    }
    let scale = |u: &[f64]| -> Vec<f64> { bounds.iter().zip(u).map(|((lo, hi), u)| lo + u * (hi - lo)).collect() };
    let mut a = Vec::with_capacity(n_base);
    let mut b = Vec::with_capacity(n_base);
    for i in 0..n_base {
        let u = qmc_point(i, 2 * k, seed);
        a.push(scale(&u[..k]));
        b.push(scale(&u[k..]));
    }
    // row order: A, B, AB_0..AB_k-1, BA_0..BA_k-1, each block n_base long
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(saltelli_evaluations(n_base, k));
    rows.extend(a.iter().cloned());
    rows.extend(b.iter().cloned());
    for (src, dst) in [(&b, &a), (&a, &b)] {
        for i in 0..k {
            for j in 0..n_base {
                let mut r = dst[j].clone();
                r[i] = src[j][i];
                rows.push(r);
            }
        }
    }
    let evals = rows.len();
    let y: Vec<Vec<f64>> = rows.par_iter().map(|r| f(r)).collect::<Result<_>>()?;
    if y.iter().any(|o| o.len() != n_out) {
        return Err(domain("model returned the wrong number of outputs"));
    }

    let block = |blk: usize, o: usize| -> Vec<f64> { y[blk * n_base..(blk + 1) * n_base].iter().map(|v| v[o]).collect() };
    let mut s1 = vec![vec![0.0; n_out]; k];
    let mut st = vec![vec![0.0; n_out]; k];
    for o in 0..n_out {
        let fa = block(0, o);
        let fb = block(1, o);
        let all: Vec<f64> = fa.iter().chain(&fb).copied().collect();
        let m = mean(&all);
        let var = all.iter().map(|v| (v - m).powi(2)).sum::<f64>() / all.len() as f64;
        if !(var > 0.0) {
            continue;
        }
        for i in 0..k {
            let fab = block(2 + i, o);
            let fba = block(2 + k + i, o);
            let n = n_base as f64;
            let mut s1_sum = 0.0;
            let mut st_sum = 0.0;
            for j in 0..n_base {
                s1_sum += fb[j] * (fab[j] - fa[j]) + fa[j] * (fba[j] - fb[j]);
                st_sum += (fa[j] - fab[j]).powi(2) + (fb[j] - fba[j]).powi(2);
            }
            s1[i][o] = s1_sum / (2.0 * n) / var;
            st[i][o] = st_sum / (2.0 * n) / (2.0 * var);
        }
    }
    Ok((s1, st, evals))
}

pub fn sobol_indices(reference: &ScenarioParams, problem: &[UncertainParameter], n_base: usize, seed: u64) -> Result<SobolResult> {
    validate_problem(problem)?;
    let bounds: Vec<(f64, f64)> = problem.iter().map(|u| (u.lower, u.upper)).collect();
    let (s1, st, evaluations) = saltelli(&bounds, n_base, seed, OUTPUT_NAMES.len(), |x| {
        Ok(outputs(&run_single(&apply_sample(reference, problem, x)?)?).to_vec())
    })?;
    debug_assert_eq!(evaluations, saltelli_evaluations(n_base, problem.len()));
    Ok(SobolResult {
        parameters: problem.iter().map(|u| u.name.clone()).collect(),
        outputs: OUTPUT_NAMES.iter().map(|s| s.to_string()).collect(),
        s1,
        st,
        n_base,
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TornadoBar {
    pub parameter: String,
    pub reference_value: f64,
    pub lower: f64,
    pub upper: f64,
    pub npv_lo: f64,
    pub npv_hi: f64,
}

impl TornadoBar {
    pub fn swing(&self) -> f64 {
        (self.npv_hi - self.npv_lo).abs()
    }

    /// True when one end of the band is the reference value itself.
    pub fn one_sided(&self) -> bool {
        self.reference_value == self.lower || self.reference_value == self.upper
    }
}

fn reference_value(p: &ScenarioParams, name: &str) -> f64 {
    if name == CAPEX_SCALE_KEY {
        1.0
    } else {
        p.get(name).unwrap_or(f64::NAN)
    }
}

/// Baseline gross-savings NPV and bars sorted by swing, widest first.
pub fn tornado(reference: &ScenarioParams, problem: &[UncertainParameter]) -> Result<(f64, Vec<TornadoBar>)> {
    for u in problem {
        if u.lower > u.upper {
            return Err(domain(format!("{}: need lower <= upper", u.name)));
        }
    }
    let rate = reference.discount_rate;
    let baseline = gross_savings_npv(reference, rate)?;
    let mut bars: Vec<TornadoBar> = problem
        .par_iter()
        .map(|u| {
            let at = |v: f64| -> Result<f64> {
                gross_savings_npv(&apply_sample(reference, std::slice::from_ref(u), &[v])?, rate)
            };
            Ok(TornadoBar {
                parameter: u.name.clone(),
                reference_value: reference_value(reference, &u.name),
                lower: u.lower,
                upper: u.upper,
                npv_lo: at(u.lower)?,
                npv_hi: at(u.upper)?,
            })
        })
        .collect::<Result<_>>()?;
    bars.sort_by(|a, b| b.swing().total_cmp(&a.swing()));
    Ok((baseline, bars))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_count() {
        assert_eq!(saltelli_evaluations(256, 20), 10_752);
        assert_eq!(default_problem().len(), 20);
        validate_problem(&default_problem()).unwrap();
    }

    #[test]
    fn base_must_be_power_of_two() {
        assert!(saltelli(&[(0.0, 1.0)], 100, 1, 1, |x| Ok(vec![x[0]])).is_err());
    }

    #[test]
    fn reference_inside_bands() {
        let p = ScenarioParams::default();
        for u in default_problem() {
            let v = reference_value(&p, &u.name);
            assert!(u.lower <= v && v <= u.upper, "{}", u.name);
        }
    }

    #[test]
    fn qmc_is_seeded() {
        assert_eq!(qmc_point(5, 3, 42), qmc_point(5, 3, 42));
        assert_ne!(qmc_point(5, 3, 42), qmc_point(5, 3, 43));
    }
}
