// Monte Carlo percentiles, Sobol indices and the NPV tornado over the
// 20-parameter problem.

use cabletract::uq;
use cabletract::ScenarioParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = ScenarioParams::default();
    let problem = uq::default_problem();

    let mc = uq::monte_carlo(&p, &problem, 500, 42)?;
    for (name, q) in uq::OUTPUT_NAMES.iter().zip(&mc.percentiles) {
        println!("{name:24} P10 {:>8.1} P50 {:>8.1} P90 {:>8.1}", q.p10, q.p50, q.p90);
    }

    let s = uq::sobol_indices(&p, &problem, 64, 42)?;
    println!("sobol: {} evaluations", s.evaluations);
    let mut top: Vec<(usize, f64)> = s.st.iter().map(|r| r[0]).enumerate().collect();
    top.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (i, st) in top.iter().take(4) {
        println!("  throughput ST {:22} {st:.2}", s.parameters[*i]);
    }

    let (base, bars) = uq::tornado(&p, &problem)?;
    println!("tornado baseline NPV {base:.0} EUR");
    for b in bars.iter().take(5) {
        println!("  {:22} {:>7.0} .. {:>7.0}", b.parameter, b.npv_lo, b.npv_hi);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
