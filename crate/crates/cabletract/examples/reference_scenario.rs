// One deterministic evaluation of the reference scenario, optionally
// with a key=value override file given as the first argument.

use cabletract::{run_single, ScenarioParams};

pub fn run_with(p: &ScenarioParams) -> Result<(), Box<dyn std::error::Error>> {
    let r = run_single(p)?;
    println!("throughput     {:.2} dec/day", r.throughput_decares_per_day);
    println!("energy         {:.1} Wh/decare", r.energy_wh_per_decare);
    println!("capex          {:.0} EUR", r.capex_eur);
    println!("simple payback {:.1} months", r.simple_payback_months);
    println!("surplus        {:.0} W", r.surplus_power_w);
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    run_with(&ScenarioParams::from_overrides("draft_load_N = 2400\n")?)?;
    run_with(&ScenarioParams::default())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    match std::env::args().nth(1) {
        Some(path) => run_with(&ScenarioParams::from_overrides(&std::fs::read_to_string(path)?)?),
        None => run_example(),
    }
}
