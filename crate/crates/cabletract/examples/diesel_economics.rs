// Discounted cash flow against a diesel tractor across farm sizes, and
// lifecycle CO2 per hectare-year.

use cabletract::econ;
use cabletract::ScenarioParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = ScenarioParams::default();
    println!("capex {:.0} EUR", p.capex_eur());
    for r in econ::farm_size_sweep(&p, &econ::FARM_SIZES_HA, &econ::DISCOUNT_RATES)? {
        println!(
            "{:>4} ha  NPV 5/8/12%: {:>7.0} {:>7.0} {:>7.0}  payback@8% {:.2} yr",
            r.farm_ha,
            r.npv_eur[0],
            r.npv_eur[1],
            r.npv_eur[2],
            r.payback_yr_at_8pct.unwrap_or(f64::INFINITY)
        );
    }
    for r in econ::lifecycle_co2(&p, 25.0)?.rows {
        println!("{:18} {:.1} kg CO2e/ha-yr", r.vehicle, r.total_kg_per_ha_yr);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
