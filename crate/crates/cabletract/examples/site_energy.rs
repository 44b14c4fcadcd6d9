// Synthesises a weather year for one site and runs the hourly
// PV/wind/battery dispatch. Pass a site name as the first argument.

use cabletract::climate::{bundled_site, synthesize_year};
use cabletract::powersim::{self, Battery, DutyCycle, PowerPlant};
use cabletract::scenario::energy_per_decare;
use cabletract::ScenarioParams;

pub fn run_site(name: &str) -> Result<(), Box<dyn std::error::Error>> {
    let site = bundled_site(name)?;
    let w = synthesize_year(&site, 42)?;
    let (plant, batt, duty) = (PowerPlant::default(), Battery::default(), DutyCycle::default());
    let ledger = powersim::simulate_year(&w, &plant, &batt, &duty)?;
    println!(
        "{}: GHI {:.0} kWh/m2 (published {:.0}), PV {:.0} kWh, wind {:.0} kWh, grid {:.0} kWh over {} h",
        site.name,
        w.annual_ghi_kwh_m2(),
        site.published_ghi,
        ledger.pv_kwh(),
        ledger.wind_kwh(),
        ledger.grid_kwh(),
        ledger.grid_hours()
    );
    let cov = powersim::daily_coverage_stats(&ledger, energy_per_decare(&ScenarioParams::default())?)?;
    println!("off-grid decares/day P10 {:.1} P50 {:.1} P90 {:.1}", cov.p10, cov.p50, cov.p90);
    let start = powersim::brightest_week_start(&w);
    println!("brightest week from day {start}: grid import {:.0} Wh", powersim::grid_import_wh(&ledger, start, 7));
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    run_site("konya")
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    match std::env::args().nth(1) {
        Some(s) => run_site(&s),
        None => run_example(),
    }
}
