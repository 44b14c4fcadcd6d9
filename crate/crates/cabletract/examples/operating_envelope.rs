// Surplus, NPV and payback over a grid of annual irradiation and farm
// size.

use cabletract::envelope;
use cabletract::stats::median;
use cabletract::ScenarioParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = ScenarioParams::default();
    let env = envelope::sweep(&p)?;
    let pb = env.paybacks();
    println!(
        "{} cells: NPV-positive {:.1}%, off-grid {:.1}%, median payback {:.2} yr",
        env.cells.len(),
        100.0 * env.npv_positive_fraction(),
        100.0 * env.off_grid_fraction(),
        median(&pb)
    );
    for (ha, g) in env.farm_axis.iter().zip(env.breakeven_contour()).step_by(10) {
        match g {
            Some(g) => println!("{ha:>7.1} ha: off-grid from {g:.0} kWh/m2/yr"),
            None => println!("{ha:>7.1} ha: never off-grid"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
