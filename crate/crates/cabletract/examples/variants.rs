// The reference architecture against the four-station and
// regenerative-return variants.

use cabletract::variants;
use cabletract::ScenarioParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rows = variants::compare_variants(&ScenarioParams::default())?;
    let base = rows[0].result;
    for r in &rows {
        let x = r.result;
        println!(
            "{:16} {:>5.1} dec/day ({:.2}x)  {:>4.0} Wh/dec ({:.2}x)  capex {:>6.0}  surplus {:>4.0} W",
            r.name,
            x.throughput_decares_per_day,
            x.throughput_decares_per_day / base.throughput_decares_per_day,
            x.energy_wh_per_decare,
            x.energy_wh_per_decare / base.energy_wh_per_decare,
            x.capex_eur,
            x.surplus_power_w
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
