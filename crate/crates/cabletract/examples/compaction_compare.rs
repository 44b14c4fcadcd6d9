// Trafficked area and contact-energy index for a wheeled tractor and
// the cable carriage on a few corpus fields.

use cabletract::compaction::{self, DEFAULT_PASSES};
use cabletract::fields::generate_corpus;
use cabletract::planner;
use cabletract::ScenarioParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = ScenarioParams::default();
    for v in compaction::bundled_vehicles() {
        println!("{:18} mean {:.0} kPa, max {:.0} kPa", v.name, v.mean_pressure_kpa(), v.max_pressure_kpa());
    }
    let corpus = generate_corpus(42, p.span_m)?;
    for f in corpus.iter().step_by(10) {
        let plan = planner::best_orientation(f, p.span_m, p.strip_width_m)?;
        let r = compaction::compare(f, &plan, DEFAULT_PASSES)?;
        println!(
            "{} {:18} tractor {:.1}% carriage {:.2}%  area cut {:.1}%  index x{:.0}",
            r.field_id,
            r.class,
            100.0 * r.tractor.compacted_fraction,
            100.0 * r.carriage.compacted_fraction,
            100.0 * r.area_reduction,
            r.energy_index_reduction
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
