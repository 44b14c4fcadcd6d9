// Strip decomposition over the synthetic field corpus and the time
// budget for the reference farm.

use cabletract::fields::{generate_corpus, FieldClass};
use cabletract::planner;
use cabletract::stats::median;
use cabletract::ScenarioParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = ScenarioParams::default();
    let corpus = generate_corpus(42, p.span_m)?;
    let plans = planner::plan_corpus(&corpus, p.span_m, p.strip_width_m)?;
    for c in FieldClass::ALL {
        let eta: Vec<f64> = corpus.iter().zip(&plans).filter(|(f, _)| f.class == c).map(|(_, pl)| pl.eta).collect();
        println!("{:18} n={:2} median eta {:.3}", c.as_str(), eta.len(), median(&eta));
    }
    let all: Vec<f64> = plans.iter().map(|pl| pl.eta).collect();
    println!("corpus median eta {:.3}", median(&all));

    let pl = &plans[10];
    println!(
        "{}: best orientation {:.0} deg, {} strips, {} anchor placements",
        pl.field_id, pl.orientation_deg, pl.strips.len(), pl.anchor_placements
    );

    let farm = planner::reference_farm(&corpus)?;
    let t = planner::farm_time_budget(&farm, &p)?;
    println!("farm time budget: operating {:.1} h, setup {:.2} h, travel {:.2} h", t.operating_h, t.setup_h, t.travel_h);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
