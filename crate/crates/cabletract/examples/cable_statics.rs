// Cable sag, tension regime, anchor count and motor power at the
// reference operating point.

use cabletract::physics::{self, AnchorEnvelope, DrivetrainChain};
use cabletract::ScenarioParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = ScenarioParams::default();
    for c in physics::bundled_cables() {
        let b = physics::tension_balance(p.draft_load_n, &c, p.span_m, physics::PULLEY_HEIGHT_M, physics::CLEARANCE_MIN_M)?;
        let sag = physics::catenary_sag_exact(c.linear_weight_n_per_m, p.span_m, b.main_tension_n)?;
        let t2cm = physics::min_tension_for_sag(c.linear_weight_n_per_m, p.span_m, physics::DEPTH_CONTROL_SAG_M)?;
        println!(
            "{:16} {:?} T={:.0} N  sag={:.3} m  T for 2 cm sag={:.0} N",
            c.name, b.regime, b.main_tension_n, sag, t2cm
        );
    }

    for (name, chain) in [("baseline", DrivetrainChain::baseline()), ("premium", DrivetrainChain::premium())] {
        let eta = physics::chain_efficiency(&chain);
        let w = physics::motor_power(p.draft_load_n, p.operating_speed_kmh, eta)?;
        println!("{name:8} chain eta={eta:.3} continuous motor {w:.0} W");
    }

    let env = AnchorEnvelope::medium_dense();
    for r in [1800.0, 3000.0, 7250.0] {
        println!("reaction {r:>6.0} N -> {} augers (ceiling {:.0} N)", env.required(r), env.ceiling_n());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
