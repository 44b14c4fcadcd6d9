//! Runs every example's entry point.

mod cable_statics {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cable_statics.rs"));
}
mod compaction_compare {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/compaction_compare.rs"));
}
mod diesel_economics {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/diesel_economics.rs"));
}
mod draft_library {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/draft_library.rs"));
}
mod field_planning {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/field_planning.rs"));
}
mod operating_envelope {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/operating_envelope.rs"));
}
mod reference_scenario {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/reference_scenario.rs"));
}
mod regenerate_outputs {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/regenerate_outputs.rs"));
}
mod site_energy {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/site_energy.rs"));
}
mod uncertainty {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/uncertainty.rs"));
}
mod variants {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/variants.rs"));
}

#[test]
fn example_cable_statics() {
    cable_statics::run_example().unwrap();
}

#[test]
fn example_compaction_compare() {
    compaction_compare::run_example().unwrap();
}

#[test]
fn example_diesel_economics() {
    diesel_economics::run_example().unwrap();
}

#[test]
fn example_draft_library() {
    draft_library::run_example().unwrap();
}

#[test]
fn example_field_planning() {
    field_planning::run_example().unwrap();
}

#[test]
fn example_operating_envelope() {
    operating_envelope::run_example().unwrap();
}

#[test]
fn example_reference_scenario() {
    reference_scenario::run_example().unwrap();
}

#[test]
fn example_regenerate_outputs() {
    regenerate_outputs::run_example().unwrap();
}

#[test]
fn example_site_energy() {
    site_energy::run_example().unwrap();
}

#[test]
fn example_uncertainty() {
    uncertainty::run_example().unwrap();
}

#[test]
fn example_variants() {
    variants::run_example().unwrap();
}
