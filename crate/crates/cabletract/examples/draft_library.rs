// Draft distributions for the conventional and co-designed implement
// libraries on medium soil.

use cabletract::draft::{self, Library, Soil};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let all = draft::bundled_implements();
    let conv = draft::library(&all, Library::Conventional);
    let cod = draft::library(&all, Library::Codesigned);
    let rep = draft::library_reduction_report(&conv, &cod, Soil::Medium, 2000, 42)?;
    for r in &rep.rows {
        println!(
            "{:26} P50 {:>7.0} N -> {:26} P50 {:>6.0} N  ratio {:.2}",
            r.conventional.implement, r.conventional.p50_n, r.codesigned.implement, r.codesigned.p50_n, r.ratio
        );
    }
    println!("median ratio {:.3}", rep.median_ratio);

    let ripper = draft::find(&all, "narrow_ripper_1_shank")?;
    for v in [2.0, 4.0, 6.0, 8.0] {
        println!("ripper at {v} km/h: {:.0} N", draft::d497_draft(ripper, v, 12.0, Soil::Medium)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
