//! Bundled reference tables, compiled into the library.

pub const CABLES_CSV: &str = include_str!("../data/cables.csv");
pub const IMPLEMENTS_CSV: &str = include_str!("../data/implements.csv");
pub const SITES_CSV: &str = include_str!("../data/sites.csv");
pub const VEHICLES_CSV: &str = include_str!("../data/vehicles.csv");
pub const CO2_INTENSITY_CSV: &str = include_str!("../data/co2_intensity.csv");
pub const BOM_CSV: &str = include_str!("../data/bom.csv");
pub const COMPETITORS_CSV: &str = include_str!("../data/competitors.csv");
