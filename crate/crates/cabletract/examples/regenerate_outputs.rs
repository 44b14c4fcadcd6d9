// Builds the economics outputs in memory and writes them to a
// directory (default: a fresh temp dir), as the CLI does.

use cabletract::output::{write_all, RunContext};
use cabletract::report;

pub fn run_into(dir: &std::path::Path) -> Result<(), Box<dyn std::error::Error>> {
    let ctx = RunContext::new(42, None)?;
    let outputs = report::econ(&ctx)?;
    for f in write_all(dir, &ctx, &outputs)? {
        println!("{}", f.display());
    }
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("cabletract-example-{}", std::process::id()));
    run_into(&dir)?;
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    match std::env::args().nth(1) {
        Some(d) => run_into(std::path::Path::new(&d)),
        None => run_example(),
    }
}
