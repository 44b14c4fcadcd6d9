use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cabletract::output::{write_all, RunContext};
use cabletract::report::{self, UqMode};

#[derive(Parser)]
#[command(name = "cabletract", version, about = "Regenerate feasibility tables and figure data")]
struct Cli {
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// key=value override file
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every table and figure-data file
    All,
    Physics,
    Draft,
    Energy {
        #[arg(long)]
        site: Option<String>,
    },
    Plan {
        #[arg(long)]
        field: Option<String>,
    },
    Compaction,
    Econ,
    /// Runs all three analyses when no flag is given
    Uq(UqFlags),
    Variants,
    Envelope,
}

#[derive(Args)]
struct UqFlags {
    #[arg(long)]
    sobol: bool,
    #[arg(long)]
    mc: bool,
    #[arg(long)]
    tornado: bool,
}

fn run(cli: Cli) -> cabletract::Result<usize> {
    let text = match &cli.params {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|source| cabletract::Error::Io {
            path: p.clone(),
            source,
        })?),
        None => None,
    };
    let ctx = RunContext::new(cli.seed, text.as_deref())?;
    let outputs = match &cli.command {
        Command::All => report::all(&ctx)?,
        Command::Physics => report::physics(&ctx)?,
        Command::Draft => report::draft(&ctx)?,
        Command::Energy { site } => report::energy(&ctx, &report::resolve_sites(site.as_deref())?)?,
        Command::Plan { field } => report::plan(&ctx, field.as_deref())?,
        Command::Compaction => report::compaction(&ctx)?,
        Command::Econ => report::econ(&ctx)?,
        Command::Uq(f) => {
            let mut modes = Vec::new();
            if f.sobol {
                modes.push(UqMode::Sobol);
            }
            if f.tornado {
                modes.push(UqMode::Tornado);
            }
            if f.mc {
                modes.push(UqMode::Mc);
            }
            if modes.is_empty() {
                modes = vec![UqMode::Sobol, UqMode::Tornado, UqMode::Mc];
            }
            report::uq(&ctx, &modes)?
        }
        Command::Variants => report::variants(&ctx)?,
        Command::Envelope => report::envelope(&ctx)?,
    };
    Ok(write_all(&cli.out, &ctx, &outputs)?.len())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli) {
        Ok(n) => {
            println!("wrote {n} files under {}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
