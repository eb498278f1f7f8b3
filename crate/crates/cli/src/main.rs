use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gfrac_cli::config::{Command, RunConfig};
use gfrac_cli::error::{CliError, CliResult};

/// Thread count for kernel parallelism.
const THREADS_VAR: &str = "GFRAC_THREADS";

#[derive(Parser, Debug)]
#[command(name = "gfrac", version, about = "Fractional g-Laplacian toolkit")]
struct Args {
    /// Overrides the command named in the config.
    #[arg(value_enum)]
    command: Option<Command>,
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of spacing halvings to run after the configured grid.
    #[arg(long)]
    refine: Option<usize>,
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_VAR} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the thread pool: {e}")))
}

fn run(args: Args) -> CliResult<()> {
    configure_threads()?;
    let mut config = RunConfig::load(&args.config)?;
    if let Some(c) = args.command {
        config.command = Some(c);
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = args.out {
        config.output = out;
    }
    if let Some(r) = args.refine {
        config.refine = r;
    }
    gfrac_cli::run(&config.validate()?)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
