use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stdp_cli::commands::{self, Command, Overrides};
use stdp_cli::config::RunConfig;
use stdp_cli::CliError;

/// Triplet STDP experiments: protocol sweeps, NMSE fits and Monte Carlo
/// mismatch analysis. Results are CSV files plus a JSON manifest.
#[derive(Debug, Parser)]
#[command(name = "stdp", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Dataset file (fit, mc).
    #[arg(long, global = true)]
    dataset: Option<PathBuf>,

    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory; defaults to the config's out_dir, then $STDP_OUT_DIR, then ./stdp-out.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Trials per grid point for sweep commands.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Refit the worst Monte Carlo run (mc).
    #[arg(long, global = true)]
    retune: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    /// Pairing protocol versus spike timing.
    Window,
    /// Pairing protocol versus repetition rate.
    Freq,
    /// Pre-post-pre and post-pre-post triplets.
    Triplet,
    /// Quadruplets versus pair separation.
    Quad,
    /// All six triplet orderings over a gap grid.
    Six,
    /// Poisson drift versus postsynaptic rate.
    Bcm,
    /// Fit rule parameters to a dataset.
    Fit,
    /// Monte Carlo parameter mismatch on a dataset.
    Mc,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Window => Command::Window,
            Cmd::Freq => Command::Freq,
            Cmd::Triplet => Command::Triplet,
            Cmd::Quad => Command::Quad,
            Cmd::Six => Command::Six,
            Cmd::Bcm => Command::Bcm,
            Cmd::Fit => Command::Fit,
            Cmd::Mc => Command::Mc,
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let cmd = Command::from(cli.command);
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::new(),
    };
    let ov = Overrides {
        seed: cli.seed,
        out: cli.out,
        trials: cli.trials,
        retune: cli.retune,
        dataset: cli.dataset,
    };
    let cfg = commands::resolve(cfg, cmd, &ov)?;
    let manifest = commands::run(cmd, &cfg, ov.dataset.as_deref())?;
    let dir = cfg.out_dir.unwrap_or_default();
    for f in &manifest.outputs {
        stdp_cli::say(format_args!("wrote {}", dir.join(&f.file).display()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
