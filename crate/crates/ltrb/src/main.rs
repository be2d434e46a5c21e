use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ltrb::commands::{self, Options};
use ltrb::RunConfig;

#[derive(Parser)]
#[command(name = "ltrb", version, about = "Laplace-transform reduced-basis solver for the linear wave equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Reduced basis matrix (`.mtx`, with a `.meta` sidecar).
    #[arg(long, global = true)]
    basis: Option<PathBuf>,

    /// Output directory, overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Solve the Laplace-domain problems in parallel.
    #[arg(long, global = true)]
    parallel: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Full-order Newmark run.
    Full,
    /// Snapshots and POD basis.
    Offline,
    /// Reduced Newmark run on a stored basis.
    Online,
    /// Accuracy and timing study over R and M sweeps.
    Compare,
    /// Mesh-quality report.
    Quality,
    /// Largest eigenvalue and optimal sampling parameter.
    Beta,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(path) = cli.config.clone() else {
        eprintln!("error: --config <path> is required");
        return ExitCode::from(2);
    };
    let opts = Options { out: cli.out, basis: cli.basis, parallel: cli.parallel };
    let result = RunConfig::load(&path).and_then(|cfg| match cli.command {
        Command::Full => commands::cmd_full(&cfg, &opts),
        Command::Offline => commands::cmd_offline(&cfg, &opts),
        Command::Online => commands::cmd_online(&cfg, &opts),
        Command::Compare => commands::cmd_compare(&cfg, &opts),
        Command::Quality => commands::cmd_quality(&cfg),
        Command::Beta => commands::cmd_beta(&cfg),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
