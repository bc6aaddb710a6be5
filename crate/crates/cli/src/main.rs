use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fraclab_cli::{load, run_with_workers, Command, RunOptions};

/// Fractional-diffusion convergence laboratory.
#[derive(Parser)]
#[command(name = "fraclab", version, about)]
struct Cli {
    /// TOML configuration file; built-in defaults when absent.
    #[arg(long, global = true, env = "FRACLAB_CONFIG")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "FRACLAB_OUT", default_value = "fraclab-out")]
    out: PathBuf,
    /// Overrides the seed of the solve and rate-study sections.
    #[arg(long, global = true, env = "FRACLAB_SEED")]
    seed: Option<u64>,
    /// Worker threads; the rayon default when absent.
    #[arg(long, global = true, env = "FRACLAB_WORKERS")]
    workers: Option<usize>,
    /// Also write gnuplot scripts.
    #[arg(long, global = true, env = "FRACLAB_PLOTS")]
    plots: bool,
    /// Record wall-clock runtimes (makes outputs non-reproducible).
    #[arg(long, global = true, env = "FRACLAB_TIMING")]
    timing: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Weighted kernel-gap rate check over an alpha grid.
    KernelVerify,
    /// Existence times T_alpha, T_2 and the uniform floor T_0.
    ExistenceTime,
    /// Solve one preset and write norms and state dumps.
    Solve,
    /// Convergence-rate study of u_alpha towards u_2.
    RateStudy,
    /// List the model presets.
    Presets,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::KernelVerify => Command::KernelVerify,
        Cmd::ExistenceTime => Command::ExistenceTime,
        Cmd::Solve => Command::Solve,
        Cmd::RateStudy => Command::RateStudy,
        Cmd::Presets => Command::Presets,
    };
    let opts = RunOptions { out: cli.out, seed: cli.seed, plots: cli.plots, timing: cli.timing };
    let result = load(cli.config.as_deref()).and_then(|cfg| run_with_workers(command, &cfg, &opts, cli.workers));
    match result {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            for line in &outcome.summary {
                println!("{line}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
