mod config;
mod error;
mod output;
mod run;

use clap::{Parser, Subcommand};
use config::ExperimentConfig;
use error::CliError;
use run::Context;
use std::path::PathBuf;
use std::process::ExitCode;

/// Gauged fermionic PEPS experiments and exact cross-checks.
///
/// Exit codes: 0 ok, 1 verification failure, 2 config error, 3 resource cap.
/// `GAUGEPEPS_DIM_CAP` overrides the Hilbert-space size limit.
#[derive(Debug, Parser)]
#[command(name = "gaugepeps", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random choice; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config, default `out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run the module's invariant suite before the experiment.
    #[arg(long, global = true)]
    verify: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Hamiltonian, Gauss-law and gauging checks plus the physical spectrum.
    ExactCheck,
    /// Gauge-invariant Trotter evolution against the exact propagator.
    Trotter,
    /// Unitary gauge for Higgs matter and fermion elimination on a chain.
    Dualize,
    /// Gauss law, gauge invariance and field truncation of the gauged fPEPS.
    FpepsVerify,
    /// Monte Carlo over gauge fields with Wilson loops and meson strings.
    Mc,
    /// Transfer-matrix gap scan over `t` on a cylinder.
    TransferScan,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::ExactCheck => "exact-check",
            Command::Trotter => "trotter",
            Command::Dualize => "dualize",
            Command::FpepsVerify => "fpeps-verify",
            Command::Mc => "mc",
            Command::TransferScan => "transfer-scan",
        }
    }
}

fn execute(cli: &Cli) -> Result<PathBuf, CliError> {
    let cfg = ExperimentConfig::load(cli.config.as_deref())?;
    cfg.validate(cli.command.name())?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let out = cli.out.clone().or_else(|| cfg.output.dir.clone().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
    let seed = cli.seed.unwrap_or(cfg.seed);
    let ctx = Context { cfg, out, seed };
    if cli.verify {
        match cli.command {
            Command::ExactCheck | Command::Trotter | Command::Dualize => run::exact_suite(&ctx)?,
            Command::FpepsVerify | Command::Mc => run::fpeps_suite(&ctx, 10)?,
            Command::TransferScan => run::spectra_suite(&ctx)?,
        };
        eprintln!("invariant suite passed");
    }
    match cli.command {
        Command::ExactCheck => run::exact_check(&ctx),
        Command::Trotter => run::trotter(&ctx),
        Command::Dualize => run::dualize(&ctx),
        Command::FpepsVerify => run::fpeps_verify(&ctx),
        Command::Mc => run::mc(&ctx),
        Command::TransferScan => run::transfer_scan(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(path) => {
            println!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
