//! `fts`: simulate, transform and decompose functional time series given by
//! atomic spectral measures, and run the verification battery.
//!
//! Exit status is 0 on success, 1 on domain or I/O errors and failed checks,
//! 2 on usage errors. Set `FTS_VERBOSE=1` for progress notes on stderr.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "fts", version, about = "Spectral calculus for functional time series on atomic frequency measures")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    realizations: Option<usize>,
    #[arg(long, global = true)]
    period: Option<usize>,
    /// Require filters to be injective on the whole input space.
    #[arg(long, global = true)]
    strict_injectivity: bool,
    /// Synthesise the real process √2·Re X_t instead of the complex one.
    #[arg(long, global = true)]
    real: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a Gaussian random measure and synthesise the process on 0..period.
    Simulate {
        /// Spectral measure; the bundled example when omitted.
        #[arg(long)]
        povm: Option<PathBuf>,
    },
    /// Autocovariance Γ(0..=max_lag) of a spectral measure.
    Autocov {
        #[arg(long)]
        povm: Option<PathBuf>,
        #[arg(long)]
        max_lag: Option<usize>,
    },
    /// Recover the measure on the uniform grid from an autocovariance sequence.
    FitGrid {
        #[arg(long)]
        autocov: Option<PathBuf>,
        /// Positivity tolerance relative to Tr Γ(0).
        #[arg(long)]
        psd_tol: Option<f64>,
    },
    /// Spectral measure of the filtered process, from a transfer function or FIR taps.
    Filter {
        #[arg(long)]
        povm: Option<PathBuf>,
        #[arg(long, conflicts_with = "fir")]
        transfer: Option<PathBuf>,
        #[arg(long)]
        fir: Option<PathBuf>,
    },
    /// Transfer function of `outer` applied after `inner`.
    Compose {
        #[arg(long)]
        outer: Option<PathBuf>,
        #[arg(long)]
        inner: Option<PathBuf>,
    },
    /// Left inverse of a transfer function with respect to a spectral measure.
    Invert {
        #[arg(long)]
        transfer: Option<PathBuf>,
        #[arg(long)]
        povm: Option<PathBuf>,
        #[arg(long)]
        rank_tol: Option<f64>,
    },
    /// Per-atom eigendecomposition of a spectral measure.
    Ckl {
        #[arg(long)]
        povm: Option<PathBuf>,
    },
    /// Optimal rank-q harmonic principal components.
    Hfpca {
        #[arg(long)]
        povm: Option<PathBuf>,
        /// One rank for every atom, or one rank per atom.
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<usize>>,
    },
    /// Run the verification battery; writes a JSON report and a summary on stderr.
    Verify {
        /// Extra measure tested alongside the generated instances.
        #[arg(long)]
        povm: Option<PathBuf>,
        #[arg(long)]
        competitors: Option<usize>,
        /// Restrict to these check ids.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate { .. } => "simulate",
            Command::Autocov { .. } => "autocov",
            Command::FitGrid { .. } => "fit-grid",
            Command::Filter { .. } => "filter",
            Command::Compose { .. } => "compose",
            Command::Invert { .. } => "invert",
            Command::Ckl { .. } => "ckl",
            Command::Hfpca { .. } => "hfpca",
            Command::Verify { .. } => "verify",
        }
    }

    fn into_config(self) -> RunConfig {
        let mut cfg = RunConfig { command: Some(self.name().to_string()), ..RunConfig::default() };
        match self {
            Command::Simulate { povm } | Command::Ckl { povm } => cfg.povm = povm,
            Command::Autocov { povm, max_lag } => {
                cfg.povm = povm;
                cfg.max_lag = max_lag;
            }
            Command::FitGrid { autocov, psd_tol } => {
                cfg.autocov = autocov;
                cfg.psd_tol = psd_tol;
            }
            Command::Filter { povm, transfer, fir } => {
                cfg.povm = povm;
                cfg.transfer = transfer;
                cfg.fir = fir;
            }
            Command::Compose { outer, inner } => {
                cfg.outer = outer;
                cfg.inner = inner;
            }
            Command::Invert { transfer, povm, rank_tol } => {
                cfg.transfer = transfer;
                cfg.povm = povm;
                cfg.rank_tol = rank_tol;
            }
            Command::Hfpca { povm, q } => {
                cfg.povm = povm;
                cfg.q = q;
            }
            Command::Verify { povm, competitors, only } => {
                cfg.povm = povm;
                cfg.competitors = competitors;
                cfg.only = only;
            }
        }
        cfg
    }
}

fn resolve(cli: Cli) -> Result<RunConfig, String> {
    let g = cli.global;
    let file = match &g.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let name = cli.command.name();
    if let Some(c) = &file.command {
        if c != name {
            return Err(format!("config is for command '{c}' but '{name}' was requested"));
        }
    }
    let mut flags = cli.command.into_config();
    flags.seed = g.seed;
    flags.out = g.out;
    flags.realizations = g.realizations;
    flags.period = g.period;
    flags.strict_injectivity = g.strict_injectivity.then_some(true);
    flags.real = g.real.then_some(true);
    let mut cfg = flags.over(file);
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    let cfg = match resolve(cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match commands::run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
