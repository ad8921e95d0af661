//! Command dispatch and file I/O.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use fts_core::cagos::{sample_gaussian_cagos, synthesize_process, synthesize_real_process};
use fts_core::decomposition::{ckl_decompose, hfpca, RankFunction};
use fts_core::filtering::{
    compose_transfer, fir_to_transfer, invert_transfer, pushforward_povm, FirFilter, Injectivity, TransferFunction,
};
use fts_core::io::{ckl_report, hfpca_report, to_json_string, JsonFormat};
use fts_core::spectral_bochner::{
    autocov_from_povm, povm_from_autocov_grid_with, AutocovarianceSequence, GRID_PSD_TOL,
};
use fts_core::verify::{run_selected, CheckResult, VerifyConfig, CHECK_IDS};
use fts_core::AtomicTracePovm;

use crate::config::RunConfig;

const EXAMPLE_POVM: &str = include_str!("../data/example_povm.json");

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_PERIOD: usize = 64;
pub const DEFAULT_MAX_LAG: usize = 16;
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
pub const DEFAULT_VERIFY_SEED: u64 = 2024;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain(fts_core::Error),
    Io(String),
    Checks { failed: usize, total: usize },
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Io(m) => f.write_str(m),
            Failure::Domain(e) => write!(f, "{e}"),
            Failure::Checks { failed, total } => write!(f, "{failed} of {total} checks failed"),
        }
    }
}

impl From<fts_core::Error> for Failure {
    fn from(e: fts_core::Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = Result<(), Failure>;

fn note(msg: impl FnOnce() -> String) {
    if std::env::var("FTS_VERBOSE").is_ok_and(|v| !v.is_empty() && v != "0") {
        eprintln!("fts: {}", msg());
    }
}

fn required<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, Failure> {
    path.as_deref().ok_or_else(|| Failure::Usage(format!("missing required input --{flag}")))
}

fn read<T: JsonFormat>(path: &Path) -> Result<T, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok(T::from_json(&text)?)
}

fn povm_or_example(cfg: &RunConfig) -> Result<AtomicTracePovm, Failure> {
    match &cfg.povm {
        Some(p) => read(p),
        None => Ok(AtomicTracePovm::from_json(EXAMPLE_POVM)?),
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Outcome {
    match &cfg.out {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}").map_err(|e| Failure::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

pub fn run(cfg: &RunConfig) -> Outcome {
    match cfg.command.as_deref().unwrap_or_default() {
        "simulate" => simulate(cfg),
        "autocov" => autocov(cfg),
        "fit-grid" => fit_grid(cfg),
        "filter" => filter(cfg),
        "compose" => compose(cfg),
        "invert" => invert(cfg),
        "ckl" => ckl(cfg),
        "hfpca" => pca(cfg),
        "verify" => verify(cfg),
        other => Err(Failure::Usage(format!("unknown command '{other}'"))),
    }
}

fn simulate(cfg: &RunConfig) -> Outcome {
    let nu = povm_or_example(cfg)?;
    let realizations = cfg.realizations.unwrap_or(1);
    let period = cfg.period.unwrap_or(DEFAULT_PERIOD);
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    note(|| format!("simulate: {} atoms, dim {}, R={realizations}, M={period}, seed={seed}", nu.len(), nu.dim()));
    let w = sample_gaussian_cagos(&nu, realizations, seed)?;
    let x =
        if cfg.real.unwrap_or(false) { synthesize_real_process(&w, period) } else { synthesize_process(&w, period) };
    emit(cfg, &x.to_json())
}

fn autocov(cfg: &RunConfig) -> Outcome {
    let nu = povm_or_example(cfg)?;
    let max_lag = cfg.max_lag.or(cfg.period.map(|m| m - 1)).unwrap_or(DEFAULT_MAX_LAG);
    emit(cfg, &autocov_from_povm(&nu, max_lag).to_json())
}

fn fit_grid(cfg: &RunConfig) -> Outcome {
    let gamma: AutocovarianceSequence = read(required(&cfg.autocov, "autocov")?)?;
    let period = cfg.period.unwrap_or(gamma.max_lag() + 1);
    let tol = cfg.psd_tol.unwrap_or(GRID_PSD_TOL);
    note(|| format!("fit-grid: L={}, M={period}", gamma.max_lag()));
    emit(cfg, &povm_from_autocov_grid_with(&gamma, period, tol)?.to_json())
}

fn filter(cfg: &RunConfig) -> Outcome {
    let nu = povm_or_example(cfg)?;
    let phi = match (&cfg.transfer, &cfg.fir) {
        (Some(t), _) => read::<TransferFunction>(t)?,
        (None, Some(f)) => fir_to_transfer(&read::<FirFilter>(f)?, &nu.freqs()),
        (None, None) => return Err(Failure::Usage("filter needs --transfer or --fir".into())),
    };
    emit(cfg, &pushforward_povm(&phi, &nu)?.to_json())
}

fn compose(cfg: &RunConfig) -> Outcome {
    let outer: TransferFunction = read(required(&cfg.outer, "outer")?)?;
    let inner: TransferFunction = read(required(&cfg.inner, "inner")?)?;
    emit(cfg, &compose_transfer(&outer, &inner)?.to_json())
}

fn invert(cfg: &RunConfig) -> Outcome {
    let phi: TransferFunction = read(required(&cfg.transfer, "transfer")?)?;
    let nu = povm_or_example(cfg)?;
    let mode = if cfg.strict_injectivity.unwrap_or(false) { Injectivity::Strict } else { Injectivity::OnSupport };
    let inverse = invert_transfer(&phi, &nu, cfg.rank_tol.unwrap_or(DEFAULT_RANK_TOL), mode)?;
    emit(cfg, &inverse.to_json())
}

fn ckl(cfg: &RunConfig) -> Outcome {
    let sys = ckl_decompose(&povm_or_example(cfg)?)?;
    emit(cfg, &to_json_string(&ckl_report(&sys)))
}

fn pca(cfg: &RunConfig) -> Outcome {
    let nu = povm_or_example(cfg)?;
    let q = match cfg.q.as_deref() {
        None => RankFunction::constant(1, nu.len())?,
        Some(&[q]) => RankFunction::constant(q, nu.len())?,
        Some(qs) => RankFunction::new(qs.to_vec())?,
    };
    let sys = ckl_decompose(&nu)?;
    let (_, report) = hfpca(&sys, &q)?;
    emit(cfg, &to_json_string(&hfpca_report(&report)))
}

fn verify(cfg: &RunConfig) -> Outcome {
    let extra = povm_or_example(cfg)?;
    let defaults = VerifyConfig::default();
    let config = VerifyConfig {
        seed: cfg.seed.unwrap_or(DEFAULT_VERIFY_SEED),
        realizations: cfg.realizations.unwrap_or(defaults.realizations),
        competitors: cfg.competitors.unwrap_or(defaults.competitors),
    };
    let only: Option<Vec<&str>> =
        cfg.only.as_ref().map(|ids| ids.iter().map(String::as_str).filter(|s| !s.is_empty()).collect());
    if let Some(ids) = &only {
        if let Some(bad) = ids.iter().find(|id| !CHECK_IDS.contains(id)) {
            return Err(Failure::Usage(format!("unknown check id '{bad}'; known: {}", CHECK_IDS.join(", "))));
        }
    }
    note(|| format!("verify: seed={}, R={}, competitors={}", config.seed, config.realizations, config.competitors));
    let report = run_selected(Some(&extra), &config, |id| only.as_ref().map_or(true, |ids| ids.contains(&id)));
    emit_report(cfg, &report)
}

/// Writes the JSON report, then a one-line-per-check summary on stderr.
fn emit_report(cfg: &RunConfig, report: &[CheckResult]) -> Outcome {
    emit(cfg, &to_json_string(&report))?;
    let failed = report.iter().filter(|r| !r.passed()).count();
    for r in report {
        let status = serde_json::to_value(r.status).map(|v| v.as_str().unwrap_or("").to_owned()).unwrap_or_default();
        eprintln!("{status:<5} {:<32} metric {:.3e}  tolerance {:.3e}", r.check_id, r.metric, r.tolerance);
    }
    eprintln!("{} of {} checks passed", report.len() - failed, report.len());
    if failed > 0 {
        return Err(Failure::Checks { failed, total: report.len() });
    }
    Ok(())
}
