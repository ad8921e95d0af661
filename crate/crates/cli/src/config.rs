//! Run configuration: one JSON document, overridden field by field by flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub povm: Option<PathBuf>,
    pub autocov: Option<PathBuf>,
    pub transfer: Option<PathBuf>,
    pub fir: Option<PathBuf>,
    pub outer: Option<PathBuf>,
    pub inner: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub realizations: Option<usize>,
    pub period: Option<usize>,
    pub max_lag: Option<usize>,
    pub q: Option<Vec<usize>>,
    pub rank_tol: Option<f64>,
    pub psd_tol: Option<f64>,
    pub competitors: Option<usize>,
    pub only: Option<Vec<String>>,
    pub strict_injectivity: Option<bool>,
    pub real: Option<bool>,
}

macro_rules! overlay {
    ($top:ident, $base:ident; $($field:ident),*) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for p in cfg.paths_mut().into_iter().flatten() {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        overlay!(self, base; command, povm, autocov, transfer, fir, outer, inner, out, seed, realizations,
            period, max_lag, q, rank_tol, psd_tol, competitors, only, strict_injectivity, real)
    }

    fn paths_mut(&mut self) -> [&mut Option<PathBuf>; 7] {
        [
            &mut self.povm,
            &mut self.autocov,
            &mut self.transfer,
            &mut self.fir,
            &mut self.outer,
            &mut self.inner,
            &mut self.out,
        ]
    }

    /// Numeric parameters must be positive and input files must exist.
    pub fn validate(&mut self) -> Result<(), String> {
        let counts = [("realizations", self.realizations), ("period", self.period), ("competitors", self.competitors)];
        for (name, v) in counts {
            if v == Some(0) {
                return Err(format!("{name} must be positive"));
            }
        }
        for (name, v) in [("rank_tol", self.rank_tol), ("psd_tol", self.psd_tol)] {
            if let Some(t) = v {
                if !(t.is_finite() && t > 0.0) {
                    return Err(format!("{name} must be a positive finite number, got {t}"));
                }
            }
        }
        if let Some(q) = &self.q {
            if q.is_empty() || q.contains(&0) {
                return Err("q must be a non-empty list of positive ranks".into());
            }
        }
        let out = self.out.take();
        for p in self.paths_mut().into_iter().flatten() {
            if !p.is_file() {
                return Err(format!("input file not found: {}", p.display()));
            }
        }
        self.out = out;
        Ok(())
    }
}
