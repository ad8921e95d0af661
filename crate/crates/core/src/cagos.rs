//! Gaussian random measures with Gramian-orthogonal increments.
//!
//! A realization stores, for every atom `λ_j` of its intensity measure `ν`,
//! an ensemble of `R` vectors `Z_j = ν_j^{1/2} ξ_j` with `ξ_j` standard
//! circularly-symmetric complex Gaussian. Different atoms are independent,
//! so `Cov(Z_j, Z_k) = δ_jk ν_j`. Processes are synthesised from a
//! realization as `X_t = Σ_j e^{iλ_j t} Z_j`.
//!
//! Sampling draws every `(atom, realization)` vector from its own ChaCha8
//! stream keyed by `(seed, atom, realization)`, so the output does not
//! depend on how the work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filtering::{check_filterable, TransferFunction};
use crate::operator::{ComplexOperator, C64};
use crate::povm::{AtomicTracePovm, FREQ_MERGE_TOL};
use crate::random::complex_normal;

/// Monte Carlo checks accept deviations up to this many standard errors.
pub const MC_BAND_SIGMAS: f64 = 5.0;

/// `MC_BAND_SIGMAS · scale / √R`.
pub fn monte_carlo_band(realizations: usize, scale: f64) -> f64 {
    MC_BAND_SIGMAS * scale / (realizations as f64).sqrt()
}

/// `R` vectors of dimension `dim`, stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorEnsemble {
    dim: usize,
    data: Vec<C64>,
}

impl VectorEnsemble {
    pub fn zeros(dim: usize, len: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * len] }
    }

    pub fn from_vectors(dim: usize, vectors: &[Vec<C64>]) -> Result<Self> {
        if let Some(r) = vectors.iter().position(|v| v.len() != dim) {
            return Err(Error::Dimension(format!("vector {r} has length {}, expected {dim}", vectors[r].len())));
        }
        Ok(Self { dim, data: vectors.iter().flatten().copied().collect() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, r: usize) -> &[C64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn get_mut(&mut self, r: usize) -> &mut [C64] {
        &mut self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = &[C64]> {
        self.data.chunks_exact(self.dim)
    }

    fn add_scaled(&mut self, other: &Self, factor: C64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * factor;
        }
    }

    fn sub(&self, other: &Self) -> Self {
        Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }
}

/// A sampled random measure `Ŵ` on the atoms of its intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct CagosRealization {
    intensity: AtomicTracePovm,
    samples: Vec<VectorEnsemble>,
}

impl CagosRealization {
    pub fn from_parts(intensity: AtomicTracePovm, samples: Vec<VectorEnsemble>) -> Result<Self> {
        if samples.len() != intensity.len() {
            return Err(Error::Alignment(format!("{} sample ensembles for {} atoms", samples.len(), intensity.len())));
        }
        let reps = samples[0].len();
        for (j, s) in samples.iter().enumerate() {
            if s.dim() != intensity.dim() {
                return Err(Error::Dimension(format!(
                    "atom {j} samples have dimension {}, intensity has {}",
                    s.dim(),
                    intensity.dim()
                )));
            }
            if s.len() != reps {
                return Err(Error::SampleSize(format!("atom {j} has {} realizations, atom 0 has {reps}", s.len())));
            }
        }
        Ok(Self { intensity, samples })
    }

    pub fn intensity(&self) -> &AtomicTracePovm {
        &self.intensity
    }

    pub fn samples(&self) -> &[VectorEnsemble] {
        &self.samples
    }

    pub fn dim(&self) -> usize {
        self.intensity.dim()
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn realizations(&self) -> usize {
        self.samples[0].len()
    }

    pub fn freqs(&self) -> Vec<f64> {
        self.intensity.freqs()
    }

    /// `W(A)` for `A` the union of the listed atoms.
    pub fn evaluate(&self, atoms: &[usize]) -> VectorEnsemble {
        let mut acc = VectorEnsemble::zeros(self.dim(), self.realizations());
        for &j in atoms {
            acc.add_scaled(&self.samples[j], C64::new(1.0, 0.0));
        }
        acc
    }
}

fn substream(seed: u64, atom: usize, realization: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((atom as u64) << 32) | (realization as u64 & 0xffff_ffff));
    rng
}

fn fill_atom(root: &ComplexOperator, seed: u64, atom: usize, out: &mut [C64], dim: usize, parallel: bool) {
    let draw = |(r, chunk): (usize, &mut [C64])| {
        let mut rng = substream(seed, atom, r);
        let xi: Vec<C64> = (0..dim).map(|_| complex_normal(&mut rng)).collect();
        chunk.copy_from_slice(&root.apply(&xi));
    };
    #[cfg(feature = "parallel")]
    if parallel {
        out.par_chunks_mut(dim).enumerate().for_each(draw);
        return;
    }
    let _ = parallel;
    out.chunks_mut(dim).enumerate().for_each(draw);
}

/// Samples `R` independent realizations of the Gaussian random measure
/// with intensity `ν`.
pub fn sample_gaussian_cagos(nu: &AtomicTracePovm, realizations: usize, seed: u64) -> Result<CagosRealization> {
    sample_gaussian_cagos_with(nu, realizations, seed, cfg!(feature = "parallel"))
}

/// As [`sample_gaussian_cagos`], choosing explicitly whether to use the
/// thread pool. Both paths produce bitwise-identical samples.
pub fn sample_gaussian_cagos_with(
    nu: &AtomicTracePovm,
    realizations: usize,
    seed: u64,
    parallel: bool,
) -> Result<CagosRealization> {
    if realizations == 0 {
        return Err(Error::SampleSize("at least one realization is required".into()));
    }
    let dim = nu.dim();
    let samples = (0..nu.len())
        .map(|j| {
            let mut ens = VectorEnsemble::zeros(dim, realizations);
            if !nu.is_null_atom(j) {
                fill_atom(&nu.sqrt_weight(j), seed, j, &mut ens.data, dim, parallel);
            }
            ens
        })
        .collect();
    CagosRealization::from_parts(nu.clone(), samples)
}

/// Stochastic integral `∫ Φ dW = Σ_j Φ_j Z_j`, one vector per realization.
pub fn cagos_integral(phi: &TransferFunction, w: &CagosRealization) -> Result<VectorEnsemble> {
    check_filterable(phi, w.intensity())?.into_result()?;
    let mut acc = VectorEnsemble::zeros(phi.out_dim(), w.realizations());
    for (j, ens) in w.samples().iter().enumerate() {
        for r in 0..ens.len() {
            let y = phi.apply_at(j, ens.get(r), crate::povm::DOMAIN_TOL)?;
            for (a, b) in acc.get_mut(r).iter_mut().zip(y) {
                *a += b;
            }
        }
    }
    Ok(acc)
}

/// Time-indexed ensemble `X_t`, `t = 0..period`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSample {
    dim: usize,
    values: Vec<VectorEnsemble>,
}

impl ProcessSample {
    pub fn new(dim: usize, values: Vec<VectorEnsemble>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Shape("a process sample needs at least one time point".into()));
        }
        let reps = values[0].len();
        for (t, v) in values.iter().enumerate() {
            if v.dim() != dim {
                return Err(Error::Dimension(format!("time {t} has dimension {}, expected {dim}", v.dim())));
            }
            if v.len() != reps {
                return Err(Error::SampleSize(format!("time {t} has {} realizations, expected {reps}", v.len())));
            }
            if v.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite { row: t, col: 0 });
            }
        }
        Ok(Self { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn realizations(&self) -> usize {
        self.values[0].len()
    }

    pub fn at(&self, t: usize) -> &VectorEnsemble {
        &self.values[t]
    }

    pub fn values(&self) -> &[VectorEnsemble] {
        &self.values
    }
}

/// `X_t = Σ_j e^{iλ_j t} Z_j` for `t = 0..period`.
pub fn synthesize_process(w: &CagosRealization, period: usize) -> ProcessSample {
    synthesize_from(w, period, 0)
}

/// Synthesis starting at time `start`: entry `t` holds `X_{start + t}`.
pub fn synthesize_from(w: &CagosRealization, period: usize, start: i64) -> ProcessSample {
    let freqs = w.freqs();
    let values = (0..period as i64)
        .map(|t| {
            let mut acc = VectorEnsemble::zeros(w.dim(), w.realizations());
            for (lambda, ens) in freqs.iter().zip(w.samples()) {
                acc.add_scaled(ens, C64::from_polar(1.0, lambda * (start + t) as f64));
            }
            acc
        })
        .collect();
    ProcessSample::new(w.dim(), values).expect("synthesis is consistent")
}

/// Real-valued variant `√2 · Re X_t`. Its autocovariance is `Re Γ(h)`,
/// the autocovariance of the conjugate-symmetrised measure
/// `½(ν(dλ) + conj ν(−dλ))`.
pub fn synthesize_real_process(w: &CagosRealization, period: usize) -> ProcessSample {
    let complex = synthesize_process(w, period);
    let values = complex
        .values
        .into_iter()
        .map(|v| VectorEnsemble {
            dim: v.dim,
            data: v.data.iter().map(|z| C64::new(z.re * std::f64::consts::SQRT_2, 0.0)).collect(),
        })
        .collect();
    ProcessSample::new(w.dim(), values).expect("synthesis is consistent")
}

/// Empirical cross-covariance `(1/R) Σ_r u_r v_rᴴ − ū v̄ᴴ`.
pub fn empirical_gramian(u: &VectorEnsemble, v: &VectorEnsemble) -> Result<ComplexOperator> {
    if u.len() != v.len() {
        return Err(Error::SampleSize(format!("ensembles have sizes {} and {}", u.len(), v.len())));
    }
    let reps = u.len();
    if reps < 2 {
        return Err(Error::SampleSize(format!("need at least 2 realizations, got {reps}")));
    }
    let inv = 1.0 / reps as f64;
    let mean = |e: &VectorEnsemble| -> Vec<C64> {
        let mut m = vec![C64::new(0.0, 0.0); e.dim()];
        for x in e.iter() {
            for (a, b) in m.iter_mut().zip(x) {
                *a += b;
            }
        }
        m.into_iter().map(|z| z * inv).collect()
    };
    let (mu, mv) = (mean(u), mean(v));
    let (p, q) = (u.dim(), v.dim());
    let mut acc = vec![C64::new(0.0, 0.0); p * q];
    for (x, y) in u.iter().zip(v.iter()) {
        for a in 0..p {
            for b in 0..q {
                acc[a * q + b] += x[a] * y[b].conj();
            }
        }
    }
    ComplexOperator::new(p, q, (0..p * q).map(|k| acc[k] * inv - mu[k / q] * mv[k % q].conj()).collect())
}

/// Orthogonal-increment path `λ ↦ Z_λ = W((−π, λ])`.
///
/// The path jumps only at its breakpoints; the jumps are kept as the
/// primary data so that converting to and from a realization is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalIncrementPath {
    breakpoints: Vec<f64>,
    jumps: Vec<VectorEnsemble>,
}

impl OrthogonalIncrementPath {
    /// Builds a path from cumulative values at sorted breakpoints.
    pub fn from_cumulative(breakpoints: Vec<f64>, values: Vec<VectorEnsemble>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::Alignment(format!(
                "{} breakpoints for {} cumulative values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Alignment("breakpoints must be strictly increasing".into()));
        }
        let mut jumps = Vec::with_capacity(values.len());
        jumps.push(values[0].clone());
        for k in 1..values.len() {
            jumps.push(values[k].sub(&values[k - 1]));
        }
        Ok(Self { breakpoints, jumps })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `Z_λ`: zero below the first breakpoint.
    pub fn value_at(&self, lambda: f64) -> VectorEnsemble {
        let mut acc = VectorEnsemble::zeros(self.jumps[0].dim(), self.jumps[0].len());
        for (b, jump) in self.breakpoints.iter().zip(&self.jumps) {
            if *b > lambda {
                break;
            }
            acc.add_scaled(jump, C64::new(1.0, 0.0));
        }
        acc
    }

    /// Cumulative values at each breakpoint.
    pub fn cumulative(&self) -> Vec<VectorEnsemble> {
        let mut out: Vec<VectorEnsemble> = Vec::with_capacity(self.jumps.len());
        for jump in &self.jumps {
            let mut next = match out.last() {
                Some(prev) => prev.clone(),
                None => VectorEnsemble::zeros(jump.dim(), jump.len()),
            };
            next.add_scaled(jump, C64::new(1.0, 0.0));
            out.push(next);
        }
        out
    }

    /// `Z_b − Z_a` for `a < b`: the measure of `(a, b]`.
    pub fn increment(&self, a: f64, b: f64) -> VectorEnsemble {
        self.value_at(b).sub(&self.value_at(a))
    }
}

pub fn to_increment_path(w: &CagosRealization) -> OrthogonalIncrementPath {
    OrthogonalIncrementPath { breakpoints: w.freqs(), jumps: w.samples().to_vec() }
}

/// Recovers the per-atom samples of a path whose breakpoints are the atoms
/// of `intensity`.
pub fn from_increment_path(z: &OrthogonalIncrementPath, intensity: &AtomicTracePovm) -> Result<CagosRealization> {
    let freqs = intensity.freqs();
    if freqs.len() != z.breakpoints.len()
        || freqs.iter().zip(&z.breakpoints).any(|(a, b)| (a - b).abs() > FREQ_MERGE_TOL)
    {
        return Err(Error::Alignment("path breakpoints do not match the atoms of the intensity".into()));
    }
    CagosRealization::from_parts(intensity.clone(), z.jumps.clone())
}
