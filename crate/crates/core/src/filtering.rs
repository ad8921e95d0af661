//! Lag-invariant linear filters given by operator-valued transfer functions.
//!
//! A [`TransferFunction`] holds one operator per atom of a reference
//! measure. Unbounded or partially defined transfer operators (inverses of
//! rank-deficient filters, compositions through them) are carried as an
//! operator together with an orthogonal projector onto its domain; applying
//! such an operator to a vector outside the domain is an error, never a
//! silent projection.

use std::collections::BTreeMap;

use crate::cagos::{CagosRealization, ProcessSample, VectorEnsemble};
use crate::error::{Error, Result};
use crate::operator::{kernel_projector, pinv_on_range, range_projector, svd, ComplexOperator, C64};
use crate::povm::{
    check_transfer_shape, square_integrability_check, Atom, AtomicTracePovm, IntegrabilityReport, DOMAIN_TOL,
    FREQ_MERGE_TOL,
};

/// Relative singular-value cutoff used for composed domains.
pub const COMPOSE_RANK_TOL: f64 = 1e-10;

/// Relative eigenvalue cutoff for the support `Im(ν_j)` of an atom.
pub const SUPPORT_RANK_TOL: f64 = crate::operator::EIG_FLOOR;

#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    in_dim: usize,
    out_dim: usize,
    freqs: Vec<f64>,
    ops: Vec<ComplexOperator>,
    domains: Vec<Option<ComplexOperator>>,
}

impl TransferFunction {
    /// Total transfer function, one operator per frequency.
    pub fn new(freqs: Vec<f64>, ops: Vec<ComplexOperator>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::Shape("transfer function needs at least one frequency".into()));
        }
        if freqs.len() != ops.len() {
            return Err(Error::Shape(format!("{} frequencies but {} operators", freqs.len(), ops.len())));
        }
        let (out_dim, in_dim) = (ops[0].rows(), ops[0].cols());
        if let Some(j) = ops.iter().position(|o| o.rows() != out_dim || o.cols() != in_dim) {
            return Err(Error::Dimension(format!(
                "operator {j} is {}×{}, expected {out_dim}×{in_dim}",
                ops[j].rows(),
                ops[j].cols()
            )));
        }
        let n = ops.len();
        Ok(Self { in_dim, out_dim, freqs, ops, domains: vec![None; n] })
    }

    /// Attaches per-atom domain projectors (`None` means total).
    pub fn with_domains(mut self, domains: Vec<Option<ComplexOperator>>) -> Result<Self> {
        if domains.len() != self.ops.len() {
            return Err(Error::Shape(format!("{} domains for {} operators", domains.len(), self.ops.len())));
        }
        for (j, d) in domains.iter().enumerate() {
            if let Some(d) = d {
                if d.rows() != self.in_dim || d.cols() != self.in_dim {
                    return Err(Error::Dimension(format!(
                        "domain {j} is {}×{}, expected {}×{}",
                        d.rows(),
                        d.cols(),
                        self.in_dim,
                        self.in_dim
                    )));
                }
                let scale = d.frobenius_norm().max(1.0);
                let herm = d.distance(&d.adjoint());
                let idem = (d * d).distance(d);
                if herm > 1e-10 * scale || idem > 1e-10 * scale {
                    return Err(Error::Shape(format!(
                        "domain {j} is not an orthogonal projector (asymmetry {herm:e}, idempotence defect {idem:e})"
                    )));
                }
            }
        }
        self.domains = domains;
        Ok(self)
    }

    pub fn identity(freqs: &[f64], dim: usize) -> Self {
        Self::constant(freqs, ComplexOperator::identity(dim))
    }

    pub fn constant(freqs: &[f64], op: ComplexOperator) -> Self {
        Self::new(freqs.to_vec(), vec![op; freqs.len()]).expect("constant transfer is consistent")
    }

    /// `𝟙_{λ_k} P`: `op` at atom `k`, zero elsewhere.
    pub fn indicator(freqs: &[f64], k: usize, op: ComplexOperator) -> Self {
        let zero = ComplexOperator::zeros(op.rows(), op.cols());
        let ops = (0..freqs.len()).map(|j| if j == k { op.clone() } else { zero.clone() }).collect();
        Self::new(freqs.to_vec(), ops).expect("indicator transfer is consistent")
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn op(&self, j: usize) -> &ComplexOperator {
        &self.ops[j]
    }

    pub fn ops(&self) -> &[ComplexOperator] {
        &self.ops
    }

    pub fn domain(&self, j: usize) -> Option<&ComplexOperator> {
        self.domains[j].as_ref()
    }

    pub fn domains(&self) -> &[Option<ComplexOperator>] {
        &self.domains
    }

    pub fn is_total(&self) -> bool {
        self.domains.iter().all(Option::is_none)
    }

    /// `Φ_j D_j`: the operator restricted to its domain.
    pub fn effective(&self, j: usize) -> ComplexOperator {
        match &self.domains[j] {
            Some(d) => &self.ops[j] * d,
            None => self.ops[j].clone(),
        }
    }

    /// Applies `Φ_j` to `x`, rejecting vectors outside the domain.
    pub fn apply_at(&self, j: usize, x: &[C64], tol: f64) -> Result<Vec<C64>> {
        if let Some(d) = &self.domains[j] {
            let inside = d.apply(x);
            let outside: f64 = x.iter().zip(&inside).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let norm = crate::operator::vector_norm(x);
            if outside > (tol * norm).max(1e-14) {
                return Err(Error::Domain { atom: j, freq: self.freqs[j], residual: outside / norm });
            }
            return Ok(self.ops[j].apply(&inside));
        }
        Ok(self.ops[j].apply(x))
    }

    fn check_aligned_with(&self, other: &TransferFunction) -> Result<()> {
        if self.freqs.len() != other.freqs.len()
            || self.freqs.iter().zip(&other.freqs).any(|(a, b)| (a - b).abs() > FREQ_MERGE_TOL)
        {
            return Err(Error::Alignment("transfer functions are defined on different frequencies".into()));
        }
        Ok(())
    }
}

/// Finitely supported convolution kernel `s ↦ F_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirFilter {
    in_dim: usize,
    out_dim: usize,
    taps: BTreeMap<i64, ComplexOperator>,
}

impl FirFilter {
    pub fn new(taps: Vec<(i64, ComplexOperator)>) -> Result<Self> {
        let (out_dim, in_dim) = match taps.first() {
            Some((_, op)) => (op.rows(), op.cols()),
            None => return Err(Error::Shape("FIR filter needs at least one tap".into())),
        };
        let mut map = BTreeMap::new();
        for (s, op) in taps {
            if op.rows() != out_dim || op.cols() != in_dim {
                return Err(Error::Dimension(format!(
                    "tap {s} is {}×{}, expected {out_dim}×{in_dim}",
                    op.rows(),
                    op.cols()
                )));
            }
            if map.insert(s, op).is_some() {
                return Err(Error::Shape(format!("duplicate tap at lag {s}")));
            }
        }
        Ok(Self { in_dim, out_dim, taps: map })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn taps(&self) -> impl Iterator<Item = (i64, &ComplexOperator)> {
        self.taps.iter().map(|(s, op)| (*s, op))
    }
}

/// `Φ` is filterable for `ν` iff it is square ν-integrable.
pub fn check_filterable(phi: &TransferFunction, nu: &AtomicTracePovm) -> Result<IntegrabilityReport> {
    square_integrability_check(phi, nu, DOMAIN_TOL)
}

fn require_filterable(phi: &TransferFunction, nu: &AtomicTracePovm) -> Result<()> {
    check_filterable(phi, nu)?.into_result().map(|_| ())
}

/// Image measure `Φ ν Φᴴ`, atom by atom `(Φ_j ν_j^{1/2})(Φ_j ν_j^{1/2})ᴴ`.
pub fn pushforward_povm(phi: &TransferFunction, nu: &AtomicTracePovm) -> Result<AtomicTracePovm> {
    require_filterable(phi, nu)?;
    let atoms = nu
        .atoms()
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let b = &phi.effective(j) * &nu.sqrt_weight(j);
            Atom { freq: a.freq, weight: &b * &b.adjoint() }
        })
        .collect();
    AtomicTracePovm::new(phi.out_dim(), atoms)
}

/// Filter output `V(A) = ∫_A Φ dW`: samples `Φ_j Z_j`, intensity `Φ ν Φᴴ`.
pub fn apply_filter(phi: &TransferFunction, w: &CagosRealization) -> Result<CagosRealization> {
    let intensity = pushforward_povm(phi, w.intensity())?;
    let mut samples = Vec::with_capacity(w.len());
    for (j, ens) in w.samples().iter().enumerate() {
        let mut out = VectorEnsemble::zeros(phi.out_dim(), ens.len());
        for r in 0..ens.len() {
            let y = phi.apply_at(j, ens.get(r), DOMAIN_TOL)?;
            out.get_mut(r).copy_from_slice(&y);
        }
        samples.push(out);
    }
    CagosRealization::from_parts(intensity, samples)
}

/// Pointwise composition `Ψ_j Φ_j`.
///
/// When either factor is partial, the composed domain is
/// `{x ∈ 𝒟(Φ_j) : Φ_j x ∈ 𝒟(Ψ_j)}`, obtained as the kernel projector of
/// the stacked constraint `[(I − D^Ψ) Φ_j ; I − D^Φ]`.
pub fn compose_transfer(psi: &TransferFunction, phi: &TransferFunction) -> Result<TransferFunction> {
    psi.check_aligned_with(phi)?;
    if psi.in_dim() != phi.out_dim() {
        return Err(Error::Dimension(format!(
            "cannot compose Ψ acting on dimension {} after Φ with output dimension {}",
            psi.in_dim(),
            phi.out_dim()
        )));
    }
    let ops = (0..phi.len()).map(|j| psi.op(j) * phi.op(j)).collect();
    let composed = TransferFunction::new(phi.freqs().to_vec(), ops)?;
    if psi.is_total() && phi.is_total() {
        return Ok(composed);
    }
    let n = phi.in_dim();
    let domains = (0..phi.len())
        .map(|j| {
            if psi.domain(j).is_none() && phi.domain(j).is_none() {
                return None;
            }
            let mut blocks: Vec<ComplexOperator> = Vec::new();
            if let Some(dpsi) = psi.domain(j) {
                let comp = &ComplexOperator::identity(psi.in_dim()) - dpsi;
                blocks.push(&comp * phi.op(j));
            }
            if let Some(dphi) = phi.domain(j) {
                blocks.push(&ComplexOperator::identity(n) - dphi);
            }
            let stacked = vstack(&blocks);
            if stacked.max_abs() == 0.0 {
                return Some(ComplexOperator::identity(n));
            }
            Some(kernel_projector(&stacked, COMPOSE_RANK_TOL).hermitian_part())
        })
        .collect();
    composed.with_domains(domains)
}

fn vstack(blocks: &[ComplexOperator]) -> ComplexOperator {
    let cols = blocks[0].cols();
    let rows: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = ComplexOperator::zeros(rows, cols);
    let mut offset = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for k in 0..cols {
                out.set(offset + i, k, b.get(i, k));
            }
        }
        offset += b.rows();
    }
    out
}

/// Which injectivity condition [`invert_transfer`] enforces at atoms of
/// positive mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Injectivity {
    /// `Φ_j` injective on the support `Im(ν_j)`; enough for the round trip
    /// on samples of the measure.
    #[default]
    OnSupport,
    /// `Φ_j` injective on the whole input space.
    Strict,
}

/// Left inverse `Φ⁻¹` of a filter, defined on `Im(Φ_j)` at atoms of
/// positive mass and zero at null atoms.
pub fn invert_transfer(
    phi: &TransferFunction,
    nu: &AtomicTracePovm,
    rank_tol: f64,
    mode: Injectivity,
) -> Result<TransferFunction> {
    check_transfer_shape(phi, nu, "transfer function")?;
    require_filterable(phi, nu)?;
    let (m, n) = (phi.out_dim(), phi.in_dim());
    let mut ops = Vec::with_capacity(phi.len());
    let mut domains = Vec::with_capacity(phi.len());
    for j in 0..phi.len() {
        if nu.is_null_atom(j) {
            ops.push(ComplexOperator::zeros(n, m));
            domains.push(None);
            continue;
        }
        let full = phi.effective(j);
        let scale = svd(&full).singular_values.first().copied().unwrap_or(0.0);
        let restricted = match mode {
            Injectivity::Strict => full.clone(),
            Injectivity::OnSupport => &full * &range_projector(nu.weight(j), SUPPORT_RANK_TOL),
        };
        let needed = match mode {
            Injectivity::Strict => n,
            Injectivity::OnSupport => crate::operator::numerical_rank(nu.weight(j), SUPPORT_RANK_TOL),
        };
        let s = svd(&restricted).singular_values;
        let smallest = if needed > s.len() { 0.0 } else { s[needed - 1] };
        let ratio = if scale > 0.0 { smallest / scale } else { 0.0 };
        if ratio <= rank_tol {
            return Err(Error::NotInvertible { atom: j, freq: phi.freqs()[j], ratio, rank_tol });
        }
        let (inv, proj) = pinv_on_range(&restricted, rank_tol);
        ops.push(inv);
        domains.push(Some(proj.hermitian_part()));
    }
    TransferFunction::new(phi.freqs().to_vec(), ops)?.with_domains(domains)
}

/// `Φ̂(λ_j) = Σ_s F_s e^{−iλ_j s}`.
pub fn fir_to_transfer(fir: &FirFilter, freqs: &[f64]) -> TransferFunction {
    let ops = freqs
        .iter()
        .map(|&lambda| {
            let mut acc = ComplexOperator::zeros(fir.out_dim(), fir.in_dim());
            for (s, tap) in fir.taps() {
                acc += &tap.scale(C64::from_polar(1.0, -lambda * s as f64));
            }
            acc
        })
        .collect();
    TransferFunction::new(freqs.to_vec(), ops).expect("FIR transfer is consistent")
}

/// Circular convolution `Y_t = Σ_s F_s X_{(t−s) mod M}` over one period.
pub fn apply_fir_time(fir: &FirFilter, x: &ProcessSample) -> Result<ProcessSample> {
    if fir.in_dim() != x.dim() {
        return Err(Error::Dimension(format!(
            "FIR filter acts on dimension {}, process has dimension {}",
            fir.in_dim(),
            x.dim()
        )));
    }
    let period = x.period() as i64;
    let reps = x.realizations();
    let mut values = Vec::with_capacity(x.period());
    for t in 0..period {
        let mut out = VectorEnsemble::zeros(fir.out_dim(), reps);
        for (s, tap) in fir.taps() {
            let src = x.at((t - s).rem_euclid(period) as usize);
            for r in 0..reps {
                let y = tap.apply(src.get(r));
                for (o, v) in out.get_mut(r).iter_mut().zip(y) {
                    *o += v;
                }
            }
        }
        values.push(out);
    }
    ProcessSample::new(fir.out_dim(), values)
}

/// Multiplies `Φ` by the character `λ ↦ e^{iλh}`.
pub fn modulate_transfer(phi: &TransferFunction, h: i64) -> TransferFunction {
    let ops = phi
        .ops()
        .iter()
        .zip(phi.freqs())
        .map(|(op, &lambda)| op.scale(C64::from_polar(1.0, lambda * h as f64)))
        .collect();
    TransferFunction::new(phi.freqs().to_vec(), ops)
        .and_then(|t| t.with_domains(phi.domains().to_vec()))
        .expect("modulation preserves consistency")
}
