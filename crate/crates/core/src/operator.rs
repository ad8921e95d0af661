//! Dense complex operators between finite-dimensional Hilbert spaces.
//!
//! [`ComplexOperator`] is a row-major `rows × cols` complex matrix standing
//! in for a bounded (and, at finite dimension, automatically Schatten-class)
//! operator `ℂ^cols → ℂ^rows`. The numerical kernels here are cyclic Jacobi
//! methods: a two-sided sweep for Hermitian eigenproblems and a one-sided
//! (Hestenes) sweep for the SVD. Both are deterministic and keep small
//! eigen/singular values to high relative accuracy, which the range and
//! injectivity tests in the filtering layer rely on.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute floor applied to every relative tolerance.
pub const TOL_FLOOR: f64 = 1e-14;

/// Default relative tolerance for positivity checks.
pub const PSD_TOL: f64 = 1e-10;

/// Eigenvalues at or below this fraction of the largest one are treated as
/// round-off zeros by square roots and support projectors.
pub const EIG_FLOOR: f64 = 1e-13;

const MAX_SWEEPS: usize = 80;

#[inline]
pub(crate) fn threshold(tol: f64, scale: f64) -> f64 {
    (tol * scale).max(TOL_FLOOR)
}

#[derive(Clone, PartialEq)]
pub struct ComplexOperator {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl ComplexOperator {
    /// Builds an operator from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("operator dimensions must be positive, got {rows}×{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}×{cols} operator needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(k) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { row: k / cols, col: k % cols });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "operator dimensions must be positive");
        Self { rows, cols, entries: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(rows > 0 && cols > 0, "operator dimensions must be positive");
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Real matrix given as rows; panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| C64::new(rows[i][j], 0.0))
    }

    /// Operator whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Self {
        let rows = columns[0].len();
        assert!(columns.iter().all(|c| c.len() == rows), "ragged columns");
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, factor: C64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|&z| f(z)).collect() }
    }

    pub fn try_matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot compose {}×{} with {}×{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(self.matmul_unchecked(rhs))
    }

    fn matmul_unchecked(&self, rhs: &Self) -> Self {
        let (m, k, n) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![C64::new(0.0, 0.0); m * n];
        for i in 0..m {
            let row = &self.entries[i * k..(i + 1) * k];
            let dst = &mut out[i * n..(i + 1) * n];
            for (l, &a) in row.iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let src = &rhs.entries[l * n..(l + 1) * n];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Self { rows: m, cols: n, entries: out }
    }

    /// `P x`. Panics if `x.len() != cols`.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "vector length does not match operator columns");
        self.entries.chunks_exact(self.cols).map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `(P + Pᴴ) / 2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square(), "hermitian part of a non-square operator");
        Self::from_fn(self.rows, self.cols, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5)
    }

    /// Frobenius distance, used as the residual metric throughout.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_same_shape(&self, other: &Self) {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "operator shapes differ: {}×{} vs {}×{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
    }
}

impl fmt::Debug for ComplexOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexOperator {}×{} [", self.rows, self.cols)?;
        for row in self.entries.chunks_exact(self.cols) {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &ComplexOperator {
    type Output = ComplexOperator;
    fn add(self, rhs: &ComplexOperator) -> ComplexOperator {
        self.check_same_shape(rhs);
        ComplexOperator {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexOperator {
    type Output = ComplexOperator;
    fn sub(self, rhs: &ComplexOperator) -> ComplexOperator {
        self.check_same_shape(rhs);
        ComplexOperator {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexOperator {
    type Output = ComplexOperator;
    fn neg(self) -> ComplexOperator {
        self.map(|z| -z)
    }
}

impl AddAssign<&ComplexOperator> for ComplexOperator {
    fn add_assign(&mut self, rhs: &ComplexOperator) {
        self.check_same_shape(rhs);
        for (a, b) in self.entries.iter_mut().zip(&rhs.entries) {
            *a += b;
        }
    }
}

/// Composition. Panics on mismatched inner dimensions; use
/// [`ComplexOperator::try_matmul`] for a fallible version.
impl Mul for &ComplexOperator {
    type Output = ComplexOperator;
    fn mul(self, rhs: &ComplexOperator) -> ComplexOperator {
        assert_eq!(self.cols, rhs.rows, "cannot compose {}×{} with {}×{}", self.rows, self.cols, rhs.rows, rhs.cols);
        self.matmul_unchecked(rhs)
    }
}

/// Conjugate transpose.
pub fn adjoint(p: &ComplexOperator) -> ComplexOperator {
    p.adjoint()
}

/// `x ⊗ y = x yᴴ`, so that `(x ⊗ y) z = ⟨z, y⟩ x`.
pub fn outer(x: &[C64], y: &[C64]) -> ComplexOperator {
    ComplexOperator::from_fn(x.len(), y.len(), |i, j| x[i] * y[j].conj())
}

/// `⟨x, y⟩ = Σ x_k conj(y_k)`, linear in the first argument.
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    assert_eq!(x.len(), y.len(), "vector length mismatch");
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn vector_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchattenP {
    One,
    Two,
    Infinity,
}

/// Eigendecomposition `A = V Λ Vᴴ` of a Hermitian operator.
///
/// Eigenvalues are sorted non-increasing; each eigenvector column is
/// normalised so that its largest-modulus entry (the first one, on exact
/// ties) is real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigenSystem {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexOperator,
}

impl HermitianEigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvectors as the columns of a unitary operator.
    pub fn eigenvectors(&self) -> &ComplexOperator {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, n: usize) -> Vec<C64> {
        self.eigenvectors.column(n)
    }

    /// `Σ_n f(λ_n) v_n ⊗ v_n`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> ComplexOperator {
        let v = &self.eigenvectors;
        let n = self.dim();
        let scaled = ComplexOperator::from_fn(n, n, |i, k| v.get(i, k) * f(self.eigenvalues[k]));
        &scaled * &v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexOperator {
        self.spectral_map(|x| x)
    }
}

/// Thin SVD `A = U Σ Vᴴ` with `k = min(rows, cols)` singular triplets,
/// singular values sorted non-increasing. Columns of `U` (resp. `V` for
/// wide inputs) belonging to exactly zero singular values are zero.
#[derive(Debug, Clone)]
pub struct SingularValueDecomposition {
    pub u: ComplexOperator,
    pub singular_values: Vec<f64>,
    pub v: ComplexOperator,
}

pub fn svd(p: &ComplexOperator) -> SingularValueDecomposition {
    if p.rows >= p.cols {
        one_sided_jacobi(p)
    } else {
        let t = one_sided_jacobi(&p.adjoint());
        SingularValueDecomposition { u: t.v, singular_values: t.singular_values, v: t.u }
    }
}

fn one_sided_jacobi(a: &ComplexOperator) -> SingularValueDecomposition {
    let (m, n) = (a.rows, a.cols);
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect())
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut cols, p, q, phase, c, s);
                rotate_pair(&mut v, p, q, phase, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = cols.iter().map(|c| vector_norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u = ComplexOperator::zeros(m, n);
    let mut vv = ComplexOperator::zeros(n, n);
    let mut singular_values = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        singular_values.push(s);
        if s > 0.0 {
            for i in 0..m {
                u.set(i, k, cols[j][i] / s);
            }
        }
        for i in 0..n {
            vv.set(i, k, v[j][i]);
        }
    }
    SingularValueDecomposition { u, singular_values, v: vv }
}

fn rotate_pair(cols: &mut [Vec<C64>], p: usize, q: usize, phase: C64, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *x;
        let b = *y * phase;
        *x = a * c - b * s;
        *y = a * s + b * c;
    }
}

/// Cyclic two-sided Jacobi on the Hermitian part of `a`. Returns unsorted
/// eigenvalues and the accumulated unitary.
fn jacobi_eigen(a: &ComplexOperator) -> (Vec<f64>, ComplexOperator) {
    let n = a.rows;
    let mut m = a.hermitian_part();
    let mut v = ComplexOperator::identity(n);
    let total: f64 = m.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off == 0.0 || off <= f64::EPSILON * total * 1e-2 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sgn / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                if t == 0.0 {
                    continue;
                }
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let e = (apq / mag).conj();
                // G = diag(1, e) · [[c, s], [-s, c]] restricted to (p, q).
                let g = [[C64::new(c, 0.0), C64::new(s, 0.0)], [e * (-s), e * c]];

                for k in 0..n {
                    let xp = m.get(k, p);
                    let xq = m.get(k, q);
                    m.set(k, p, xp * g[0][0] + xq * g[1][0]);
                    m.set(k, q, xp * g[0][1] + xq * g[1][1]);
                }
                for k in 0..n {
                    let xp = m.get(p, k);
                    let xq = m.get(q, k);
                    m.set(p, k, g[0][0].conj() * xp + g[1][0].conj() * xq);
                    m.set(q, k, g[0][1].conj() * xp + g[1][1].conj() * xq);
                }
                m.set(p, q, C64::new(0.0, 0.0));
                m.set(q, p, C64::new(0.0, 0.0));
                let dp = m.get(p, p).re;
                let dq = m.get(q, q).re;
                m.set(p, p, C64::new(dp, 0.0));
                m.set(q, q, C64::new(dq, 0.0));
                for k in 0..n {
                    let xp = v.get(k, p);
                    let xq = v.get(k, q);
                    v.set(k, p, xp * g[0][0] + xq * g[1][0]);
                    v.set(k, q, xp * g[0][1] + xq * g[1][1]);
                }
            }
        }
    }
    ((0..n).map(|i| m.get(i, i).re).collect(), v)
}

fn sorted_eigensystem(a: &ComplexOperator) -> HermitianEigenSystem {
    let n = a.rows;
    let (values, vectors) = jacobi_eigen(a);
    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep the solver's order
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));

    let mut out = ComplexOperator::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        eigenvalues.push(values[j]);
        let col = vectors.column(j);
        let mut lead = 0;
        let mut lead_mod = -1.0;
        for (i, z) in col.iter().enumerate() {
            let r = z.norm();
            if r > lead_mod {
                lead_mod = r;
                lead = i;
            }
        }
        let phase = if lead_mod > 0.0 { col[lead].conj() / lead_mod } else { C64::new(1.0, 0.0) };
        for (i, z) in col.iter().enumerate() {
            let w = if i == lead { C64::new(lead_mod, 0.0) } else { z * phase };
            out.set(i, k, w);
        }
    }
    HermitianEigenSystem { eigenvalues, eigenvectors: out }
}

fn require_square(p: &ComplexOperator, what: &str) -> Result<()> {
    if p.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension(format!("{what} requires a square operator, got {}×{}", p.rows, p.cols)))
    }
}

fn asymmetry(p: &ComplexOperator) -> f64 {
    p.distance(&p.adjoint())
}

/// Eigendecomposition of a Hermitian operator.
pub fn hermitian_eig(p: &ComplexOperator) -> Result<HermitianEigenSystem> {
    require_square(p, "hermitian_eig")?;
    let asym = asymmetry(p);
    let limit = threshold(1e-10, p.frobenius_norm());
    if asym > limit {
        return Err(Error::NotHermitian { asymmetry: asym, threshold: limit });
    }
    Ok(sorted_eigensystem(p))
}

/// Positivity test with thresholds relative to `max(‖P‖, scale)`.
///
/// `scale` lets callers measure tiny members of a family (atoms of a
/// measure, say) against the size of the whole family.
pub fn psd_check_scaled(p: &ComplexOperator, tol: f64, scale: f64) -> Result<bool> {
    require_square(p, "psd_check")?;
    let norm = p.frobenius_norm();
    if asymmetry(p) > threshold(tol, norm.max(scale)) {
        return Ok(false);
    }
    let (values, _) = jacobi_eigen(p);
    let trace_norm: f64 = values.iter().map(|x| x.abs()).sum();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(min >= -threshold(tol, trace_norm.max(scale)))
}

/// `P ⪰ 0` up to `tol`, relative to `‖P‖` (symmetry) and `‖P‖₁` (eigenvalues).
pub fn psd_check(p: &ComplexOperator, tol: f64) -> Result<bool> {
    psd_check_scaled(p, tol, 0.0)
}

/// Positive square root, clamping eigenvalues in `[−tol·scale, 0)` and
/// those below [`EIG_FLOOR`] to zero.
pub fn psd_sqrt_scaled(p: &ComplexOperator, tol: f64, scale: f64) -> Result<ComplexOperator> {
    require_square(p, "psd_sqrt")?;
    let norm = p.frobenius_norm();
    let asym = asymmetry(p);
    let sym_limit = threshold(tol, norm.max(scale));
    if asym > sym_limit {
        return Err(Error::NotHermitian { asymmetry: asym, threshold: sym_limit });
    }
    let eig = sorted_eigensystem(p);
    let trace_norm: f64 = eig.eigenvalues.iter().map(|x| x.abs()).sum();
    let limit = threshold(tol, trace_norm.max(scale));
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -limit {
        return Err(Error::NotPositive { min_eigenvalue: min, threshold: limit });
    }
    let floor = EIG_FLOOR * eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    Ok(eig.spectral_map(|x| if x <= floor { 0.0 } else { x.sqrt() }))
}

pub fn psd_sqrt(p: &ComplexOperator) -> Result<ComplexOperator> {
    psd_sqrt_scaled(p, PSD_TOL, 0.0)
}

pub fn singular_values(p: &ComplexOperator) -> Vec<f64> {
    svd(p).singular_values
}

pub fn schatten_norm(p: &ComplexOperator, which: SchattenP) -> f64 {
    let s = singular_values(p);
    match which {
        SchattenP::One => s.iter().sum(),
        SchattenP::Two => s.iter().map(|x| x * x).sum::<f64>().sqrt(),
        SchattenP::Infinity => s.first().copied().unwrap_or(0.0),
    }
}

/// Pseudoinverse restricted to the numerical range of `P`.
///
/// Returns `(P⁻, Π)` where `Π` is the orthogonal projector onto `Im(P)`,
/// `P P⁻ = Π` and `P⁻ P` projects onto the row space. Singular values at
/// or below `rank_tol · σ_max` count as zero.
pub fn pinv_on_range(p: &ComplexOperator, rank_tol: f64) -> (ComplexOperator, ComplexOperator) {
    let d = svd(p);
    let mut pinv = ComplexOperator::zeros(p.cols, p.rows);
    let mut proj = ComplexOperator::zeros(p.rows, p.rows);
    let smax = d.singular_values.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return (pinv, proj);
    }
    for (k, &s) in d.singular_values.iter().enumerate() {
        if s <= rank_tol * smax {
            break;
        }
        let u = d.u.column(k);
        let v = d.v.column(k);
        pinv += &outer(&v, &u).scale_real(1.0 / s);
        proj += &outer(&u, &u);
    }
    (pinv, proj)
}

/// Orthogonal projector onto `Im(P)`.
pub fn range_projector(p: &ComplexOperator, rank_tol: f64) -> ComplexOperator {
    pinv_on_range(p, rank_tol).1
}

/// Orthogonal projector onto `ker(P)`.
pub fn kernel_projector(p: &ComplexOperator, rank_tol: f64) -> ComplexOperator {
    let (pinv, _) = pinv_on_range(p, rank_tol);
    let row_space = &pinv * p;
    &ComplexOperator::identity(p.cols) - &row_space
}

/// Numerical rank: singular values above `rank_tol · σ_max`.
pub fn numerical_rank(p: &ComplexOperator, rank_tol: f64) -> usize {
    let s = singular_values(p);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rank_tol * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_operator, random_psd, random_unitary, random_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn adjoint_of_scalar_conjugates() {
        let p = ComplexOperator::new(1, 1, vec![c(2.0, 1.0)]).unwrap();
        assert_eq!(adjoint(&p).entries(), &[c(2.0, -1.0)]);
        assert_eq!(adjoint(&ComplexOperator::identity(3)), ComplexOperator::identity(3));
    }

    #[test]
    fn adjoint_inner_product_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_operator(&mut rng, 3, 2);
        assert_eq!(adjoint(&adjoint(&p)), p);
        for _ in 0..100 {
            let x = random_vector(&mut rng, 2);
            let y = random_vector(&mut rng, 3);
            let lhs = inner(&p.apply(&x), &y);
            let rhs = inner(&x, &p.adjoint().apply(&y));
            assert!((lhs - rhs).norm() <= 1e-12);
        }
    }

    #[test]
    fn outer_products() {
        let e1 = vec![c(1.0, 0.0), c(0.0, 0.0)];
        assert_eq!(outer(&e1, &e1), ComplexOperator::from_diagonal(&[1.0, 0.0]));
        let zero = vec![c(0.0, 0.0); 2];
        assert_eq!(outer(&zero, &e1).max_abs(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_vector(&mut rng, 4);
        let y = random_vector(&mut rng, 4);
        let xy = outer(&x, &y);
        for _ in 0..50 {
            let z = random_vector(&mut rng, 4);
            let expect: Vec<C64> = x.iter().map(|xi| xi * inner(&z, &y)).collect();
            let got = xy.apply(&z);
            let err: f64 = got.iter().zip(&expect).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err <= 1e-13, "err {err}");
        }
    }

    #[test]
    fn psd_check_cases() {
        assert!(psd_check(&ComplexOperator::identity(3), 1e-10).unwrap());
        assert!(!psd_check(&ComplexOperator::from_diagonal(&[1.0, -1.0]), 1e-10).unwrap());
        assert!(psd_check(&ComplexOperator::zeros(2, 2), 1e-10).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_operator(&mut rng, 4, 3);
        assert!(psd_check(&(&a * &a.adjoint()), 1e-10).unwrap());
        assert!(matches!(psd_check(&a, 1e-10), Err(Error::Dimension(_))));
    }

    #[test]
    fn psd_sqrt_cases() {
        let s = psd_sqrt(&ComplexOperator::from_diagonal(&[4.0, 9.0])).unwrap();
        assert!(s.distance(&ComplexOperator::from_diagonal(&[2.0, 3.0])) <= 1e-14);
        assert_eq!(psd_sqrt(&ComplexOperator::zeros(3, 3)).unwrap().max_abs(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = random_psd(&mut rng, 5, 5);
        let s = psd_sqrt(&p).unwrap();
        assert!(psd_check(&s, 1e-10).unwrap());
        assert!((&s * &s).distance(&p) <= 1e-10 * p.frobenius_norm());
        assert!(matches!(psd_sqrt(&ComplexOperator::from_diagonal(&[1.0, -1.0])), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn schatten_norms() {
        let d = ComplexOperator::from_diagonal(&[3.0, 4.0]);
        assert!((schatten_norm(&d, SchattenP::One) - 7.0).abs() < 1e-14);
        assert!((schatten_norm(&d, SchattenP::Two) - 5.0).abs() < 1e-14);
        assert!((schatten_norm(&d, SchattenP::Infinity) - 4.0).abs() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_vector(&mut rng, 3);
        let y = random_vector(&mut rng, 4);
        let r1 = outer(&x, &y);
        let expect = vector_norm(&x) * vector_norm(&y);
        assert!((schatten_norm(&r1, SchattenP::One) - expect).abs() <= 1e-12 * expect);
        assert!((schatten_norm(&r1, SchattenP::Two) - expect).abs() <= 1e-12 * expect);

        let a = random_operator(&mut rng, 4, 3);
        let fro: f64 = a.entries().iter().map(|z| z.re * z.re + z.im * z.im).sum::<f64>().sqrt();
        assert!((schatten_norm(&a, SchattenP::Two) - fro).abs() <= 1e-12 * fro);
    }

    #[test]
    fn hermitian_eig_cases() {
        let e = hermitian_eig(&ComplexOperator::from_diagonal(&[1.0, 3.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues(), &[3.0, 2.0, 1.0]);

        let e = hermitian_eig(&ComplexOperator::identity(2)).unwrap();
        assert_eq!(e.eigenvalues(), &[1.0, 1.0]);
        let v = e.eigenvectors();
        assert!((&v.adjoint() * v).distance(&ComplexOperator::identity(2)) <= 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let h = random_hermitian(&mut rng, 6);
        let e = hermitian_eig(&h).unwrap();
        assert!(e.reconstruct().distance(&h) <= 1e-10 * h.frobenius_norm());
        assert!(e.eigenvalues().windows(2).all(|w| w[0] >= w[1]));
        for n in 0..6 {
            let col = e.eigenvector(n);
            let (lead, _) =
                col.iter()
                    .enumerate()
                    .fold((0, -1.0), |(bi, bm), (i, z)| if z.norm() > bm { (i, z.norm()) } else { (bi, bm) });
            assert_eq!(col[lead].im, 0.0);
            assert!(col[lead].re > 0.0);
        }
        assert!(matches!(
            hermitian_eig(&ComplexOperator::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]])),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn pinv_cases() {
        let (pinv, proj) = pinv_on_range(&ComplexOperator::from_diagonal(&[2.0, 0.0]), 1e-12);
        assert!(pinv.distance(&ComplexOperator::from_diagonal(&[0.5, 0.0])) <= 1e-15);
        assert!(proj.distance(&ComplexOperator::from_diagonal(&[1.0, 0.0])) <= 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_unitary(&mut rng, 3);
        let (pinv, proj) = pinv_on_range(&u, 1e-12);
        assert!(pinv.distance(&u.adjoint()) <= 1e-12);
        assert!(proj.distance(&ComplexOperator::identity(3)) <= 1e-12);

        let a = random_operator(&mut rng, 4, 2);
        let (pinv, _) = pinv_on_range(&a, 1e-12);
        assert!((&pinv * &a).distance(&ComplexOperator::identity(2)) <= 1e-10);

        let (pinv, proj) = pinv_on_range(&ComplexOperator::zeros(2, 3), 1e-12);
        assert_eq!(pinv.max_abs(), 0.0);
        assert_eq!(proj.max_abs(), 0.0);
    }

    #[test]
    fn svd_of_wide_and_rank_deficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_operator(&mut rng, 2, 5);
        let d = svd(&a);
        let sigma = ComplexOperator::from_diagonal(&d.singular_values);
        let rebuilt = &(&d.u * &sigma) * &d.v.adjoint();
        assert!(rebuilt.distance(&a) <= 1e-12 * a.frobenius_norm());

        let x = random_vector(&mut rng, 4);
        let r1 = &outer(&x, &x) + &outer(&x, &x);
        assert_eq!(numerical_rank(&r1, 1e-10), 1);
        let k = kernel_projector(&r1, 1e-10);
        assert!((&r1 * &k).frobenius_norm() <= 1e-12 * r1.frobenius_norm());
    }

    #[test]
    fn invalid_construction() {
        assert!(matches!(ComplexOperator::new(2, 2, vec![c(0.0, 0.0); 3]), Err(Error::Dimension(_))));
        assert!(matches!(
            ComplexOperator::new(1, 2, vec![c(0.0, 0.0), c(f64::NAN, 0.0)]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
    }
}
