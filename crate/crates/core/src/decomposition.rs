//! Cramér–Karhunen–Loève decomposition and harmonic functional PCA.
//!
//! Everything is computed from eigensystems of the atoms `ν_j` themselves.
//! The density eigenvalues `σ_n(g_j) = σ_n(ν_j) / w_j` are reported for the
//! variation measure `w_j = Tr ν_j`; eigenvectors do not depend on `w`.

use crate::cagos::CagosRealization;
use crate::error::{Error, Result};
use crate::filtering::{apply_filter, check_filterable, TransferFunction};
use crate::operator::{hermitian_eig, outer, ComplexOperator, HermitianEigenSystem, C64, EIG_FLOOR};
use crate::povm::{gramian_norm, variation_measure, AtomicTracePovm};

/// Eigenvalues at or below this fraction of an atom's largest eigenvalue
/// are outside its support.
pub const CKL_RANK_TOL: f64 = EIG_FLOOR;

/// Relative gap below which eigenvalues straddling a rank cut count as tied.
pub const TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct CklSystem {
    source: AtomicTracePovm,
    eigen: Vec<HermitianEigenSystem>,
    ranks: Vec<usize>,
    base_weights: Vec<f64>,
    completeness_residual: f64,
}

/// Per-atom eigensystems of `ν` with components beyond each atom's rank
/// discarded.
pub fn ckl_decompose(nu: &AtomicTracePovm) -> Result<CklSystem> {
    let eigen = nu.atoms().iter().map(|a| hermitian_eig(&a.weight)).collect::<Result<Vec<_>>>()?;
    let ranks = eigen
        .iter()
        .enumerate()
        .map(|(j, e)| {
            if nu.is_null_atom(j) {
                return 0;
            }
            let top = e.eigenvalues()[0];
            e.eigenvalues().iter().filter(|&&s| s > CKL_RANK_TOL * top).count()
        })
        .collect();
    let mut sys =
        CklSystem { source: nu.clone(), eigen, ranks, base_weights: variation_measure(nu), completeness_residual: 0.0 };
    let dim = nu.dim();
    let residual_ops = (0..nu.len()).map(|j| &sys.support_projector(j) - &ComplexOperator::identity(dim)).collect();
    sys.completeness_residual = gramian_norm(&TransferFunction::new(nu.freqs(), residual_ops)?, nu)?;
    Ok(sys)
}

impl CklSystem {
    pub fn source(&self) -> &AtomicTracePovm {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.eigen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigen.is_empty()
    }

    pub fn rank(&self, j: usize) -> usize {
        self.ranks[j]
    }

    /// Eigenvalues `σ_n(ν_j)`, non-increasing.
    pub fn atom_eigenvalues(&self, j: usize) -> &[f64] {
        self.eigen[j].eigenvalues()
    }

    /// Density eigenvalues `σ_n(g_j)`, zero beyond the rank.
    pub fn sigmas(&self, j: usize) -> Vec<f64> {
        let w = self.base_weights[j];
        (0..self.dim())
            .map(|n| if n < self.ranks[j] && w > 0.0 { self.atom_eigenvalues(j)[n] / w } else { 0.0 })
            .collect()
    }

    /// `φ_n(λ_j)`, or the zero vector when `n` is beyond the rank.
    pub fn vector(&self, j: usize, n: usize) -> Vec<C64> {
        if n < self.ranks[j] {
            self.eigen[j].eigenvector(n)
        } else {
            vec![C64::new(0.0, 0.0); self.dim()]
        }
    }

    /// `Σ_n φ_n ⊗ φ_n` at atom `j`: the projector onto `Im(ν_j)`.
    pub fn support_projector(&self, j: usize) -> ComplexOperator {
        let mut acc = ComplexOperator::zeros(self.dim(), self.dim());
        for n in 0..self.ranks[j] {
            let v = self.eigen[j].eigenvector(n);
            acc += &outer(&v, &v);
        }
        acc
    }

    /// `Σ_n σ_n φ_n ⊗ φ_n`, which reproduces the density `g_j`.
    pub fn reconstruct_density(&self, j: usize) -> ComplexOperator {
        let sigmas = self.sigmas(j);
        let mut acc = ComplexOperator::zeros(self.dim(), self.dim());
        for n in 0..self.ranks[j] {
            let v = self.eigen[j].eigenvector(n);
            acc += &outer(&v, &v).scale_real(sigmas[n]);
        }
        acc
    }

    /// `‖Σ_n φ_n ⊗ φ_n − I‖_ν`.
    pub fn completeness_residual(&self) -> f64 {
        self.completeness_residual
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n >= self.dim() {
            return Err(Error::IndexOutOfRange { index: n, len: self.dim() });
        }
        Ok(())
    }

    /// Rank-one transfer `λ_j ↦ φ_n(λ_j) ⊗ φ_n(λ_j)`.
    pub fn component_transfer(&self, n: usize) -> Result<TransferFunction> {
        self.check_index(n)?;
        let ops = (0..self.len())
            .map(|j| {
                let v = self.vector(j, n);
                outer(&v, &v)
            })
            .collect();
        TransferFunction::new(self.source.freqs(), ops)
    }

    /// Row functional `λ_j ↦ φ_n(λ_j)ᴴ`.
    pub fn scalar_transfer(&self, n: usize) -> Result<TransferFunction> {
        self.check_index(n)?;
        let ops = (0..self.len())
            .map(|j| {
                let v = self.vector(j, n);
                ComplexOperator::new(1, self.dim(), v.iter().map(|z| z.conj()).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        TransferFunction::new(self.source.freqs(), ops)
    }
}

/// Component `n` of a realization: `F_{φ_n ⊗ φ_n}(W)`.
pub fn ckl_components(w: &CagosRealization, sys: &CklSystem, n: usize) -> Result<CagosRealization> {
    apply_filter(&sys.component_transfer(n)?, w)
}

/// Scalar component `F_{φ_nᴴ}(W)`.
pub fn ckl_scalar_components(w: &CagosRealization, sys: &CklSystem, n: usize) -> Result<CagosRealization> {
    apply_filter(&sys.scalar_transfer(n)?, w)
}

/// Target rank `q_j ≥ 1` per atom; ranks above the dimension act as the
/// dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankFunction {
    values: Vec<usize>,
}

impl RankFunction {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidRank("rank function needs at least one atom".into()));
        }
        if let Some(j) = values.iter().position(|&q| q == 0) {
            return Err(Error::InvalidRank(format!("rank at atom {j} is 0, ranks must be at least 1")));
        }
        Ok(Self { values })
    }

    pub fn constant(q: usize, atoms: usize) -> Result<Self> {
        Self::new(vec![q; atoms])
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// `q_j ∧ dim`.
    pub fn at(&self, j: usize, dim: usize) -> usize {
        self.values[j].min(dim)
    }

    fn check_len(&self, atoms: usize) -> Result<()> {
        if self.values.len() != atoms {
            return Err(Error::Alignment(format!(
                "rank function has {} values, measure has {atoms} atoms",
                self.values.len()
            )));
        }
        Ok(())
    }
}

/// `Θ_j = Σ_{n < q_j ∧ N} φ_n(λ_j) ⊗ φ_n(λ_j)`.
pub fn hfpca_projector(sys: &CklSystem, q: &RankFunction) -> Result<TransferFunction> {
    q.check_len(sys.len())?;
    let ops = (0..sys.len())
        .map(|j| {
            let mut acc = ComplexOperator::zeros(sys.dim(), sys.dim());
            for n in 0..q.at(j, sys.dim()).min(sys.rank(j)) {
                let v = sys.vector(j, n);
                acc += &outer(&v, &v);
            }
            acc
        })
        .collect();
    TransferFunction::new(sys.source.freqs(), ops)
}

/// Mean-square reconstruction error `Σ_j ‖(I − Θ_j) ν_j^{1/2}‖₂²`.
pub fn hfpca_error(nu: &AtomicTracePovm, theta: &TransferFunction) -> Result<f64> {
    check_filterable(theta, nu)?.into_result()?;
    if theta.out_dim() != nu.dim() {
        return Err(Error::Shape(format!(
            "projector maps into dimension {}, measure has dimension {}",
            theta.out_dim(),
            nu.dim()
        )));
    }
    let id = ComplexOperator::identity(nu.dim());
    Ok((0..nu.len())
        .map(|j| {
            let residual = &(&id - &theta.effective(j)) * &nu.sqrt_weight(j);
            residual.frobenius_norm().powi(2)
        })
        .sum())
}

/// `Σ_j Σ_{n ≥ q_j ∧ N} σ_n(ν_j)`.
pub fn hfpca_optimal_error(sys: &CklSystem, q: &RankFunction) -> Result<f64> {
    q.check_len(sys.len())?;
    Ok((0..sys.len())
        .map(|j| sys.atom_eigenvalues(j)[q.at(j, sys.dim())..].iter().map(|s| s.max(0.0)).sum::<f64>())
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HfpcaReport {
    pub q: Vec<usize>,
    pub optimal_error: f64,
    pub achieved_error: f64,
    pub tie_warnings: Vec<String>,
}

/// Builds the optimal projector and reports its error, flagging atoms where
/// a repeated eigenvalue straddles the rank cut.
pub fn hfpca(sys: &CklSystem, q: &RankFunction) -> Result<(TransferFunction, HfpcaReport)> {
    let theta = hfpca_projector(sys, q)?;
    let achieved_error = hfpca_error(&sys.source, &theta)?;
    let optimal_error = hfpca_optimal_error(sys, q)?;
    let mut tie_warnings = Vec::new();
    for j in 0..sys.len() {
        let cut = q.at(j, sys.dim());
        let ev = sys.atom_eigenvalues(j);
        if cut >= ev.len() || sys.source.is_null_atom(j) {
            continue;
        }
        let (above, below) = (ev[cut - 1], ev[cut]);
        if above > CKL_RANK_TOL * ev[0] && above - below <= TIE_TOL * ev[0] {
            tie_warnings.push(format!(
                "atom {j} (freq {}): eigenvalue {above:e} is repeated across the rank cut q = {cut}; the projector is one of several optimal choices",
                sys.source.atoms()[j].freq
            ));
        }
    }
    let report = HfpcaReport {
        q: (0..sys.len()).map(|j| q.at(j, sys.dim())).collect(),
        optimal_error,
        achieved_error,
        tie_warnings,
    };
    Ok((theta, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cagos::{empirical_gramian, monte_carlo_band, sample_gaussian_cagos};
    use crate::povm::{gramian_inner, Atom};
    use crate::random::{random_orthonormal_frame, random_povm, random_povm_with_ranks};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diagonal_povm(diags: &[&[f64]]) -> AtomicTracePovm {
        let atoms = diags
            .iter()
            .enumerate()
            .map(|(j, d)| Atom { freq: j as f64 * 0.5, weight: ComplexOperator::from_diagonal(d) })
            .collect();
        AtomicTracePovm::new(diags[0].len(), atoms).unwrap()
    }

    fn basis(dim: usize, k: usize) -> Vec<C64> {
        (0..dim).map(|i| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0)).collect()
    }

    #[test]
    fn diagonal_atoms_give_sorted_basis() {
        let nu = diagonal_povm(&[&[0.1, 0.7, 0.2], &[0.5, 0.2, 0.3]]);
        let sys = ckl_decompose(&nu).unwrap();
        assert_eq!(sys.vector(0, 0), basis(3, 1));
        assert_eq!(sys.vector(0, 1), basis(3, 2));
        assert_eq!(sys.vector(0, 2), basis(3, 0));
        assert_eq!(sys.vector(1, 0), basis(3, 0));
        let sigmas = sys.sigmas(0);
        assert!((sigmas[0] - 0.7).abs() < 1e-15 && (sigmas[2] - 0.1).abs() < 1e-15);
        assert!(sys.completeness_residual() <= 1e-10);
        assert!(matches!(sys.component_transfer(3), Err(Error::IndexOutOfRange { index: 3, len: 3 })));
    }

    #[test]
    fn rank_one_atoms_are_complete_in_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let nu = random_povm_with_ranks(&mut rng, 3, 4, &[1]);
        let sys = ckl_decompose(&nu).unwrap();
        for j in 0..nu.len() {
            assert_eq!(sys.rank(j), 1);
            assert!(sys.support_projector(j).distance(&ComplexOperator::identity(3)) > 0.5);
        }
        assert!(sys.completeness_residual() <= 1e-10);

        let w = sample_gaussian_cagos(&nu, 20, 3).unwrap();
        let c0 = ckl_components(&w, &sys, 0).unwrap();
        for (a, b) in c0.samples().iter().zip(w.samples()) {
            assert!(a.data().iter().zip(b.data()).all(|(x, y)| (x - y).norm() <= 1e-12));
        }
    }

    #[test]
    fn random_systems_reconstruct_and_orthogonalise() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let nu = random_povm(&mut rng, 4, 5);
        let sys = ckl_decompose(&nu).unwrap();
        let density = crate::povm::radon_nikodym(&nu, None).unwrap();
        for j in 0..nu.len() {
            assert!(sys.reconstruct_density(j).distance(&density.densities[j]) <= 1e-10);
        }
        for n in 0..4 {
            for p in 0..4 {
                if n == p {
                    continue;
                }
                let (a, b) = (sys.component_transfer(n).unwrap(), sys.component_transfer(p).unwrap());
                assert!(gramian_inner(&a, &b, &nu).unwrap().max_abs() <= 1e-12);
                let (a, b) = (sys.scalar_transfer(n).unwrap(), sys.scalar_transfer(p).unwrap());
                assert!(gramian_inner(&a, &b, &nu).unwrap().max_abs() <= 1e-12);
                for j in 0..nu.len() {
                    let (u, v) = (sys.vector(j, n), sys.vector(j, p));
                    let cross = &(&outer(&u, &u) * nu.weight(j)) * &outer(&v, &v);
                    assert!(cross.max_abs() <= 1e-12);
                }
            }
        }
        assert!(sys.completeness_residual() <= 1e-10);
    }

    #[test]
    fn components_sum_to_the_realization() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let nu = random_povm(&mut rng, 3, 3);
        let sys = ckl_decompose(&nu).unwrap();
        let w = sample_gaussian_cagos(&nu, 10, 1).unwrap();
        let parts: Vec<_> = (0..3).map(|n| ckl_components(&w, &sys, n).unwrap()).collect();
        for j in 0..nu.len() {
            let mut sum = parts[0].samples()[j].clone();
            for p in &parts[1..] {
                for (a, b) in sum.data_mut().iter_mut().zip(p.samples()[j].data()) {
                    *a += b;
                }
            }
            assert!(sum.data().iter().zip(w.samples()[j].data()).all(|(x, y)| (x - y).norm() <= 1e-12));
        }
    }

    #[test]
    fn component_cross_covariance_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let nu = random_povm(&mut rng, 3, 2);
        let sys = ckl_decompose(&nu).unwrap();
        let reps = 50_000;
        let w = sample_gaussian_cagos(&nu, reps, 8).unwrap();
        let a = ckl_components(&w, &sys, 0).unwrap();
        let b = ckl_components(&w, &sys, 1).unwrap();
        let band = monte_carlo_band(reps, nu.total_trace());
        for j in 0..nu.len() {
            let cross = empirical_gramian(&a.samples()[j], &b.samples()[j]).unwrap();
            assert!(cross.max_abs() <= band);
        }
    }

    #[test]
    fn hfpca_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let nu = random_povm(&mut rng, 3, 4);
        let sys = ckl_decompose(&nu).unwrap();
        let full = hfpca_projector(&sys, &RankFunction::constant(3, 4).unwrap()).unwrap();
        for j in 0..4 {
            assert!(full.op(j).distance(&ComplexOperator::identity(3)) <= 1e-12);
        }
        let freqs = nu.freqs();
        assert!(hfpca_error(&nu, &TransferFunction::identity(&freqs, 3)).unwrap().abs() <= 1e-12);
        let zero = TransferFunction::constant(&freqs, ComplexOperator::zeros(3, 3));
        assert!((hfpca_error(&nu, &zero).unwrap() - nu.total_trace()).abs() <= 1e-12);

        let nu_d = diagonal_povm(&[&[0.9, 0.1]]);
        let sys_d = ckl_decompose(&nu_d).unwrap();
        let theta = hfpca_projector(&sys_d, &RankFunction::constant(1, 1).unwrap()).unwrap();
        assert_eq!(theta.op(0), &ComplexOperator::from_diagonal(&[1.0, 0.0]));

        let q = RankFunction::new(vec![1, 2, 3, 7]).unwrap();
        let (theta, report) = hfpca(&sys, &q).unwrap();
        assert_eq!(report.q, vec![1, 2, 3, 3]);
        assert!((report.achieved_error - report.optimal_error).abs() <= 1e-10);
        for j in 0..4 {
            let t = theta.op(j);
            assert!((t * t).distance(t) <= 1e-10);
            assert!(crate::operator::numerical_rank(t, 1e-10) <= q.at(j, 3));
        }
        for _ in 0..200 {
            let ops = (0..4)
                .map(|j| {
                    let frame = random_orthonormal_frame(&mut rng, 3, q.at(j, 3));
                    &frame * &frame.adjoint()
                })
                .collect();
            let competitor = TransferFunction::new(freqs.clone(), ops).unwrap();
            assert!(hfpca_error(&nu, &competitor).unwrap() >= report.optimal_error - 1e-12);
        }

        let mut prev = f64::INFINITY;
        for k in 1..=3 {
            let e = hfpca_optimal_error(&sys, &RankFunction::constant(k, 4).unwrap()).unwrap();
            assert!(e <= prev);
            prev = e;
        }
        assert!(matches!(RankFunction::new(vec![1, 0]), Err(Error::InvalidRank(_))));
    }

    #[test]
    fn ties_across_the_cut_are_reported() {
        let nu = diagonal_povm(&[&[0.4, 0.4, 0.2]]);
        let sys = ckl_decompose(&nu).unwrap();
        let (_, report) = hfpca(&sys, &RankFunction::constant(1, 1).unwrap()).unwrap();
        assert_eq!(report.tie_warnings.len(), 1);
        let (_, report) = hfpca(&sys, &RankFunction::constant(2, 1).unwrap()).unwrap();
        assert!(report.tie_warnings.is_empty());
        assert!((report.achieved_error - 0.2).abs() <= 1e-15);
    }
}
