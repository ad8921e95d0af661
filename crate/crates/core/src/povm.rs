//! Atomic trace-class positive operator valued measures on `(−π, π]`.
//!
//! A measure is a finite list of atoms `(λ_j, ν_j)` with `ν_j ⪰ 0`. Every
//! integral is then a finite sum, and densities with respect to a scalar
//! dominating measure are per-atom quotients `g_j = ν_j / w_j`. Atoms whose
//! trace vanishes carry no variation mass: they are kept, but every
//! "almost everywhere" condition skips them.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::filtering::TransferFunction;
use crate::operator::{
    psd_check_scaled, psd_sqrt_scaled, schatten_norm, threshold, ComplexOperator, HermitianEigenSystem, SchattenP, C64,
    PSD_TOL,
};

/// Frequencies closer than this are the same point of the circle.
pub const FREQ_MERGE_TOL: f64 = 1e-12;

/// Atoms with trace at or below this fraction of the total mass are null.
pub const NULL_MASS_REL: f64 = 1e-14;

/// Default tolerance for the domain condition of partial operators.
pub const DOMAIN_TOL: f64 = 1e-8;

/// Maps a frequency onto `(−π, π]`. Values already there are returned
/// bit-for-bit.
pub fn canonical_frequency(freq: f64) -> f64 {
    if freq > -PI && freq <= PI {
        return freq;
    }
    let wrapped = (freq + PI).rem_euclid(2.0 * PI) - PI;
    if wrapped <= -PI {
        PI
    } else {
        wrapped
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub freq: f64,
    pub weight: ComplexOperator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomicTracePovm {
    dim: usize,
    atoms: Vec<Atom>,
}

impl AtomicTracePovm {
    /// Canonicalises frequencies, merges coincident atoms and checks that
    /// every weight is positive relative to the total mass.
    pub fn new(dim: usize, atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        if dim == 0 {
            return Err(Error::Dimension("measure dimension must be positive".into()));
        }
        let mut list = Vec::with_capacity(atoms.len());
        for (j, a) in atoms.into_iter().enumerate() {
            if a.weight.rows() != dim || a.weight.cols() != dim {
                return Err(Error::Dimension(format!(
                    "atom {j} weight is {}×{}, expected {dim}×{dim}",
                    a.weight.rows(),
                    a.weight.cols()
                )));
            }
            if !a.freq.is_finite() {
                return Err(Error::Shape(format!("atom {j} has a non-finite frequency")));
            }
            list.push(Atom { freq: canonical_frequency(a.freq), weight: a.weight.hermitian_part() });
        }
        list.sort_by(|a, b| a.freq.total_cmp(&b.freq));

        let mut merged: Vec<Atom> = Vec::with_capacity(list.len());
        for a in list {
            match merged.last_mut() {
                Some(last) if a.freq - last.freq <= FREQ_MERGE_TOL => last.weight += &a.weight,
                _ => merged.push(a),
            }
        }
        if merged.len() > 1 {
            let first = merged[0].freq;
            let last = merged[merged.len() - 1].freq;
            if (first + PI) + (PI - last) <= FREQ_MERGE_TOL {
                let head = merged.remove(0);
                merged.last_mut().expect("non-empty").weight += &head.weight;
            }
        }

        let total: f64 = merged.iter().map(|a| a.weight.trace().re).sum();
        for (j, a) in merged.iter().enumerate() {
            if !psd_check_scaled(&a.weight, PSD_TOL, total)? {
                let min = crate::operator::hermitian_eig(&a.weight.hermitian_part())?
                    .eigenvalues()
                    .last()
                    .copied()
                    .unwrap_or(0.0);
                return Err(Error::AtomNotPositive {
                    atom: j,
                    min_eigenvalue: min,
                    threshold: threshold(PSD_TOL, total),
                });
            }
        }
        Ok(Self { dim, atoms: merged })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn freqs(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.freq).collect()
    }

    pub fn weight(&self, j: usize) -> &ComplexOperator {
        &self.atoms[j].weight
    }

    /// `ν(𝕋) = Σ_j ν_j`.
    pub fn total_mass(&self) -> ComplexOperator {
        let mut acc = ComplexOperator::zeros(self.dim, self.dim);
        for a in &self.atoms {
            acc += &a.weight;
        }
        acc
    }

    /// `‖ν(𝕋)‖₁ = Tr ν(𝕋)`.
    pub fn total_trace(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.trace().re).sum::<f64>().max(0.0)
    }

    pub fn is_null_atom(&self, j: usize) -> bool {
        let t = self.atoms[j].weight.trace().re;
        t <= NULL_MASS_REL * self.total_trace() || t <= 0.0
    }

    /// `ν_j^{1/2}`, with clamping measured against the total mass.
    pub fn sqrt_weight(&self, j: usize) -> ComplexOperator {
        psd_sqrt_scaled(&self.atoms[j].weight, PSD_TOL, self.total_trace())
            .expect("atoms are validated positive at construction")
    }

    pub fn sqrt_weights(&self) -> Vec<ComplexOperator> {
        (0..self.len()).map(|j| self.sqrt_weight(j)).collect()
    }

    /// Checks that `freqs` matches the atom frequencies.
    pub fn check_aligned(&self, freqs: &[f64], what: &str) -> Result<()> {
        if freqs.len() != self.len() {
            return Err(Error::Alignment(format!(
                "{what} has {} frequencies, measure has {} atoms",
                freqs.len(),
                self.len()
            )));
        }
        for (j, (f, a)) in freqs.iter().zip(&self.atoms).enumerate() {
            if (f - a.freq).abs() > FREQ_MERGE_TOL {
                return Err(Error::Alignment(format!(
                    "{what} frequency {f} at index {j} does not match atom frequency {}",
                    a.freq
                )));
            }
        }
        Ok(())
    }
}

/// Radon–Nikodym density of a measure with respect to scalar weights `w_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmDensity {
    pub base_weights: Vec<f64>,
    pub densities: Vec<ComplexOperator>,
}

impl PovmDensity {
    /// `w_j g_j`.
    pub fn reconstruct(&self, j: usize) -> ComplexOperator {
        self.densities[j].scale_real(self.base_weights[j])
    }
}

/// `‖ν‖₁` at each atom: the trace of the weight, or 0 for null atoms.
pub fn variation_measure(nu: &AtomicTracePovm) -> Vec<f64> {
    (0..nu.len()).map(|j| if nu.is_null_atom(j) { 0.0 } else { nu.weight(j).trace().re }).collect()
}

/// Density `g = dν/dμ`; `μ` defaults to the variation measure, in which
/// case every non-null density has unit trace.
pub fn radon_nikodym(nu: &AtomicTracePovm, mu: Option<&[f64]>) -> Result<PovmDensity> {
    let weights = match mu {
        Some(w) => {
            if w.len() != nu.len() {
                return Err(Error::Shape(format!(
                    "dominating measure has {} weights, measure has {} atoms",
                    w.len(),
                    nu.len()
                )));
            }
            for (j, &x) in w.iter().enumerate() {
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::InvalidWeight(format!("weight {x} at atom {j}")));
                }
                if x == 0.0 && !nu.is_null_atom(j) {
                    return Err(Error::AbsoluteContinuity { atom: j, mass: nu.weight(j).trace().re });
                }
            }
            w.to_vec()
        }
        None => variation_measure(nu),
    };
    let densities = weights
        .iter()
        .zip(nu.atoms())
        .map(|(&w, a)| if w > 0.0 { a.weight.scale_real(1.0 / w) } else { ComplexOperator::zeros(nu.dim(), nu.dim()) })
        .collect();
    Ok(PovmDensity { base_weights: weights, densities })
}

/// `∫ f dν = Σ_j f_j ν_j`.
pub fn scalar_integral(nu: &AtomicTracePovm, f: &[C64]) -> Result<ComplexOperator> {
    if f.len() != nu.len() {
        return Err(Error::Shape(format!("integrand has {} values, measure has {} atoms", f.len(), nu.len())));
    }
    let mut acc = ComplexOperator::zeros(nu.dim(), nu.dim());
    for (fj, a) in f.iter().zip(nu.atoms()) {
        acc += &a.weight.scale(*fj);
    }
    Ok(acc)
}

/// Per-atom outcome of the square-integrability test.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomCheck {
    pub index: usize,
    pub freq: f64,
    /// `‖(I − D_j) ν_j^{1/2}‖ / ‖ν_j^{1/2}‖`; zero for total operators.
    pub residual: f64,
    pub null: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrabilityReport {
    pub atoms: Vec<AtomCheck>,
}

impl IntegrabilityReport {
    pub fn passed(&self) -> bool {
        self.atoms.iter().all(|a| a.passed)
    }

    pub fn first_failure(&self) -> Option<&AtomCheck> {
        self.atoms.iter().find(|a| !a.passed)
    }

    pub(crate) fn into_result(self) -> Result<Self> {
        match self.first_failure() {
            Some(f) => Err(Error::Domain { atom: f.index, freq: f.freq, residual: f.residual }),
            None => Ok(self),
        }
    }
}

pub(crate) fn check_transfer_shape(phi: &TransferFunction, nu: &AtomicTracePovm, what: &str) -> Result<()> {
    nu.check_aligned(phi.freqs(), what)?;
    if phi.in_dim() != nu.dim() {
        return Err(Error::Shape(format!(
            "{what} acts on dimension {}, measure has dimension {}",
            phi.in_dim(),
            nu.dim()
        )));
    }
    Ok(())
}

/// Square ν-integrability of a transfer function.
///
/// Total operators always pass at finite dimension. A partial operator with
/// domain projector `D_j` passes at a non-null atom iff
/// `Im(ν_j^{1/2}) ⊆ Im(D_j)` up to `tol`.
pub fn square_integrability_check(
    phi: &TransferFunction,
    nu: &AtomicTracePovm,
    tol: f64,
) -> Result<IntegrabilityReport> {
    check_transfer_shape(phi, nu, "transfer function")?;
    let atoms = (0..nu.len())
        .map(|j| {
            let freq = nu.atoms()[j].freq;
            let null = nu.is_null_atom(j);
            let residual = match phi.domain(j) {
                Some(d) if !null => {
                    let root = nu.sqrt_weight(j);
                    let outside = &root - &(d * &root);
                    let denom = schatten_norm(&root, SchattenP::Infinity);
                    if denom > 0.0 {
                        schatten_norm(&outside, SchattenP::Infinity) / denom
                    } else {
                        0.0
                    }
                }
                _ => 0.0,
            };
            AtomCheck { index: j, freq, residual, null, passed: null || residual <= tol.max(1e-14) }
        })
        .collect();
    Ok(IntegrabilityReport { atoms })
}

/// `∫ Φ dν Ψᴴ` evaluated through the density with respect to `μ`
/// (default: the variation measure).
pub fn operator_integral_with(
    phi: &TransferFunction,
    nu: &AtomicTracePovm,
    psi: &TransferFunction,
    mu: Option<&[f64]>,
) -> Result<ComplexOperator> {
    square_integrability_check(phi, nu, DOMAIN_TOL)?.into_result()?;
    square_integrability_check(psi, nu, DOMAIN_TOL)?.into_result()?;
    let density = radon_nikodym(nu, mu)?;
    let total = nu.total_trace();
    let mut acc = ComplexOperator::zeros(phi.out_dim(), psi.out_dim());
    for j in 0..nu.len() {
        let w = density.base_weights[j];
        if w == 0.0 {
            continue;
        }
        let root = psd_sqrt_scaled(&density.densities[j], PSD_TOL, total / w)?;
        let left = &phi.effective(j) * &root;
        let right = &psi.effective(j) * &root;
        acc += &(&left * &right.adjoint()).scale_real(w);
    }
    Ok(acc)
}

pub fn operator_integral(
    phi: &TransferFunction,
    nu: &AtomicTracePovm,
    psi: &TransferFunction,
) -> Result<ComplexOperator> {
    operator_integral_with(phi, nu, psi, None)
}

/// Gramian `⟨Φ, Ψ⟩_ν = ∫ Φ dν Ψᴴ`.
pub fn gramian_inner(phi: &TransferFunction, psi: &TransferFunction, nu: &AtomicTracePovm) -> Result<ComplexOperator> {
    operator_integral(phi, nu, psi)
}

/// `‖Φ‖_ν = (Tr ⟨Φ, Φ⟩_ν)^{1/2}`.
pub fn gramian_norm(phi: &TransferFunction, nu: &AtomicTracePovm) -> Result<f64> {
    Ok(gramian_inner(phi, phi, nu)?.trace().re.max(0.0).sqrt())
}

/// Per-atom eigensystems of the density `dν/dμ`.
pub fn eigendecompose(nu: &AtomicTracePovm, mu: Option<&[f64]>) -> Result<Vec<HermitianEigenSystem>> {
    let density = radon_nikodym(nu, mu)?;
    density.densities.iter().map(|g| crate::operator::hermitian_eig(&g.hermitian_part())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::psd_check;
    use crate::random::{random_operator, random_povm, random_transfer, random_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single(weight: ComplexOperator) -> AtomicTracePovm {
        let dim = weight.rows();
        AtomicTracePovm::new(dim, vec![Atom { freq: 0.0, weight }]).unwrap()
    }

    #[test]
    fn canonicalisation_and_merge() {
        assert_eq!(canonical_frequency(-PI), PI);
        assert_eq!(canonical_frequency(0.3), 0.3);
        assert!((canonical_frequency(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);

        let i2 = ComplexOperator::identity(2);
        let nu = AtomicTracePovm::new(
            2,
            vec![
                Atom { freq: 1.0, weight: i2.clone() },
                Atom { freq: 1.0 + 1e-13, weight: i2.clone() },
                Atom { freq: -PI, weight: i2.clone() },
                Atom { freq: -1.0, weight: i2.clone() },
            ],
        )
        .unwrap();
        assert_eq!(nu.freqs(), vec![-1.0, 1.0, PI]);
        assert_eq!(nu.weight(1), &i2.scale_real(2.0));
    }

    #[test]
    fn rejects_invalid_measures() {
        assert_eq!(AtomicTracePovm::new(2, vec![]), Err(Error::EmptyMeasure));
        let bad = ComplexOperator::from_diagonal(&[1.0, -1.0]);
        assert!(AtomicTracePovm::new(2, vec![Atom { freq: 0.0, weight: bad }]).is_err());
        let wrong = ComplexOperator::identity(3);
        assert!(matches!(AtomicTracePovm::new(2, vec![Atom { freq: 0.0, weight: wrong }]), Err(Error::Dimension(_))));
    }

    #[test]
    fn variation_measure_examples() {
        assert_eq!(variation_measure(&single(ComplexOperator::identity(2))), vec![2.0]);
        let nu = AtomicTracePovm::new(
            2,
            vec![
                Atom { freq: -1.0, weight: ComplexOperator::from_diagonal(&[1.0, 0.0]) },
                Atom { freq: 1.0, weight: ComplexOperator::from_diagonal(&[0.0, 3.0]) },
            ],
        )
        .unwrap();
        assert_eq!(variation_measure(&nu), vec![1.0, 3.0]);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let nu = random_povm(&mut rng, 3, 5);
        for (j, v) in variation_measure(&nu).into_iter().enumerate() {
            let eig: f64 = crate::operator::hermitian_eig(nu.weight(j)).unwrap().eigenvalues().iter().sum();
            assert!((v - eig).abs() <= 1e-12 * v.max(1.0));
        }
    }

    #[test]
    fn radon_nikodym_examples() {
        let nu = single(ComplexOperator::identity(2).scale_real(2.0));
        let d = radon_nikodym(&nu, None).unwrap();
        assert_eq!(d.base_weights, vec![4.0]);
        assert_eq!(d.densities[0], ComplexOperator::identity(2).scale_real(0.5));
        let d2 = radon_nikodym(&nu, Some(&[8.0])).unwrap();
        assert_eq!(d2.densities[0], ComplexOperator::identity(2).scale_real(0.25));

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let nu = random_povm(&mut rng, 3, 4);
        let d = radon_nikodym(&nu, None).unwrap();
        for j in 0..nu.len() {
            assert!(d.reconstruct(j).distance(nu.weight(j)) <= 1e-13 * nu.weight(j).frobenius_norm());
            assert!((d.densities[j].trace().re - 1.0).abs() <= 1e-13);
        }
        assert!(matches!(
            radon_nikodym(&nu, Some(&[1.0, 0.0, 1.0, 1.0])),
            Err(Error::AbsoluteContinuity { atom: 1, .. })
        ));
        assert!(matches!(radon_nikodym(&nu, Some(&[1.0])), Err(Error::Shape(_))));
    }

    #[test]
    fn scalar_integral_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let nu = random_povm(&mut rng, 3, 4);
        let one = vec![C64::new(1.0, 0.0); 4];
        assert!(scalar_integral(&nu, &one).unwrap().distance(&nu.total_mass()) <= 1e-15);
        let mut ind = vec![C64::new(0.0, 0.0); 4];
        ind[2] = C64::new(1.0, 0.0);
        assert_eq!(&scalar_integral(&nu, &ind).unwrap(), nu.weight(2));

        let f: Vec<C64> = (0..4).map(|j| C64::new(j as f64 - 1.5, 0.25 * j as f64)).collect();
        let integral = scalar_integral(&nu, &f).unwrap();
        for _ in 0..20 {
            let x = random_vector(&mut rng, 3);
            let quad = |p: &ComplexOperator| crate::operator::inner(&p.apply(&x), &x);
            let lhs = quad(&integral);
            let rhs: C64 = f.iter().zip(nu.atoms()).map(|(fj, a)| fj * quad(&a.weight)).sum();
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
        assert!(matches!(scalar_integral(&nu, &f[..3]), Err(Error::Shape(_))));
    }

    #[test]
    fn operator_integral_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let nu = random_povm(&mut rng, 3, 4);
        let freqs = nu.freqs();
        let id = TransferFunction::identity(&freqs, 3);
        assert!(operator_integral(&id, &nu, &id).unwrap().distance(&nu.total_mass()) <= 1e-12);
        let zero = TransferFunction::constant(&freqs, ComplexOperator::zeros(2, 3));
        assert_eq!(operator_integral(&zero, &nu, &zero).unwrap().max_abs(), 0.0);

        let phi = random_transfer(&mut rng, &freqs, 2, 3);
        let psi = random_transfer(&mut rng, &freqs, 4, 3);
        let got = operator_integral(&phi, &nu, &psi).unwrap();
        let mut direct = ComplexOperator::zeros(2, 4);
        for j in 0..nu.len() {
            direct += &(&(phi.op(j) * nu.weight(j)) * &psi.op(j).adjoint());
        }
        assert!(got.distance(&direct) <= 1e-12 * direct.frobenius_norm().max(1.0));

        let mu: Vec<f64> = (0..4).map(|j| 0.5 + j as f64).collect();
        let other = operator_integral_with(&phi, &nu, &psi, Some(&mu)).unwrap();
        assert!(got.distance(&other) <= 1e-12 * direct.frobenius_norm().max(1.0));
    }

    #[test]
    fn gramian_examples() {
        let p = ComplexOperator::from_real_rows(&[&[1.0, 2.0], &[0.5, -1.0]]);
        let nu = single(ComplexOperator::identity(2));
        let phi = TransferFunction::constant(&[0.0], p.clone());
        let g = gramian_inner(&phi, &phi, &nu).unwrap();
        assert!(g.distance(&(&p * &p.adjoint())) <= 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let nu = random_povm(&mut rng, 3, 5);
        let phi = random_transfer(&mut rng, &nu.freqs(), 2, 3);
        let norm = gramian_norm(&phi, &nu).unwrap();
        let hs: f64 = (0..nu.len()).map(|j| (phi.op(j) * &nu.sqrt_weight(j)).frobenius_norm().powi(2)).sum();
        assert!((norm * norm - hs).abs() <= 1e-12 * hs);

        // Φ_j f_j^{1/2} = 0: Φ kills the range of a rank-one atom.
        let e1 = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let nu1 = single(crate::operator::outer(&e1, &e1));
        let phi = TransferFunction::constant(&[0.0], ComplexOperator::from_diagonal(&[0.0, 5.0]));
        assert_eq!(gramian_norm(&phi, &nu1).unwrap(), 0.0);
    }

    #[test]
    fn integrability_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let nu = random_povm(&mut rng, 3, 3);
        let freqs = nu.freqs();
        let phi = random_transfer(&mut rng, &freqs, 2, 3);
        assert!(square_integrability_check(&phi, &nu, DOMAIN_TOL).unwrap().passed());

        // pinv of a rank-one operator has a rank-one domain; full-rank atoms escape it.
        let x = random_vector(&mut rng, 3);
        let r1 = crate::operator::outer(&x, &x);
        let (pinv, range) = crate::operator::pinv_on_range(&r1, 1e-12);
        let partial = TransferFunction::constant(&freqs, pinv).with_domains(vec![Some(range); 3]).unwrap();
        let report = square_integrability_check(&partial, &nu, DOMAIN_TOL).unwrap();
        assert!(!report.passed());
        assert!(report.atoms.iter().all(|a| a.residual > 0.5));

        // Domain equal to the atom's own range passes exactly.
        let a = random_operator(&mut rng, 3, 1);
        let w = &a * &a.adjoint();
        let nu1 = AtomicTracePovm::new(3, vec![Atom { freq: 0.5, weight: w.clone() }]).unwrap();
        let d = crate::operator::range_projector(&w, 1e-12);
        let partial =
            TransferFunction::constant(&[0.5], ComplexOperator::identity(3)).with_domains(vec![Some(d)]).unwrap();
        assert!(square_integrability_check(&partial, &nu1, DOMAIN_TOL).unwrap().passed());

        let wrong = random_transfer(&mut rng, &freqs, 2, 4);
        assert!(matches!(square_integrability_check(&wrong, &nu, DOMAIN_TOL), Err(Error::Shape(_))));
    }

    #[test]
    fn eigendecompose_examples() {
        let nu = single(ComplexOperator::from_diagonal(&[0.7, 0.3]));
        let e = eigendecompose(&nu, None).unwrap();
        assert!((e[0].eigenvalues()[0] - 0.7).abs() < 1e-15);
        assert!((e[0].eigenvalues()[1] - 0.3).abs() < 1e-15);
        assert!(e[0].eigenvectors().distance(&ComplexOperator::identity(2)) < 1e-15);

        let nu = single(ComplexOperator::identity(2).scale_real(0.5));
        let e = eigendecompose(&nu, Some(&[1.0])).unwrap();
        assert_eq!(e[0].eigenvalues(), &[0.5, 0.5]);

        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let nu = random_povm(&mut rng, 4, 6);
        let d = radon_nikodym(&nu, None).unwrap();
        for (j, sys) in eigendecompose(&nu, None).unwrap().iter().enumerate() {
            assert!(sys.reconstruct().distance(&d.densities[j]) <= 1e-10);
            assert!((sys.eigenvalues().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            assert!(psd_check(&d.densities[j], 1e-10).unwrap());
        }
    }
}
