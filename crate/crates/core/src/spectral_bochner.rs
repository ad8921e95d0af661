//! Autocovariances and spectral measures on `ℤ`.
//!
//! `Γ(h) = Σ_j e^{iλ_j h} ν_j` maps a measure to its autocovariance. On the
//! uniform `M`-point grid the map is a DFT and inverts exactly.

use std::f64::consts::PI;

use crate::cagos::ProcessSample;
use crate::error::{Error, Result};
use crate::operator::{hermitian_eig, psd_check, psd_check_scaled, threshold, ComplexOperator, C64};
use crate::povm::{Atom, AtomicTracePovm};

/// Tolerance for positivity of `Γ(0)` and of atoms recovered from a grid.
pub const GRID_PSD_TOL: f64 = 1e-8;

/// Relative tolerance for the Hermitian symmetry of `Γ(0)`.
pub const LAG_ZERO_SYMMETRY_TOL: f64 = 1e-12;

/// The `M`-th roots of unity as frequencies `2πk/M`, folded into `(−π, π]`
/// and sorted.
pub fn grid_frequencies(period: usize) -> Vec<f64> {
    let m = period as i64;
    (0..m)
        .map(|k| {
            let n = 2 * (k - (m - 1) / 2);
            if n == m {
                PI
            } else {
                PI * n as f64 / m as f64
            }
        })
        .collect()
}

/// `Γ(h)` for `h = 0..=L`; negative lags follow from `Γ(−h) = Γ(h)ᴴ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocovarianceSequence {
    dim: usize,
    values: Vec<ComplexOperator>,
}

impl AutocovarianceSequence {
    pub fn new(dim: usize, mut values: Vec<ComplexOperator>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("autocovariance dimension must be positive".into()));
        }
        if values.is_empty() {
            return Err(Error::Shape("autocovariance needs at least the lag-0 value".into()));
        }
        for (h, v) in values.iter().enumerate() {
            if v.rows() != dim || v.cols() != dim {
                return Err(Error::Dimension(format!("lag {h} is {}×{}, expected {dim}×{dim}", v.rows(), v.cols())));
            }
        }
        let g0 = &values[0];
        let asym = g0.distance(&g0.adjoint());
        let limit = threshold(LAG_ZERO_SYMMETRY_TOL, g0.frobenius_norm());
        if asym > limit {
            return Err(Error::NotHermitian { asymmetry: asym, threshold: limit });
        }
        values[0] = g0.hermitian_part();
        if !psd_check(&values[0], GRID_PSD_TOL)? {
            let min = hermitian_eig(&values[0])?.eigenvalues().last().copied().unwrap_or(0.0);
            return Err(Error::NotPositive {
                min_eigenvalue: min,
                threshold: threshold(GRID_PSD_TOL, values[0].trace().re.abs()),
            });
        }
        Ok(Self { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    /// Stored values for `h = 0..=L`.
    pub fn values(&self) -> &[ComplexOperator] {
        &self.values
    }

    pub fn at(&self, h: i64) -> Result<ComplexOperator> {
        let k = h.unsigned_abs() as usize;
        if k > self.max_lag() {
            return Err(Error::Coverage { lag: h, max_lag: self.max_lag() });
        }
        Ok(if h >= 0 { self.values[k].clone() } else { self.values[k].adjoint() })
    }
}

/// `Γ(h) = Σ_j e^{iλ_j h} ν_j` for `h = 0..=L`.
pub fn autocov_from_povm(nu: &AtomicTracePovm, max_lag: usize) -> AutocovarianceSequence {
    let values = (0..=max_lag as i64)
        .map(|h| {
            let mut acc = ComplexOperator::zeros(nu.dim(), nu.dim());
            for a in nu.atoms() {
                acc += &a.weight.scale(C64::from_polar(1.0, a.freq * h as f64));
            }
            acc
        })
        .collect();
    AutocovarianceSequence::new(nu.dim(), values).expect("autocovariance of a measure is valid")
}

/// Recovers the measure on the `M`-point grid with
/// `ν_k = (1/M) Σ_{h<M} Γ(h) e^{−iλ_k h}`.
///
/// Lags beyond `L` are filled from `Γ(h) = Γ(M − h)ᴴ`. Recovered atoms must
/// be positive within [`GRID_PSD_TOL`] relative to `Tr Γ(0)`; small negative
/// eigenvalues inside that band are clamped to zero.
pub fn povm_from_autocov_grid(gamma: &AutocovarianceSequence, period: usize) -> Result<AtomicTracePovm> {
    povm_from_autocov_grid_with(gamma, period, GRID_PSD_TOL)
}

/// [`povm_from_autocov_grid`] with an explicit relative positivity tolerance.
pub fn povm_from_autocov_grid_with(
    gamma: &AutocovarianceSequence,
    period: usize,
    psd_tol: f64,
) -> Result<AtomicTracePovm> {
    if period == 0 {
        return Err(Error::Shape("grid size must be positive".into()));
    }
    let lags = (0..period)
        .map(|h| {
            if h <= gamma.max_lag() {
                Ok(gamma.values[h].clone())
            } else if period - h <= gamma.max_lag() {
                Ok(gamma.values[period - h].adjoint())
            } else {
                Err(Error::Coverage { lag: h as i64, max_lag: gamma.max_lag() })
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let scale = gamma.values[0].trace().re.abs();
    let limit = threshold(psd_tol, scale);
    let m = period as f64;
    let mut atoms = Vec::with_capacity(period);
    for (k, lambda) in grid_frequencies(period).into_iter().enumerate() {
        let mut acc = ComplexOperator::zeros(gamma.dim, gamma.dim);
        for (h, g) in lags.iter().enumerate() {
            acc += &g.scale(C64::from_polar(1.0 / m, -lambda * h as f64));
        }
        let weight = acc.hermitian_part();
        let eig = hermitian_eig(&weight)?;
        let min = eig.eigenvalues().last().copied().unwrap_or(0.0);
        if min < -limit {
            return Err(Error::NotPositiveType { atom: k, freq: lambda, min_eigenvalue: min });
        }
        let weight = if min < 0.0 { eig.spectral_map(|x| x.max(0.0)).hermitian_part() } else { weight };
        atoms.push(Atom { freq: lambda, weight });
    }
    AtomicTracePovm::new(gamma.dim, atoms)
}

fn block_matrix(gamma: &AutocovarianceSequence, times: &[i64]) -> Result<ComplexOperator> {
    let d = gamma.dim;
    let n = times.len();
    let mut block = ComplexOperator::zeros(n * d, n * d);
    for (i, &ti) in times.iter().enumerate() {
        for (j, &tj) in times.iter().enumerate() {
            let g = gamma.at(ti - tj)?;
            for a in 0..d {
                for b in 0..d {
                    block.set(i * d + a, j * d + b, g.get(a, b));
                }
            }
        }
    }
    Ok(block)
}

/// Positive type on a finite set of times.
///
/// Without `vectors`, certifies `[Γ(t_i − t_j)]_{i,j} ⪰ 0`. With vectors
/// `x_i`, tests the single form `Σ_{i,j} ⟨Γ(t_i − t_j) x_j, x_i⟩ ≥ 0`.
pub fn positive_type_check(
    gamma: &AutocovarianceSequence,
    times: &[i64],
    vectors: Option<&[Vec<C64>]>,
    tol: f64,
) -> Result<bool> {
    let block = block_matrix(gamma, times)?;
    match vectors {
        None => psd_check(&block, tol),
        Some(xs) => {
            if xs.len() != times.len() || xs.iter().any(|x| x.len() != gamma.dim) {
                return Err(Error::Shape(format!("need {} vectors of length {}", times.len(), gamma.dim)));
            }
            let stacked: Vec<C64> = xs.iter().flatten().copied().collect();
            let form = crate::operator::inner(&block.apply(&stacked), &stacked);
            let norm2: f64 = stacked.iter().map(|z| z.norm_sqr()).sum();
            let scale = gamma.values[0].trace().re.abs() * norm2;
            Ok(form.re >= -threshold(tol, scale) && form.im.abs() <= threshold(tol, scale.max(form.re.abs())))
        }
    }
}

/// `Σ_{i,j} a_i ā_j Γ(t_i − t_j) ⪰ 0`.
pub fn hermitian_nnd_check(gamma: &AutocovarianceSequence, times: &[i64], coeffs: &[C64], tol: f64) -> Result<bool> {
    if coeffs.len() != times.len() {
        return Err(Error::Shape(format!("{} coefficients for {} times", coeffs.len(), times.len())));
    }
    let mut acc = ComplexOperator::zeros(gamma.dim, gamma.dim);
    for (i, &ti) in times.iter().enumerate() {
        for (j, &tj) in times.iter().enumerate() {
            acc += &gamma.at(ti - tj)?.scale(coeffs[i] * coeffs[j].conj());
        }
    }
    let norm2: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
    psd_check_scaled(&acc, tol, gamma.values[0].trace().re.abs() * norm2)
}

/// Estimate `Γ̂(h)` of a centred process together with its standard-error
/// scale `R^{−1/2}`.
pub fn empirical_autocov(x: &ProcessSample, max_lag: usize) -> Result<(AutocovarianceSequence, f64)> {
    let reps = x.realizations();
    if reps < 2 {
        return Err(Error::SampleSize(format!("need at least 2 realizations, got {reps}")));
    }
    if max_lag >= x.period() {
        return Err(Error::Coverage { lag: max_lag as i64, max_lag: x.period() - 1 });
    }
    let d = x.dim();
    let values = (0..=max_lag)
        .map(|h| {
            let pairs = x.period() - h;
            let mut acc = vec![C64::new(0.0, 0.0); d * d];
            for t in 0..pairs {
                let (lead, lag) = (x.at(t + h), x.at(t));
                for r in 0..reps {
                    let (u, v) = (lead.get(r), lag.get(r));
                    for a in 0..d {
                        for b in 0..d {
                            acc[a * d + b] += u[a] * v[b].conj();
                        }
                    }
                }
            }
            let inv = 1.0 / (pairs * reps) as f64;
            ComplexOperator::new(d, d, acc.into_iter().map(|z| z * inv).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((AutocovarianceSequence::new(d, values)?, 1.0 / (reps as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cagos::{monte_carlo_band, sample_gaussian_cagos, synthesize_process, VectorEnsemble};
    use crate::random::{random_grid_povm, random_povm, random_psd, random_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scaled_identity(d: usize, s: f64) -> ComplexOperator {
        ComplexOperator::identity(d).scale_real(s)
    }

    #[test]
    fn grid_contains_zero_and_pi() {
        let g = grid_frequencies(8);
        assert_eq!(g.len(), 8);
        assert!(g.contains(&0.0));
        assert_eq!(*g.last().unwrap(), PI);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn odd_grids_are_roots_of_unity() {
        for m in [1usize, 3, 5, 7, 9] {
            let g = grid_frequencies(m);
            assert_eq!(g.len(), m);
            for lambda in g {
                assert!(lambda > -PI && lambda <= PI);
                assert!((C64::from_polar(1.0, lambda * m as f64) - 1.0).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn odd_grid_inversion_uses_conjugate_lags() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let nu = random_grid_povm(&mut rng, 2, 7);
        let back = povm_from_autocov_grid(&autocov_from_povm(&nu, 3), 7).unwrap();
        for (a, b) in nu.atoms().iter().zip(back.atoms()) {
            assert_eq!(a.freq, b.freq);
            assert!(a.weight.distance(&b.weight) <= 1e-12);
        }
    }

    #[test]
    fn autocov_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_psd(&mut rng, 3, 3);
        let nu = AtomicTracePovm::new(3, vec![Atom { freq: 0.0, weight: p.clone() }]).unwrap();
        let gamma = autocov_from_povm(&nu, 4);
        for h in -4..=4 {
            assert!(gamma.at(h).unwrap().distance(&p) <= 1e-14);
        }

        let half = p.scale_real(0.5);
        let nu = AtomicTracePovm::new(
            3,
            vec![Atom { freq: PI / 2.0, weight: half.clone() }, Atom { freq: -PI / 2.0, weight: half }],
        )
        .unwrap();
        let gamma = autocov_from_povm(&nu, 5);
        for h in -5..=5i64 {
            let expected = p.scale_real((PI * h as f64 / 2.0).cos());
            assert!(gamma.at(h).unwrap().distance(&expected) <= 1e-14);
        }
        assert!(matches!(gamma.at(6), Err(Error::Coverage { lag: 6, max_lag: 5 })));

        let nu = random_povm(&mut rng, 4, 5);
        let gamma = autocov_from_povm(&nu, 3);
        assert!(gamma.at(0).unwrap().distance(&nu.total_mass()) <= 1e-12);
        for h in 1..=3 {
            assert_eq!(gamma.at(-h).unwrap(), gamma.at(h).unwrap().adjoint());
            assert!(gamma.at(h).unwrap().trace().re <= gamma.at(0).unwrap().trace().re + 1e-12);
        }
    }

    #[test]
    fn grid_inversion_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_psd(&mut rng, 2, 2);
        let gamma = AutocovarianceSequence::new(2, vec![p.clone(); 4]).unwrap();
        let nu = povm_from_autocov_grid(&gamma, 4).unwrap();
        for a in nu.atoms() {
            let expected = if a.freq == 0.0 { p.clone() } else { ComplexOperator::zeros(2, 2) };
            assert!(a.weight.distance(&expected) <= 1e-14);
        }

        let nu = random_grid_povm(&mut rng, 3, 8);
        let back = povm_from_autocov_grid(&autocov_from_povm(&nu, 7), 8).unwrap();
        for (a, b) in nu.atoms().iter().zip(back.atoms()) {
            assert_eq!(a.freq, b.freq);
            assert!((&a.weight - &b.weight).max_abs() <= 1e-10);
        }
        let back = povm_from_autocov_grid(&autocov_from_povm(&nu, 4), 8).unwrap();
        for (a, b) in nu.atoms().iter().zip(back.atoms()) {
            assert!((&a.weight - &b.weight).max_abs() <= 1e-10);
        }
        assert!(matches!(
            povm_from_autocov_grid(&autocov_from_povm(&nu, 3), 8),
            Err(Error::Coverage { lag: 4, max_lag: 3 })
        ));

        let bad = AutocovarianceSequence::new(
            2,
            vec![
                ComplexOperator::identity(2),
                scaled_identity(2, 2.0),
                scaled_identity(2, 2.0),
                scaled_identity(2, 2.0),
            ],
        )
        .unwrap();
        match povm_from_autocov_grid(&bad, 4) {
            Err(Error::NotPositiveType { min_eigenvalue, .. }) => assert!(min_eigenvalue < 0.0),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn positive_type_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let nu = random_povm(&mut rng, 3, 6);
        let gamma = autocov_from_povm(&nu, 3);
        assert!(positive_type_check(&gamma, &[0, 1, 3], None, 1e-10).unwrap());
        let xs: Vec<Vec<C64>> = (0..3).map(|_| random_vector(&mut rng, 3)).collect();
        assert!(positive_type_check(&gamma, &[0, 1, 3], Some(&xs), 1e-10).unwrap());
        assert!(matches!(positive_type_check(&gamma, &[0, 4], None, 1e-10), Err(Error::Coverage { .. })));

        let bad = AutocovarianceSequence::new(2, vec![ComplexOperator::identity(2), scaled_identity(2, 1.5)]).unwrap();
        assert!(!positive_type_check(&bad, &[0, 1], None, 1e-10).unwrap());
        assert!(positive_type_check(&bad, &[5], None, 1e-10).unwrap());

        let a: Vec<C64> = random_vector(&mut rng, 3);
        assert!(hermitian_nnd_check(&gamma, &[0, 2, 3], &a, 1e-10).unwrap());
        assert!(hermitian_nnd_check(&gamma, &[7], &[C64::new(1.0, 0.0)], 1e-10).unwrap());
        let ones = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)];
        assert!(!hermitian_nnd_check(&bad, &[0, 1], &ones, 1e-10).unwrap());
    }

    #[test]
    fn empirical_autocov_examples() {
        let zero = ProcessSample::new(2, vec![VectorEnsemble::zeros(2, 5); 4]).unwrap();
        let (g, se) = empirical_autocov(&zero, 2).unwrap();
        assert!(g.values().iter().all(|v| v.max_abs() == 0.0));
        assert!((se - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        let single = ProcessSample::new(2, vec![VectorEnsemble::zeros(2, 1); 4]).unwrap();
        assert!(matches!(empirical_autocov(&single, 2), Err(Error::SampleSize(_))));

        let reps = 50_000;
        let nu = AtomicTracePovm::new(2, vec![Atom { freq: 0.0, weight: ComplexOperator::identity(2) }]).unwrap();
        let x = synthesize_process(&sample_gaussian_cagos(&nu, reps, 4).unwrap(), 4);
        let (g, se) = empirical_autocov(&x, 3).unwrap();
        for v in g.values() {
            assert!((v - &ComplexOperator::identity(2)).max_abs() <= 5.0 * se);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let nu = random_povm(&mut rng, 3, 4);
        let x = synthesize_process(&sample_gaussian_cagos(&nu, reps, 6).unwrap(), 8);
        let (g, _) = empirical_autocov(&x, 3).unwrap();
        let model = autocov_from_povm(&nu, 3);
        let band = monte_carlo_band(reps, nu.total_trace());
        for h in 0..=3 {
            assert!((&g.at(h).unwrap() - &model.at(h).unwrap()).max_abs() <= band);
        }
    }
}
