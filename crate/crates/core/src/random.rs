//! Random instances for property checks, the verification suite and demos.
//!
//! All generators take `&mut impl Rng` so callers choose the stream.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::filtering::TransferFunction;
use crate::operator::{ComplexOperator, C64};
use crate::povm::{Atom, AtomicTracePovm};
use crate::spectral_bochner::grid_frequencies;

/// Standard circularly-symmetric complex Gaussian: `E|z|² = 1`, `E z² = 0`.
pub fn complex_normal(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| complex_normal(rng)).collect()
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn random_operator(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexOperator {
    ComplexOperator::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexOperator {
    random_operator(rng, n, n).hermitian_part()
}

/// `A Aᴴ / rank` with `A` an `n × rank` Ginibre matrix.
pub fn random_psd(rng: &mut impl Rng, n: usize, rank: usize) -> ComplexOperator {
    let a = random_operator(rng, n, rank.max(1));
    let p = &a * &a.adjoint();
    let p = p.scale_real(1.0 / rank.max(1) as f64);
    if rank == 0 {
        ComplexOperator::zeros(n, n)
    } else {
        p.hermitian_part()
    }
}

/// Haar-distributed orthonormal `n × q` frame: Gram–Schmidt on a Ginibre
/// matrix with the phase of each `R` diagonal entry removed.
pub fn random_orthonormal_frame(rng: &mut impl Rng, n: usize, q: usize) -> ComplexOperator {
    assert!(q <= n, "frame wider than the space");
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(q);
    while cols.len() < q {
        let mut v = random_vector(rng, n);
        for _ in 0..2 {
            for u in &cols {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let norm = crate::operator::vector_norm(&v);
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexOperator::from_columns(&cols)
}

pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexOperator {
    random_orthonormal_frame(rng, n, n)
}

/// `U diag(s) Vᴴ` with singular values log-uniform in `[1, condition]`.
pub fn random_conditioned(rng: &mut impl Rng, n: usize, condition: f64) -> ComplexOperator {
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    let s: Vec<f64> = (0..n).map(|_| condition.powf(rng.random::<f64>())).collect();
    &(&u * &ComplexOperator::from_diagonal(&s)) * &v.adjoint()
}

/// Random atomic measure with distinct frequencies in `(−π, π]` and
/// full-rank atoms.
pub fn random_povm(rng: &mut impl Rng, dim: usize, atoms: usize) -> AtomicTracePovm {
    let mut freqs: Vec<f64> = Vec::with_capacity(atoms);
    while freqs.len() < atoms {
        let f = PI - 2.0 * PI * rng.random::<f64>();
        if f > -PI && freqs.iter().all(|g| (g - f).abs() > 1e-3) {
            freqs.push(f);
        }
    }
    let list = freqs.into_iter().map(|freq| Atom { freq, weight: random_psd(rng, dim, dim) }).collect();
    AtomicTracePovm::new(dim, list).expect("random povm is valid")
}

/// Random measure whose atoms have the given ranks (cycled over atoms).
pub fn random_povm_with_ranks(rng: &mut impl Rng, dim: usize, atoms: usize, ranks: &[usize]) -> AtomicTracePovm {
    let base = random_povm(rng, dim, atoms);
    let list = base
        .atoms()
        .iter()
        .enumerate()
        .map(|(j, a)| Atom { freq: a.freq, weight: random_psd(rng, dim, ranks[j % ranks.len()]) })
        .collect();
    AtomicTracePovm::new(dim, list).expect("random povm is valid")
}

/// Random full-rank measure supported on the uniform `period`-point grid.
pub fn random_grid_povm(rng: &mut impl Rng, dim: usize, period: usize) -> AtomicTracePovm {
    let list =
        grid_frequencies(period).into_iter().map(|freq| Atom { freq, weight: random_psd(rng, dim, dim) }).collect();
    AtomicTracePovm::new(dim, list).expect("grid povm is valid")
}

/// Total transfer function with Ginibre operators at each frequency.
pub fn random_transfer(rng: &mut impl Rng, freqs: &[f64], out_dim: usize, in_dim: usize) -> TransferFunction {
    let ops = freqs.iter().map(|_| random_operator(rng, out_dim, in_dim)).collect();
    TransferFunction::new(freqs.to_vec(), ops).expect("random transfer is valid")
}
