//! Browser demo. A three-channel VAR(1) process
//! `X_t = A X_{t−1} + ε_t`, `A = p·I + c·S` with `S` the cyclic shift and
//! `Cov ε = I`, discretised on the `M`-point frequency grid.
//!
//! [`Model`] is plain Rust; [`Demo`] wraps it for JavaScript.

use std::f64::consts::PI;

use fts_core::cagos::{sample_gaussian_cagos, synthesize_real_process};
use fts_core::decomposition::{ckl_decompose, hfpca_optimal_error, CklSystem, RankFunction};
use fts_core::operator::pinv_on_range;
use fts_core::spectral_bochner::{autocov_from_povm, grid_frequencies};
use fts_core::{Atom, AtomicTracePovm, ComplexOperator, C64};
use wasm_bindgen::prelude::*;

pub const DIM: usize = 3;
pub const MAX_GRID: usize = 1024;
pub const MAX_LENGTH: usize = 4096;

fn transition(persistence: f64, coupling: f64) -> ComplexOperator {
    ComplexOperator::from_fn(DIM, DIM, |i, j| {
        let mut a = 0.0;
        if i == j {
            a += persistence;
        }
        if (i + 1) % DIM == j {
            a += coupling;
        }
        C64::new(a, 0.0)
    })
}

/// `ν_k = H(λ_k) H(λ_k)ᴴ / M` with `H(λ) = (I − A e^{−iλ})⁻¹`.
pub fn var1_povm(persistence: f64, coupling: f64, grid: usize) -> Result<AtomicTracePovm, String> {
    if !(persistence.is_finite() && coupling.is_finite()) {
        return Err("parameters must be finite".into());
    }
    // Row sums bound the spectral radius of A.
    if persistence.abs() + coupling.abs() >= 1.0 {
        return Err(format!("|p| + |c| = {} must stay below 1", persistence.abs() + coupling.abs()));
    }
    if grid == 0 || grid > MAX_GRID {
        return Err(format!("grid size must lie in 1..={MAX_GRID}"));
    }
    let a = transition(persistence, coupling);
    let atoms = grid_frequencies(grid)
        .into_iter()
        .map(|lambda| {
            let m = &ComplexOperator::identity(DIM) - &a.scale(C64::from_polar(1.0, -lambda));
            let (h, _) = pinv_on_range(&m, 1e-12);
            Atom { freq: lambda, weight: (&h * &h.adjoint()).scale_real(1.0 / grid as f64).hermitian_part() }
        })
        .collect();
    AtomicTracePovm::new(DIM, atoms).map_err(|e| e.to_string())
}

pub struct Model {
    nu: AtomicTracePovm,
    sys: CklSystem,
}

impl Model {
    pub fn new(persistence: f64, coupling: f64, grid: usize) -> Result<Self, String> {
        let nu = var1_povm(persistence, coupling, grid)?;
        let sys = ckl_decompose(&nu).map_err(|e| e.to_string())?;
        Ok(Self { nu, sys })
    }

    pub fn povm(&self) -> &AtomicTracePovm {
        &self.nu
    }

    pub fn freqs(&self) -> Vec<f64> {
        self.nu.freqs()
    }

    /// Eigenvalues of the density `f(λ_k) = ν_k·M/2π`, atom-major, largest first.
    pub fn density_eigenvalues(&self) -> Vec<f64> {
        let scale = self.nu.len() as f64 / (2.0 * PI);
        (0..self.sys.len()).flat_map(|j| self.sys.atom_eigenvalues(j).iter().map(move |s| s * scale)).collect()
    }

    /// `Tr Γ(h)` for `h = 0..=max_lag`.
    pub fn autocov_trace(&self, max_lag: usize) -> Vec<f64> {
        autocov_from_povm(&self.nu, max_lag).values().iter().map(|g| g.trace().re).collect()
    }

    /// One real path `√2·Re X_t`, `t = 0..length`, time-major.
    pub fn simulate(&self, seed: u64, length: usize) -> Result<Vec<f64>, String> {
        if length == 0 || length > MAX_LENGTH {
            return Err(format!("path length must lie in 1..={MAX_LENGTH}"));
        }
        let w = sample_gaussian_cagos(&self.nu, 1, seed).map_err(|e| e.to_string())?;
        let x = synthesize_real_process(&w, length);
        Ok(x.values().iter().flat_map(|ens| ens.get(0).iter().map(|z| z.re)).collect())
    }

    /// Optimal harmonic PCA error for `q = 0..=DIM`; `q = 0` keeps nothing.
    pub fn hfpca_errors(&self) -> Vec<f64> {
        let mut out = vec![self.nu.total_trace()];
        for q in 1..=DIM {
            let rank = RankFunction::constant(q, self.nu.len()).expect("positive rank");
            out.push(hfpca_optimal_error(&self.sys, &rank).expect("rank matches atoms"));
        }
        out
    }
}

#[wasm_bindgen]
pub struct Demo {
    model: Model,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(persistence: f64, coupling: f64, grid: usize) -> Result<Demo, JsError> {
        Model::new(persistence, coupling, grid).map(|model| Demo { model }).map_err(|e| JsError::new(&e))
    }

    pub fn freqs(&self) -> Vec<f64> {
        self.model.freqs()
    }

    #[wasm_bindgen(js_name = densityEigenvalues)]
    pub fn density_eigenvalues(&self) -> Vec<f64> {
        self.model.density_eigenvalues()
    }

    #[wasm_bindgen(js_name = autocovTrace)]
    pub fn autocov_trace(&self, max_lag: usize) -> Vec<f64> {
        self.model.autocov_trace(max_lag)
    }

    pub fn simulate(&self, seed: u32, length: usize) -> Result<Vec<f64>, JsError> {
        self.model.simulate(u64::from(seed), length).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(js_name = hfpcaErrors)]
    pub fn hfpca_errors(&self) -> Vec<f64> {
        self.model.hfpca_errors()
    }
}
