//! Spectral calculus for Hilbert-valued weakly stationary time series whose
//! spectral operator measure is atomic.
//!
//! The crate works at finite dimension: the state space is `ℂᴺ`, operators
//! are dense complex matrices and every frequency measure is a finite list
//! of positive semidefinite atoms on `(−π, π]`.
//!
//! - [`operator`]: dense operator algebra and Hermitian eigensolvers.
//! - [`povm`]: atomic trace-class measures, densities and Gramians.
//! - [`spectral_bochner`]: autocovariances and grid inversion.
//! - [`cagos`]: Gaussian random measures and process synthesis.
//! - [`filtering`]: transfer functions, composition, inversion, FIR filters.
//! - [`decomposition`]: Karhunen–Loève components and harmonic PCA.
//! - [`io`]: JSON formats.
//! - [`verify`]: the invariant battery behind `fts verify`.

pub mod cagos;
pub mod decomposition;
pub mod error;
pub mod filtering;
pub mod io;
pub mod operator;
pub mod povm;
pub mod random;
pub mod spectral_bochner;
pub mod verify;

pub use error::{Error, Result};
pub use operator::{ComplexOperator, C64};
pub use povm::{Atom, AtomicTracePovm};
