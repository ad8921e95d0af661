use thiserror::Error;

/// Errors raised by the spectral calculus.
///
/// Display strings are stable: the CLI prints them verbatim and scripts
/// match on the leading kebab-case tag.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("symmetry error: ‖P − Pᴴ‖ = {asymmetry:e} exceeds {threshold:e}")]
    NotHermitian { asymmetry: f64, threshold: f64 },

    #[error("positivity error: minimum eigenvalue {min_eigenvalue:e} below −{threshold:e}")]
    NotPositive { min_eigenvalue: f64, threshold: f64 },

    #[error("positivity error: atom {atom} has minimum eigenvalue {min_eigenvalue:e} below −{threshold:e}")]
    AtomNotPositive { atom: usize, min_eigenvalue: f64, threshold: f64 },

    #[error("absolute-continuity error: atom {atom} has mass {mass:e} but dominating weight 0")]
    AbsoluteContinuity { atom: usize, mass: f64 },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("domain error: atom {atom} (freq {freq}) has residual {residual:e} outside the operator domain")]
    Domain { atom: usize, freq: f64, residual: f64 },

    #[error("not-positive-type: recovered atom {atom} (freq {freq}) has minimum eigenvalue {min_eigenvalue:e}")]
    NotPositiveType { atom: usize, freq: f64, min_eigenvalue: f64 },

    #[error("coverage error: lag {lag} exceeds available maximum lag {max_lag}")]
    Coverage { lag: i64, max_lag: usize },

    #[error("sample-size error: {0}")]
    SampleSize(String),

    #[error("non-invertible: atom {atom} (freq {freq}) has singular-value ratio {ratio:e} at or below {rank_tol:e}")]
    NotInvertible { atom: usize, freq: f64, ratio: f64, rank_tol: f64 },

    #[error("index error: component {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid rank function: {0}")]
    InvalidRank(String),

    #[error("empty measure: at least one atom is required")]
    EmptyMeasure,

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
