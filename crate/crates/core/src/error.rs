use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("multi-index of degree {degree} exceeds truncation degree {max}")]
    DegreeOverflow { degree: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operation `{0}` requires a Fock space")]
    RequiresFock(&'static str),

    #[error("operation `{0}` requires a Bergman space")]
    RequiresBergman(&'static str),

    #[error("quadrature of order {order} is insufficient: Gram deviation {deviation:e}")]
    InsufficientQuadrature { order: usize, deviation: f64 },

    #[error("symbol `{label}` is not finite at node {point}")]
    NonFiniteSymbol { label: String, point: String },

    #[error("matrix is not unitary: deviation {0:e}")]
    NonUnitary(f64),

    #[error("subgroup `{0}` is not compact")]
    NonCompactGroup(String),

    #[error("invalid partition {partition:?} of n = {n}")]
    InvalidPartition { partition: Vec<usize>, n: usize },

    #[error("box radius {radius} leaks mass: boundary ratio {leakage:e}")]
    BoxTooSmall { radius: f64, leakage: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dilation t = {t}: spectral support {support} exceeds Nyquist frequency {nyquist}")]
    DilationTooSmall { t: f64, support: f64, nyquist: f64 },

    #[error("division rejected: |psi^| = {min_abs:e} (log10 {log10_min:.3}) below {threshold:e} at xi = {location:?}")]
    DivisionRejected {
        min_abs: f64,
        log10_min: f64,
        threshold: f64,
        location: Vec<f64>,
    },

    #[error("spectrum is not compactly supported inside the grid")]
    UnsupportedSpectrum,

    #[error("target operator is not quasi-radial: deviation {0:e}")]
    NotQuasiRadial(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
