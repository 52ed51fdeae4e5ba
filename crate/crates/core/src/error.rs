use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Invalid (τ, σ, h) triple or other out-of-range numeric argument.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Argument outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A derivative order beyond what the oracle was configured to provide.
    #[error("capability error: order {requested} exceeds oracle maximum {max}")]
    Capability { requested: usize, max: usize },

    /// Non-finite data produced while evaluating a derivative or sample.
    #[error("data error at order {order:?}, x = {x:?}: {message}")]
    Data {
        order: Vec<usize>,
        x: Vec<f64>,
        message: String,
    },

    /// Quadrature or extrapolation that did not reach its tolerance.
    #[error("numerical error: {message} (partial value {partial}, error estimate {error_estimate:e})")]
    Numerical {
        message: String,
        partial: Complex64,
        error_estimate: f64,
    },

    /// Inconsistent analysis configuration (empty cone, band outside Nyquist, ...).
    #[error("configuration error: {0}")]
    Configuration(String),

    /// A sup scan hit its iteration cap before the stopping rule fired.
    #[error("scan cap of {cap} terms reached before the supremum was isolated")]
    ScanCap { cap: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
