use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("root finder did not converge after {iterations} iterations (max residual {residual:.3e})")]
    RootsNoConvergence {
        iterations: usize,
        residual: f64,
        best: Vec<Complex64>,
    },

    #[error("quadrature estimate {estimate:.3e} exceeds tolerance {tol:.3e} after {subdivisions} subdivisions")]
    Quadrature {
        value: Complex64,
        estimate: f64,
        tol: f64,
        subdivisions: usize,
    },

    #[error("eigensolver failed for dimension {dim} (residual {residual:.3e})")]
    Eigen { dim: usize, residual: f64 },

    #[error("newton iteration failed: {reason} (residual {residual:.3e})")]
    Newton {
        reason: String,
        residual: f64,
        best: Vec<Complex64>,
    },

    #[error("momentum {k} lies within {radius:e} of an exceptional point")]
    ExceptionalPoint { k: f64, radius: f64 },

    #[error("sector M={sector}: {source}")]
    Sector {
        sector: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
