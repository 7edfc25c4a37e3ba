use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{t} is not a point of the time scale")]
    NotInTimeScale { t: f64 },

    #[error("empty range: {a} > {b}")]
    EmptyRange { a: f64, b: f64 },

    #[error("the time scale is bounded above (tail `none`); this operation needs sup T = infinity")]
    UnboundedWindowOnly,

    #[error("invalid time scale: {0}")]
    InvalidTimeScale(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{z} is not regressive{}", at_point(*.eta))]
    NotRegressive { z: Complex64, eta: Option<f64> },

    #[error("difference quotient at {t} did not stabilize")]
    NonDifferentiable { t: f64 },

    #[error("adaptive quadrature on [{a}, {b}] exceeded its subdivision budget")]
    QuadratureFailure { a: f64, b: f64 },

    #[error("improper integral did not converge: {reason}")]
    NoConvergence { reason: String },

    #[error("{z} lies outside the convergence region Re_{h}(z) > {lambda}")]
    OutsideRegion { z: Complex64, h: f64, lambda: f64 },

    #[error("graininess is not constant on [s, infinity)")]
    NonConstantGraininess,

    #[error("the shift identity is not testable at the right-dense boundary point {t}")]
    DenseBoundary { t: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn at_point(eta: Option<f64>) -> String {
    match eta {
        Some(eta) => format!(" at {eta}"),
        None => String::new(),
    }
}
