use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by curve construction, chart maps, the Hamilton-Jacobi layer and the
/// canonical integrators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("angle {psi} outside the domain [{min}, {max}]")]
    OutOfDomain { psi: f64, min: f64, max: f64 },

    #[error("point (R = {r}, psi = {psi}) is outside the chart: R - l(psi) = {gap}")]
    OutsideChart { r: f64, psi: f64, gap: f64 },

    #[error("metric degenerates at (R = {r}, psi = {psi}): R - l(psi) = {gap}")]
    MetricDegenerate { r: f64, psi: f64, gap: f64 },

    #[error("point ({x1}, {x2}) is not covered by the chart: {reason}")]
    NotInChart { x1: f64, x2: f64, reason: String },

    #[error("point ({x1}, {x2}) lies on several rays, candidate psi values {candidates:?}")]
    Ambiguous { x1: f64, x2: f64, candidates: Vec<f64> },

    #[error("classically forbidden region at psi = {psi}: E - V = {deficit}")]
    Forbidden { psi: f64, deficit: f64 },

    #[error("inconsistent initial data: {0}")]
    InconsistentInitialData(String),

    #[error("psi = {psi} outside the solved range [{lo}, {hi}]")]
    OutOfSolvedRange { psi: f64, lo: f64, hi: f64 },

    #[error("caustic of the solution family at psi = {psi}")]
    Caustic { psi: f64 },

    #[error("reference angle psi = {psi_ref} never crossed in the requested direction")]
    UnreachedReference { psi_ref: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// Coarse classification used by the command-line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Domain,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidCurve(_) | Error::InvalidInput(_) => ErrorClass::Config,
            Error::OutOfDomain { .. }
            | Error::OutsideChart { .. }
            | Error::MetricDegenerate { .. }
            | Error::NotInChart { .. }
            | Error::Ambiguous { .. }
            | Error::Forbidden { .. }
            | Error::InconsistentInitialData(_)
            | Error::OutOfSolvedRange { .. } => ErrorClass::Domain,
            Error::Caustic { .. } | Error::UnreachedReference { .. } | Error::Numerical(_) => {
                ErrorClass::Numerical
            }
        }
    }
}
