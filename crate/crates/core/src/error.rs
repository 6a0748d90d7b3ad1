use std::fmt;

/// Diagnostics attached to a quadrature that stopped before meeting its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadDiagnostics {
    pub what: String,
    pub value: f64,
    pub error_estimate: f64,
    pub target: f64,
    pub evaluations: usize,
}

impl fmt::Display for QuadDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: value {:.6e}, error estimate {:.3e} above target {:.3e} after {} evaluations",
            self.what, self.value, self.error_estimate, self.target, self.evaluations
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parameter {param:?} at t = {t} lies outside the chart of {flow}")]
    OutsideChart {
        flow: String,
        param: Vec<f64>,
        t: f64,
    },
    #[error("quadrature did not converge ({0})")]
    Quadrature(QuadDiagnostics),
    #[error("unknown flow `{0}`")]
    UnknownFlow(String),
    #[error("limit extrapolation failed: {0}")]
    Extrapolation(String),
    #[error("optimizer failed: {0}")]
    Optimizer(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature(_) | Error::Extrapolation(_) | Error::Optimizer(_)
        )
    }
}
