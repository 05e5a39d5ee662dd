use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The Neumann datum does not balance the load.
    #[error("compatibility violated: residual {residual:.3e}")]
    Compatibility { residual: f64 },

    /// Positivity of the total load (and hence of c, c*) does not hold.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// A component carries a zero Neumann datum, so c*/c_j is undefined.
    #[error("component {component} has zero Neumann datum; the boundary normalization is undefined")]
    DegenerateFlux { component: usize },

    #[error("conjugate gradient did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
