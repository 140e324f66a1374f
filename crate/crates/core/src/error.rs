use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("invalid {name}: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (value {value:e}, error estimate {error:e})"
    )]
    QuadratureNonConvergence {
        subdivisions: usize,
        value: f64,
        error: f64,
    },

    /// The Matsubara series was still contributing when the term budget ran out.
    #[error(
        "Matsubara sum not converged after {terms} terms \
         (last term relative contribution {last_relative:e})"
    )]
    SeriesNonConvergence { terms: usize, last_relative: f64 },

    #[error("finite-difference step underflow at T = {temperature} K (step {step} K)")]
    StepUnderflow { temperature: f64, step: f64 },

    #[error("permittivity table row {row}: {reason}")]
    Table { row: usize, reason: String },

    #[error("dataset row {row}: {reason}")]
    Dataset { row: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonConvergence { .. } | Error::SeriesNonConvergence { .. }
        )
    }
}
