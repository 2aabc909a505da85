use thiserror::Error;

/// Errors raised by the estimation and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain where the requested quantity exists.
    #[error("domain error: {0}")]
    Domain(String),

    /// A modelling assumption required by the procedure does not hold.
    #[error("assumption violated: {0}")]
    Assumption(String),

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature failed to converge (estimate {estimate:e}, error bound {error_bound:e})")]
    Quadrature { estimate: f64, error_bound: f64 },

    /// A caller-side contract (e.g. Hermitian symmetry) was broken.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Malformed user input.
    #[error("invalid input: {0}")]
    Input(String),

    /// No closed form is available for the request.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A Monte Carlo experiment produced values that cannot be analysed.
    #[error("degenerate experiment: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

impl Error {
    /// Process exit status for the command-line tool: 2 for bad input,
    /// 3 for violated assumptions, 4 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 2,
            Error::Domain(_) | Error::Assumption(_) | Error::Contract(_) | Error::Unsupported(_) => 3,
            Error::Quadrature { .. } | Error::Degenerate(_) => 4,
        }
    }
}
