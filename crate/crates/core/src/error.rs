use thiserror::Error;

/// Failures reported by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("derivative order {order} exceeds the cap of {cap}")]
    OrderCap { order: u32, cap: u32 },

    #[error("series cancellation needs {needed} decimal digits, above the cap of {cap}")]
    CancellationCap { needed: u32, cap: u32 },

    #[error("quadrature did not converge: error estimate {estimate:e} after {intervals} subintervals")]
    Quadrature { estimate: f64, intervals: usize },

    #[error("bracket failure: {0}")]
    Bracket(String),

    #[error("criterion is not monotone in beta: {0}")]
    NonMonotone(String),

    #[error("precision escalation failed: {0}")]
    PrecisionEscalation(String),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::Domain(_) | Error::Precondition(_) | Error::OrderCap { .. }
        )
    }

    /// Stable upper-case tag, used in `ERROR <code>:` lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DOMAIN",
            Error::Precondition(_) => "PRECONDITION",
            Error::OrderCap { .. } => "ORDER_CAP",
            Error::CancellationCap { .. } => "CANCELLATION_CAP",
            Error::Quadrature { .. } => "QUADRATURE",
            Error::Bracket(_) => "BRACKET",
            Error::NonMonotone(_) => "NON_MONOTONE",
            Error::PrecisionEscalation(_) => "PRECISION",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
