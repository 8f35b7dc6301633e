use thiserror::Error;

/// Errors raised by the evaluators in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument hit a pole of Γ or a vanishing denominator Pochhammer symbol.
    #[error("pole: {0}")]
    Pole(String),

    /// A series or iteration did not meet its stopping rule within its cap.
    #[error("no convergence after {work} steps: {what}")]
    Convergence { what: String, work: u64 },

    /// Order doubling hit the configured cap before two successive
    /// quadrature results agreed.
    #[error("quadrature not converged at order {order} (last difference {last_diff:e})")]
    QuadratureNotConverged { order: usize, last_diff: f64 },

    /// Zonal functions exist only for the even-parity representations.
    #[error("zonal spherical functions require eps = 0 (got eps = 1)")]
    EpsOdd,

    /// Argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn pole(msg: impl Into<String>) -> Self {
        Error::Pole(msg.into())
    }

    /// True for failures caused by numerical non-convergence rather than by
    /// invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. } | Error::QuadratureNotConverged { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
