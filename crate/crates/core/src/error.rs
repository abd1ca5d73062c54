use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested argument sits on a pole of the evaluated function.
    #[error("pole at F = {0}")]
    Pole(f64),

    /// A closed form was requested outside the parameter regime it was derived for.
    #[error("out of regime: {0}")]
    OutOfRegime(String),

    /// Adaptive quadrature exhausted its evaluation budget.
    #[error(
        "quadrature did not converge after {evaluations} evaluations \
         (best estimate {best:e}, error estimate {abs_error:e})"
    )]
    NonConvergence {
        best: f64,
        abs_error: f64,
        evaluations: usize,
    },

    /// The balance function does not change sign on the search bracket.
    #[error("no root in [{lo}, {hi}]: deficit is {f_lo:e} at the lower end and {f_hi:e} at the upper end")]
    NoRoot { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn regime(msg: impl Into<String>) -> Self {
        Error::OutOfRegime(msg.into())
    }
}
