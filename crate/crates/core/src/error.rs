use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A validity inequality required by a range formula fails.
    #[error("condition `{condition}` failed: {detail}")]
    Condition {
        condition: &'static str,
        detail: String,
    },

    /// A Lebesgue exponent lies outside the window where a statement applies.
    #[error("range error: {0}")]
    Range(String),

    /// A kernel denominator vanishes.
    #[error("singularity: {0}")]
    Singularity(String),

    /// Adaptive quadrature could not meet its tolerance within budget.
    #[error("accuracy error: {detail} (best estimate {best:e}, error bound {bound:e})")]
    Accuracy { best: f64, bound: f64, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
