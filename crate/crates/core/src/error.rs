use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured resource cap (square count, node count, depth) was hit.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),

    /// The parallel-set radius is outside the window where the requested
    /// identity or decomposition is valid.
    #[error("eps = {eps} is outside the valid range [{lo}, {hi}]")]
    EpsOutOfRange { eps: f64, lo: f64, hi: f64 },

    #[error("enclosure width {width:e} exceeds the requested budget {budget:e} at depth {depth}")]
    BudgetNotMet { width: f64, budget: f64, depth: u32 },

    #[error("degenerate system: {0}")]
    Degenerate(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
