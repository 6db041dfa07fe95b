use thiserror::Error;

/// Errors raised by distribution construction, enumeration, measures and experiments.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("a distribution needs at least one cell")]
    EmptyDomain,

    #[error("cell {index} holds {value}; every cell must hold at least 1")]
    ZeroCell { index: usize, value: i64 },

    #[error("cannot parse distribution {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid enumeration spec: {dots} dots over {cells} cells (need dots >= cells >= 1)")]
    InvalidSpec { dots: u64, cells: usize },

    #[error("cardinality mismatch: {left} cells vs {right} cells")]
    DomainMismatch { left: usize, right: usize },

    #[error("quantum mismatch: 1/{left} vs 1/{right}; rescale to a common quantum first")]
    QuantumMismatch { left: u64, right: u64 },

    #[error("normalizer is zero: no free quantity to place (dots == cells) but P != Q")]
    DegenerateNormalizer,

    #[error("{dots} dots cannot be spread uniformly over {cells} cells")]
    NonUniformCapable { dots: u64, cells: usize },

    #[error("{what} needs {needed} items, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("integer overflow while {0}")]
    Overflow(&'static str),
}

impl Error {
    /// True for errors caused by a size budget rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
