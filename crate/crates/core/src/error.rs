use thiserror::Error;

use crate::circle::MAX_N;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set size {0} is outside 1..={max}", max = MAX_N)]
    GroundSize(usize),

    #[error("invalid arc (head {head}, length {len}) on a circle of {n} positions")]
    InvalidArc { n: usize, head: usize, len: usize },

    #[error("position {pos} is outside 1..={n}")]
    InvalidPosition { n: usize, pos: usize },

    #[error("{0}")]
    Domain(String),

    /// A parameter combination falls outside a theorem's hypotheses.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("enumeration limit exceeded: {0}")]
    Limit(String),

    #[error("predicate `{0}` is not closed under taking subfamilies; it cannot drive a pruned search")]
    NotAntiMonotone(String),

    /// The search ran out of nodes or time. `best` is a valid lower bound,
    /// `upper` an upper bound; neither is exact.
    #[error(
        "search budget exceeded after {nodes} nodes (state space 2^{log2_states}); \
         best found {best:?}, upper bound {upper}"
    )]
    Budget {
        nodes: u64,
        log2_states: usize,
        best: Option<String>,
        upper: String,
    },

    /// A verified bound was exceeded. Always a bug somewhere.
    #[error("bound falsified for {theorem}: achieved {achieved} > bound {bound}; counterexample {counterexample}")]
    Falsified {
        theorem: String,
        bound: String,
        achieved: String,
        counterexample: String,
    },

    #[error("parse error: {0}")]
    Parse(String),

    /// A result failed its independent re-check.
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }
}
