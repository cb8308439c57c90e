use thiserror::Error;

use crate::graph::VertexSet;

pub type Result<T> = std::result::Result<T, FlexError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlexError {
    /// Malformed graph input: bad vertex id, self-loop, negative cost.
    #[error("structural error: {0}")]
    Structural(String),

    /// A desk-scale enumeration or search bound was exceeded.
    #[error("capacity limit: {what} is {actual}, bound is {bound}")]
    Capacity {
        what: &'static str,
        bound: usize,
        actual: usize,
    },

    /// No feasible solution exists. `cut` is a deficient cut when one is known.
    #[error("infeasible: {reason}{}", .cut.map(|c| format!(" (cut {c})")).unwrap_or_default())]
    Infeasible {
        reason: String,
        cut: Option<VertexSet>,
    },

    #[error("precondition failed: {reason}{}", .cut.map(|c| format!(" (witness {c})")).unwrap_or_default())]
    Precondition {
        reason: String,
        cut: Option<VertexSet>,
    },

    #[error("family is not uncrossable: {a} and {b} do not uncross")]
    NotUncrossable { a: VertexSet, b: VertexSet },

    #[error("family is not a ring family: {0}")]
    NotRing(String),

    #[error("unsupported requirement ({p},{q}): {reason}")]
    Unsupported { p: u32, q: u32, reason: String },

    #[error("cutting-plane loop did not converge within {iterations} rounds")]
    NonConvergence { iterations: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An invariant guaranteed by the underlying theory did not hold.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl FlexError {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        FlexError::Structural(msg.into())
    }

    pub(crate) fn infeasible(reason: impl Into<String>, cut: Option<VertexSet>) -> Self {
        FlexError::Infeasible {
            reason: reason.into(),
            cut,
        }
    }

    pub(crate) fn precondition(reason: impl Into<String>, cut: Option<VertexSet>) -> Self {
        FlexError::Precondition {
            reason: reason.into(),
            cut,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        FlexError::Parse {
            line,
            message: message.into(),
        }
    }
}
