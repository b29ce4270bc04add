//! Multi-indices, flat-output jets, and the total time derivative.

mod index;
mod jet;
mod map;
mod scalar;

use thiserror::Error;

pub use index::MultiIndex;
pub use jet::{Jet, JetVar};
pub use map::{jet_jacobian, jet_partials, prolong, Component, JetMap, Prolonged};
pub use scalar::{Dual, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("expected {expected} channels, found {found}")]
    ChannelMismatch { expected: usize, found: usize },
    #[error("jet variable y^{channel}_[{order}] is not stored in a jet of shape {shape}")]
    MissingVariable {
        channel: usize,
        order: usize,
        shape: MultiIndex,
    },
    #[error("jet of shape {available} does not cover arity {required}")]
    NotCovered {
        required: MultiIndex,
        available: MultiIndex,
    },
    #[error("{lhs} - {rhs} has a negative entry")]
    NegativeOrder { lhs: MultiIndex, rhs: MultiIndex },
    #[error("channel {0} has no values")]
    EmptyChannel(usize),
    #[error("cannot parse multi-index from {0:?}")]
    Parse(String),
}
