//! Dense linear-algebra semantics of diagrams: the ground truth every
//! rewrite and verdict is checked against.

mod contract;
mod determinism;
mod gates;
mod matrix;
mod superop;

use thiserror::Error;

use crate::diagram::DiagramError;
use crate::phase::PhaseError;

pub use contract::{eval_matrix, eval_matrix_with, eval_scalar, ContractionOrder, MAX_RANK};
pub use determinism::{
    branch_maps, semantic_determinism, BranchError, SemanticVerdict, DEFAULT_SIGNAL_BOUND,
};
pub use gates::{gate, zero_state, GateName};
pub use matrix::{DenseOperator, ZERO_TOL};
pub use superop::{eval_superop, eval_superop_over, SuperOp};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemanticsError {
    #[error("diagram has conditional vertices; use the superoperator semantics")]
    Conditional,
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("intermediate tensor of rank {0} exceeds the contraction bound")]
    TooLarge(usize),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("{0}")]
    Gate(String),
    #[error("{count} signals exceed the bound of {bound}")]
    SignalBound { count: usize, bound: usize },
}
