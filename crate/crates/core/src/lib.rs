//! ZX-calculus rewriting with a dense tensor oracle, a measurement-calculus
//! front end, and causal-flow analysis of one-way patterns.

pub mod diagram;
pub mod flow;
pub mod mbqc;
pub mod phase;
pub mod rewrite;
pub mod semantics;
