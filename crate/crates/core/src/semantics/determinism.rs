use serde::Serialize;

use super::{eval_matrix, DenseOperator, SemanticsError};
use crate::diagram::Valuation;
use crate::mbqc::{standardize, to_diagram, MbqcError, Pattern};
use crate::phase::AngleAssignment;

pub const DEFAULT_SIGNAL_BOUND: usize = 12;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum BranchError {
    #[error(transparent)]
    Pattern(#[from] MbqcError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Linear map of every execution branch, positive branch first, in
/// [`Valuation::enumerate`] order over the pattern's signals.
pub fn branch_maps(p: &Pattern, angles: &AngleAssignment) -> Result<Vec<(Valuation, DenseOperator)>, BranchError> {
    let std = standardize(p)?;
    let d = to_diagram(&std)?;
    Valuation::enumerate(&std.signals())
        .into_iter()
        .map(|v| {
            let m = eval_matrix(&d.apply_valuation(&v).map_err(SemanticsError::from)?, angles)?;
            Ok((v, m))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SemanticVerdict {
    Deterministic,
    /// The first branch (in enumeration order) not proportional to the
    /// positive branch, and its distance after normalization.
    Counterexample {
        positive: Valuation,
        witness: Valuation,
        distance: f64,
    },
}

/// Compares every branch map with the positive branch up to scalar.
pub fn semantic_determinism(
    p: &Pattern,
    angles: &AngleAssignment,
    tol: f64,
    signal_bound: usize,
) -> Result<SemanticVerdict, BranchError> {
    let n = p.measured().len();
    if n > signal_bound {
        return Err(SemanticsError::SignalBound { count: n, bound: signal_bound }.into());
    }
    let maps = branch_maps(p, angles)?;
    let (pos_v, pos) = &maps[0];
    for (v, m) in &maps[1..] {
        let dist = m.scalar_distance(pos)?;
        if dist > tol {
            return Ok(SemanticVerdict::Counterexample {
                positive: pos_v.clone(),
                witness: v.clone(),
                distance: dist,
            });
        }
    }
    Ok(SemanticVerdict::Deterministic)
}
