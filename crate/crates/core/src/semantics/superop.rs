use serde::Serialize;

use super::{eval_matrix, DenseOperator, SemanticsError};
use crate::diagram::{Diagram, Valuation};
use crate::phase::AngleAssignment;

/// Kraus-sum channel: one term per valuation of the signal set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuperOp {
    pub kraus_terms: Vec<(Valuation, DenseOperator)>,
}

impl SuperOp {
    pub fn from_unitary(u: DenseOperator) -> Self {
        SuperOp { kraus_terms: vec![(Valuation::new(), u)] }
    }

    /// ρ ↦ Σ K ρ K†.
    pub fn apply(&self, rho: &DenseOperator) -> Result<DenseOperator, SemanticsError> {
        let mut out: Option<DenseOperator> = None;
        for (_, k) in &self.kraus_terms {
            let term = k.matmul(rho)?.matmul(&k.adjoint())?;
            out = Some(match out {
                None => term,
                Some(acc) => acc.add(&term)?,
            });
        }
        out.ok_or_else(|| SemanticsError::Shape("channel without Kraus terms".into()))
    }

    /// Σ K ⊗ conj(K): the channel as a linear map on vectorized densities.
    /// Two Kraus families give the same channel iff these agree.
    pub fn transfer_matrix(&self) -> Result<DenseOperator, SemanticsError> {
        let mut out: Option<DenseOperator> = None;
        for (_, k) in &self.kraus_terms {
            let term = k.kron(&k.conj());
            out = Some(match out {
                None => term,
                Some(acc) => acc.add(&term)?,
            });
        }
        out.ok_or_else(|| SemanticsError::Shape("channel without Kraus terms".into()))
    }

    pub fn equal_up_to_scalar(&self, other: &SuperOp, tol: f64) -> Result<bool, SemanticsError> {
        self.transfer_matrix()?.equal_up_to_scalar(&other.transfer_matrix()?, tol)
    }

    pub fn scalar_distance(&self, other: &SuperOp) -> Result<f64, SemanticsError> {
        self.transfer_matrix()?.scalar_distance(&other.transfer_matrix()?)
    }
}

/// Superoperator over the diagram's own signals.
pub fn eval_superop(d: &Diagram, angles: &AngleAssignment) -> Result<SuperOp, SemanticsError> {
    let signals: Vec<String> = d.signals().into_iter().collect();
    eval_superop_over(d, &signals, angles)
}

/// Superoperator summed over every valuation of `signals`, which must cover
/// the diagram's own. Extra signals only duplicate terms.
pub fn eval_superop_over(
    d: &Diagram,
    signals: &[String],
    angles: &AngleAssignment,
) -> Result<SuperOp, SemanticsError> {
    let kraus_terms = Valuation::enumerate(signals)
        .into_iter()
        .map(|v| {
            let k = eval_matrix(&d.apply_valuation(&v)?, angles)?;
            Ok((v, k))
        })
        .collect::<Result<Vec<_>, SemanticsError>>()?;
    Ok(SuperOp { kraus_terms })
}
