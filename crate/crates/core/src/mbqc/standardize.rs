use std::collections::BTreeMap;

use super::{check_wellformed, Command, MbqcError, Pattern, Qubit};
use crate::diagram::ConditionSet;

#[derive(Default, Clone)]
struct Pending {
    x: ConditionSet,
    z: ConditionSet,
}

/// Rewrites a well-formed pattern into N, E, M, C order.
///
/// Corrections are pushed to the end with `X_a^s E_ab = E_ab X_a^s Z_b^s`
/// (in execution order: X then E becomes E then X, Z on the partner);
/// Z commutes with E. A measurement absorbs the corrections pending on its
/// qubit, `X^s` into its s-set and `Z^t` into its t-set. Sets combine by
/// symmetric difference since the corrections are Pauli. Leftover
/// corrections are emitted Z first, then X, by ascending qubit.
pub fn standardize(p: &Pattern) -> Result<Pattern, MbqcError> {
    let violations = check_wellformed(p);
    if !violations.is_empty() {
        return Err(MbqcError::IllFormed(violations));
    }
    if p.is_standard() {
        return Ok(p.clone());
    }
    let mut ns = Vec::new();
    let mut es = Vec::new();
    let mut ms = Vec::new();
    let mut pending: BTreeMap<Qubit, Pending> = BTreeMap::new();
    for c in &p.commands {
        match c {
            Command::N(_) => ns.push(c.clone()),
            Command::E(a, b) => {
                let xa = pending.get(a).map(|p| p.x.clone()).unwrap_or_default();
                let xb = pending.get(b).map(|p| p.x.clone()).unwrap_or_default();
                if !xa.is_empty() {
                    let e = pending.entry(*b).or_default();
                    e.z = e.z.symmetric_difference(&xa);
                }
                if !xb.is_empty() {
                    let e = pending.entry(*a).or_default();
                    e.z = e.z.symmetric_difference(&xb);
                }
                es.push(c.clone());
            }
            Command::M { q, angle, s, t } => {
                let pend = pending.remove(q).unwrap_or_default();
                ms.push(Command::M {
                    q: *q,
                    angle: angle.clone(),
                    s: s.symmetric_difference(&pend.x),
                    t: t.symmetric_difference(&pend.z),
                });
            }
            Command::X(q, set) => {
                let e = pending.entry(*q).or_default();
                e.x = e.x.symmetric_difference(set);
            }
            Command::Z(q, set) => {
                let e = pending.entry(*q).or_default();
                e.z = e.z.symmetric_difference(set);
            }
        }
    }
    let mut cs = Vec::new();
    for (q, pend) in &pending {
        if !pend.z.is_empty() {
            cs.push(Command::Z(*q, pend.z.clone()));
        }
    }
    for (q, pend) in &pending {
        if !pend.x.is_empty() {
            cs.push(Command::X(*q, pend.x.clone()));
        }
    }
    let mut out = p.clone();
    out.commands = ns.into_iter().chain(es).chain(ms).chain(cs).collect();
    Ok(out)
}

/// Replaces each conditional measurement `^s[M^α]^t` by `X^s`, `Z^t`, then a
/// plain `M^α` (execution order). The result is not in standard form.
pub fn expand_conditional_measurements(p: &Pattern) -> Pattern {
    let mut out = p.clone();
    out.commands = p
        .commands
        .iter()
        .flat_map(|c| match c {
            Command::M { q, angle, s, t } => {
                let mut v = Vec::new();
                if !s.is_empty() {
                    v.push(Command::X(*q, s.clone()));
                }
                if !t.is_empty() {
                    v.push(Command::Z(*q, t.clone()));
                }
                v.push(Command::measure(*q, angle.clone()));
                v
            }
            other => vec![other.clone()],
        })
        .collect();
    out
}
