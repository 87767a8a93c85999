use std::fmt;
use std::str::FromStr;

use super::{apply, find_matches, MatchSite, RewriteError, RewriteTrace, Rule, RuleId};
use crate::diagram::{Colour, Diagram};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Spider fusion and loop removal only.
    Spider,
    /// Spider, Identity, AntiLoop and HCancel to fixpoint.
    Fuse,
    /// Fuse plus Hopf, Copying and HCommute normalization towards Z.
    Full,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Spider => "spider",
            Strategy::Fuse => "fuse",
            Strategy::Full => "full",
        })
    }
}

impl FromStr for Strategy {
    type Err = RewriteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "spider" => Ok(Strategy::Spider),
            "fuse" => Ok(Strategy::Fuse),
            "full" => Ok(Strategy::Full),
            _ => Err(RewriteError::UnknownStrategy(s.to_string())),
        }
    }
}

fn both(rules: &[Rule]) -> Vec<RuleId> {
    rules.iter().flat_map(|r| [RuleId::new(*r, false), RuleId::new(*r, true)]).collect()
}

impl Strategy {
    fn greedy_rules(self) -> Vec<RuleId> {
        match self {
            Strategy::Spider => both(&[Rule::Spider, Rule::AntiLoop]),
            Strategy::Fuse => {
                let mut r = both(&[Rule::Spider, Rule::Identity, Rule::AntiLoop]);
                r.push(RuleId::new(Rule::HCancel, false));
                r
            }
            Strategy::Full => {
                let mut r = Strategy::Fuse.greedy_rules();
                r.extend(both(&[Rule::Hopf, Rule::Copying, Rule::HCommute]));
                r
            }
        }
    }

    fn lookahead_rules(self) -> Vec<RuleId> {
        match self {
            Strategy::Full => both(&[Rule::HCommute, Rule::Copying]),
            _ => Vec::new(),
        }
    }
}

/// Termination measure, compared lexicographically: vertices, edges,
/// H vertices, X spiders.
pub fn measure(d: &Diagram) -> (usize, usize, usize, usize) {
    let h = d.vertices().filter(|(_, k)| k.is_h()).count();
    let x = d.vertices().filter(|(_, k)| k.colour() == Some(Colour::X)).count();
    (d.num_vertices(), d.num_edges(), h, x)
}

fn sites(d: &Diagram, rules: &[RuleId]) -> Vec<MatchSite> {
    let mut all: Vec<MatchSite> = rules.iter().flat_map(|r| find_matches(d, *r)).collect();
    all.sort_by(|a, b| a.anchors.cmp(&b.anchors).then(a.rule.cmp(&b.rule)));
    all
}

/// Applies the first site (lowest anchors) that lowers the measure.
fn greedy_step(d: &mut Diagram, trace: &mut RewriteTrace, rules: &[RuleId]) -> bool {
    let before = measure(d);
    for site in sites(d, rules) {
        let next = apply(d, &site).expect("enumerated site applies");
        if measure(&next) < before {
            trace.record(site, &next);
            *d = next;
            return true;
        }
    }
    false
}

fn greedy_fixpoint(d: &mut Diagram, trace: &mut RewriteTrace, rules: &[RuleId]) {
    while greedy_step(d, trace, rules) {}
}

/// Tries one measure-neutral or increasing step followed by a greedy run;
/// commits only if the combination lowers the measure.
fn lookahead_step(d: &mut Diagram, trace: &mut RewriteTrace, greedy: &[RuleId], probe: &[RuleId]) -> bool {
    let before = measure(d);
    for site in sites(d, probe) {
        let mut next = apply(d, &site).expect("enumerated site applies");
        let mut sub = RewriteTrace::new();
        sub.record(site, &next);
        greedy_fixpoint(&mut next, &mut sub, greedy);
        if measure(&next) < before {
            trace.extend(sub);
            *d = next;
            return true;
        }
    }
    false
}

/// Rewrites to a fixpoint of `strategy`. Every committed step strictly
/// lowers [`measure`], so this terminates; ties go to the lowest anchors.
pub fn simplify(d: &Diagram, strategy: Strategy) -> (Diagram, RewriteTrace) {
    let greedy = strategy.greedy_rules();
    let probe = strategy.lookahead_rules();
    let mut d = d.clone();
    let mut trace = RewriteTrace::new();
    loop {
        greedy_fixpoint(&mut d, &mut trace, &greedy);
        if !lookahead_step(&mut d, &mut trace, &greedy, &probe) {
            break;
        }
    }
    (d, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{iso_equal, VertexKind};
    use crate::phase::{AngleAssignment, PhaseExpr};
    use crate::semantics::{eval_matrix, gate, zero_state, GateName};

    fn cup() -> Diagram {
        let mut d = Diagram::new();
        let a = d.add_output();
        let b = d.add_output();
        d.add_edge(a, b);
        d
    }

    #[test]
    fn cz_squared_is_identity() {
        let cz = gate(GateName::CZ, None).unwrap();
        let d = cz.compose(&cz).unwrap();
        let (s, trace) = simplify(&d, Strategy::Full);
        assert!(iso_equal(&s, &Diagram::identity(2)), "{}", s.to_json());
        assert_eq!(trace.replay(&d).unwrap(), s);
    }

    #[test]
    fn bell_preparation_is_cup() {
        let bell = gate(GateName::BellPrep, None).unwrap();
        let d = zero_state().tensor(&zero_state()).compose(&bell).unwrap();
        let (s, _) = simplify(&d, Strategy::Full);
        assert!(iso_equal(&s, &cup()), "{}", s.to_json());
    }

    #[test]
    fn hh_fuses_away() {
        let h = gate(GateName::H, None).unwrap();
        let (s, _) = simplify(&h.compose(&h).unwrap(), Strategy::Fuse);
        assert!(iso_equal(&s, &Diagram::identity(1)));
    }

    #[test]
    fn idempotent_and_sound() {
        let rz = gate(GateName::ZPhase, Some(PhaseExpr::symbol("a"))).unwrap();
        let d = gate(GateName::CX, None)
            .unwrap()
            .compose(&rz.tensor(&gate(GateName::H, None).unwrap()))
            .unwrap()
            .compose(&gate(GateName::CZ, None).unwrap())
            .unwrap();
        for strategy in [Strategy::Spider, Strategy::Fuse, Strategy::Full] {
            let (s, _) = simplify(&d, strategy);
            let (t, trace) = simplify(&s, strategy);
            assert!(trace.is_empty() && iso_equal(&s, &t));
            let a = AngleAssignment::new().with("a", 0.4);
            let (m, n) = (eval_matrix(&d, &a).unwrap(), eval_matrix(&s, &a).unwrap());
            assert!(m.equal_up_to_scalar(&n, 1e-9).unwrap());
        }
    }

    #[test]
    fn spider_strategy_keeps_plain_wires() {
        let mut d = Diagram::identity(1);
        let (i, o) = (d.inputs()[0], d.outputs()[0]);
        d.split_edge(i, o, VertexKind::z(PhaseExpr::zero()));
        assert_eq!(simplify(&d, Strategy::Spider).0, d);
        assert!(iso_equal(&simplify(&d, Strategy::Fuse).0, &Diagram::identity(1)));
    }
}
