use std::collections::{BTreeMap, BTreeSet};
use serde::Serialize;

use super::{find_flow, Flow, Node};
use crate::diagram::{Colour, ConditionSet, Diagram, SpiderData, Valuation, VertexKind, V};
use crate::mbqc::{check_wellformed, geometry, signal_of, standardize, to_diagram_annotated, MbqcError, Pattern};
use crate::phase::{AngleAssignment, DEFAULT_PROBES};
use crate::rewrite::{apply, push_error, simplify, MatchSite, RewriteTrace, Rule, RuleId, Strategy};
use crate::semantics::{semantic_determinism, BranchError, SemanticVerdict, SemanticsError, DEFAULT_SIGNAL_BOUND};

#[derive(Clone, Debug, PartialEq)]
pub struct DeterminismConfig {
    /// Angle probes; see [`AngleAssignment::from_probe`].
    pub probes: Vec<f64>,
    pub tol: f64,
    pub signal_bound: usize,
}

impl Default for DeterminismConfig {
    fn default() -> Self {
        DeterminismConfig {
            probes: DEFAULT_PROBES.to_vec(),
            tol: 1e-9,
            signal_bound: DEFAULT_SIGNAL_BOUND,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The conditional diagram rewrites to an unconditional one.
    ProvedDeterministic,
    /// Every branch map matched the positive branch at every probe.
    DeterministicAtProbes,
    NotUniformlyDeterministic,
    Unknown,
}

impl Verdict {
    pub fn is_positive(self) -> bool {
        matches!(self, Verdict::ProvedDeterministic | Verdict::DeterministicAtProbes)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FlowRewrite,
    SemanticFallback,
}

/// Two branches that differ by more than a scalar at `angle`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub positive: Valuation,
    pub witness: Valuation,
    pub distance: f64,
    pub angle: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeterminismReport {
    pub verdict: Verdict,
    pub method: Method,
    pub flow: Option<Flow>,
    pub trace: Option<RewriteTrace>,
    pub witness: Option<Witness>,
    /// Where the flow-guided rewriting got stuck.
    pub residual: Option<Diagram>,
    pub note: Option<String>,
}

impl DeterminismReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

pub fn verify_determinism(p: &Pattern) -> Result<DeterminismReport, MbqcError> {
    verify_determinism_with(p, &DeterminismConfig::default())
}

/// Tries the flow-guided rewrite proof and falls back to comparing branch
/// maps at the configured angle probes.
pub fn verify_determinism_with(p: &Pattern, cfg: &DeterminismConfig) -> Result<DeterminismReport, MbqcError> {
    let violations = check_wellformed(p);
    if !violations.is_empty() {
        return Err(MbqcError::IllFormed(violations));
    }
    let std = standardize(p)?;
    let g = geometry(&std);
    let flow = find_flow(&g);
    let mut report = DeterminismReport {
        verdict: Verdict::Unknown,
        method: Method::SemanticFallback,
        flow: flow.clone(),
        trace: None,
        witness: None,
        residual: None,
        note: None,
    };
    match &flow {
        Some(fl) => {
            let (d, trace) = flow_rewrite(&std, fl, &fl.measurement_order(&g))?;
            let proved = d.is_unconditional();
            report.trace = Some(trace);
            if proved {
                report.verdict = Verdict::ProvedDeterministic;
                report.method = Method::FlowRewrite;
                return Ok(report);
            }
            report.residual = Some(d);
            report.note = Some("conditional vertices remain after flow-guided rewriting".into());
        }
        None => {
            let isolated = g.measured().into_iter().find(|v| g.neighbours(*v).is_empty());
            report.note = Some(match isolated {
                Some(v) => format!("no flow: measured vertex {v} has no neighbours"),
                None => "no flow".into(),
            });
        }
    }
    semantic_fallback(&std, cfg, &mut report)?;
    Ok(report)
}

fn semantic_fallback(p: &Pattern, cfg: &DeterminismConfig, report: &mut DeterminismReport) -> Result<(), MbqcError> {
    let symbols = p.symbols();
    let probes: Vec<Option<f64>> = if symbols.is_empty() {
        vec![None]
    } else {
        cfg.probes.iter().copied().map(Some).collect()
    };
    for probe in probes {
        let angles = AngleAssignment::from_probe(symbols.iter().map(String::as_str), probe.unwrap_or(0.0));
        match semantic_determinism(p, &angles, cfg.tol, cfg.signal_bound) {
            Ok(SemanticVerdict::Deterministic) => {}
            Ok(SemanticVerdict::Counterexample {
                positive,
                witness,
                distance,
            }) => {
                report.verdict = Verdict::NotUniformlyDeterministic;
                report.witness = Some(Witness {
                    positive,
                    witness,
                    distance,
                    angle: probe,
                });
                return Ok(());
            }
            Err(BranchError::Semantics(SemanticsError::SignalBound { count, bound })) => {
                report.verdict = Verdict::Unknown;
                report.note = Some(format!("{count} signals exceed the bound of {bound}"));
                return Ok(());
            }
            Err(BranchError::Pattern(e)) => return Err(e),
            Err(BranchError::Semantics(e)) => {
                report.verdict = Verdict::Unknown;
                report.note = Some(e.to_string());
                return Ok(());
            }
        }
    }
    report.verdict = Verdict::DeterministicAtProbes;
    Ok(())
}

struct Prover {
    d: Diagram,
    trace: RewriteTrace,
}

impl Prover {
    fn step(&mut self, rule: Rule, colour: Colour, anchors: Vec<V>) -> bool {
        let site = MatchSite {
            rule: RuleId::new(rule, colour == Colour::X),
            anchors,
            edges: Vec::new(),
        };
        match apply(&self.d, &site) {
            Ok(next) => {
                self.trace.record(site, &next);
                self.d = next;
                true
            }
            Err(_) => false,
        }
    }

    /// AlphaCommute; the moved vertex comes back under a fresh id.
    fn alpha(&mut self, colour: Colour, p: V, s: V, n: V) -> Option<V> {
        let fresh = self.d.fresh_id();
        (self.step(Rule::AlphaCommute, colour, vec![p, s, n]) && self.d.contains(fresh)).then_some(fresh)
    }

    fn spider(&self, v: V) -> Option<(Colour, &SpiderData)> {
        let k = self.d.kind(v)?;
        Some((k.colour()?, k.spider_data()?))
    }

    fn is_h(&self, v: V) -> bool {
        self.d.kind(v).is_some_and(VertexKind::is_h)
    }

    /// The neighbour of a degree-two vertex `v` other than `prev`.
    fn other(&self, v: V, prev: V) -> Option<V> {
        let legs = self.d.legs(v);
        match legs[..] {
            [a, b] if a == prev && b != prev => Some(b),
            [a, b] if b == prev && a != prev => Some(a),
            _ => None,
        }
    }

    /// Moves the error `e` of a measurement back along its chain until it
    /// touches the qubit spider `s`.
    fn retreat(&mut self, mut e: V, effect: V, s: V) -> Option<V> {
        let mut toward = self.other(e, effect)?;
        while toward != s {
            let (colour, data) = self.spider(toward)?;
            if !data.is_conditional() || self.d.degree(toward) != 2 {
                return None;
            }
            let beyond = self.other(toward, e)?;
            match colour {
                Colour::Z => e = self.alpha(Colour::Z, e, toward, beyond)?,
                Colour::X => {
                    self.step(Rule::PiCommute, Colour::Z, vec![toward, e]).then_some(())?;
                }
            }
            toward = beyond;
        }
        Some(e)
    }

    /// Carries a conditional π vertex away from `prev` until it cancels or
    /// is absorbed. Returns false if it gets stuck.
    fn walk(&mut self, mut v: V, mut prev: V) -> bool {
        loop {
            let Some((colour, data)) = self.spider(v) else {
                return false;
            };
            let cond = data.cond.clone();
            let Some(next) = self.other(v, prev) else {
                return false;
            };
            let Some((nc, nd)) = self.spider(next) else {
                return false;
            };
            if nc == colour && nd.phase.is_pi() && nd.cond == cond {
                let kept = v.min(next);
                if !self.step(Rule::Spider, colour, vec![kept, v.max(next)]) {
                    return false;
                }
                return self.step(Rule::Identity, colour, vec![kept]);
            }
            if nc == colour {
                if !nd.is_conditional() || self.d.degree(next) != 2 {
                    return false;
                }
                let Some(beyond) = self.other(next, v) else {
                    return false;
                };
                let Some(moved) = self.alpha(colour, v, next, beyond) else {
                    return false;
                };
                v = moved;
                prev = next;
                continue;
            }
            let fresh = self.d.fresh_id();
            if !self.step(Rule::PiCommute, nc, vec![v, next]) {
                return false;
            }
            let born: Vec<V> = self.d.vertex_ids().filter(|w| *w >= fresh).collect();
            match born[..] {
                [] => return true,
                [c] if self.spider(c).is_some_and(|(k, s)| k == colour && s.cond == cond) => {
                    v = c;
                    prev = next;
                }
                _ => return false,
            }
        }
    }

    /// Moves a Z copy sitting next to a qubit spider onto that qubit's
    /// measurement chain or output wire, then walks it forward.
    fn chase_z(&mut self, z: V, inputs: &BTreeSet<V>) -> bool {
        let Some(s) = self.d.legs(z).into_iter().find(|w| !self.is_h(*w)) else {
            return false;
        };
        if !self.spider(s).is_some_and(|(c, d)| c == Colour::Z && !d.is_conditional()) {
            return false;
        }
        let chain: Vec<V> = self
            .d
            .legs(s)
            .into_iter()
            .filter(|w| *w != z && !self.is_h(*w) && !inputs.contains(w))
            .collect();
        let [n] = chain[..] else {
            return false;
        };
        self.alpha(Colour::Z, z, s, n).is_some_and(|z| self.walk(z, s))
    }
}

/// Flow-guided rewriting of the pattern's conditional diagram: each
/// measurement error, in `order`, is pushed onto its flow successor and
/// the resulting copies are cancelled against the pattern's dependencies
/// and corrections.
fn flow_rewrite(p: &Pattern, fl: &Flow, order: &[Node]) -> Result<(Diagram, RewriteTrace), MbqcError> {
    let pd = to_diagram_annotated(p)?;
    let (d, trace) = simplify(&pd.diagram, Strategy::Spider);
    let mut pr = Prover { d, trace };
    let inputs: BTreeSet<V> = pr.d.inputs().iter().copied().collect();
    for &i in order {
        let (s, e, effect) = (pd.qubit_vertex[&i], pd.error_vertex[&i], pd.effect_vertex[&i]);
        let target = pd.qubit_vertex[&fl.f[&i]];
        let _ = push_one(&mut pr, i, s, e, effect, target, &inputs);
    }
    let (d, tail) = simplify(&pr.d, Strategy::Fuse);
    pr.trace.extend(tail);
    Ok((d, pr.trace))
}

fn push_one(pr: &mut Prover, i: Node, s: V, e: V, effect: V, target: V, inputs: &BTreeSet<V>) -> Option<()> {
    let e = pr.retreat(e, effect, s)?;
    let h = pr
        .d
        .legs(s)
        .into_iter()
        .find(|w| pr.is_h(*w) && pr.d.legs(*w).contains(&target))?;
    let e = pr.alpha(Colour::Z, e, s, h)?;
    let fresh = pr.d.fresh_id();
    let (d, trace) = push_error(&pr.d, e).ok()?;
    if trace.is_empty() {
        return None;
    }
    pr.d = d;
    pr.trace.extend(trace);
    let sig = ConditionSet::single(signal_of(i));
    let copies: BTreeMap<V, Colour> = pr
        .d
        .vertices()
        .filter(|(v, k)| *v >= fresh && k.spider_data().is_some_and(|sd| sd.cond == sig))
        .map(|(v, k)| (v, k.colour().expect("spider")))
        .collect();
    let mut ok = true;
    for (c, colour) in copies {
        ok &= match colour {
            Colour::Z => pr.chase_z(c, inputs),
            Colour::X => pr.walk(c, target),
        };
    }
    ok.then_some(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    use crate::mbqc::{parse_pattern, to_diagram};

    const TELEPORT: &str = "inputs: 1; outputs: 3;\nN 2\nN 3\nE 1 2\nE 2 3\nM 1 0\nM 2 0\nX 3 {2}\nZ 3 {1}\n";
    const P_H: &str = "N 2\nE 1 2\nM 1 0\nX 2 {1}\n";
    const P_CX: &str = "inputs: 1,2; outputs: 1,4;\nN 3\nN 4\nE 1 3\nE 2 3\nE 3 4\nM 2 0\nM 3 0\nX 4 {3}\nZ 4 {2}\nZ 1 {2}\n";
    const N: &str = "inputs: 1; outputs: 1;\nN 2\nN 3\nE 2 3\nE 1 2\nM 3 a\nM 2 0\nZ 1 {2}\n";

    fn proved(text: &str) -> DeterminismReport {
        let p = parse_pattern(text).unwrap();
        let r = verify_determinism(&p).unwrap();
        assert_eq!(r.verdict, Verdict::ProvedDeterministic, "{text}\n{}", r.to_json());
        let trace = r.trace.as_ref().unwrap();
        let end = trace.replay(&to_diagram(&standardize(&p).unwrap()).unwrap()).unwrap();
        assert!(end.is_unconditional());
        r
    }

    #[test]
    fn corrected_patterns_proved() {
        for text in [TELEPORT, P_H, P_CX] {
            proved(text);
        }
        let r = proved("N 2\nN 3\nE 1 2\nE 2 3\nM 1 a\nM 2 b s={1}\nX 3 {2}\nZ 3 {1}\n");
        assert_eq!(r.method, Method::FlowRewrite);
    }

    #[test]
    fn missing_correction_not_proved() {
        let p = parse_pattern("N 2\nE 1 2\nM 1 a\n").unwrap();
        let r = verify_determinism(&p).unwrap();
        assert_eq!(r.verdict, Verdict::NotUniformlyDeterministic);
        assert!(r.residual.is_some() && r.witness.is_some());
    }

    #[test]
    fn no_flow_pattern_has_witness() {
        let p = parse_pattern(N).unwrap();
        let cfg = DeterminismConfig {
            probes: vec![PI / 2.0],
            ..DeterminismConfig::default()
        };
        let r = verify_determinism_with(&p, &cfg).unwrap();
        assert!(r.flow.is_none());
        assert_eq!(r.method, Method::SemanticFallback);
        assert_eq!(r.verdict, Verdict::NotUniformlyDeterministic);
        assert!(r.witness.unwrap().distance >= 0.5);
    }

    #[test]
    fn signal_bound_gives_unknown() {
        let p = parse_pattern(N).unwrap();
        let cfg = DeterminismConfig {
            signal_bound: 1,
            ..DeterminismConfig::default()
        };
        assert_eq!(verify_determinism_with(&p, &cfg).unwrap().verdict, Verdict::Unknown);
    }
}
