use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{apply, find_matches, Rule, RuleId};
use crate::diagram::{Colour, ConditionSet, Diagram, VertexKind, V};
use crate::phase::{AngleAssignment, PhaseExpr};
use crate::semantics::eval_superop_over;

#[derive(Clone, Debug, Serialize)]
pub struct SoundnessFailure {
    pub trial: usize,
    pub lhs: serde_json::Value,
    pub rhs: serde_json::Value,
    pub angles: AngleAssignment,
    /// Up-to-scalar distance between the two superoperators, or `None` when
    /// evaluation itself failed.
    pub distance: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SoundnessReport {
    pub rule: RuleId,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub failures: Vec<SoundnessFailure>,
}

impl SoundnessReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

const SIGNALS: [&str; 2] = ["s", "t"];

struct Gen<'a> {
    rng: &'a mut ChaCha8Rng,
    d: Diagram,
}

impl Gen<'_> {
    fn phase(&mut self) -> PhaseExpr {
        let k = self.rng.gen_range(0..8);
        let p = PhaseExpr::from_pi_ratio(k, 4).expect("nonzero denominator");
        match self.rng.gen_range(0..4) {
            0 => p + PhaseExpr::symbol("a"),
            1 => p - PhaseExpr::symbol("b"),
            _ => p,
        }
    }

    fn nonzero_phase(&mut self) -> PhaseExpr {
        loop {
            let p = self.phase();
            if !p.is_zero() {
                return p;
            }
        }
    }

    fn cond(&mut self) -> ConditionSet {
        match self.rng.gen_range(0..5) {
            0 => ConditionSet::single(SIGNALS[0]),
            1 => ConditionSet::single(SIGNALS[1]),
            2 => SIGNALS.iter().copied().collect(),
            _ => ConditionSet::new(),
        }
    }

    fn colour(&mut self) -> Colour {
        if self.rng.gen_bool(0.5) {
            Colour::Z
        } else {
            Colour::X
        }
    }

    fn spider(&mut self, colour: Colour, phase: PhaseExpr, cond: ConditionSet) -> V {
        self.d.add_vertex(VertexKind::spider(colour, phase, cond))
    }

    fn random_spider(&mut self, colour: Colour) -> V {
        let (p, c) = (self.phase(), self.cond());
        self.spider(colour, p, c)
    }

    fn boundary(&mut self) -> V {
        if self.rng.gen_bool(0.5) {
            self.d.add_input()
        } else {
            self.d.add_output()
        }
    }

    /// Wires a free leg of `v` to a boundary, sometimes through a random
    /// spider or H so the leg has some context.
    fn leg(&mut self, v: V) {
        let far = match self.rng.gen_range(0..4) {
            0 => {
                let c = self.colour();
                let s = self.random_spider(c);
                let b = self.boundary();
                self.d.add_edge(s, b);
                s
            }
            1 => {
                let h = self.d.add_vertex(VertexKind::H);
                let b = self.boundary();
                self.d.add_edge(h, b);
                h
            }
            _ => self.boundary(),
        };
        self.d.add_edge(v, far);
    }

    fn legs(&mut self, v: V, lo: usize, hi: usize) {
        for _ in 0..self.rng.gen_range(lo..=hi) {
            self.leg(v);
        }
    }
}

/// A random diagram containing at least one site of `r`.
pub fn random_instance(r: RuleId, rng: &mut ChaCha8Rng) -> Diagram {
    let c = r.colour();
    let o = c.dual();
    let mut g = Gen { rng, d: Diagram::new() };
    match r.rule {
        Rule::Spider => {
            let cond = g.cond();
            let (p, q) = (g.nonzero_phase(), g.nonzero_phase());
            let u = g.spider(c, p, cond.clone());
            let v = g.spider(c, q, cond);
            for _ in 0..g.rng.gen_range(1..=2) {
                g.d.add_edge(u, v);
            }
            g.legs(u, 0, 3);
            g.legs(v, 0, 3);
        }
        Rule::Identity => {
            let v = g.spider(c, PhaseExpr::zero(), ConditionSet::new());
            g.legs(v, 2, 2);
        }
        Rule::AntiLoop => {
            let v = g.random_spider(c);
            g.d.add_edge(v, v);
            g.legs(v, 0, 3);
        }
        Rule::Copying => {
            let p = g.phase();
            let s = g.spider(c, p, ConditionSet::new());
            let point = if g.rng.gen_bool(0.5) { PhaseExpr::zero() } else { PhaseExpr::pi() };
            let q = g.spider(o, point, ConditionSet::new());
            g.d.add_edge(s, q);
            g.legs(s, 0, 3);
        }
        Rule::PiCommute => {
            let u = g.cond();
            let x = g.spider(o, PhaseExpr::pi(), u);
            let v = g.cond();
            let alpha = if v.is_empty() { g.phase() } else { PhaseExpr::pi() };
            let s = g.spider(c, alpha, v);
            g.d.add_edge(x, s);
            g.leg(x);
            g.legs(s, 0, 3);
        }
        Rule::AlphaCommute => {
            let p = g.random_spider(c);
            let s = g.random_spider(c);
            g.d.add_edge(p, s);
            g.leg(p);
            g.legs(s, 1, 3);
        }
        Rule::Bialgebra => {
            let z = g.spider(c, PhaseExpr::zero(), ConditionSet::new());
            let x = g.spider(o, PhaseExpr::zero(), ConditionSet::new());
            g.d.add_edge(z, x);
            g.legs(z, 1, 3);
            g.legs(x, 1, 3);
        }
        Rule::Hopf => {
            let s = g.random_spider(c);
            let t = g.random_spider(o);
            for _ in 0..g.rng.gen_range(2..=3) {
                g.d.add_edge(s, t);
            }
            g.legs(s, 0, 2);
            g.legs(t, 0, 2);
        }
        Rule::HCommute => {
            let s = g.random_spider(c);
            for _ in 0..g.rng.gen_range(0..=4) {
                if g.rng.gen_bool(0.5) {
                    let h = g.d.add_vertex(VertexKind::H);
                    g.d.add_edge(s, h);
                    g.leg(h);
                } else {
                    g.leg(s);
                }
            }
        }
        Rule::HCancel => {
            let h1 = g.d.add_vertex(VertexKind::H);
            let h2 = g.d.add_vertex(VertexKind::H);
            g.d.add_edge(h1, h2);
            if g.rng.gen_bool(0.2) {
                g.d.add_edge(h1, h2);
                let w = g.random_spider(c);
                g.legs(w, 1, 2);
            } else {
                g.leg(h1);
                g.leg(h2);
            }
        }
    }
    g.d
}

fn random_angles(rng: &mut ChaCha8Rng) -> AngleAssignment {
    AngleAssignment::new()
        .with("a", rng.gen_range(0.0..std::f64::consts::TAU))
        .with("b", rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Applies `r` at a random site of `trials` random instances and compares
/// superoperators up to scalar.
pub fn check_rule_soundness(r: RuleId, trials: usize, tol: f64, seed: u64) -> SoundnessReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for trial in 0..trials {
        let lhs = random_instance(r, &mut rng);
        let sites = find_matches(&lhs, r);
        let angles = random_angles(&mut rng);
        let fail = |rhs: &Diagram, distance, error| SoundnessFailure {
            trial,
            lhs: lhs.to_json_value(),
            rhs: rhs.to_json_value(),
            angles: angles.clone(),
            distance,
            error,
        };
        let Some(site) = sites.choose(&mut rng) else {
            failures.push(fail(&lhs, None, Some("generated instance has no match".into())));
            continue;
        };
        let rhs = match apply(&lhs, site) {
            Ok(rhs) => rhs,
            Err(e) => {
                failures.push(fail(&lhs, None, Some(e.to_string())));
                continue;
            }
        };
        let signals: Vec<String> = lhs.signals().union(&rhs.signals()).cloned().collect();
        let compared = eval_superop_over(&lhs, &signals, &angles)
            .and_then(|a| Ok((a, eval_superop_over(&rhs, &signals, &angles)?)))
            .and_then(|(a, b)| a.scalar_distance(&b));
        match compared {
            Ok(dist) if dist <= tol => {}
            Ok(dist) => failures.push(fail(&rhs, Some(dist), None)),
            Err(e) => failures.push(fail(&rhs, None, Some(e.to_string()))),
        }
    }
    SoundnessReport {
        rule: r,
        trials,
        seed,
        tol,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_rule_sound_in_small_runs() {
        for r in RuleId::all() {
            let report = check_rule_soundness(r, 25, 1e-9, 7);
            assert!(report.passed(), "{}", serde_json::to_string(&report).unwrap());
        }
    }

    #[test]
    fn instances_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for r in RuleId::all() {
            for _ in 0..10 {
                let d = random_instance(r, &mut rng);
                assert!(d.validate().is_empty(), "{r}");
                for site in find_matches(&d, r) {
                    let e = apply(&d, &site).unwrap();
                    assert!(e.validate().is_empty(), "{r}: {}", e.to_json());
                    assert_eq!(e.inputs().len(), d.inputs().len());
                    assert_eq!(e.outputs().len(), d.outputs().len());
                }
            }
        }
    }
}
