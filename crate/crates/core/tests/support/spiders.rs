//! Random connected single-colour spider networks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use zxverify::diagram::{Colour, ConditionSet, Diagram, VertexKind, V};
use zxverify::phase::PhaseExpr;

pub struct Network {
    pub diagram: Diagram,
    /// The single spider it should fuse to.
    pub expected: Diagram,
    pub phase_sum: PhaseExpr,
}

fn phase(rng: &mut ChaCha8Rng) -> PhaseExpr {
    let p = PhaseExpr::from_pi_ratio(rng.gen_range(0..8), 4).unwrap();
    match rng.gen_range(0..4) {
        0 => p + PhaseExpr::symbol("a"),
        _ => p,
    }
}

/// At most eight vertices: one to five spiders plus up to three boundaries,
/// joined by a random spanning tree, extra parallel edges and self-loops.
pub fn network(rng: &mut ChaCha8Rng, colour: Colour) -> Network {
    let k = rng.gen_range(1..=5);
    let n_in = rng.gen_range(0..=1);
    let n_out = rng.gen_range(0..=(8 - k - n_in).min(2));
    let mut d = Diagram::new();
    let inputs: Vec<V> = (0..n_in).map(|_| d.add_input()).collect();
    let phases: Vec<PhaseExpr> = (0..k).map(|_| phase(rng)).collect();
    let spiders: Vec<V> = phases
        .iter()
        .map(|p| d.add_vertex(VertexKind::spider(colour, p.clone(), ConditionSet::new())))
        .collect();
    let outputs: Vec<V> = (0..n_out).map(|_| d.add_output()).collect();
    for i in 1..k {
        let j = rng.gen_range(0..i);
        d.add_edge(spiders[i], spiders[j]);
    }
    for _ in 0..rng.gen_range(0..=3) {
        let a = spiders[rng.gen_range(0..k)];
        let b = spiders[rng.gen_range(0..k)];
        d.add_edge(a, b);
    }
    for b in inputs.iter().chain(&outputs) {
        d.add_edge(*b, spiders[rng.gen_range(0..k)]);
    }
    let phase_sum = phases.iter().fold(PhaseExpr::zero(), |acc, p| acc + p.clone());
    let mut e = Diagram::new();
    let ins: Vec<V> = (0..n_in).map(|_| e.add_input()).collect();
    let s = e.add_vertex(VertexKind::spider(colour, phase_sum.clone(), ConditionSet::new()));
    let outs: Vec<V> = (0..n_out).map(|_| e.add_output()).collect();
    for b in ins.iter().chain(&outs) {
        e.add_edge(*b, s);
    }
    Network {
        diagram: d,
        expected: e,
        phase_sum,
    }
}
