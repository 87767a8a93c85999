//! Causal flow on open graphs, geometry diagrams, circuit-likeness, the
//! flow-guided determinism proof and circuit extraction.

mod circuit;
mod determinism;
mod diagrams;
mod extract;

use std::collections::{BTreeMap, BTreeSet};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

pub use circuit::{flow_from_paths, is_circuit_like, CircuitLike, CircuitMode, PathCover};
pub use determinism::{
    verify_determinism, verify_determinism_with, DeterminismConfig, DeterminismReport, Method, Verdict, Witness,
};
pub use diagrams::{diagram_of_geometry, diagram_of_geometry_annotated, diagram_star, GeometryDiagram};
pub use extract::{extract_circuit, Circuit, ExtractError, Gate};

pub type Node = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("f is not defined on non-output vertex {0}")]
    NotTotal(Node),
    #[error("open graph has a self-loop at {0}")]
    SelfLoop(Node),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Node),
    #[error("brute-force search is limited to {bound} non-output vertices, got {count}")]
    TooLarge { count: usize, bound: usize },
    #[error("diagram vertex {0} is conditional")]
    Conditional(crate::diagram::V),
}

/// A simple undirected graph with input and output subsets.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct OpenGraph {
    pub vertices: BTreeSet<Node>,
    /// Each edge once, smaller endpoint first.
    pub edges: BTreeSet<(Node, Node)>,
    pub inputs: BTreeSet<Node>,
    pub outputs: BTreeSet<Node>,
}

impl OpenGraph {
    pub fn new(
        vertices: impl IntoIterator<Item = Node>,
        edges: impl IntoIterator<Item = (Node, Node)>,
        inputs: impl IntoIterator<Item = Node>,
        outputs: impl IntoIterator<Item = Node>,
    ) -> Result<Self, FlowError> {
        let vertices: BTreeSet<Node> = vertices.into_iter().collect();
        let mut es = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(FlowError::SelfLoop(a));
            }
            for v in [a, b] {
                if !vertices.contains(&v) {
                    return Err(FlowError::UnknownVertex(v));
                }
            }
            es.insert((a.min(b), a.max(b)));
        }
        let inputs: BTreeSet<Node> = inputs.into_iter().collect();
        let outputs: BTreeSet<Node> = outputs.into_iter().collect();
        if let Some(v) = inputs.iter().chain(&outputs).find(|v| !vertices.contains(v)) {
            return Err(FlowError::UnknownVertex(*v));
        }
        Ok(OpenGraph {
            vertices,
            edges: es,
            inputs,
            outputs,
        })
    }

    pub fn adjacent(&self, a: Node, b: Node) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbours(&self, v: Node) -> BTreeSet<Node> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.vertices.iter().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in self.neighbours(v) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    /// Vertices that must be measured, V∖O.
    pub fn measured(&self) -> Vec<Node> {
        self.vertices.difference(&self.outputs).copied().collect()
    }
}

/// A flow: successor function `f` on V∖O and a strict partial order given
/// by its covering pairs (`(u, v)` meaning u ≺ v).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Flow {
    pub f: BTreeMap<Node, Node>,
    pub order: Vec<(Node, Node)>,
}

impl Serialize for Flow {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let f: Vec<[Node; 2]> = self.f.iter().map(|(u, v)| [*u, *v]).collect();
        let order: Vec<[Node; 2]> = self.order.iter().map(|(u, v)| [*u, *v]).collect();
        let mut st = s.serialize_struct("Flow", 2)?;
        st.serialize_field("f", &f)?;
        st.serialize_field("order", &order)?;
        st.end()
    }
}

impl Flow {
    /// Strict order as a reachability matrix over `g`'s vertices, or `None`
    /// if the covering pairs contain a cycle.
    pub fn closure(&self, g: &OpenGraph) -> Option<Closure> {
        Closure::new(g, self.order.iter().copied())
    }

    /// A linear extension of the order restricted to measured vertices;
    /// among minimal candidates the lowest id goes first.
    pub fn measurement_order(&self, g: &OpenGraph) -> Vec<Node> {
        let c = self.closure(g).expect("flow order is acyclic");
        let mut todo: BTreeSet<Node> = g.measured().into_iter().collect();
        let mut out = Vec::new();
        while let Some(&next) = todo.iter().find(|v| !todo.iter().any(|u| c.less(*u, **v))) {
            todo.remove(&next);
            out.push(next);
        }
        out
    }
}

/// Transitive closure of a relation on a graph's vertices.
#[derive(Clone, Debug)]
pub struct Closure {
    index: BTreeMap<Node, usize>,
    reach: Vec<Vec<bool>>,
}

impl Closure {
    fn new(g: &OpenGraph, pairs: impl IntoIterator<Item = (Node, Node)>) -> Option<Self> {
        let index: BTreeMap<Node, usize> = g.vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let n = index.len();
        let mut reach = vec![vec![false; n]; n];
        for (a, b) in pairs {
            let (Some(&i), Some(&j)) = (index.get(&a), index.get(&b)) else {
                return None;
            };
            reach[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    let row = reach[k].clone();
                    for (r, via) in reach[i].iter_mut().zip(row) {
                        *r |= via;
                    }
                }
            }
        }
        if (0..n).any(|i| reach[i][i]) {
            return None;
        }
        Some(Closure { index, reach })
    }

    pub fn less(&self, a: Node, b: Node) -> bool {
        match (self.index.get(&a), self.index.get(&b)) {
            (Some(&i), Some(&j)) => self.reach[i][j],
            _ => false,
        }
    }

    /// Covering pairs of the closure.
    fn reduction(&self) -> Vec<(Node, Node)> {
        let nodes: Vec<Node> = self.index.keys().copied().collect();
        let n = nodes.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.reach[i][j] && !(0..n).any(|k| self.reach[i][k] && self.reach[k][j]) {
                    out.push((nodes[i], nodes[j]));
                }
            }
        }
        out
    }
}

/// Pairs forced by F2 and F3 for a successor function.
fn forced_pairs(g: &OpenGraph, f: &BTreeMap<Node, Node>) -> Vec<(Node, Node)> {
    let mut out = Vec::new();
    for (&u, &fu) in f {
        out.push((u, fu));
        for w in g.neighbours(fu) {
            if w != u {
                out.push((u, w));
            }
        }
    }
    out
}

/// Completes `f` with the least order satisfying F2 and F3, if one exists.
pub fn flow_with_successor(g: &OpenGraph, f: BTreeMap<Node, Node>) -> Option<Flow> {
    let c = Closure::new(g, forced_pairs(g, &f))?;
    Some(Flow { f, order: c.reduction() })
}

/// Checks F1–F3 and that the order is a strict partial order.
pub fn verify_flow(g: &OpenGraph, fl: &Flow) -> Result<bool, FlowError> {
    for u in g.measured() {
        if !fl.f.contains_key(&u) {
            return Err(FlowError::NotTotal(u));
        }
    }
    let Some(c) = fl.closure(g) else {
        return Ok(false);
    };
    for (&u, &fu) in &fl.f {
        if g.outputs.contains(&u) || !g.vertices.contains(&fu) || g.inputs.contains(&fu) {
            return Ok(false);
        }
        if !g.adjacent(u, fu) || !c.less(u, fu) {
            return Ok(false);
        }
        if g.neighbours(fu).into_iter().any(|w| w != u && !c.less(u, w)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Backward greedy search from the outputs.
///
/// Each round takes every already-corrected non-input vertex with exactly
/// one uncorrected neighbour and makes it that neighbour's successor.
pub fn find_flow(g: &OpenGraph) -> Option<Flow> {
    let mut corrected: BTreeSet<Node> = g.outputs.clone();
    let mut f = BTreeMap::new();
    loop {
        let mut picks: BTreeMap<Node, Node> = BTreeMap::new();
        for &v in corrected.difference(&g.inputs) {
            let open: Vec<Node> = g.neighbours(v).into_iter().filter(|u| !corrected.contains(u)).collect();
            if let [u] = open[..] {
                picks.entry(u).or_insert(v);
            }
        }
        if picks.is_empty() {
            break;
        }
        for (u, v) in picks {
            f.insert(u, v);
            corrected.insert(u);
        }
    }
    if corrected.len() != g.vertices.len() {
        return None;
    }
    let fl = flow_with_successor(g, f);
    debug_assert!(fl.is_some(), "greedy flow has an acyclic order");
    fl
}

pub const BRUTE_FORCE_BOUND: usize = 8;

/// Exhaustive search over every successor function satisfying F1.
pub fn brute_force_flow(g: &OpenGraph) -> Result<Option<Flow>, FlowError> {
    let measured = g.measured();
    if measured.len() > BRUTE_FORCE_BOUND {
        return Err(FlowError::TooLarge {
            count: measured.len(),
            bound: BRUTE_FORCE_BOUND,
        });
    }
    let choices: Vec<Vec<Node>> = measured
        .iter()
        .map(|u| g.neighbours(*u).into_iter().filter(|v| !g.inputs.contains(v)).collect())
        .collect();
    let mut f = BTreeMap::new();
    Ok(search(g, &measured, &choices, 0, &mut f))
}

fn search(
    g: &OpenGraph,
    measured: &[Node],
    choices: &[Vec<Node>],
    i: usize,
    f: &mut BTreeMap<Node, Node>,
) -> Option<Flow> {
    Closure::new(g, forced_pairs(g, f))?;
    if i == measured.len() {
        return flow_with_successor(g, f.clone());
    }
    for &v in &choices[i] {
        f.insert(measured[i], v);
        if let Some(fl) = search(g, measured, choices, i + 1, f) {
            return Some(fl);
        }
        f.remove(&measured[i]);
    }
    None
}
