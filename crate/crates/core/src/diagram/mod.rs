//! Conditional ZX diagrams: open multigraphs of Z/X spiders, Hadamard nodes
//! and reified boundary vertices.
//!
//! Parallel edges and self-loops are representable; the rewrite rules that
//! remove them need to see them.

mod io;
mod iso;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phase::PhaseExpr;

pub use io::DiagramJson;
pub use iso::iso_equal;

/// Vertex identifier. Opaque and stable within one diagram.
pub type V = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("boundary arity mismatch: {outputs} outputs composed with {inputs} inputs")]
    ArityMismatch { outputs: usize, inputs: usize },
    #[error("valuation does not assign signal `{0}`")]
    IncompleteValuation(String),
    #[error("malformed diagram: {0}")]
    Malformed(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Colour {
    Z,
    X,
}

impl Colour {
    pub fn dual(self) -> Colour {
        match self {
            Colour::Z => Colour::X,
            Colour::X => Colour::Z,
        }
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Colour::Z => "Z",
            Colour::X => "X",
        })
    }
}

/// Deduplicated, ordered set of signal names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConditionSet(BTreeSet<String>);

impl ConditionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(s: impl Into<String>) -> Self {
        let mut c = Self::new();
        c.insert(s);
        c
    }

    pub fn insert(&mut self, s: impl Into<String>) {
        self.0.insert(s.into());
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, s: &str) -> bool {
        self.0.contains(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    /// Parity combination: signals present in exactly one of the two sets.
    pub fn symmetric_difference(&self, other: &ConditionSet) -> ConditionSet {
        ConditionSet(self.0.symmetric_difference(&other.0).cloned().collect())
    }
}

impl<S: Into<String>> FromIterator<S> for ConditionSet {
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        ConditionSet(iter.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for ConditionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            f.write_str(s)?;
        }
        write!(f, "}}")
    }
}

/// Phase and condition set of a Z or X spider.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SpiderData {
    pub phase: PhaseExpr,
    pub cond: ConditionSet,
}

impl SpiderData {
    /// Zero-phase spiders never carry a condition set.
    pub fn new(phase: PhaseExpr, cond: ConditionSet) -> Self {
        let cond = if phase.is_zero() { ConditionSet::new() } else { cond };
        SpiderData { phase, cond }
    }

    pub fn is_conditional(&self) -> bool {
        !self.cond.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Z(SpiderData),
    X(SpiderData),
    H,
    Boundary,
}

impl VertexKind {
    pub fn spider(colour: Colour, phase: PhaseExpr, cond: ConditionSet) -> Self {
        let data = SpiderData::new(phase, cond);
        match colour {
            Colour::Z => VertexKind::Z(data),
            Colour::X => VertexKind::X(data),
        }
    }

    pub fn z(phase: PhaseExpr) -> Self {
        Self::spider(Colour::Z, phase, ConditionSet::new())
    }

    pub fn x(phase: PhaseExpr) -> Self {
        Self::spider(Colour::X, phase, ConditionSet::new())
    }

    pub fn colour(&self) -> Option<Colour> {
        match self {
            VertexKind::Z(_) => Some(Colour::Z),
            VertexKind::X(_) => Some(Colour::X),
            _ => None,
        }
    }

    pub fn spider_data(&self) -> Option<&SpiderData> {
        match self {
            VertexKind::Z(d) | VertexKind::X(d) => Some(d),
            _ => None,
        }
    }

    pub fn spider_data_mut(&mut self) -> Option<&mut SpiderData> {
        match self {
            VertexKind::Z(d) | VertexKind::X(d) => Some(d),
            _ => None,
        }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, VertexKind::Boundary)
    }

    pub fn is_h(&self) -> bool {
        matches!(self, VertexKind::H)
    }

    pub fn is_conditional(&self) -> bool {
        self.spider_data().is_some_and(SpiderData::is_conditional)
    }

    pub fn with_colour(&self, colour: Colour) -> Self {
        match self.spider_data() {
            Some(d) => VertexKind::spider(colour, d.phase.clone(), d.cond.clone()),
            None => self.clone(),
        }
    }

    fn short(&self) -> &'static str {
        match self {
            VertexKind::Z(_) => "Z",
            VertexKind::X(_) => "X",
            VertexKind::H => "H",
            VertexKind::Boundary => "B",
        }
    }
}

/// A total assignment of bits to signals, selecting one execution branch.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Valuation(BTreeMap<String, bool>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn all_zero<'a>(signals: impl IntoIterator<Item = &'a str>) -> Self {
        Valuation(signals.into_iter().map(|s| (s.to_string(), false)).collect())
    }

    pub fn with(mut self, s: impl Into<String>, bit: bool) -> Self {
        self.0.insert(s.into(), bit);
        self
    }

    pub fn set(&mut self, s: impl Into<String>, bit: bool) {
        self.0.insert(s.into(), bit);
    }

    pub fn get(&self, s: &str) -> Option<bool> {
        self.0.get(s).copied()
    }

    pub fn is_all_zero(&self) -> bool {
        self.0.values().all(|b| !b)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Every valuation of `signals`, in binary counting order with the
    /// first signal as the least significant bit. The all-zero valuation
    /// comes first.
    pub fn enumerate(signals: &[String]) -> Vec<Valuation> {
        let n = signals.len();
        (0..1usize << n)
            .map(|bits| {
                Valuation(
                    signals
                        .iter()
                        .enumerate()
                        .map(|(k, s)| (s.clone(), bits >> k & 1 == 1))
                        .collect(),
                )
            })
            .collect()
    }

    /// Arithmetic-sum activation: the set is active iff the sum of its
    /// signal values is nonzero.
    pub fn activates(&self, cond: &ConditionSet) -> Result<bool, DiagramError> {
        let mut sum = 0u32;
        for s in cond.iter() {
            match self.0.get(s) {
                Some(b) => sum += u32::from(*b),
                None => return Err(DiagramError::IncompleteValuation(s.to_string())),
            }
        }
        Ok(sum > 0)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}={}", u8::from(*v))?;
        }
        write!(f, "}}")
    }
}

/// One broken invariant reported by [`Diagram::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    BoundaryDegree { vertex: V, degree: usize },
    BoundaryUnlisted { vertex: V },
    BoundaryListedTwice { vertex: V },
    ListedNotBoundary { vertex: V },
    HDegree { vertex: V, degree: usize },
    ConditionOnZeroPhase { vertex: V },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BoundaryDegree { vertex, degree } => {
                write!(f, "boundary vertex {vertex} has degree {degree}, expected 1")
            }
            Violation::BoundaryUnlisted { vertex } => {
                write!(f, "boundary vertex {vertex} is neither an input nor an output")
            }
            Violation::BoundaryListedTwice { vertex } => {
                write!(f, "boundary vertex {vertex} is listed more than once")
            }
            Violation::ListedNotBoundary { vertex } => {
                write!(f, "vertex {vertex} is listed as a boundary but is not one")
            }
            Violation::HDegree { vertex, degree } => {
                write!(f, "H vertex {vertex} has degree {degree}, expected 2")
            }
            Violation::ConditionOnZeroPhase { vertex } => {
                write!(f, "vertex {vertex} has phase 0 but a nonempty condition set")
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Diagram {
    vertices: BTreeMap<V, VertexKind>,
    // adj[u][v] = number of edges u–v; a self-loop on u is adj[u][u].
    adj: BTreeMap<V, BTreeMap<V, usize>>,
    inputs: Vec<V>,
    outputs: Vec<V>,
    // ids are never reused, even after removals
    next: V,
}

impl PartialEq for Diagram {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.adj == other.adj
            && self.inputs == other.inputs
            && self.outputs == other.outputs
    }
}

impl Eq for Diagram {}

impl Diagram {
    pub fn new() -> Self {
        Self::default()
    }

    /// `n` parallel identity wires.
    pub fn identity(n: usize) -> Self {
        let mut d = Diagram::new();
        for _ in 0..n {
            let i = d.add_input();
            let o = d.add_output();
            d.add_edge(i, o);
        }
        d
    }

    pub fn fresh_id(&self) -> V {
        self.vertices.keys().next_back().map_or(0, |v| v + 1).max(self.next)
    }

    pub fn add_vertex(&mut self, kind: VertexKind) -> V {
        let v = self.fresh_id();
        self.insert_vertex(v, kind);
        v
    }

    pub(crate) fn insert_vertex(&mut self, v: V, kind: VertexKind) {
        self.vertices.insert(v, kind);
        self.adj.entry(v).or_default();
        self.next = self.next.max(v + 1);
    }

    pub fn add_input(&mut self) -> V {
        let v = self.add_vertex(VertexKind::Boundary);
        self.inputs.push(v);
        v
    }

    pub fn add_output(&mut self) -> V {
        let v = self.add_vertex(VertexKind::Boundary);
        self.outputs.push(v);
        v
    }

    pub fn add_edge(&mut self, u: V, v: V) {
        assert!(
            self.vertices.contains_key(&u) && self.vertices.contains_key(&v),
            "edge endpoint missing"
        );
        *self.adj.get_mut(&u).unwrap().entry(v).or_insert(0) += 1;
        if u != v {
            *self.adj.get_mut(&v).unwrap().entry(u).or_insert(0) += 1;
        }
    }

    /// Removes one copy of the edge u–v; returns false if there is none.
    pub fn remove_edge(&mut self, u: V, v: V) -> bool {
        let Some(c) = self.adj.get_mut(&u).and_then(|m| m.get_mut(&v)) else {
            return false;
        };
        *c -= 1;
        if *c == 0 {
            self.adj.get_mut(&u).unwrap().remove(&v);
        }
        if u != v {
            let m = self.adj.get_mut(&v).unwrap();
            let c = m.get_mut(&u).unwrap();
            *c -= 1;
            if *c == 0 {
                m.remove(&u);
            }
        }
        true
    }

    /// Removes a vertex, its edges, and any boundary listing of it.
    pub fn remove_vertex(&mut self, v: V) {
        if let Some(nbrs) = self.adj.remove(&v) {
            for u in nbrs.keys() {
                if *u != v {
                    if let Some(m) = self.adj.get_mut(u) {
                        m.remove(&v);
                    }
                }
            }
        }
        self.vertices.remove(&v);
        self.inputs.retain(|x| *x != v);
        self.outputs.retain(|x| *x != v);
    }

    pub fn contains(&self, v: V) -> bool {
        self.vertices.contains_key(&v)
    }

    pub fn kind(&self, v: V) -> Option<&VertexKind> {
        self.vertices.get(&v)
    }

    pub fn set_kind(&mut self, v: V, kind: VertexKind) {
        if let Some(k) = self.vertices.get_mut(&v) {
            *k = kind;
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = (V, &VertexKind)> {
        self.vertices.iter().map(|(v, k)| (*v, k))
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = V> + '_ {
        self.vertices.keys().copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Every edge copy as `(u, v)` with `u <= v`, in canonical order.
    pub fn edges(&self) -> Vec<(V, V)> {
        let mut out = Vec::new();
        for (u, m) in &self.adj {
            for (v, c) in m {
                if u <= v {
                    out.extend(std::iter::repeat_n((*u, *v), *c));
                }
            }
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.adj
            .iter()
            .flat_map(|(u, m)| m.iter().filter(move |(v, _)| u <= *v).map(|(_, c)| *c))
            .sum()
    }

    pub fn edge_count(&self, u: V, v: V) -> usize {
        self.adj.get(&u).and_then(|m| m.get(&v)).copied().unwrap_or(0)
    }

    pub fn self_loops(&self, v: V) -> usize {
        self.edge_count(v, v)
    }

    /// Distinct neighbours other than `v` itself, with multiplicities.
    pub fn neighbour_counts(&self, v: V) -> impl Iterator<Item = (V, usize)> + '_ {
        self.adj
            .get(&v)
            .into_iter()
            .flat_map(move |m| m.iter().filter(move |(u, _)| **u != v).map(|(u, c)| (*u, *c)))
    }

    /// Far endpoint of every leg of `v`, one entry per edge copy. A
    /// self-loop contributes `v` twice.
    pub fn legs(&self, v: V) -> Vec<V> {
        let mut out = Vec::new();
        if let Some(m) = self.adj.get(&v) {
            for (u, c) in m {
                let n = if *u == v { 2 * c } else { *c };
                out.extend(std::iter::repeat_n(*u, n));
            }
        }
        out
    }

    pub fn degree(&self, v: V) -> usize {
        self.adj.get(&v).map_or(0, |m| {
            m.iter().map(|(u, c)| if *u == v { 2 * c } else { *c }).sum()
        })
    }

    pub fn inputs(&self) -> &[V] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[V] {
        &self.outputs
    }

    pub fn set_inputs(&mut self, inputs: Vec<V>) {
        self.inputs = inputs;
    }

    pub fn set_outputs(&mut self, outputs: Vec<V>) {
        self.outputs = outputs;
    }

    pub fn is_boundary(&self, v: V) -> bool {
        self.kind(v).is_some_and(VertexKind::is_boundary)
    }

    /// Every signal named by some condition set, sorted.
    pub fn signals(&self) -> BTreeSet<String> {
        self.vertices
            .values()
            .filter_map(VertexKind::spider_data)
            .flat_map(|d| d.cond.iter().map(str::to_string))
            .collect()
    }

    /// Every symbolic angle variable, sorted.
    pub fn symbols(&self) -> BTreeSet<String> {
        self.vertices
            .values()
            .filter_map(VertexKind::spider_data)
            .flat_map(|d| d.phase.symbols().map(|(s, _)| s.to_string()))
            .collect()
    }

    pub fn is_unconditional(&self) -> bool {
        !self.vertices.values().any(VertexKind::is_conditional)
    }

    pub fn conditional_vertices(&self) -> Vec<V> {
        self.vertices
            .iter()
            .filter(|(_, k)| k.is_conditional())
            .map(|(v, _)| *v)
            .collect()
    }

    /// Inserts a fresh vertex in the middle of one copy of edge u–v.
    pub fn split_edge(&mut self, u: V, v: V, kind: VertexKind) -> V {
        let removed = self.remove_edge(u, v);
        debug_assert!(removed, "split_edge on missing edge {u}-{v}");
        let w = self.add_vertex(kind);
        self.add_edge(u, w);
        self.add_edge(w, v);
        w
    }

    /// Shifts every id by `offset`.
    fn shifted(&self, offset: V) -> Diagram {
        Diagram {
            vertices: self.vertices.iter().map(|(v, k)| (v + offset, k.clone())).collect(),
            adj: self
                .adj
                .iter()
                .map(|(u, m)| (u + offset, m.iter().map(|(v, c)| (v + offset, *c)).collect()))
                .collect(),
            inputs: self.inputs.iter().map(|v| v + offset).collect(),
            outputs: self.outputs.iter().map(|v| v + offset).collect(),
            next: self.next + offset,
        }
    }

    fn absorb(&mut self, other: Diagram) {
        self.next = self.next.max(other.next);
        self.vertices.extend(other.vertices);
        self.adj.extend(other.adj);
    }

    /// Sequential composition: the i-th output of `self` is plugged into the
    /// i-th input of `next`.
    pub fn compose(&self, next: &Diagram) -> Result<Diagram, DiagramError> {
        if self.outputs.len() != next.inputs.len() {
            return Err(DiagramError::ArityMismatch {
                outputs: self.outputs.len(),
                inputs: next.inputs.len(),
            });
        }
        let offset = self.fresh_id();
        let next = next.shifted(offset);
        let mut d = self.clone();
        let joins: Vec<(V, V)> = self
            .outputs
            .iter()
            .copied()
            .zip(next.inputs.iter().copied())
            .collect();
        let outputs = next.outputs.clone();
        d.outputs.clear();
        d.absorb(next);
        for (out, inp) in joins {
            let a = d.legs(out).first().copied();
            let b = d.legs(inp).first().copied();
            d.remove_vertex(out);
            d.remove_vertex(inp);
            match (a, b) {
                // out and inp were wired to each other: a closed loop (a scalar).
                (Some(a), Some(_)) if a == inp => {}
                (Some(a), Some(b)) => d.add_edge(a, b),
                _ => {}
            }
        }
        d.outputs = outputs;
        Ok(d)
    }

    /// Parallel composition; inputs and outputs of `self` come first.
    pub fn tensor(&self, right: &Diagram) -> Diagram {
        let offset = self.fresh_id();
        let right = right.shifted(offset);
        let mut d = self.clone();
        d.inputs.extend(right.inputs.iter().copied());
        d.outputs.extend(right.outputs.iter().copied());
        d.absorb(right);
        d
    }

    /// Exchange inputs and outputs and negate every phase.
    pub fn dagger(&self) -> Diagram {
        let mut d = self.clone();
        std::mem::swap(&mut d.inputs, &mut d.outputs);
        for k in d.vertices.values_mut() {
            if let Some(s) = k.spider_data_mut() {
                s.phase = -&s.phase;
            }
        }
        d
    }

    /// Relabel every conditional vertex by the valuation: phase 0 if its
    /// condition set is inactive, its own phase otherwise.
    pub fn apply_valuation(&self, v: &Valuation) -> Result<Diagram, DiagramError> {
        let mut d = self.clone();
        for k in d.vertices.values_mut() {
            if let Some(s) = k.spider_data_mut() {
                if s.is_conditional() {
                    if !v.activates(&s.cond)? {
                        s.phase = PhaseExpr::zero();
                    }
                    s.cond = ConditionSet::new();
                }
            }
        }
        Ok(d)
    }

    /// Empty iff the diagram invariants hold.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut listed: BTreeMap<V, usize> = BTreeMap::new();
        for v in self.inputs.iter().chain(self.outputs.iter()) {
            *listed.entry(*v).or_default() += 1;
        }
        for (v, n) in &listed {
            if !self.is_boundary(*v) {
                out.push(Violation::ListedNotBoundary { vertex: *v });
            } else if *n > 1 {
                out.push(Violation::BoundaryListedTwice { vertex: *v });
            }
        }
        for (v, k) in &self.vertices {
            let deg = self.degree(*v);
            match k {
                VertexKind::Boundary => {
                    if deg != 1 {
                        out.push(Violation::BoundaryDegree { vertex: *v, degree: deg });
                    }
                    if !listed.contains_key(v) {
                        out.push(Violation::BoundaryUnlisted { vertex: *v });
                    }
                }
                VertexKind::H => {
                    if deg != 2 {
                        out.push(Violation::HDegree { vertex: *v, degree: deg });
                    }
                }
                VertexKind::Z(s) | VertexKind::X(s) => {
                    if s.phase.is_zero() && !s.cond.is_empty() {
                        out.push(Violation::ConditionOnZeroPhase { vertex: *v });
                    }
                }
            }
        }
        out
    }

    /// Renumbers vertices 0.. in id order, keeping structure.
    pub fn compacted(&self) -> Diagram {
        let map: BTreeMap<V, V> = self.vertices.keys().enumerate().map(|(i, v)| (*v, i)).collect();
        self.relabelled(|v| map[&v])
    }

    /// Applies an injective id renaming.
    pub fn relabelled(&self, f: impl Fn(V) -> V) -> Diagram {
        Diagram {
            vertices: self.vertices.iter().map(|(v, k)| (f(*v), k.clone())).collect(),
            adj: self
                .adj
                .iter()
                .map(|(u, m)| (f(*u), m.iter().map(|(v, c)| (f(*v), *c)).collect()))
                .collect(),
            inputs: self.inputs.iter().map(|v| f(*v)).collect(),
            outputs: self.outputs.iter().map(|v| f(*v)).collect(),
            next: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phase_gate(colour: Colour, p: PhaseExpr) -> Diagram {
        let mut d = Diagram::new();
        let i = d.add_input();
        let s = d.add_vertex(VertexKind::spider(colour, p, ConditionSet::new()));
        let o = d.add_output();
        d.add_edge(i, s);
        d.add_edge(s, o);
        d
    }

    #[test]
    fn compose_identity_is_unit() {
        let g = phase_gate(Colour::Z, PhaseExpr::symbol("a"));
        let c = Diagram::identity(1).compose(&g).unwrap();
        assert!(iso_equal(&c, &g));
        let c = g.compose(&Diagram::identity(1)).unwrap();
        assert!(iso_equal(&c, &g));
        assert!(c.validate().is_empty());
    }

    #[test]
    fn compose_arity_mismatch() {
        let e = Diagram::identity(2).compose(&Diagram::identity(1)).unwrap_err();
        assert_eq!(e, DiagramError::ArityMismatch { outputs: 2, inputs: 1 });
    }

    #[test]
    fn compose_cup_cap_gives_scalar_loop() {
        // cap: 2 -> 0 ; cup: 0 -> 2
        let mut cup = Diagram::new();
        let a = cup.add_output();
        let b = cup.add_output();
        cup.add_edge(a, b);
        let cap = cup.dagger();
        let d = cup.compose(&cap).unwrap();
        assert_eq!(d.num_vertices(), 0);
        assert!(d.validate().is_empty());
    }

    #[test]
    fn tensor_orders_boundaries() {
        let a = phase_gate(Colour::Z, PhaseExpr::pi());
        let b = phase_gate(Colour::X, PhaseExpr::zero());
        let t = a.tensor(&b);
        assert_eq!(t.inputs().len(), 2);
        let first = t.legs(t.inputs()[0])[0];
        assert!(matches!(t.kind(first), Some(VertexKind::Z(_))));
        let second = t.legs(t.inputs()[1])[0];
        assert!(matches!(t.kind(second), Some(VertexKind::X(_))));
        assert!(iso_equal(&Diagram::new().tensor(&a), &a));
    }

    #[test]
    fn dagger_negates_and_is_involution() {
        let a = phase_gate(Colour::Z, PhaseExpr::symbol("a"));
        let expected = phase_gate(Colour::Z, -PhaseExpr::symbol("a"));
        assert!(iso_equal(&a.dagger(), &expected));
        assert!(iso_equal(&a.dagger().dagger(), &a));
    }

    fn conditional_gate(cond: &[&str]) -> Diagram {
        let mut d = Diagram::new();
        let i = d.add_input();
        let s = d.add_vertex(VertexKind::spider(
            Colour::Z,
            PhaseExpr::symbol("a"),
            cond.iter().copied().collect(),
        ));
        let o = d.add_output();
        d.add_edge(i, s);
        d.add_edge(s, o);
        d
    }

    #[test]
    fn valuation_uses_arithmetic_sum() {
        let d = conditional_gate(&["s", "t"]);
        let v = Valuation::new().with("s", true).with("t", false);
        let r = d.apply_valuation(&v).unwrap();
        assert!(r.is_unconditional());
        assert!(iso_equal(&r, &phase_gate(Colour::Z, PhaseExpr::symbol("a"))));
        let both = Valuation::new().with("s", true).with("t", true);
        let r = d.apply_valuation(&both).unwrap();
        assert!(iso_equal(&r, &phase_gate(Colour::Z, PhaseExpr::symbol("a"))));
        let zero = Valuation::new().with("s", false).with("t", false);
        let r = d.apply_valuation(&zero).unwrap();
        assert!(iso_equal(&r, &phase_gate(Colour::Z, PhaseExpr::zero())));
    }

    #[test]
    fn valuation_must_be_total() {
        let d = conditional_gate(&["s"]);
        assert_eq!(
            d.apply_valuation(&Valuation::new()).unwrap_err(),
            DiagramError::IncompleteValuation("s".into())
        );
    }

    #[test]
    fn unconditional_valuation_is_identity() {
        let d = phase_gate(Colour::X, PhaseExpr::symbol("b"));
        let r = d.apply_valuation(&Valuation::new().with("z", true)).unwrap();
        assert_eq!(r, d);
    }

    #[test]
    fn validate_reports_bad_degrees() {
        let mut d = Diagram::new();
        let i = d.add_input();
        let h = d.add_vertex(VertexKind::H);
        let o = d.add_output();
        let z = d.add_vertex(VertexKind::z(PhaseExpr::zero()));
        d.add_edge(i, h);
        d.add_edge(h, o);
        d.add_edge(h, z);
        let v = d.validate();
        assert_eq!(v, vec![Violation::HDegree { vertex: h, degree: 3 }]);

        let mut d = Diagram::identity(1);
        let extra = d.add_vertex(VertexKind::z(PhaseExpr::zero()));
        let b = d.inputs()[0];
        d.add_edge(b, extra);
        assert_eq!(
            d.validate(),
            vec![Violation::BoundaryDegree { vertex: b, degree: 2 }]
        );
    }

    #[test]
    fn enumerate_valuations_positive_first() {
        let v = Valuation::enumerate(&["a".into(), "b".into()]);
        assert_eq!(v.len(), 4);
        assert!(v[0].is_all_zero());
        assert_eq!(v[1].get("a"), Some(true));
        assert_eq!(v[1].get("b"), Some(false));
    }
}
