use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{flow_with_successor, Flow, FlowError, Node, OpenGraph};
use crate::diagram::{Diagram, VertexKind, V};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CircuitMode {
    Strict,
    /// H vertices between two spiders of the same colour may stay off the
    /// path cover.
    Weak,
}

/// Disjoint directed paths, each ending in an output boundary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathCover {
    pub paths: Vec<Vec<V>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum CircuitLike {
    Yes {
        cover: PathCover,
    },
    No {
        /// "C1"–"C3" (strict) or "W1"–"W3" (weak).
        condition: String,
        detail: String,
        /// A cycle running with its path edges, when C2/W2 fails.
        cycle: Option<Vec<V>>,
    },
}

impl CircuitLike {
    pub fn holds(&self) -> bool {
        matches!(self, CircuitLike::Yes { .. })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tag {
    Z,
    X,
    H,
    B,
}

fn tag(k: &VertexKind) -> Tag {
    match k {
        VertexKind::Z(_) => Tag::Z,
        VertexKind::X(_) => Tag::X,
        VertexKind::H => Tag::H,
        VertexKind::Boundary => Tag::B,
    }
}

struct Search<'a> {
    d: &'a Diagram,
    order: Vec<V>,
    outputs: BTreeSet<V>,
    excludable: BTreeSet<V>,
    nbrs: BTreeMap<V, Vec<V>>,
    // None: undecided; Some(None): left off the cover; Some(Some(w)): successor
    succ: BTreeMap<V, Option<Option<V>>>,
    has_pred: BTreeSet<V>,
    first_cycle: Option<Vec<V>>,
    covers_seen: usize,
}

impl Search<'_> {
    fn reaches(&self, from: V, target: V) -> bool {
        let mut cur = from;
        loop {
            if cur == target {
                return true;
            }
            match self.succ.get(&cur) {
                Some(Some(Some(n))) => cur = *n,
                _ => return false,
            }
        }
    }

    fn excluded(&self, v: V) -> bool {
        matches!(self.succ.get(&v), Some(Some(None)))
    }

    fn run(&mut self, i: usize) -> Option<PathCover> {
        if i == self.order.len() {
            let cover = self.cover();
            self.covers_seen += 1;
            match forward_cycle(self.d, &cover) {
                None => return Some(cover),
                Some(c) => {
                    self.first_cycle.get_or_insert(c);
                    return None;
                }
            }
        }
        let v = self.order[i];
        if self.outputs.contains(&v) {
            self.succ.insert(v, Some(None));
            let r = self.run(i + 1);
            self.succ.remove(&v);
            // an output is always covered; undo the marker only
            return r;
        }
        for w in self.nbrs[&v].clone() {
            if self.has_pred.contains(&w) || self.excluded(w) || self.reaches(w, v) {
                continue;
            }
            self.succ.insert(v, Some(Some(w)));
            self.has_pred.insert(w);
            let r = self.run(i + 1);
            self.has_pred.remove(&w);
            self.succ.remove(&v);
            if r.is_some() {
                return r;
            }
        }
        if self.excludable.contains(&v) && !self.has_pred.contains(&v) {
            self.succ.insert(v, Some(None));
            let r = self.run(i + 1);
            self.succ.remove(&v);
            return r;
        }
        None
    }

    fn cover(&self) -> PathCover {
        let on_path = |v: &V| self.outputs.contains(v) || matches!(self.succ.get(v), Some(Some(Some(_))));
        let mut paths = Vec::new();
        for v in self.order.iter().filter(|v| on_path(v) && !self.has_pred.contains(v)) {
            let mut path = vec![*v];
            let mut cur = *v;
            while let Some(Some(Some(n))) = self.succ.get(&cur) {
                path.push(*n);
                cur = *n;
            }
            paths.push(path);
        }
        PathCover { paths }
    }
}

/// A simple cycle that uses at least two path edges and never runs against
/// a path's direction.
fn forward_cycle(d: &Diagram, cover: &PathCover) -> Option<Vec<V>> {
    let mut path_of: BTreeMap<(V, V), usize> = BTreeMap::new();
    for (i, p) in cover.paths.iter().enumerate() {
        for w in p.windows(2) {
            path_of.insert((w[0], w[1]), i);
        }
    }
    // directed arcs: path edges forward only, the rest both ways
    let mut arcs: BTreeMap<V, Vec<(V, Option<usize>)>> = BTreeMap::new();
    for (a, b) in d.edges() {
        if let Some(i) = path_of.get(&(a, b)) {
            arcs.entry(a).or_default().push((b, Some(*i)));
        } else if let Some(i) = path_of.get(&(b, a)) {
            arcs.entry(b).or_default().push((a, Some(*i)));
        } else {
            arcs.entry(a).or_default().push((b, None));
            arcs.entry(b).or_default().push((a, None));
        }
    }
    fn dfs(
        arcs: &BTreeMap<V, Vec<(V, Option<usize>)>>,
        start: V,
        cur: V,
        stack: &mut Vec<V>,
        used: &mut Vec<Option<usize>>,
    ) -> Option<Vec<V>> {
        for &(n, p) in arcs.get(&cur).map(Vec::as_slice).unwrap_or(&[]) {
            if n < start {
                continue;
            }
            if n == start {
                let path_edges = used.iter().chain([&p]).flatten().count();
                if stack.len() >= 3 && path_edges >= 2 {
                    return Some(stack.clone());
                }
                continue;
            }
            if stack.contains(&n) {
                continue;
            }
            stack.push(n);
            used.push(p);
            if let Some(c) = dfs(arcs, start, n, stack, used) {
                return Some(c);
            }
            stack.pop();
            used.pop();
        }
        None
    }
    for &s in arcs.keys() {
        if let Some(c) = dfs(&arcs, s, s, &mut vec![s], &mut Vec::new()) {
            return Some(c);
        }
    }
    None
}

/// Checks the circuit-like conditions on an unconditional diagram and
/// returns a witness path cover when they hold.
pub fn is_circuit_like(d: &Diagram, mode: CircuitMode) -> Result<CircuitLike, FlowError> {
    if let Some(v) = d.conditional_vertices().first() {
        return Err(FlowError::Conditional(*v));
    }
    let name = |n: u8| match mode {
        CircuitMode::Strict => format!("C{n}"),
        CircuitMode::Weak => format!("W{n}"),
    };
    let no = |n: u8, detail: String, cycle| {
        Ok(CircuitLike::No {
            condition: name(n),
            detail,
            cycle,
        })
    };
    for v in d.vertex_ids() {
        if d.self_loops(v) > 0 {
            return no(3, format!("self-loop at {v}"), None);
        }
    }
    for (u, v) in d.edges() {
        if d.edge_count(u, v) > 1 {
            return no(3, format!("parallel edges between {u} and {v}"), None);
        }
        let (a, b) = (tag(d.kind(u).expect("live")), tag(d.kind(v).expect("live")));
        if a == b && a != Tag::B {
            return no(3, format!("adjacent vertices {u} and {v} share a colour"), None);
        }
    }
    let excludable: BTreeSet<V> = match mode {
        CircuitMode::Strict => BTreeSet::new(),
        CircuitMode::Weak => d
            .vertices()
            .filter(|(v, k)| {
                k.is_h() && {
                    let tags: Vec<Tag> = d.legs(*v).iter().map(|w| tag(d.kind(*w).expect("live"))).collect();
                    tags.len() == 2 && tags[0] == tags[1] && matches!(tags[0], Tag::Z | Tag::X)
                }
            })
            .map(|(v, _)| v)
            .collect(),
    };
    let mut search = Search {
        d,
        order: d.vertex_ids().collect(),
        outputs: d.outputs().iter().copied().collect(),
        excludable,
        nbrs: d.vertex_ids().map(|v| (v, d.neighbour_counts(v).map(|(w, _)| w).collect())).collect(),
        succ: BTreeMap::new(),
        has_pred: BTreeSet::new(),
        first_cycle: None,
        covers_seen: 0,
    };
    if let Some(cover) = search.run(0) {
        return Ok(CircuitLike::Yes { cover });
    }
    if search.covers_seen == 0 {
        return no(1, "no cover by disjoint directed paths ending in outputs".into(), None);
    }
    let cycle = search.first_cycle.take();
    no(2, "every path cover has a cycle that follows all its path edges".into(), cycle)
}

/// Successor function read off a path cover: each Z vertex's successor is
/// the next Z vertex on its path. `qubit` maps diagram vertices to graph
/// vertices. Output qubits get no successor, even when a path runs on
/// through them.
pub fn flow_from_paths(g: &OpenGraph, cover: &PathCover, qubit: &BTreeMap<V, Node>) -> Option<Flow> {
    let mut f = BTreeMap::new();
    for path in &cover.paths {
        let nodes: Vec<Node> = path.iter().filter_map(|v| qubit.get(v).copied()).collect();
        for w in nodes.windows(2).filter(|w| !g.outputs.contains(&w[0])) {
            f.insert(w[0], w[1]);
        }
    }
    flow_with_successor(g, f)
}
