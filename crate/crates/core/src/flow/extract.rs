use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::{find_flow, verify_determinism, Node, Verdict};
use crate::diagram::{Diagram, VertexKind, V};
use crate::mbqc::{geometry, standardize, Command, MbqcError, Pattern};
use crate::phase::PhaseExpr;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "gate", rename_all = "UPPERCASE")]
pub enum Gate {
    H { q: Node },
    /// diag(1, e^{iα})
    RZ { q: Node, phase: PhaseExpr },
    CZ { a: Node, b: Node },
    /// Control `a`, target `b`.
    CX { a: Node, b: Node },
}

impl Gate {
    fn wires(&self) -> Vec<Node> {
        match self {
            Gate::H { q } | Gate::RZ { q, .. } => vec![*q],
            Gate::CZ { a, b } | Gate::CX { a, b } => vec![*a, *b],
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H { q } => write!(f, "H {q}"),
            Gate::RZ { q, phase } => write!(f, "RZ {q} {phase}"),
            Gate::CZ { a, b } => write!(f, "CZ {a} {b}"),
            Gate::CX { a, b } => write!(f, "CX {a} {b}"),
        }
    }
}

/// A circuit on wires named by the first qubit of each flow path.
/// Ancilla wires start in |0⟩.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Circuit {
    pub inputs: Vec<Node>,
    pub ancillas: Vec<Node>,
    /// Wire → the output qubit it ends on.
    pub outputs: BTreeMap<Node, Node>,
    pub gates: Vec<Gate>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtractError {
    #[error(transparent)]
    Pattern(#[from] MbqcError),
    #[error("the pattern's geometry has no flow")]
    NoFlow,
    #[error("determinism was not proved by flow rewriting")]
    NotProved,
}

impl Circuit {
    pub fn to_text(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }

    /// Each CZ becomes H·CX·H on its second wire; adjacent H pairs on a
    /// wire cancel.
    pub fn with_cx(&self) -> Circuit {
        let mut gates: Vec<Gate> = Vec::new();
        let push = |g: Gate, gates: &mut Vec<Gate>| {
            if let Gate::H { q } = g {
                let last = gates.iter().rposition(|x| x.wires().contains(&q));
                if let Some(i) = last.filter(|i| gates[*i] == Gate::H { q }) {
                    gates.remove(i);
                    return;
                }
            }
            gates.push(g);
        };
        for g in &self.gates {
            match g {
                Gate::CZ { a, b } => {
                    push(Gate::H { q: *b }, &mut gates);
                    push(Gate::CX { a: *a, b: *b }, &mut gates);
                    push(Gate::H { q: *b }, &mut gates);
                }
                other => push(other.clone(), &mut gates),
            }
        }
        Circuit { gates, ..self.clone() }
    }

    /// Gate diagram with inputs in wire order and outputs ordered by the
    /// output qubit each wire ends on.
    pub fn to_diagram(&self) -> Diagram {
        let mut d = Diagram::new();
        let mut end: BTreeMap<Node, V> = BTreeMap::new();
        for q in &self.inputs {
            end.insert(*q, d.add_input());
        }
        for q in &self.ancillas {
            end.insert(*q, d.add_vertex(VertexKind::x(PhaseExpr::zero())));
        }
        let mut extend = |d: &mut Diagram, q: Node, k: VertexKind| {
            let v = d.add_vertex(k);
            d.add_edge(end[&q], v);
            end.insert(q, v);
            v
        };
        for g in &self.gates {
            match g {
                Gate::H { q } => {
                    extend(&mut d, *q, VertexKind::H);
                }
                Gate::RZ { q, phase } => {
                    extend(&mut d, *q, VertexKind::z(phase.clone()));
                }
                Gate::CZ { a, b } => {
                    let u = extend(&mut d, *a, VertexKind::z(PhaseExpr::zero()));
                    let v = extend(&mut d, *b, VertexKind::z(PhaseExpr::zero()));
                    let h = d.add_vertex(VertexKind::H);
                    d.add_edge(u, h);
                    d.add_edge(h, v);
                }
                Gate::CX { a, b } => {
                    let u = extend(&mut d, *a, VertexKind::z(PhaseExpr::zero()));
                    let v = extend(&mut d, *b, VertexKind::x(PhaseExpr::zero()));
                    d.add_edge(u, v);
                }
            }
        }
        let mut by_output: Vec<(Node, Node)> = self.outputs.iter().map(|(w, o)| (*o, *w)).collect();
        by_output.sort();
        for (_, w) in by_output {
            let o = d.add_output();
            d.add_edge(end[&w], o);
        }
        d
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Reads a circuit off the flow of a pattern whose determinism the flow
/// rewriting proves. Each measurement of qubit i at angle α becomes
/// RZ(−α) then H on the wire carrying i, which from then on carries f(i);
/// non-flow edges become CZ gates.
pub fn extract_circuit(p: &Pattern) -> Result<Circuit, ExtractError> {
    let std = standardize(p)?;
    let g = geometry(&std);
    let fl = find_flow(&g).ok_or(ExtractError::NoFlow)?;
    if verify_determinism(&std)?.verdict != Verdict::ProvedDeterministic {
        return Err(ExtractError::NotProved);
    }
    let angle: BTreeMap<Node, PhaseExpr> = std
        .commands
        .iter()
        .filter_map(|c| match c {
            Command::M { q, angle, .. } => Some((*q, angle.clone())),
            _ => None,
        })
        .collect();
    let preds: BTreeSet<Node> = fl.f.values().copied().collect();
    let starts: Vec<Node> = g.vertices.iter().copied().filter(|v| !preds.contains(v)).collect();
    let mut wire: BTreeMap<Node, Node> = BTreeMap::new();
    let mut outputs = BTreeMap::new();
    for &s in &starts {
        let mut cur = s;
        wire.insert(cur, s);
        while let Some(&n) = fl.f.get(&cur) {
            wire.insert(n, s);
            cur = n;
        }
        outputs.insert(s, cur);
    }
    let ancillas: Vec<Node> = starts.iter().copied().filter(|s| !g.inputs.contains(s)).collect();
    let mut gates: Vec<Gate> = ancillas.iter().map(|q| Gate::H { q: *q }).collect();
    let flow_edge = |a: Node, b: Node| fl.f.get(&a) == Some(&b) || fl.f.get(&b) == Some(&a);
    let mut done: BTreeSet<(Node, Node)> = BTreeSet::new();
    let mut cz = |a: Node, b: Node, gates: &mut Vec<Gate>| {
        let key = (a.min(b), a.max(b));
        if !flow_edge(a, b) && done.insert(key) {
            gates.push(Gate::CZ {
                a: wire[&key.0],
                b: wire[&key.1],
            });
        }
    };
    for i in fl.measurement_order(&g) {
        for k in g.neighbours(i) {
            cz(i, k, &mut gates);
        }
        let a = &angle[&i];
        if !a.is_zero() {
            gates.push(Gate::RZ {
                q: wire[&i],
                phase: -a,
            });
        }
        gates.push(Gate::H { q: wire[&i] });
    }
    for &(a, b) in &g.edges {
        cz(a, b, &mut gates);
    }
    Ok(Circuit {
        inputs: g.inputs.iter().copied().collect(),
        ancillas,
        outputs,
        gates,
    })
}
