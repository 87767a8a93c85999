use std::collections::BTreeMap;

use super::{Node, OpenGraph};
use crate::diagram::{Colour, ConditionSet, Diagram, VertexKind, V};
use crate::mbqc::{check_wellformed, geometry, signal_of, Command, MbqcError, Pattern};
use crate::phase::PhaseExpr;

/// A geometry diagram and the Z spider standing for each graph vertex.
#[derive(Clone, Debug)]
pub struct GeometryDiagram {
    pub diagram: Diagram,
    pub vertex: BTreeMap<Node, V>,
}

/// One Z(0) per graph vertex, one H per edge, and a boundary per input and
/// per output (both ascending). A vertex in I∩O sits between its two
/// boundaries.
pub fn diagram_of_geometry(g: &OpenGraph) -> Diagram {
    diagram_of_geometry_annotated(g).diagram
}

pub fn diagram_of_geometry_annotated(g: &OpenGraph) -> GeometryDiagram {
    let mut gd = skeleton(g);
    for q in &g.outputs {
        let o = gd.diagram.add_output();
        gd.diagram.add_edge(gd.vertex[q], o);
    }
    gd
}

/// Everything but the output boundaries.
fn skeleton(g: &OpenGraph) -> GeometryDiagram {
    let mut d = Diagram::new();
    let vertex: BTreeMap<Node, V> = g
        .vertices
        .iter()
        .map(|v| (*v, d.add_vertex(VertexKind::z(PhaseExpr::zero()))))
        .collect();
    for (a, b) in &g.edges {
        let h = d.add_vertex(VertexKind::H);
        d.add_edge(vertex[a], h);
        d.add_edge(h, vertex[b]);
    }
    for q in &g.inputs {
        let i = d.add_input();
        d.add_edge(i, vertex[q]);
    }
    GeometryDiagram { diagram: d, vertex }
}

/// The geometry diagram with each measurement hung off its qubit's spider
/// and each output's corrections placed on its output wire, in command
/// order.
pub fn diagram_star(p: &Pattern) -> Result<Diagram, MbqcError> {
    let violations = check_wellformed(p);
    if !violations.is_empty() {
        return Err(MbqcError::IllFormed(violations));
    }
    if !p.is_standard() {
        return Err(MbqcError::NotStandard);
    }
    let g = geometry(p);
    let GeometryDiagram { diagram: mut d, vertex } = skeleton(&g);
    let mut end: BTreeMap<Node, V> = vertex.clone();
    let pi = |c: Colour, s: &str| VertexKind::spider(c, PhaseExpr::pi(), ConditionSet::single(s));
    let mut extend = |d: &mut Diagram, q: Node, k: VertexKind| {
        let v = d.add_vertex(k);
        d.add_edge(end[&q], v);
        end.insert(q, v);
    };
    for c in &p.commands {
        match c {
            Command::N(_) | Command::E(..) => {}
            Command::M { q, angle, s, t } => {
                for sig in s.iter() {
                    extend(&mut d, *q, pi(Colour::X, sig));
                }
                for sig in t.iter() {
                    extend(&mut d, *q, pi(Colour::Z, sig));
                }
                extend(&mut d, *q, pi(Colour::Z, &signal_of(*q)));
                extend(&mut d, *q, VertexKind::z(-angle));
            }
            Command::X(q, set) => set.iter().for_each(|sig| extend(&mut d, *q, pi(Colour::X, sig))),
            Command::Z(q, set) => set.iter().for_each(|sig| extend(&mut d, *q, pi(Colour::Z, sig))),
        }
    }
    for q in &g.outputs {
        let o = d.add_output();
        d.add_edge(end[q], o);
    }
    Ok(d)
}
