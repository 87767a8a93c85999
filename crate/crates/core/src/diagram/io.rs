//! Canonical JSON (`.zxg`) and Graphviz DOT forms of a diagram.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ConditionSet, Diagram, DiagramError, SpiderData, VertexKind, V};
use crate::phase::PhaseExpr;

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: V,
    kind: String,
    #[serde(default)]
    phase: PhaseExpr,
    #[serde(default)]
    cond: ConditionSet,
}

/// Serialized diagram: vertices in id order, edges as sorted pairs with
/// parallel edges repeated.
#[derive(Serialize, Deserialize)]
pub struct DiagramJson {
    inputs: Vec<V>,
    outputs: Vec<V>,
    vertices: Vec<VertexJson>,
    edges: Vec<[V; 2]>,
}

impl From<&Diagram> for DiagramJson {
    fn from(d: &Diagram) -> Self {
        DiagramJson {
            inputs: d.inputs.clone(),
            outputs: d.outputs.clone(),
            vertices: d
                .vertices
                .iter()
                .map(|(v, k)| {
                    let s = k.spider_data().cloned().unwrap_or_default();
                    VertexJson {
                        id: *v,
                        kind: k.short().to_string(),
                        phase: s.phase,
                        cond: s.cond,
                    }
                })
                .collect(),
            edges: d.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl TryFrom<DiagramJson> for Diagram {
    type Error = DiagramError;

    fn try_from(j: DiagramJson) -> Result<Self, Self::Error> {
        let mut d = Diagram::new();
        for v in j.vertices {
            if d.contains(v.id) {
                return Err(DiagramError::Malformed(format!("duplicate vertex id {}", v.id)));
            }
            let data = SpiderData::new(v.phase, v.cond);
            let kind = match v.kind.as_str() {
                "Z" => VertexKind::Z(data),
                "X" => VertexKind::X(data),
                "H" => VertexKind::H,
                "B" => VertexKind::Boundary,
                other => {
                    return Err(DiagramError::Malformed(format!("unknown vertex kind `{other}`")))
                }
            };
            d.insert_vertex(v.id, kind);
        }
        for [u, v] in j.edges {
            if !d.contains(u) || !d.contains(v) {
                return Err(DiagramError::Malformed(format!(
                    "edge [{u},{v}] references a missing vertex"
                )));
            }
            d.add_edge(u, v);
        }
        for v in j.inputs.iter().chain(j.outputs.iter()) {
            if !d.contains(*v) {
                return Err(DiagramError::Malformed(format!("boundary {v} is not a vertex")));
            }
        }
        d.inputs = j.inputs;
        d.outputs = j.outputs;
        Ok(d)
    }
}

impl Serialize for Diagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DiagramJson::from(self).serialize(s)
    }
}

impl Diagram {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&DiagramJson::from(self)).expect("diagram serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&DiagramJson::from(self)).expect("diagram serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(DiagramJson::from(self)).expect("diagram serializes")
    }

    pub fn from_json(s: &str) -> Result<Diagram, DiagramError> {
        let j: DiagramJson =
            serde_json::from_str(s).map_err(|e| DiagramError::Malformed(e.to_string()))?;
        Diagram::try_from(j)
    }

    /// Hex SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    /// Graphviz rendering: Z green ellipse, X red ellipse, H yellow square,
    /// boundary a point.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph {\n");
        for (v, k) in &self.vertices {
            let label = |p: &SpiderData| {
                let mut l = if p.phase.is_zero() { String::new() } else { p.phase.to_string() };
                if p.is_conditional() {
                    let _ = write!(l, " {}", p.cond);
                }
                l
            };
            let attrs = match k {
                VertexKind::Z(p) => format!(
                    "shape=ellipse, style=filled, fillcolor=green, label=\"{}\"",
                    label(p)
                ),
                VertexKind::X(p) => format!(
                    "shape=ellipse, style=filled, fillcolor=red, label=\"{}\"",
                    label(p)
                ),
                VertexKind::H => "shape=square, style=filled, fillcolor=yellow, label=\"\"".into(),
                VertexKind::Boundary => "shape=point".into(),
            };
            let _ = writeln!(s, "  {v} [{attrs}];");
        }
        for (u, v) in self.edges() {
            let _ = writeln!(s, "  {u} -- {v};");
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{iso_equal, Colour};

    #[test]
    fn canonical_json_shape() {
        let mut d = Diagram::identity(1);
        let (i, o) = (d.inputs()[0], d.outputs()[0]);
        d.split_edge(
            i,
            o,
            VertexKind::spider(Colour::Z, PhaseExpr::pi(), ConditionSet::single("s")),
        );
        assert_eq!(
            d.to_json(),
            r#"{"inputs":[0],"outputs":[1],"vertices":[{"id":0,"kind":"B","phase":{"pi":[0,1],"sym":[]},"cond":[]},{"id":1,"kind":"B","phase":{"pi":[0,1],"sym":[]},"cond":[]},{"id":2,"kind":"Z","phase":{"pi":[1,1],"sym":[]},"cond":["s"]}],"edges":[[0,2],[1,2]]}"#
        );
        let back = Diagram::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn parallel_edges_and_loops_survive() {
        let mut d = Diagram::new();
        let z = d.add_vertex(VertexKind::z(PhaseExpr::zero()));
        let x = d.add_vertex(VertexKind::x(PhaseExpr::zero()));
        d.add_edge(z, x);
        d.add_edge(z, x);
        d.add_edge(z, z);
        let s = d.to_json();
        assert!(s.contains("[[0,0],[0,1],[0,1]]"));
        let back = Diagram::from_json(&s).unwrap();
        assert!(iso_equal(&back, &d));
        assert_eq!(back.hash(), d.hash());
    }

    #[test]
    fn rejects_dangling_edges() {
        let s = r#"{"inputs":[],"outputs":[],"vertices":[{"id":0,"kind":"H"}],"edges":[[0,5]]}"#;
        assert!(matches!(Diagram::from_json(s), Err(DiagramError::Malformed(_))));
    }

    #[test]
    fn dot_styles() {
        let mut d = Diagram::identity(1);
        let (i, o) = (d.inputs()[0], d.outputs()[0]);
        d.split_edge(i, o, VertexKind::H);
        let dot = d.to_dot();
        assert!(dot.contains("fillcolor=yellow"));
        assert!(dot.contains("shape=point"));
    }
}
