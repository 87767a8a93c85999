use std::fmt;
use std::str::FromStr;

use super::SemanticsError;
use crate::diagram::{Diagram, VertexKind};
use crate::phase::PhaseExpr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GateName {
    H,
    ZPhase,
    XPhase,
    CX,
    CZ,
    BellPrep,
}

impl GateName {
    pub fn takes_phase(self) -> bool {
        matches!(self, GateName::ZPhase | GateName::XPhase)
    }
}

impl FromStr for GateName {
    type Err = SemanticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "h" => GateName::H,
            "zphase" | "rz" => GateName::ZPhase,
            "xphase" | "rx" => GateName::XPhase,
            "cx" | "cnot" => GateName::CX,
            "cz" => GateName::CZ,
            "bellprep" | "bell" => GateName::BellPrep,
            _ => return Err(SemanticsError::Gate(format!("unknown gate `{s}`"))),
        })
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateName::H => "H",
            GateName::ZPhase => "Zphase",
            GateName::XPhase => "Xphase",
            GateName::CX => "CX",
            GateName::CZ => "CZ",
            GateName::BellPrep => "BellPrep",
        };
        f.write_str(s)
    }
}

fn one_qubit(kind: VertexKind) -> Diagram {
    let mut d = Diagram::identity(1);
    let (i, o) = (d.inputs()[0], d.outputs()[0]);
    d.split_edge(i, o, kind);
    d
}

/// Two wires with a spider on each, joined by `link` (None for a plain edge).
fn two_qubit(top: VertexKind, bottom: VertexKind, hadamard_link: bool) -> Diagram {
    let mut d = Diagram::identity(2);
    let (i0, i1) = (d.inputs()[0], d.inputs()[1]);
    let (o0, o1) = (d.outputs()[0], d.outputs()[1]);
    let a = d.split_edge(i0, o0, top);
    let b = d.split_edge(i1, o1, bottom);
    if hadamard_link {
        let h = d.add_vertex(VertexKind::H);
        d.add_edge(a, h);
        d.add_edge(h, b);
    } else {
        d.add_edge(a, b);
    }
    d
}

/// Diagram of a standard gate. `params` must be given exactly for the
/// phase gates.
pub fn gate(name: GateName, params: Option<PhaseExpr>) -> Result<Diagram, SemanticsError> {
    if name.takes_phase() != params.is_some() {
        return Err(SemanticsError::Gate(if params.is_some() {
            format!("gate {name} takes no phase")
        } else {
            format!("gate {name} needs a phase")
        }));
    }
    let zero = || VertexKind::z(PhaseExpr::zero());
    Ok(match name {
        GateName::H => one_qubit(VertexKind::H),
        GateName::ZPhase => one_qubit(VertexKind::z(params.unwrap_or_default())),
        GateName::XPhase => one_qubit(VertexKind::x(params.unwrap_or_default())),
        GateName::CZ => two_qubit(zero(), zero(), true),
        GateName::CX => two_qubit(zero(), VertexKind::x(PhaseExpr::zero()), false),
        GateName::BellPrep => {
            let h = one_qubit(VertexKind::H).tensor(&Diagram::identity(1));
            h.compose(&two_qubit(zero(), VertexKind::x(PhaseExpr::zero()), false))?
        }
    })
}

/// The state |0⟩ (up to scalar) as a 0→1 diagram.
pub fn zero_state() -> Diagram {
    let mut d = Diagram::new();
    let x = d.add_vertex(VertexKind::x(PhaseExpr::zero()));
    let o = d.add_output();
    d.add_edge(x, o);
    d
}
