//! Measurement-calculus patterns: AST, text syntax, well-formedness,
//! standardization and translation into conditional diagrams.
//!
//! Command lists are stored in execution order. The usual written form of a
//! pattern reads right to left, so `X_2^{s_1} M^0_1 E_{12} N_2` is the list
//! `N 2; E 1 2; M 1 0; X 2 {1}`.

mod parser;
mod standardize;
mod translate;
mod wellformed;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::diagram::{ConditionSet, DiagramError};
use crate::flow::OpenGraph;
use crate::phase::PhaseExpr;

pub use parser::{parse_pattern, ParseError};
pub use standardize::{expand_conditional_measurements, standardize};
pub use translate::{to_diagram, to_diagram_annotated, PatternDiagram};
pub use wellformed::{check_wellformed, PatternViolation};

pub type Qubit = u32;

/// Signal produced by measuring `q`.
pub fn signal_of(q: Qubit) -> String {
    q.to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Command {
    N(Qubit),
    E(Qubit, Qubit),
    M {
        q: Qubit,
        angle: PhaseExpr,
        s: ConditionSet,
        t: ConditionSet,
    },
    X(Qubit, ConditionSet),
    Z(Qubit, ConditionSet),
}

impl Command {
    pub fn measure(q: Qubit, angle: PhaseExpr) -> Self {
        Command::M {
            q,
            angle,
            s: ConditionSet::new(),
            t: ConditionSet::new(),
        }
    }

    pub fn qubits(&self) -> Vec<Qubit> {
        match self {
            Command::N(q) | Command::X(q, _) | Command::Z(q, _) | Command::M { q, .. } => vec![*q],
            Command::E(a, b) => vec![*a, *b],
        }
    }

    /// Signals this command depends on.
    pub fn signals_used(&self) -> Vec<&str> {
        match self {
            Command::M { s, t, .. } => s.iter().chain(t.iter()).collect(),
            Command::X(_, set) | Command::Z(_, set) => set.iter().collect(),
            _ => Vec::new(),
        }
    }

    /// Position in the standard N, E, M, C order.
    pub fn stage(&self) -> u8 {
        match self {
            Command::N(_) => 0,
            Command::E(..) => 1,
            Command::M { .. } => 2,
            Command::X(..) | Command::Z(..) => 3,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::N(q) => write!(f, "N {q}"),
            Command::E(a, b) => write!(f, "E {a} {b}"),
            Command::M { q, angle, s, t } => {
                write!(f, "M {q} {angle}")?;
                if !s.is_empty() {
                    write!(f, " s={s}")?;
                }
                if !t.is_empty() {
                    write!(f, " t={t}")?;
                }
                Ok(())
            }
            Command::X(q, set) => write!(f, "X {q} {set}"),
            Command::Z(q, set) => write!(f, "Z {q} {set}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct Pattern {
    /// Leading `#` lines, kept so canonical files round-trip.
    pub comments: Vec<String>,
    pub qubits: BTreeSet<Qubit>,
    pub inputs: BTreeSet<Qubit>,
    pub outputs: BTreeSet<Qubit>,
    pub commands: Vec<Command>,
}

impl Pattern {
    /// Inputs are the qubits never initialised, outputs the qubits never
    /// measured.
    pub fn new(commands: Vec<Command>) -> Self {
        let qubits: BTreeSet<Qubit> = commands.iter().flat_map(Command::qubits).collect();
        let prepared: BTreeSet<Qubit> = commands
            .iter()
            .filter_map(|c| match c {
                Command::N(q) => Some(*q),
                _ => None,
            })
            .collect();
        let measured: BTreeSet<Qubit> = commands
            .iter()
            .filter_map(|c| match c {
                Command::M { q, .. } => Some(*q),
                _ => None,
            })
            .collect();
        Pattern {
            comments: Vec::new(),
            inputs: qubits.difference(&prepared).copied().collect(),
            outputs: qubits.difference(&measured).copied().collect(),
            qubits,
            commands,
        }
    }

    pub fn with_io(
        inputs: impl IntoIterator<Item = Qubit>,
        outputs: impl IntoIterator<Item = Qubit>,
        commands: Vec<Command>,
    ) -> Self {
        let inputs: BTreeSet<Qubit> = inputs.into_iter().collect();
        let outputs: BTreeSet<Qubit> = outputs.into_iter().collect();
        let mut qubits: BTreeSet<Qubit> = commands.iter().flat_map(Command::qubits).collect();
        qubits.extend(inputs.iter().chain(outputs.iter()));
        Pattern {
            comments: Vec::new(),
            qubits,
            inputs,
            outputs,
            commands,
        }
    }

    /// Measured qubits in execution order.
    pub fn measured(&self) -> Vec<Qubit> {
        self.commands
            .iter()
            .filter_map(|c| match c {
                Command::M { q, .. } => Some(*q),
                _ => None,
            })
            .collect()
    }

    /// Measurement signals in execution order.
    pub fn signals(&self) -> Vec<String> {
        self.measured().into_iter().map(signal_of).collect()
    }

    /// Symbolic angle variables used by measurements.
    pub fn symbols(&self) -> BTreeSet<String> {
        self.commands
            .iter()
            .filter_map(|c| match c {
                Command::M { angle, .. } => Some(angle.symbols().map(|(n, _)| n.to_string()).collect::<Vec<_>>()),
                _ => None,
            })
            .flatten()
            .collect()
    }

    /// N, then E, then M, then corrections.
    pub fn is_standard(&self) -> bool {
        self.commands.windows(2).all(|w| w[0].stage() <= w[1].stage())
    }

    /// Canonical text: comments, header, one command per line.
    pub fn to_text(&self) -> String {
        let list = |s: &BTreeSet<Qubit>| s.iter().map(Qubit::to_string).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        for c in &self.comments {
            out.push('#');
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&format!("inputs: {}; outputs: {};\n", list(&self.inputs), list(&self.outputs)));
        for c in &self.commands {
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn print_pattern(p: &Pattern) -> String {
    p.to_text()
}

/// The open graph of a pattern: qubits, one edge per distinct `E` pair,
/// and the pattern's inputs and outputs.
pub fn geometry(p: &Pattern) -> OpenGraph {
    let edges = p.commands.iter().filter_map(|c| match c {
        Command::E(a, b) => Some((*a, *b)),
        _ => None,
    });
    OpenGraph::new(p.qubits.iter().copied(), edges, p.inputs.iter().copied(), p.outputs.iter().copied())
        .expect("pattern qubits are positive and E has distinct ends")
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MbqcError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("ill-formed pattern: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    IllFormed(Vec<PatternViolation>),
    #[error("pattern is not in standard form")]
    NotStandard,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}
