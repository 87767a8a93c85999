use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{signal_of, Command, Pattern, Qubit};

/// A broken determinacy condition. `condition` is 1 (N comes first),
/// 2 (M comes last) or 3 (signals come from earlier measurements).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternViolation {
    pub condition: u8,
    pub index: Option<usize>,
    pub message: String,
}

impl fmt::Display for PatternViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "condition {} at command {}: {}", self.condition, i, self.message),
            None => write!(f, "condition {}: {}", self.condition, self.message),
        }
    }
}

pub fn check_wellformed(p: &Pattern) -> Vec<PatternViolation> {
    let mut out = Vec::new();
    let mut push = |condition: u8, index: Option<usize>, message: String| {
        out.push(PatternViolation { condition, index, message })
    };
    let mut touched: BTreeSet<Qubit> = BTreeSet::new();
    let mut prepared: BTreeSet<Qubit> = BTreeSet::new();
    let mut measured: BTreeSet<Qubit> = BTreeSet::new();
    let mut outcomes: BTreeSet<String> = BTreeSet::new();

    for (i, c) in p.commands.iter().enumerate() {
        let at = Some(i);
        for sig in c.signals_used() {
            if !outcomes.contains(sig) {
                push(3, at, format!("signal `{sig}` is not the outcome of an earlier measurement"));
            }
        }
        for q in c.qubits() {
            if measured.contains(&q) {
                push(2, at, format!("`{c}` acts on qubit {q} after its measurement"));
            }
        }
        match c {
            Command::N(q) => {
                if p.inputs.contains(q) {
                    push(1, at, format!("input qubit {q} is initialised"));
                }
                if touched.contains(q) {
                    push(1, at, format!("N is not the first command on qubit {q}"));
                }
                prepared.insert(*q);
            }
            _ => {
                for q in c.qubits() {
                    if !p.inputs.contains(&q) && !prepared.contains(&q) {
                        push(1, at, format!("`{c}` acts on qubit {q} before it is initialised"));
                    }
                }
            }
        }
        if let Command::M { q, .. } = c {
            if p.outputs.contains(q) {
                push(2, at, format!("output qubit {q} is measured"));
            }
            if !outcomes.insert(signal_of(*q)) {
                push(3, at, format!("signal `{q}` is not fresh"));
            }
            measured.insert(*q);
        }
        touched.extend(c.qubits());
    }
    for q in &p.qubits {
        if !p.inputs.contains(q) && !prepared.contains(q) {
            push(1, None, format!("qubit {q} is never initialised but is not an input"));
        }
        if !p.outputs.contains(q) && !measured.contains(q) {
            push(2, None, format!("qubit {q} is never measured but is not an output"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse_pattern;
    use super::*;

    fn violations(text: &str) -> Vec<u8> {
        check_wellformed(&parse_pattern(text).unwrap()).iter().map(|v| v.condition).collect()
    }

    #[test]
    fn cnot_is_wellformed() {
        assert!(violations("N 4\nN 3\nE 3 4\nE 2 3\nE 1 3\nM 2 0\nM 3 0\nZ 1 {2}\nZ 4 {2}\nX 4 {3}\n").is_empty());
    }

    #[test]
    fn unmeasured_signal() {
        assert_eq!(violations("N 2\nE 1 2\nX 2 {1}\nM 1 0\n"), vec![3]);
    }

    #[test]
    fn double_measurement() {
        let v = check_wellformed(&parse_pattern("M 1 0\nM 1 0\n").unwrap());
        assert!(v.iter().any(|v| v.condition == 2 && v.index == Some(1)));
        assert!(v.iter().any(|v| v.condition == 3 && v.message.contains("fresh")));
    }

    #[test]
    fn command_before_initialisation() {
        let p = parse_pattern("inputs: 1; outputs: 1,2;\nE 1 2\nN 2\n").unwrap();
        let v = check_wellformed(&p);
        assert!(v.iter().all(|v| v.condition == 1));
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn header_must_agree() {
        let p = parse_pattern("inputs: 1; outputs: 1;\nN 1\n").unwrap();
        assert_eq!(check_wellformed(&p).len(), 1);
    }
}
