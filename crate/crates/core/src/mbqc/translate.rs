use std::collections::BTreeMap;

use super::{signal_of, Command, MbqcError, Pattern, Qubit};
use crate::diagram::{Colour, ConditionSet, Diagram, VertexKind, V};
use crate::phase::PhaseExpr;

/// A translated pattern together with where each qubit's pieces landed.
#[derive(Clone, Debug)]
pub struct PatternDiagram {
    pub diagram: Diagram,
    /// First spider on each qubit's wire (its N state, or the spider right
    /// after its input). Spider fusion keeps this id.
    pub qubit_vertex: BTreeMap<Qubit, V>,
    /// The conditional Z(π) recording each measurement's outcome.
    pub error_vertex: BTreeMap<Qubit, V>,
    /// The degree-one projection of each measurement.
    pub effect_vertex: BTreeMap<Qubit, V>,
}

/// Conditional diagram of a standard-form pattern, one wire per qubit.
///
/// `N` is a Z(0) state. `E` adds a Z(0) spider on each wire, joined through
/// an H vertex. `M q α s t` hangs X(π) per s-signal, Z(π) per t-signal, the
/// outcome vertex Z(π, {q}) and the effect Z(−α) off the wire. Corrections
/// become one X(π) or Z(π) vertex per signal, so a multi-signal set acts on
/// the parity of its signals.
pub fn to_diagram(p: &Pattern) -> Result<Diagram, MbqcError> {
    Ok(to_diagram_annotated(p)?.diagram)
}

pub fn to_diagram_annotated(p: &Pattern) -> Result<PatternDiagram, MbqcError> {
    let violations = super::check_wellformed(p);
    if !violations.is_empty() {
        return Err(MbqcError::IllFormed(violations));
    }
    if !p.is_standard() {
        return Err(MbqcError::NotStandard);
    }
    let mut d = Diagram::new();
    let mut end: BTreeMap<Qubit, V> = BTreeMap::new();
    let mut qubit_vertex = BTreeMap::new();
    let mut error_vertex = BTreeMap::new();
    let mut effect_vertex = BTreeMap::new();

    let bounds: Vec<(Qubit, V)> = p.inputs.iter().map(|q| (*q, d.add_input())).collect();
    for (q, b) in bounds {
        let z = d.add_vertex(VertexKind::z(PhaseExpr::zero()));
        d.add_edge(b, z);
        end.insert(q, z);
        qubit_vertex.insert(q, z);
    }

    let extend = |d: &mut Diagram, end: &mut BTreeMap<Qubit, V>, q: Qubit, kind: VertexKind| {
        let v = d.add_vertex(kind);
        d.add_edge(end[&q], v);
        end.insert(q, v);
        v
    };
    let paulis = |colour: Colour, set: &ConditionSet| -> Vec<VertexKind> {
        set.iter()
            .map(|s| VertexKind::spider(colour, PhaseExpr::pi(), ConditionSet::single(s)))
            .collect()
    };

    for c in &p.commands {
        match c {
            Command::N(q) => {
                let z = d.add_vertex(VertexKind::z(PhaseExpr::zero()));
                end.insert(*q, z);
                qubit_vertex.insert(*q, z);
            }
            Command::E(a, b) => {
                let za = extend(&mut d, &mut end, *a, VertexKind::z(PhaseExpr::zero()));
                let zb = extend(&mut d, &mut end, *b, VertexKind::z(PhaseExpr::zero()));
                let h = d.add_vertex(VertexKind::H);
                d.add_edge(za, h);
                d.add_edge(h, zb);
            }
            Command::M { q, angle, s, t } => {
                for k in paulis(Colour::X, s).into_iter().chain(paulis(Colour::Z, t)) {
                    extend(&mut d, &mut end, *q, k);
                }
                let err = VertexKind::spider(Colour::Z, PhaseExpr::pi(), ConditionSet::single(signal_of(*q)));
                error_vertex.insert(*q, extend(&mut d, &mut end, *q, err));
                effect_vertex.insert(*q, extend(&mut d, &mut end, *q, VertexKind::z(-angle)));
                end.remove(q);
            }
            Command::X(q, set) => {
                for k in paulis(Colour::X, set) {
                    extend(&mut d, &mut end, *q, k);
                }
            }
            Command::Z(q, set) => {
                for k in paulis(Colour::Z, set) {
                    extend(&mut d, &mut end, *q, k);
                }
            }
        }
    }
    for q in &p.outputs {
        let o = d.add_output();
        d.add_edge(end[q], o);
    }
    Ok(PatternDiagram {
        diagram: d,
        qubit_vertex,
        error_vertex,
        effect_vertex,
    })
}

#[cfg(test)]
mod tests {
    use super::super::parse_pattern;
    use super::*;

    #[test]
    fn single_preparation() {
        let d = to_diagram(&parse_pattern("N 1\n").unwrap()).unwrap();
        assert_eq!(d.inputs().len(), 0);
        assert_eq!(d.outputs().len(), 1);
        assert_eq!(d.num_vertices(), 2);
        assert!(d.validate().is_empty());
    }

    #[test]
    fn hadamard_pattern_shape() {
        let pd = to_diagram_annotated(&parse_pattern("N 2\nE 1 2\nM 1 0\nX 2 {1}\n").unwrap()).unwrap();
        let d = &pd.diagram;
        assert!(d.validate().is_empty());
        assert_eq!(d.signals().into_iter().collect::<Vec<_>>(), vec!["1".to_string()]);
        assert_eq!(d.conditional_vertices().len(), 2);
        assert_eq!(d.degree(pd.effect_vertex[&1]), 1);
        assert_eq!((d.inputs().len(), d.outputs().len()), (1, 1));
    }

    #[test]
    fn one_signal_per_measurement() {
        let p = parse_pattern("N 4\nN 3\nE 3 4\nE 2 3\nE 1 3\nM 2 0\nM 3 0\nZ 1 {2}\nZ 4 {2}\nX 4 {3}\n").unwrap();
        let pd = to_diagram_annotated(&p).unwrap();
        assert_eq!(pd.error_vertex.len(), 2);
        assert_eq!(pd.diagram.signals().len(), 2);
        let hs = pd.diagram.vertices().filter(|(_, k)| k.is_h()).count();
        assert_eq!(hs, 3);
    }

    #[test]
    fn non_standard_rejected() {
        let p = parse_pattern("inputs: 1,3; outputs: 1,2;\nN 2\nM 3 0\nX 1 {3}\nE 1 2\n").unwrap();
        assert!(matches!(to_diagram(&p), Err(MbqcError::NotStandard)));
    }
}
