mod support;

use std::f64::consts::{FRAC_PI_2, PI};

use zxverify::diagram::Valuation;
use zxverify::mbqc::{parse_pattern, standardize, Pattern};
use zxverify::phase::{AngleAssignment, DEFAULT_PROBES};
use zxverify::semantics::{branch_maps, semantic_determinism, DenseOperator, SemanticVerdict};

use support::statevec;

const PATTERNS: [(&str, &str); 6] = [
    ("hadamard", "N 2\nE 1 2\nM 1 0\nX 2 {1}\n"),
    ("cnot", "N 4\nN 3\nE 3 4\nE 2 3\nE 1 3\nM 2 0\nM 3 0\nZ 1 {2}\nZ 4 {2}\nX 4 {3}\n"),
    ("teleport", "N 3\nN 2\nE 1 2\nE 2 3\nM 1 0\nM 2 0\nZ 3 {1}\nX 3 {2}\n"),
    ("noflow", "N 3\nN 2\nE 2 3\nE 1 2\nM 3 a\nM 2 0\nZ 1 {2}\n"),
    ("nonuniform", "N 3\nN 2\nE 1 2\nE 2 3\nM 2 a\nM 3 0\n"),
    ("adaptive", "N 2\nN 3\nE 1 2\nE 2 3\nM 1 a\nM 2 b s={1}\nX 3 {2}\nZ 3 {1}\n"),
];

fn angles(p: &Pattern, probe: f64) -> AngleAssignment {
    let names: Vec<String> = p
        .commands
        .iter()
        .filter_map(|c| match c {
            zxverify::mbqc::Command::M { angle, .. } => Some(angle.symbols().map(|(s, _)| s.to_string()).collect::<Vec<_>>()),
            _ => None,
        })
        .flatten()
        .collect();
    AngleAssignment::from_probe(names.iter().map(String::as_str), probe)
}

#[test]
fn diagram_branches_match_state_vector() {
    for (name, text) in PATTERNS {
        let p = parse_pattern(text).unwrap();
        for probe in DEFAULT_PROBES {
            let a = angles(&p, probe);
            for (v, m) in branch_maps(&p, &a).unwrap() {
                let want = statevec::branch_map(&p, &v, &a);
                let d = m.scalar_distance(&want).unwrap();
                assert!(d < 1e-9, "{name} branch {v} at probe {probe}: distance {d}");
            }
        }
    }
}

#[test]
fn standardization_preserves_each_branch() {
    let p = parse_pattern("inputs: 1,3; outputs: 1,2;\nN 2\nM 3 a\nX 1 {3}\nE 1 2\nZ 2 {3}\n").unwrap();
    let s = standardize(&p).unwrap();
    let a = AngleAssignment::new().with("a", 0.8);
    for v in Valuation::enumerate(&p.signals()) {
        let x = statevec::branch_map(&p, &v, &a);
        let y = statevec::branch_map(&s, &v, &a);
        assert!(x.equal_up_to_scalar(&y, 1e-9).unwrap(), "branch {v}");
    }
}

fn z_rotation(theta: f64) -> DenseOperator {
    let one = num_complex::Complex64::new(1.0, 0.0);
    let zero = num_complex::Complex64::new(0.0, 0.0);
    DenseOperator::from_rows(&[&[one, zero], &[zero, num_complex::Complex64::from_polar(1.0, theta)]])
}

#[test]
fn noflow_branches_are_z_rotations() {
    let p = parse_pattern(PATTERNS[3].1).unwrap();
    let alpha = 1.0;
    let a = AngleAssignment::new().with("a", alpha);
    let maps = branch_maps(&p, &a).unwrap();
    // signals in execution order, "3" first and least significant:
    // (s3,s2) = 00, 10, 01, 11
    let want = [-alpha, PI - alpha, alpha + PI, alpha];
    for ((v, m), theta) in maps.iter().zip(want) {
        assert!(m.equal_up_to_scalar(&z_rotation(theta), 1e-9).unwrap(), "branch {v}");
    }
    let verdict = semantic_determinism(&p, &AngleAssignment::new().with("a", FRAC_PI_2), 1e-9, 12).unwrap();
    match verdict {
        SemanticVerdict::Counterexample { witness, distance, .. } => {
            assert_eq!(witness, Valuation::new().with("2", false).with("3", true));
            assert!(distance >= 0.5);
        }
        other => panic!("expected a counterexample, got {other:?}"),
    }
}

#[test]
fn nonuniform_outcome_of_qubit_three_leaks() {
    let p = parse_pattern(PATTERNS[4].1).unwrap();
    let a = AngleAssignment::new().with("a", 1.0);
    let id = DenseOperator::identity(2);
    let z = z_rotation(PI);
    for (v, m) in branch_maps(&p, &a).unwrap() {
        let want = if v.get("3") == Some(true) { &z } else { &id };
        assert!(m.equal_up_to_scalar(want, 1e-9).unwrap(), "branch {v}");
    }
}

