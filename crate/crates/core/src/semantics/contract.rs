use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{DenseOperator, SemanticsError};
use crate::diagram::{Diagram, VertexKind, V};
use crate::phase::AngleAssignment;

/// Largest intermediate tensor rank the contraction will materialize.
pub const MAX_RANK: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ContractionOrder {
    /// Repeatedly contract the pair of tensors whose result has least rank.
    #[default]
    Greedy,
    /// Fold tensors in vertex-id order. Exists to cross-check `Greedy`.
    Sequential,
}

#[derive(Clone, Debug)]
struct Tensor {
    /// Index labels; the first leg is the most significant bit.
    legs: Vec<usize>,
    data: Vec<Complex64>,
}

/// Sum of bit weights for each assignment to `ws`, first weight most
/// significant.
fn offsets(ws: &[usize]) -> Vec<usize> {
    let mut out = vec![0];
    for w in ws {
        out = out.iter().flat_map(|o| [*o, o + w]).collect();
    }
    out
}

fn weight(rank: usize, pos: usize) -> usize {
    1 << (rank - 1 - pos)
}

impl Tensor {
    fn rank(&self) -> usize {
        self.legs.len()
    }

    /// Sums over every label that occurs twice (self-loops).
    fn trace_repeats(mut self) -> Tensor {
        loop {
            let n = self.rank();
            let mut pair = None;
            'find: for p in 0..n {
                for q in p + 1..n {
                    if self.legs[p] == self.legs[q] {
                        pair = Some((p, q));
                        break 'find;
                    }
                }
            }
            let Some((p, q)) = pair else { return self };
            let keep: Vec<usize> = (0..n).filter(|k| *k != p && *k != q).collect();
            let free = offsets(&keep.iter().map(|k| weight(n, *k)).collect::<Vec<_>>());
            let diag = [0, weight(n, p) + weight(n, q)];
            let data = free
                .iter()
                .map(|f| diag.iter().map(|d| self.data[f + d]).sum())
                .collect();
            self = Tensor {
                legs: keep.iter().map(|k| self.legs[*k]).collect(),
                data,
            };
        }
    }

    fn contract(&self, other: &Tensor) -> Result<Tensor, SemanticsError> {
        let (na, nb) = (self.rank(), other.rank());
        let shared: Vec<usize> = self.legs.iter().copied().filter(|l| other.legs.contains(l)).collect();
        let a_free: Vec<usize> = (0..na).filter(|k| !shared.contains(&self.legs[*k])).collect();
        let b_free: Vec<usize> = (0..nb).filter(|k| !shared.contains(&other.legs[*k])).collect();
        let rank = a_free.len() + b_free.len();
        if rank > MAX_RANK {
            return Err(SemanticsError::TooLarge(rank));
        }
        let pos = |legs: &[usize], l: usize| legs.iter().position(|x| *x == l).expect("shared label");
        let oa = offsets(&a_free.iter().map(|k| weight(na, *k)).collect::<Vec<_>>());
        let ob = offsets(&b_free.iter().map(|k| weight(nb, *k)).collect::<Vec<_>>());
        let sa = offsets(&shared.iter().map(|l| weight(na, pos(&self.legs, *l))).collect::<Vec<_>>());
        let sb = offsets(&shared.iter().map(|l| weight(nb, pos(&other.legs, *l))).collect::<Vec<_>>());
        let mut data = Vec::with_capacity(oa.len() * ob.len());
        for i in &oa {
            for j in &ob {
                let mut acc = Complex64::new(0.0, 0.0);
                for (x, y) in sa.iter().zip(&sb) {
                    acc += self.data[i + x] * other.data[j + y];
                }
                data.push(acc);
            }
        }
        let legs = a_free
            .iter()
            .map(|k| self.legs[*k])
            .chain(b_free.iter().map(|k| other.legs[*k]))
            .collect();
        Ok(Tensor { legs, data })
    }
}

fn spider_tensor(degree: usize, phase: f64, x_basis: bool) -> Vec<Complex64> {
    let e = Complex64::from_polar(1.0, phase);
    let size = 1usize << degree;
    if x_basis {
        let norm = FRAC_1_SQRT_2.powi(degree as i32);
        (0..size)
            .map(|i| {
                let sign = if (i as u64).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                (Complex64::new(1.0, 0.0) + e * sign) * norm
            })
            .collect()
    } else {
        let mut data = vec![Complex64::new(0.0, 0.0); size];
        data[0] += 1.0;
        data[size - 1] += e;
        data
    }
}

/// Generator tensors with edge-copy labels; the open leg of boundary `b`
/// gets label `open_base + b`.
fn network(d: &Diagram, angles: &AngleAssignment) -> Result<(Vec<Tensor>, usize), SemanticsError> {
    if !d.is_unconditional() {
        return Err(SemanticsError::Conditional);
    }
    let edges = d.edges();
    let open_base = edges.len();
    let mut legs: std::collections::BTreeMap<V, Vec<usize>> =
        d.vertex_ids().map(|v| (v, Vec::new())).collect();
    for (k, (u, v)) in edges.iter().enumerate() {
        legs.get_mut(u).expect("edge endpoint").push(k);
        legs.get_mut(v).expect("edge endpoint").push(k);
    }
    let mut tensors = Vec::new();
    for (v, kind) in d.vertices() {
        let l = legs.remove(&v).unwrap_or_default();
        let t = match kind {
            VertexKind::Z(s) => Tensor {
                data: spider_tensor(l.len(), s.phase.eval(angles)?, false),
                legs: l,
            },
            VertexKind::X(s) => Tensor {
                data: spider_tensor(l.len(), s.phase.eval(angles)?, true),
                legs: l,
            },
            VertexKind::H => {
                if l.len() != 2 {
                    return Err(SemanticsError::Shape(format!("H vertex {v} has degree {}", l.len())));
                }
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                Tensor { legs: l, data: vec![h, h, h, -h] }
            }
            VertexKind::Boundary => {
                if l.len() != 1 {
                    return Err(SemanticsError::Shape(format!(
                        "boundary {v} has degree {}",
                        l.len()
                    )));
                }
                let one = Complex64::new(1.0, 0.0);
                let zero = Complex64::new(0.0, 0.0);
                Tensor {
                    legs: vec![open_base + v, l[0]],
                    data: vec![one, zero, zero, one],
                }
            }
        };
        tensors.push(t.trace_repeats());
    }
    Ok((tensors, open_base))
}

fn contract_all(mut ts: Vec<Tensor>, order: ContractionOrder) -> Result<Tensor, SemanticsError> {
    let scalar_one = || Tensor { legs: vec![], data: vec![Complex64::new(1.0, 0.0)] };
    match order {
        ContractionOrder::Sequential => {
            let mut acc = scalar_one();
            for t in ts {
                acc = acc.contract(&t)?.trace_repeats();
            }
            Ok(acc)
        }
        ContractionOrder::Greedy => {
            while ts.len() > 1 {
                let mut best: Option<(bool, usize, usize, usize)> = None;
                for i in 0..ts.len() {
                    for j in i + 1..ts.len() {
                        let shared = ts[i].legs.iter().filter(|l| ts[j].legs.contains(l)).count();
                        let rank = ts[i].rank() + ts[j].rank() - 2 * shared;
                        // prefer connected pairs, then small results
                        let key = (shared == 0, rank, i, j);
                        if best.is_none_or(|b| key < b) {
                            best = Some(key);
                        }
                    }
                }
                let (_, _, i, j) = best.expect("at least two tensors");
                let b = ts.remove(j);
                let a = ts.remove(i);
                ts.push(a.contract(&b)?.trace_repeats());
            }
            Ok(ts.pop().unwrap_or_else(scalar_one))
        }
    }
}

/// Matrix of an unconditional diagram: rows indexed by outputs, columns by
/// inputs, first wire most significant.
pub fn eval_matrix(d: &Diagram, angles: &AngleAssignment) -> Result<DenseOperator, SemanticsError> {
    eval_matrix_with(d, angles, ContractionOrder::Greedy)
}

pub fn eval_matrix_with(
    d: &Diagram,
    angles: &AngleAssignment,
    order: ContractionOrder,
) -> Result<DenseOperator, SemanticsError> {
    let (ts, open_base) = network(d, angles)?;
    let t = contract_all(ts, order)?;
    let pos = |b: V| {
        t.legs
            .iter()
            .position(|l| *l == open_base + b)
            .ok_or_else(|| SemanticsError::Shape(format!("boundary {b} is not open")))
    };
    let n = t.rank();
    let rw = d.outputs().iter().map(|b| pos(*b).map(|p| weight(n, p))).collect::<Result<Vec<_>, _>>()?;
    let cw = d.inputs().iter().map(|b| pos(*b).map(|p| weight(n, p))).collect::<Result<Vec<_>, _>>()?;
    if rw.len() + cw.len() != n {
        return Err(SemanticsError::Shape("unlisted boundary vertex".into()));
    }
    let (ro, co) = (offsets(&rw), offsets(&cw));
    let data = &t.data;
    let entries = ro.iter().flat_map(|r| co.iter().map(move |c| data[r + c])).collect();
    DenseOperator::new(ro.len(), co.len(), entries)
}

/// Value of a closed (0→0) diagram.
pub fn eval_scalar(d: &Diagram, angles: &AngleAssignment) -> Result<Complex64, SemanticsError> {
    let m = eval_matrix(d, angles)?;
    if m.rows() != 1 || m.cols() != 1 {
        return Err(SemanticsError::Shape("diagram is not closed".into()));
    }
    Ok(m.get(0, 0))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::diagram::{Colour, ConditionSet};
    use crate::phase::PhaseExpr;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one_vertex(kind: VertexKind) -> Diagram {
        let mut d = Diagram::identity(1);
        let (i, o) = (d.inputs()[0], d.outputs()[0]);
        d.split_edge(i, o, kind);
        d
    }

    #[test]
    fn z_phase_is_diagonal() {
        let d = one_vertex(VertexKind::z(PhaseExpr::symbol("a")));
        let m = eval_matrix(&d, &AngleAssignment::new().with("a", 0.7)).unwrap();
        assert_abs_diff_eq!(m.get(0, 0).re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!((m.get(1, 1) - Complex64::from_polar(1.0, 0.7)).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.get(0, 1).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn hadamard_matrix() {
        let m = eval_matrix(&one_vertex(VertexKind::H), &AngleAssignment::new()).unwrap();
        let s = FRAC_1_SQRT_2;
        let h = DenseOperator::from_real_rows(&[&[s, s], &[s, -s]]);
        assert!(m.max_diff(&h).unwrap() < 1e-12);
    }

    #[test]
    fn x_pi_is_not_gate() {
        let m = eval_matrix(&one_vertex(VertexKind::x(PhaseExpr::pi())), &AngleAssignment::new()).unwrap();
        let x = DenseOperator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(m.equal_up_to_scalar(&x, 1e-12).unwrap());
    }

    #[test]
    fn cup_is_bell_vector() {
        let mut d = Diagram::new();
        let a = d.add_output();
        let b = d.add_output();
        d.add_edge(a, b);
        let m = eval_matrix(&d, &AngleAssignment::new()).unwrap();
        assert_eq!((m.rows(), m.cols()), (4, 1));
        let want: Vec<Complex64> = [1.0, 0.0, 0.0, 1.0].iter().map(|x| c(*x, 0.0)).collect();
        assert_eq!(m.entries(), &want[..]);
    }

    #[test]
    fn output_order_is_most_significant_first() {
        // |0⟩ on the first output (X state), |+⟩ on the second (Z state).
        let mut d = Diagram::new();
        let o1 = d.add_output();
        let o2 = d.add_output();
        let x = d.add_vertex(VertexKind::x(PhaseExpr::zero()));
        let z = d.add_vertex(VertexKind::z(PhaseExpr::zero()));
        d.add_edge(x, o1);
        d.add_edge(z, o2);
        let m = eval_matrix(&d, &AngleAssignment::new()).unwrap();
        // ∝ |00⟩ + |01⟩
        assert!(m.get(0, 0).norm() > 0.1);
        assert!(m.get(1, 0).norm() > 0.1);
        assert_abs_diff_eq!(m.get(2, 0).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn self_loop_traces() {
        // Z(α) with a self-loop and two wires: loop adds a factor, map stays diag(1,e^{iα}).
        let mut d = one_vertex(VertexKind::z(PhaseExpr::from_pi_ratio(1, 2).unwrap()));
        let z = 2;
        d.add_edge(z, z);
        let m = eval_matrix(&d, &AngleAssignment::new()).unwrap();
        let want = DenseOperator::from_rows(&[&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(0.0, 1.0)]]);
        assert!(m.equal_up_to_scalar(&want, 1e-12).unwrap());
    }

    #[test]
    fn scalar_of_phase_spider() {
        let mut d = Diagram::new();
        d.add_vertex(VertexKind::z(PhaseExpr::pi()));
        assert_abs_diff_eq!(eval_scalar(&d, &AngleAssignment::new()).unwrap().norm(), 0.0, epsilon = 1e-12);
        let mut e = Diagram::new();
        e.add_vertex(VertexKind::x(PhaseExpr::from_pi_ratio(1, 2).unwrap()));
        let v = eval_scalar(&e, &AngleAssignment::new()).unwrap();
        assert_abs_diff_eq!((v - c(1.0, 1.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_conditional_and_unassigned() {
        let d = one_vertex(VertexKind::spider(Colour::Z, PhaseExpr::pi(), ConditionSet::single("s")));
        assert_eq!(eval_matrix(&d, &AngleAssignment::new()), Err(SemanticsError::Conditional));
        let e = one_vertex(VertexKind::z(PhaseExpr::symbol("a")));
        assert!(matches!(eval_matrix(&e, &AngleAssignment::new()), Err(SemanticsError::Phase(_))));
    }

    #[test]
    fn orders_agree_on_a_mixed_network() {
        let mut d = Diagram::new();
        let i0 = d.add_input();
        let i1 = d.add_input();
        let z = d.add_vertex(VertexKind::z(PhaseExpr::from_pi_ratio(1, 4).unwrap()));
        let x = d.add_vertex(VertexKind::x(PhaseExpr::symbol("a")));
        let h = d.add_vertex(VertexKind::H);
        let o0 = d.add_output();
        let o1 = d.add_output();
        d.add_edge(i0, z);
        d.add_edge(i1, x);
        d.add_edge(z, x);
        d.add_edge(z, h);
        d.add_edge(h, x);
        d.add_edge(z, o1);
        d.add_edge(x, o0);
        let a = AngleAssignment::new().with("a", PI / 3.0);
        let g = eval_matrix_with(&d, &a, ContractionOrder::Greedy).unwrap();
        let s = eval_matrix_with(&d, &a, ContractionOrder::Sequential).unwrap();
        assert!(g.max_diff(&s).unwrap() < 1e-9);
    }
}
