//! Straight-line state-vector execution of a pattern, one branch at a time.
//! Shares only the AST with the library; no diagrams are involved.

use num_complex::Complex64;
use zxverify::diagram::Valuation;
use zxverify::mbqc::{Command, Pattern, Qubit};
use zxverify::phase::AngleAssignment;
use zxverify::semantics::DenseOperator;

struct State {
    /// Live qubits; the first is the most significant bit.
    qubits: Vec<Qubit>,
    amps: Vec<Complex64>,
}

impl State {
    fn bit(&self, q: Qubit) -> usize {
        let k = self.qubits.iter().position(|x| *x == q).expect("live qubit");
        self.qubits.len() - 1 - k
    }

    fn add_plus(&mut self, q: Qubit) {
        self.qubits.push(q);
        self.amps = self.amps.iter().flat_map(|a| [*a, *a]).collect();
    }

    fn cz(&mut self, a: Qubit, b: Qubit) {
        let (ba, bb) = (self.bit(a), self.bit(b));
        for (i, x) in self.amps.iter_mut().enumerate() {
            if i >> ba & 1 == 1 && i >> bb & 1 == 1 {
                *x = -*x;
            }
        }
    }

    fn pauli_x(&mut self, q: Qubit) {
        let b = 1 << self.bit(q);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                self.amps.swap(i, i | b);
            }
        }
    }

    fn pauli_z(&mut self, q: Qubit) {
        let b = self.bit(q);
        for (i, x) in self.amps.iter_mut().enumerate() {
            if i >> b & 1 == 1 {
                *x = -*x;
            }
        }
    }

    /// Projects q onto ⟨0| + sign·e^{-iθ}⟨1| and drops it.
    fn project(&mut self, q: Qubit, theta: f64, sign: f64) {
        let b = self.bit(q);
        let w1 = Complex64::from_polar(sign, -theta);
        let mut out = Vec::with_capacity(self.amps.len() / 2);
        for i in 0..self.amps.len() {
            if i >> b & 1 == 0 {
                out.push((i, self.amps[i] + w1 * self.amps[i | 1 << b]));
            }
        }
        // compact the index by removing bit b
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len() / 2];
        for (i, a) in out {
            let low = i & ((1 << b) - 1);
            let high = (i >> (b + 1)) << b;
            amps[high | low] = a;
        }
        self.amps = amps;
        let k = self.qubits.iter().position(|x| *x == q).unwrap();
        self.qubits.remove(k);
    }

    fn reorder(&self, order: &[Qubit]) -> Vec<Complex64> {
        let n = order.len();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let mut j = 0;
            for (k, q) in order.iter().enumerate() {
                if i >> self.bit(*q) & 1 == 1 {
                    j |= 1 << (n - 1 - k);
                }
            }
            out[j] = *a;
        }
        out
    }
}

fn parity(v: &Valuation, set: &zxverify::diagram::ConditionSet) -> bool {
    set.iter().filter(|s| v.get(s).expect("signal valued")).count() % 2 == 1
}

/// The map of one branch, columns indexed by inputs (ascending qubit id),
/// rows by outputs, first qubit most significant.
pub fn branch_map(p: &Pattern, v: &Valuation, angles: &AngleAssignment) -> DenseOperator {
    let inputs: Vec<Qubit> = p.inputs.iter().copied().collect();
    let outputs: Vec<Qubit> = p.outputs.iter().copied().collect();
    let cols = 1usize << inputs.len();
    let rows = 1usize << outputs.len();
    let mut m = DenseOperator::zeros(rows, cols);
    for c in 0..cols {
        let mut st = State { qubits: inputs.clone(), amps: vec![Complex64::new(0.0, 0.0); cols] };
        st.amps[c] = Complex64::new(1.0, 0.0);
        for cmd in &p.commands {
            match cmd {
                Command::N(q) => st.add_plus(*q),
                Command::E(a, b) => st.cz(*a, *b),
                Command::M { q, angle, s, t } => {
                    let mut theta = angle.eval(angles).expect("angle assigned");
                    if parity(v, s) {
                        theta = -theta;
                    }
                    if parity(v, t) {
                        theta += std::f64::consts::PI;
                    }
                    let outcome = v.get(&q.to_string()).expect("outcome valued");
                    st.project(*q, theta, if outcome { -1.0 } else { 1.0 });
                }
                Command::X(q, set) => {
                    if parity(v, set) {
                        st.pauli_x(*q)
                    }
                }
                Command::Z(q, set) => {
                    if parity(v, set) {
                        st.pauli_z(*q)
                    }
                }
            }
        }
        let col = st.reorder(&outputs);
        for (r, a) in col.into_iter().enumerate() {
            m.set(r, c, a);
        }
    }
    m
}
