use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SemanticsError;

/// A `2^m × 2^n` complex matrix, row-major.
/// Largest entry magnitude of an operator treated as the zero map.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseOperator {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl DenseOperator {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self, SemanticsError> {
        if !rows.is_power_of_two() || !cols.is_power_of_two() {
            return Err(SemanticsError::Shape(format!(
                "dimensions {rows}x{cols} are not powers of two"
            )));
        }
        if entries.len() != rows * cols {
            return Err(SemanticsError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SemanticsError::Shape("non-finite entry".into()));
        }
        Ok(DenseOperator { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseOperator {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds from nested rows; panics on ragged input. For constants.
    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let entries: Vec<Complex64> = rows.iter().flat_map(|x| x.iter().copied()).collect();
        assert_eq!(entries.len(), r * c, "ragged rows");
        DenseOperator::new(r, c, entries).expect("valid constant matrix")
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let owned: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|x| Complex64::new(*x, 0.0)).collect())
            .collect();
        let refs: Vec<&[Complex64]> = owned.iter().map(Vec::as_slice).collect();
        Self::from_rows(&refs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, z: Complex64) {
        self.entries[r * self.cols + c] = z;
    }

    pub fn matmul(&self, rhs: &DenseOperator) -> Result<DenseOperator, SemanticsError> {
        if self.cols != rhs.rows {
            return Err(SemanticsError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = DenseOperator::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.entries[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn kron(&self, rhs: &DenseOperator) -> DenseOperator {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = DenseOperator::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out.entries[(i * rhs.rows + k) * cols + j * rhs.cols + l] = a * rhs.get(k, l);
                    }
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> DenseOperator {
        let mut out = DenseOperator::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn conj(&self) -> DenseOperator {
        DenseOperator {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(Complex64::conj).collect(),
        }
    }

    pub fn scale(&self, z: Complex64) -> DenseOperator {
        DenseOperator {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * z).collect(),
        }
    }

    pub fn add(&self, rhs: &DenseOperator) -> Result<DenseOperator, SemanticsError> {
        self.check_same_shape(rhs)?;
        Ok(DenseOperator {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise max-norm distance.
    pub fn max_diff(&self, rhs: &DenseOperator) -> Result<f64, SemanticsError> {
        self.check_same_shape(rhs)?;
        Ok(self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    fn check_same_shape(&self, rhs: &DenseOperator) -> Result<(), SemanticsError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(SemanticsError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(())
    }

    fn argmax(&self) -> usize {
        let mut best = 0;
        let mut best_norm = -1.0;
        for (i, z) in self.entries.iter().enumerate() {
            let n = z.norm();
            if n > best_norm {
                best = i;
                best_norm = n;
            }
        }
        best
    }

    /// Max-norm distance after normalizing both operators by their entry at
    /// the position where `rhs` is largest. Zero only against zero; a zero
    /// and a nonzero operator are infinitely far apart. Entries at or below
    /// [`ZERO_TOL`] count as zero, so cancellation noise in a zero map is
    /// not normalized into an arbitrary operator.
    pub fn scalar_distance(&self, rhs: &DenseOperator) -> Result<f64, SemanticsError> {
        self.check_same_shape(rhs)?;
        let a_zero = self.max_abs() <= ZERO_TOL;
        let b_zero = rhs.max_abs() <= ZERO_TOL;
        match (a_zero, b_zero) {
            (true, true) => return Ok(0.0),
            (true, false) | (false, true) => return Ok(f64::INFINITY),
            _ => {}
        }
        let k = rhs.argmax();
        let pivot_b = rhs.entries[k];
        let pivot_a = self.entries[k];
        // Relative to the size of `self`, its pivot entry vanishes: no nonzero
        // multiple of `rhs` can match.
        if pivot_a.norm() <= 1e-14 * self.max_abs() {
            return Ok(f64::INFINITY);
        }
        let na = self.scale(pivot_a.inv());
        let nb = rhs.scale(pivot_b.inv());
        na.max_diff(&nb)
    }

    /// True iff `self ≈ λ·rhs` for some nonzero λ fixed from the
    /// largest-magnitude entry of `rhs`.
    pub fn equal_up_to_scalar(&self, rhs: &DenseOperator, tol: f64) -> Result<bool, SemanticsError> {
        Ok(self.scalar_distance(rhs)? <= tol)
    }

    /// Text form: a `rows cols` line, then one line per row of
    /// space-separated `re+imj` entries.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format_complex(self.get(i, j))).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }

    pub fn from_text(s: &str) -> Result<DenseOperator, SemanticsError> {
        let mut tokens = s.split_whitespace();
        let bad = |m: &str| SemanticsError::Shape(format!("matrix text: {m}"));
        let rows: usize = tokens.next().ok_or_else(|| bad("missing rows"))?.parse().map_err(|_| bad("rows"))?;
        let cols: usize = tokens.next().ok_or_else(|| bad("missing cols"))?.parse().map_err(|_| bad("cols"))?;
        let entries = tokens.map(parse_complex).collect::<Result<Vec<_>, _>>()?;
        DenseOperator::new(rows, cols, entries)
    }
}

fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn format_complex(z: Complex64) -> String {
    let (re, im) = (clean(z.re), clean(z.im));
    if im < 0.0 {
        format!("{re}-{}j", -im)
    } else {
        format!("{re}+{im}j")
    }
}

fn parse_complex(t: &str) -> Result<Complex64, SemanticsError> {
    let bad = || SemanticsError::Shape(format!("bad complex literal `{t}`"));
    let body = t.strip_suffix('j').ok_or_else(bad)?;
    // split at the last sign that is not part of an exponent and not leading
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'e' && bytes[i - 1] != b'E' {
            split = Some(i);
            break;
        }
    }
    let i = split.ok_or_else(bad)?;
    let re: f64 = body[..i].parse().map_err(|_| bad())?;
    let im: f64 = body[i..].parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_multiple_is_equal() {
        let m = DenseOperator::from_rows(&[&[c(1.0, 0.0), c(0.5, -0.2)], &[c(0.0, 0.0), c(-0.3, 0.9)]]);
        let n = m.scale(c(0.0, 2.7));
        assert!(m.equal_up_to_scalar(&n, 1e-12).unwrap());
        assert!(n.equal_up_to_scalar(&m, 1e-12).unwrap());
    }

    #[test]
    fn conjugate_phases_are_not_proportional() {
        // diag(1, i) vs diag(1, -i): λ = 1 from the first entry, then |i - (-i)| = 2.
        let a = DenseOperator::from_rows(&[&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(0.0, 1.0)]]);
        let b = DenseOperator::from_rows(&[&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(0.0, -1.0)]]);
        assert!(!a.equal_up_to_scalar(&b, 1e-9).unwrap());
        assert!((a.scalar_distance(&b).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_only_equals_zero() {
        let z = DenseOperator::zeros(2, 2);
        assert!(z.equal_up_to_scalar(&z, 1e-9).unwrap());
        let i = DenseOperator::identity(2);
        assert!(!z.equal_up_to_scalar(&i, 1e-9).unwrap());
        assert!(!i.equal_up_to_scalar(&z, 1e-9).unwrap());
        let noise = DenseOperator::from_real_rows(&[&[3e-17, 0.0], &[0.0, -1e-17]]);
        let other = DenseOperator::from_real_rows(&[&[0.0, 2e-17], &[5e-18, 0.0]]);
        assert_eq!(noise.scalar_distance(&other).unwrap(), 0.0);
        assert!(!noise.equal_up_to_scalar(&i, 1e-9).unwrap());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = DenseOperator::identity(2);
        let b = DenseOperator::identity(4);
        assert!(a.equal_up_to_scalar(&b, 1e-9).is_err());
    }

    #[test]
    fn kron_and_adjoint() {
        let x = DenseOperator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let i = DenseOperator::identity(2);
        let xi = x.kron(&i);
        assert_eq!(xi.get(2, 0), c(1.0, 0.0));
        assert_eq!(xi.get(0, 2), c(1.0, 0.0));
        let m = DenseOperator::from_rows(&[&[c(0.0, 1.0), c(2.0, 0.0)], &[c(0.0, 0.0), c(1.0, 1.0)]]);
        assert_eq!(m.adjoint().get(1, 0), c(2.0, 0.0));
        assert_eq!(m.adjoint().get(0, 0), c(0.0, -1.0));
    }

    #[test]
    fn text_round_trip() {
        let m = DenseOperator::from_rows(&[&[c(1.0, -0.5), c(0.0, 0.0)], &[c(-2.5e-17, 3.0), c(1.0, 1.0)]]);
        let t = m.to_text();
        assert!(t.starts_with("2 2\n1-0.5j 0+0j\n"));
        assert_eq!(DenseOperator::from_text(&t).unwrap(), m);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(DenseOperator::new(3, 1, vec![c(0.0, 0.0); 3]).is_err());
    }
}
