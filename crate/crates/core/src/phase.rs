//! Exact phase values: a rational multiple of π plus an integer-weighted sum
//! of symbolic angle variables.
//!
//! The π part is always kept reduced into `[0, 2)`, so two phases compare
//! equal exactly when they denote the same angle for every choice of the
//! symbols.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhaseError {
    #[error("unassigned angle variable `{0}`")]
    Unassigned(String),
    #[error("malformed phase literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in phase literal")]
    ZeroDenominator,
}

/// `pi · π + Σ coeff·symbol`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhaseExpr {
    pi: Rational64,
    sym: BTreeMap<String, i64>,
}

impl Default for PhaseExpr {
    fn default() -> Self {
        Self::zero()
    }
}

fn reduce_mod2(r: Rational64) -> Rational64 {
    let two = Rational64::from_integer(2);
    let q = (r / two).floor();
    r - q * two
}

impl PhaseExpr {
    pub fn zero() -> Self {
        PhaseExpr {
            pi: Rational64::zero(),
            sym: BTreeMap::new(),
        }
    }

    pub fn pi() -> Self {
        Self::from_pi(Rational64::one())
    }

    /// `r · π`, reduced mod 2π.
    pub fn from_pi(r: Rational64) -> Self {
        PhaseExpr {
            pi: reduce_mod2(r),
            sym: BTreeMap::new(),
        }
    }

    pub fn from_pi_ratio(num: i64, den: i64) -> Result<Self, PhaseError> {
        if den == 0 {
            return Err(PhaseError::ZeroDenominator);
        }
        Ok(Self::from_pi(Rational64::new(num, den)))
    }

    pub fn symbol(name: impl Into<String>) -> Self {
        let mut sym = BTreeMap::new();
        sym.insert(name.into(), 1);
        PhaseExpr {
            pi: Rational64::zero(),
            sym,
        }
    }

    pub fn pi_part(&self) -> Rational64 {
        self.pi
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&str, i64)> {
        self.sym.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_zero(&self) -> bool {
        self.pi.is_zero() && self.sym.is_empty()
    }

    /// Exactly π, with no symbolic part.
    pub fn is_pi(&self) -> bool {
        self.sym.is_empty() && self.pi == Rational64::one()
    }

    /// 0 or π: the two classical points of a qubit observable.
    pub fn is_pauli(&self) -> bool {
        self.sym.is_empty() && (self.pi.is_zero() || self.pi == Rational64::one())
    }

    pub fn is_symbolic(&self) -> bool {
        !self.sym.is_empty()
    }

    /// Integer multiple `k · self`.
    pub fn scaled(&self, k: i64) -> Self {
        let mut out = PhaseExpr::from_pi(self.pi * Rational64::from_integer(k));
        if k != 0 {
            for (name, c) in &self.sym {
                out.sym.insert(name.clone(), c * k);
            }
        }
        out
    }

    /// Numeric value in radians (not reduced).
    pub fn eval(&self, angles: &AngleAssignment) -> Result<f64, PhaseError> {
        let mut v = *self.pi.numer() as f64 / *self.pi.denom() as f64 * std::f64::consts::PI;
        for (name, c) in &self.sym {
            let a = angles
                .get(name)
                .ok_or_else(|| PhaseError::Unassigned(name.clone()))?;
            v += *c as f64 * a;
        }
        Ok(v)
    }

    /// Substitute a concrete rational multiple of π for a symbol.
    pub fn substitute(&self, name: &str, value: &PhaseExpr) -> Self {
        match self.sym.get(name) {
            None => self.clone(),
            Some(&c) => {
                let mut rest = self.clone();
                rest.sym.remove(name);
                rest + value.scaled(c)
            }
        }
    }
}

impl Add for PhaseExpr {
    type Output = PhaseExpr;
    fn add(self, rhs: PhaseExpr) -> PhaseExpr {
        &self + &rhs
    }
}

impl<'a> Add<&'a PhaseExpr> for &'a PhaseExpr {
    type Output = PhaseExpr;
    fn add(self, rhs: &PhaseExpr) -> PhaseExpr {
        let mut sym = self.sym.clone();
        for (name, c) in &rhs.sym {
            let e = sym.entry(name.clone()).or_insert(0);
            *e += c;
            if *e == 0 {
                sym.remove(name);
            }
        }
        PhaseExpr {
            pi: reduce_mod2(self.pi + rhs.pi),
            sym,
        }
    }
}

impl Neg for PhaseExpr {
    type Output = PhaseExpr;
    fn neg(self) -> PhaseExpr {
        -&self
    }
}

impl Neg for &PhaseExpr {
    type Output = PhaseExpr;
    fn neg(self) -> PhaseExpr {
        PhaseExpr {
            pi: reduce_mod2(-self.pi),
            sym: self.sym.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }
}

impl Sub for PhaseExpr {
    type Output = PhaseExpr;
    fn sub(self, rhs: PhaseExpr) -> PhaseExpr {
        self + (-rhs)
    }
}

impl fmt::Display for PhaseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (name, &c) in &self.sym {
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}{name}")?;
            } else {
                write!(f, "{sign}{mag}*{name}")?;
            }
            first = false;
        }
        if !self.pi.is_zero() {
            if !first {
                f.write_str("+")?;
            }
            write!(f, "{}/{}pi", self.pi.numer(), self.pi.denom())?;
        }
        Ok(())
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Parses one signed term: `0`, `pi`, `n/dpi`, `npi`, `n/d*pi`, `name`, `k*name`.
fn parse_term(t: &str, whole: &str) -> Result<PhaseExpr, PhaseError> {
    let bad = || PhaseError::Malformed(whole.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some(body) = t.strip_suffix("pi") {
        let body = body.strip_suffix('*').unwrap_or(body);
        if body.is_empty() {
            return Ok(PhaseExpr::pi());
        }
        let (n, d) = match body.split_once('/') {
            Some((n, d)) => (n, d),
            None => (body, "1"),
        };
        let n: i64 = n.parse().map_err(|_| bad())?;
        let d: i64 = d.parse().map_err(|_| bad())?;
        return PhaseExpr::from_pi_ratio(n, d);
    }
    if t.chars().all(|c| c.is_ascii_digit()) {
        let n: i64 = t.parse().map_err(|_| bad())?;
        if n == 0 {
            return Ok(PhaseExpr::zero());
        }
        return Err(bad());
    }
    let (k, name) = match t.split_once('*') {
        Some((k, name)) => (k.parse::<i64>().map_err(|_| bad())?, name),
        None => (1, t),
    };
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if is_ident_start(c) && chars.all(is_ident_char) => {}
        _ => return Err(bad()),
    }
    if name == "pi" {
        return Err(bad());
    }
    Ok(PhaseExpr::symbol(name).scaled(k))
}

impl FromStr for PhaseExpr {
    type Err = PhaseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(PhaseError::Malformed(s.to_string()));
        }
        let mut acc = PhaseExpr::zero();
        let mut start = 0;
        let bytes: Vec<char> = s.chars().collect();
        let mut sign = 1i64;
        let mut i = 0;
        if bytes[0] == '-' || bytes[0] == '+' {
            sign = if bytes[0] == '-' { -1 } else { 1 };
            i = 1;
            start = 1;
        }
        while i <= bytes.len() {
            if i == bytes.len() || ((bytes[i] == '+' || bytes[i] == '-') && i > start) {
                let term: String = bytes[start..i].iter().collect();
                acc = acc + parse_term(&term, s)?.scaled(sign);
                if i < bytes.len() {
                    sign = if bytes[i] == '-' { -1 } else { 1 };
                }
                start = i + 1;
            }
            i += 1;
        }
        Ok(acc)
    }
}

/// JSON form: `{"pi": [num, den], "sym": [["a", coeff], ...]}`.
#[derive(Serialize, Deserialize)]
struct PhaseJson {
    pi: [i64; 2],
    sym: Vec<(String, i64)>,
}

impl Serialize for PhaseExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PhaseJson {
            pi: [*self.pi.numer(), *self.pi.denom()],
            sym: self.sym.iter().map(|(k, v)| (k.clone(), *v)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PhaseExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PhaseJson::deserialize(d)?;
        if j.pi[1] == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        let mut p = PhaseExpr::from_pi(Rational64::new(j.pi[0], j.pi[1]));
        for (name, c) in j.sym {
            p = p + PhaseExpr::symbol(name).scaled(c);
        }
        Ok(p)
    }
}

/// Real radian values for symbolic angle variables.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AngleAssignment(BTreeMap<String, f64>);

impl AngleAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, value: f64) -> Self {
        self.0.insert(name.into(), value);
        self
    }

    pub fn insert(&mut self, name: impl Into<String>, value: f64) {
        self.0.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<&f64> {
        self.0.get(name)
    }

    /// Assigns every symbol in `names` a value derived from `probe`; the
    /// k-th symbol (in order) gets `probe + 0.37·k` so distinct symbols stay
    /// numerically distinct.
    pub fn from_probe<'a>(names: impl IntoIterator<Item = &'a str>, probe: f64) -> Self {
        let mut a = AngleAssignment::new();
        for (k, n) in names.into_iter().enumerate() {
            a.insert(n, probe + 0.37 * k as f64);
        }
        a
    }
}

impl FromIterator<(String, f64)> for AngleAssignment {
    fn from_iter<T: IntoIterator<Item = (String, f64)>>(iter: T) -> Self {
        AngleAssignment(iter.into_iter().collect())
    }
}

/// The default numeric probes for symbolic angles.
pub const DEFAULT_PROBES: [f64; 3] = [std::f64::consts::FRAC_PI_3, 1.0, 2.41];

impl PhaseExpr {
    /// π part in `[0, 2)` and no zero coefficients.
    pub fn is_normalized(&self) -> bool {
        !self.pi.is_negative()
            && self.pi < Rational64::from_integer(2)
            && self.sym.values().all(|c| *c != 0)
    }
}
