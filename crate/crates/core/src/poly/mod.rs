//! Sparse multivariate polynomials with `f64` coefficients.
//!
//! Terms are kept in graded-lex order (total degree first, then `x1 > x2 > ...`).
//! Exact zero coefficients are never stored.

mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::ParsePolyError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("variable count mismatch: {0} vs {1}")]
    VarCountMismatch(usize, usize),
}

/// Exponent vector of a monomial.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .filter(|(e, _)| **e > 0)
            .map(|(e, v)| v.powi(*e as i32))
            .product()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials in `nvars` variables with total degree at most `max_degree`,
/// in graded-lex order.
pub fn monomials_up_to(nvars: usize, max_degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 0..=max_degree {
        let mut cur = vec![0u32; nvars];
        fill_degree(&mut out, &mut cur, 0, d);
    }
    out
}

fn fill_degree(out: &mut Vec<Monomial>, cur: &mut Vec<u32>, idx: usize, remaining: u32) {
    if cur.is_empty() {
        if remaining == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    if idx == cur.len() - 1 {
        cur[idx] = remaining;
        out.push(Monomial(cur.clone()));
        cur[idx] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        cur[idx] = e;
        fill_degree(out, cur, idx + 1, remaining - e);
    }
    cur[idx] = 0;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    nvars: usize,
    #[serde(with = "term_list")]
    terms: BTreeMap<Monomial, f64>,
}

/// Terms as `[exponents, coefficient]` pairs, so the map survives formats
/// with string-only keys.
mod term_list {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::Monomial;

    pub fn serialize<S: Serializer>(t: &BTreeMap<Monomial, f64>, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<(&Monomial, &f64)> = t.iter().collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Monomial, f64>, D::Error> {
        let v: Vec<(Monomial, f64)> = Vec::deserialize(d)?;
        Ok(v.into_iter().filter(|(_, c)| *c != 0.0).collect())
    }
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    /// The coordinate polynomial `x_{i+1}`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(nvars, i), 1.0);
        p
    }

    pub fn monomial(m: Monomial, c: f64) -> Self {
        let mut p = Self::zero(m.nvars());
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, f64)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial variable count");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coeff(&Monomial::one(self.nvars))
    }

    pub fn add_term(&mut self, m: Monomial, c: f64) {
        if c == 0.0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |a, c| a.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        if s == 0.0 {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    fn check(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            Err(PolyError::VarCountMismatch(self.nvars, other.nvars))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -*c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check(other)?;
        let mut acc: BTreeMap<Monomial, f64> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                *acc.entry(m1.mul(m2)).or_insert(0.0) += c1 * c2;
            }
        }
        acc.retain(|_, c| *c != 0.0);
        Ok(Polynomial {
            nvars: self.nvars,
            terms: acc,
        })
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::constant(self.nvars, 1.0);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nvars, "point dimension");
        let max_deg = self.degree() as usize;
        // powers[i][k] = x_i^k
        let powers: Vec<Vec<f64>> = x
            .iter()
            .map(|&v| {
                let mut p = Vec::with_capacity(max_deg + 1);
                let mut acc = 1.0;
                for _ in 0..=max_deg {
                    p.push(acc);
                    acc *= v;
                }
                p
            })
            .collect();
        self.terms
            .iter()
            .map(|(m, c)| {
                c * m
                    .0
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| powers[i][e as usize])
                    .product::<f64>()
            })
            .sum()
    }

    /// Partial derivative with respect to variable `i` (0-based).
    pub fn partial(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.add_term(Monomial(exps), c * e as f64);
        }
        out
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    /// `sum_i dB/dx_i * f_i`.
    pub fn lie_derivative(&self, field: &VectorField) -> Result<Polynomial, PolyError> {
        if field.dim() != self.nvars {
            return Err(PolyError::VarCountMismatch(self.nvars, field.dim()));
        }
        let mut out = Polynomial::zero(self.nvars);
        for (i, fi) in field.components().iter().enumerate() {
            let d = self.partial(i);
            if d.is_zero() {
                continue;
            }
            out = &out + &(&d * fi);
        }
        Ok(out)
    }

    /// Substitutes `x = center + scale * z` and returns the polynomial in `z`.
    pub fn compose_affine(&self, center: &[f64], scale: f64) -> Polynomial {
        let n = self.nvars;
        let subs: Vec<Polynomial> = (0..n)
            .map(|i| &Polynomial::constant(n, center[i]) + &Polynomial::var(n, i).scale(scale))
            .collect();
        let mut out = Polynomial::zero(n);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(n, *c);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = &term * &subs[i].pow(e);
                }
            }
            out = &out + &term;
        }
        out
    }

    /// Drops coefficients whose magnitude is at most `tol * max|c|`.
    pub fn pruned(&self, tol: f64) -> Polynomial {
        let cutoff = tol * self.max_abs_coeff();
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.abs() > cutoff)
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        }
    }

    /// Coefficient-wise comparison with absolute tolerance `tol` scaled by the
    /// larger coefficient magnitude (at least 1).
    pub fn approx_eq(&self, other: &Polynomial, tol: f64) -> bool {
        if self.nvars != other.nvars {
            return false;
        }
        let scale = self.max_abs_coeff().max(other.max_abs_coeff()).max(1.0);
        let diff = self - other;
        diff.max_abs_coeff() <= tol * scale
    }

    pub fn parse(text: &str, var_names: &[String]) -> Result<Polynomial, ParsePolyError> {
        parse::parse_polynomial(text, var_names)
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let is_const = m.degree() == 0;
            let mag = c.abs();
            if idx == 0 {
                if *c < 0.0 {
                    s.push('-');
                }
            } else if *c < 0.0 {
                s.push_str(" - ");
            } else {
                s.push_str(" + ");
            }
            let mut parts: Vec<String> = Vec::new();
            if is_const || mag != 1.0 {
                parts.push(format!("{}", mag));
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(names[i].clone()),
                    _ => parts.push(format!("{}^{}", names[i], e)),
                }
            }
            s.push_str(&parts.join("*"));
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

pub fn default_var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&default_var_names(self.nvars)))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("polynomial add")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("polynomial sub")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("polynomial mul")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

/// Polynomial vector field `x' = f(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    components: Vec<Polynomial>,
}

impl VectorField {
    pub fn new(components: Vec<Polynomial>) -> Result<Self, PolyError> {
        let n = components.len();
        for c in &components {
            if c.nvars() != n {
                return Err(PolyError::VarCountMismatch(n, c.nvars()));
            }
        }
        Ok(VectorField { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn max_degree(&self) -> u32 {
        self.components.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    pub fn evaluate_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.evaluate(x);
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.evaluate_into(x, &mut out);
        out
    }

    /// Field in coordinates `z` with `x = center + scale * z`: `z' = f(center + scale z) / scale`.
    pub fn compose_affine(&self, center: &[f64], scale: f64) -> VectorField {
        VectorField {
            components: self
                .components
                .iter()
                .map(|c| c.compose_affine(center, scale).scale(1.0 / scale))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        default_var_names(2)
    }

    #[test]
    fn square_of_sum_expands() {
        let p = Polynomial::parse("(x1 + x2)^2", &names()).unwrap();
        let q = Polynomial::parse("x1^2 + 2*x1*x2 + x2^2", &names()).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.num_terms(), 3);
    }

    #[test]
    fn evaluate_sum_of_squares() {
        let p = Polynomial::parse("x1^2 + x2^2", &names()).unwrap();
        assert_eq!(p.evaluate(&[3.0, 4.0]), 25.0);
    }

    #[test]
    fn graded_lex_order() {
        let basis = monomials_up_to(2, 2);
        let shown: Vec<String> = basis
            .iter()
            .map(|m| Polynomial::monomial(m.clone(), 1.0).to_string())
            .collect();
        assert_eq!(shown, ["1", "x1", "x2", "x1^2", "x1*x2", "x2^2"]);
        assert_eq!(monomials_up_to(3, 4).len(), 35);
    }

    #[test]
    fn lie_derivative_of_coordinate() {
        let n = names();
        let f = VectorField::new(vec![
            Polynomial::parse("x2", &n).unwrap(),
            Polynomial::parse("-x1 + x1^3/3 - x2", &n).unwrap(),
        ])
        .unwrap();
        let b = Polynomial::var(2, 0);
        assert_eq!(b.lie_derivative(&f).unwrap(), Polynomial::var(2, 1));
        let r2 = Polynomial::parse("x1^2 + x2^2", &n).unwrap();
        let expected = Polynomial::parse("2/3*x1^3*x2 - 2*x2^2", &n).unwrap();
        assert!(r2.lie_derivative(&f).unwrap().approx_eq(&expected, 1e-12));
        let c = Polynomial::constant(2, 4.0);
        assert!(c.lie_derivative(&f).unwrap().is_zero());
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = Polynomial::var(2, 0);
        let b = Polynomial::var(3, 0);
        assert_eq!(a.try_add(&b), Err(PolyError::VarCountMismatch(2, 3)));
        let f = VectorField::new(vec![Polynomial::var(3, 0); 3]).unwrap();
        assert!(a.lie_derivative(&f).is_err());
        assert!(VectorField::new(vec![Polynomial::var(2, 0)]).is_err());
    }

    #[test]
    fn cancellation_removes_terms() {
        let a = Polynomial::parse("x1 + x2", &names()).unwrap();
        let b = Polynomial::parse("x1", &names()).unwrap();
        let d = &a - &b;
        assert_eq!(d, Polynomial::var(2, 1));
        assert!((&d - &d).is_zero());
    }

    #[test]
    fn affine_composition() {
        let p = Polynomial::parse("x1^2 + x2", &names()).unwrap();
        let q = p.compose_affine(&[1.0, -2.0], 3.0);
        for z in [[0.1, 0.2], [-0.7, 0.4]] {
            let x = [1.0 + 3.0 * z[0], -2.0 + 3.0 * z[1]];
            assert!((q.evaluate(&z) - p.evaluate(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn display_round_trips() {
        let p = Polynomial::parse("-x1 + 0.3333333333*x1^3 - x2", &names()).unwrap();
        assert_eq!(p.to_string(), "-x1 - x2 + 0.3333333333*x1^3");
        assert_eq!(Polynomial::parse(&p.to_string(), &names()).unwrap(), p);
        assert_eq!(Polynomial::zero(2).to_string(), "0");
    }

    #[test]
    fn json_round_trip() {
        let p = Polynomial::parse("2*x1^2*x2 - 0.5", &names()).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Polynomial>(&text).unwrap(), p);
    }
}
