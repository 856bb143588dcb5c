//! Polynomials with affine coefficients in Gram-matrix entries, and the
//! coefficient matching that turns SOS constraints into an SDP.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::poly::{monomials_up_to, Monomial, Polynomial};
use crate::sdp::{BlockSpec, Entry, SdpProblem, SdpSolution};

/// Affine expression `constant + sum coeff * var`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinExpr {
    pub constant: f64,
    pub terms: BTreeMap<usize, f64>,
}

impl LinExpr {
    fn add_scaled(&mut self, other: &LinExpr, s: f64) {
        self.constant += s * other.constant;
        for (&v, &c) in &other.terms {
            *self.terms.entry(v).or_insert(0.0) += s * c;
        }
    }

    fn is_zero(&self) -> bool {
        self.constant == 0.0 && self.terms.values().all(|&c| c == 0.0)
    }
}

/// Polynomial whose coefficients are affine in the decision variables.
#[derive(Clone, Debug, PartialEq)]
pub struct LinPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, LinExpr>,
}

impl LinPoly {
    pub fn zero(nvars: usize) -> Self {
        LinPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_poly(p: &Polynomial) -> Self {
        let mut out = LinPoly::zero(p.nvars());
        for (m, c) in p.terms() {
            out.terms.insert(
                m.clone(),
                LinExpr {
                    constant: c,
                    terms: BTreeMap::new(),
                },
            );
        }
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .filter(|(_, e)| !e.is_zero())
            .map(|(m, _)| m.degree())
            .max()
            .unwrap_or(0)
    }

    fn add_expr(&mut self, m: Monomial, e: &LinExpr, s: f64) {
        self.terms
            .entry(m)
            .or_default()
            .add_scaled(e, s);
    }

    /// `self + s * other`.
    pub fn add_scaled(&mut self, other: &LinPoly, s: f64) {
        for (m, e) in &other.terms {
            self.add_expr(m.clone(), e, s);
        }
    }

    pub fn scaled(&self, s: f64) -> LinPoly {
        let mut out = LinPoly::zero(self.nvars);
        out.add_scaled(self, s);
        out
    }

    pub fn mul_poly(&self, p: &Polynomial) -> LinPoly {
        let mut out = LinPoly::zero(self.nvars);
        for (m, e) in &self.terms {
            for (pm, pc) in p.terms() {
                out.add_expr(m.mul(pm), e, pc);
            }
        }
        out
    }

    pub fn partial(&self, i: usize) -> LinPoly {
        let mut out = LinPoly::zero(self.nvars);
        for (m, e) in &self.terms {
            let k = m.exponents()[i];
            if k == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[i] -= 1;
            out.add_expr(Monomial::from_exponents(exps), e, k as f64);
        }
        out
    }

    pub fn lie_derivative(&self, f: &crate::poly::VectorField) -> LinPoly {
        let mut out = LinPoly::zero(self.nvars);
        for (i, fi) in f.components().iter().enumerate() {
            out.add_scaled(&self.partial(i).mul_poly(fi), 1.0);
        }
        out
    }

    /// Substitutes variable values.
    pub fn evaluate(&self, vars: &[f64]) -> Polynomial {
        Polynomial::from_terms(
            self.nvars,
            self.terms.iter().map(|(m, e)| {
                let v = e.constant + e.terms.iter().map(|(&k, &c)| c * vars[k]).sum::<f64>();
                (m.clone(), v)
            }),
        )
    }
}

/// `m(x)' Q m(x)` for a monomial basis `m` and Gram matrix `Q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramPoly {
    pub nvars: usize,
    pub basis: Vec<Vec<u32>>,
    pub gram: Vec<Vec<f64>>,
}

impl GramPoly {
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.basis.len();
        DMatrix::from_fn(n, n, |i, j| self.gram[i][j])
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let mut p = Polynomial::zero(self.nvars);
        for (i, bi) in self.basis.iter().enumerate() {
            for (j, bj) in self.basis.iter().enumerate() {
                let m = Monomial::from_exponents(bi.clone())
                    .mul(&Monomial::from_exponents(bj.clone()));
                p.add_term(m, self.gram[i][j]);
            }
        }
        p
    }

    pub fn min_eigenvalue(&self) -> f64 {
        if self.basis.is_empty() {
            return f64::INFINITY;
        }
        crate::sdp::min_eigenvalue(&[self.matrix()])
    }
}

#[derive(Clone, Debug)]
struct GramBlock {
    basis: Vec<Monomial>,
    /// first variable id of the block's upper triangle, row-major
    first_var: usize,
    /// `Q = V P V'` with `P` the SDP block, when the Gram matrix is
    /// restricted to a subspace
    reduction: Option<DMatrix<f64>>,
}

impl GramBlock {
    fn size(&self) -> usize {
        self.reduction
            .as_ref()
            .map_or(self.basis.len(), |v| v.ncols())
    }
}

/// Orthonormal basis of the vectors orthogonal to the basis evaluated at
/// every point.
fn kernel_basis(basis: &[Monomial], points: &[Vec<f64>]) -> DMatrix<f64> {
    let n = basis.len();
    let z = DMatrix::from_fn(n, points.len(), |i, k| basis[i].evaluate(&points[k]));
    let zzt = &z * z.transpose();
    let eig = zzt.symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let keep: Vec<usize> = (0..n)
        .filter(|&i| eig.eigenvalues[i] <= 1e-10 * top.max(1.0))
        .collect();
    DMatrix::from_fn(n, keep.len(), |i, k| eig.eigenvectors[(i, keep[k])])
}

/// Accumulates Gram blocks and polynomial identities, then compiles them.
#[derive(Clone, Debug)]
pub struct SosBuilder {
    nvars: usize,
    blocks: Vec<GramBlock>,
    /// (block, row, col) of each variable
    vars: Vec<(usize, usize, usize)>,
    zero: Vec<LinPoly>,
}

impl SosBuilder {
    pub fn new(nvars: usize) -> Self {
        SosBuilder {
            nvars,
            blocks: Vec::new(),
            vars: Vec::new(),
            zero: Vec::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// A fresh SOS polynomial of degree at most `2 * half_degree`.
    pub fn sos_poly(&mut self, half_degree: u32) -> (usize, LinPoly) {
        let basis = monomials_up_to(self.nvars, half_degree);
        self.push_block(basis, None)
    }

    /// SOS polynomial vanishing at every point of `zeros`, or `None` when
    /// only the zero polynomial does.
    pub fn sos_poly_vanishing(
        &mut self,
        half_degree: u32,
        zeros: &[Vec<f64>],
    ) -> Option<(usize, LinPoly)> {
        let basis = monomials_up_to(self.nvars, half_degree);
        if zeros.is_empty() {
            return Some(self.push_block(basis, None));
        }
        let v = kernel_basis(&basis, zeros);
        if v.ncols() == 0 {
            return None;
        }
        Some(self.push_block(basis, Some(v)))
    }

    fn push_block(&mut self, basis: Vec<Monomial>, reduction: Option<DMatrix<f64>>) -> (usize, LinPoly) {
        let blk = self.blocks.len();
        let first_var = self.vars.len();
        let block = GramBlock {
            basis,
            first_var,
            reduction,
        };
        let n = block.size();
        // the polynomials multiplying each diagonal or off-diagonal entry
        let factors: Vec<Polynomial> = match &block.reduction {
            None => block
                .basis
                .iter()
                .map(|m| Polynomial::monomial(m.clone(), 1.0))
                .collect(),
            Some(v) => (0..n)
                .map(|a| {
                    Polynomial::from_terms(
                        self.nvars,
                        block.basis.iter().enumerate().map(|(i, m)| (m.clone(), v[(i, a)])),
                    )
                })
                .collect(),
        };
        let mut poly = LinPoly::zero(self.nvars);
        for i in 0..n {
            for j in i..n {
                let v = self.vars.len();
                self.vars.push((blk, i, j));
                let coeff = if i == j { 1.0 } else { 2.0 };
                let mut e = LinExpr::default();
                e.terms.insert(v, coeff);
                for (m, c) in (&factors[i] * &factors[j]).terms() {
                    poly.add_expr(m.clone(), &e, c);
                }
            }
        }
        self.blocks.push(block);
        (blk, poly)
    }

    /// SOS multiplier of degree at most `degree`, rounded down to even.
    pub fn multiplier(&mut self, degree: u32) -> (usize, LinPoly) {
        self.sos_poly(degree / 2)
    }

    /// Requires `expr` to be SOS; returns the Gram block used.
    pub fn require_sos(&mut self, expr: &LinPoly) -> usize {
        let half = expr.degree().div_ceil(2);
        let (blk, sigma) = self.sos_poly(half);
        let mut diff = expr.clone();
        diff.add_scaled(&sigma, -1.0);
        self.zero.push(diff);
        blk
    }

    /// Requires `expr` to be SOS with a Gram matrix that vanishes on the
    /// basis at every point of `zeros`. `None` when `expr` must be zero.
    pub fn require_sos_vanishing(&mut self, expr: &LinPoly, zeros: &[Vec<f64>]) -> Option<usize> {
        let half = expr.degree().div_ceil(2);
        let mut diff = expr.clone();
        let blk = match self.sos_poly_vanishing(half, zeros) {
            Some((blk, sigma)) => {
                diff.add_scaled(&sigma, -1.0);
                Some(blk)
            }
            None => None,
        };
        self.zero.push(diff);
        blk
    }

    pub fn require_zero(&mut self, expr: LinPoly) {
        self.zero.push(expr);
    }

    pub fn compile(&self) -> SdpProblem {
        let mut p = SdpProblem::new(
            self.blocks
                .iter()
                .map(|b| BlockSpec::dense(b.size()))
                .collect(),
        );
        for z in &self.zero {
            for e in z.terms.values() {
                let entries: Vec<Entry> = e
                    .terms
                    .iter()
                    .filter(|(_, &c)| c != 0.0)
                    .map(|(&v, &c)| {
                        let (blk, i, j) = self.vars[v];
                        Entry::new(blk, i, j, if i == j { c } else { c / 2.0 })
                    })
                    .collect();
                if entries.is_empty() && e.constant == 0.0 {
                    continue;
                }
                p.add_constraint(entries, -e.constant);
            }
        }
        p
    }

    /// Variable values read from solved Gram blocks.
    pub fn values(&self, sol: &SdpSolution) -> Vec<f64> {
        self.vars
            .iter()
            .map(|&(b, i, j)| sol.blocks[b][(i, j)])
            .collect()
    }

    /// Gram polynomial of a block, expanded to the full monomial basis.
    pub fn gram(&self, blk: usize, sol: &SdpSolution) -> GramPoly {
        let b = &self.blocks[blk];
        let m = &sol.blocks[blk];
        debug_assert_eq!(self.vars[b.first_var], (blk, 0, 0));
        let p = 0.5 * (m + m.transpose());
        let q = match &b.reduction {
            None => p,
            Some(v) => v * p * v.transpose(),
        };
        let n = b.basis.len();
        GramPoly {
            nvars: self.nvars,
            basis: b.basis.iter().map(|m| m.exponents().to_vec()).collect(),
            gram: (0..n).map(|i| (0..n).map(|j| q[(i, j)]).collect()).collect(),
        }
    }

    /// Gram polynomial for an optional block; the zero polynomial for `None`.
    pub fn gram_or_zero(&self, blk: Option<usize>, sol: &SdpSolution) -> GramPoly {
        match blk {
            Some(b) => self.gram(b, sol),
            None => GramPoly {
                nvars: self.nvars,
                basis: Vec::new(),
                gram: Vec::new(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::{solve, SdpOptions, SdpStatus};

    fn x_poly(text: &str, n: usize) -> Polynomial {
        Polynomial::parse(text, &crate::poly::default_var_names(n)).unwrap()
    }

    #[test]
    fn x2_plus_1_is_sos() {
        let mut b = SosBuilder::new(1);
        let blk = b.require_sos(&LinPoly::from_poly(&x_poly("x1^2 + 1", 1)));
        let sol = solve(&b.compile(), &SdpOptions::default()).unwrap();
        assert!(sol.is_feasible());
        let g = b.gram(blk, &sol);
        assert_eq!(g.basis.len(), 2);
        assert!(g.to_polynomial().approx_eq(&x_poly("x1^2 + 1", 1), 1e-7));
        assert!((g.gram[0][0] - 1.0).abs() < 1e-6 && (g.gram[1][1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn odd_polynomial_is_not_sos() {
        let mut b = SosBuilder::new(1);
        b.require_sos(&LinPoly::from_poly(&x_poly("x1", 1)));
        let sol = solve(&b.compile(), &SdpOptions::default()).unwrap();
        assert!(matches!(sol.status, SdpStatus::Infeasible { .. }), "{:?}", sol.status);
    }

    #[test]
    fn motzkin_is_not_sos() {
        let mut b = SosBuilder::new(2);
        let m = x_poly("x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2 + 1", 2);
        b.require_sos(&LinPoly::from_poly(&m));
        let sol = solve(&b.compile(), &SdpOptions::default()).unwrap();
        assert!(matches!(sol.status, SdpStatus::Infeasible { .. }), "{:?}", sol.status);
        assert!(sol.margin.unwrap() < -1e-9);
    }

    #[test]
    fn multiplier_products_and_lie_derivative() {
        let f = crate::poly::VectorField::new(vec![x_poly("x2", 2), x_poly("-x1", 2)]).unwrap();
        let b = LinPoly::from_poly(&x_poly("x1^2 + x2^2", 2));
        assert!(b.lie_derivative(&f).evaluate(&[]).is_zero());
        let g = x_poly("1 - x1", 2);
        let prod = b.mul_poly(&g).evaluate(&[]);
        assert!(prod.approx_eq(&(&x_poly("x1^2 + x2^2", 2) * &g), 1e-12));
    }

    #[test]
    fn vanishing_gram_block() {
        // (x1 - 1)^2 vanishes at 1, x1^2 + 1 does not
        let mut b = SosBuilder::new(1);
        let blk = b
            .require_sos_vanishing(&LinPoly::from_poly(&x_poly("x1^2 - 2*x1 + 1", 1)), &[vec![1.0]])
            .unwrap();
        let sol = solve(&b.compile(), &SdpOptions::default()).unwrap();
        assert!(sol.is_feasible());
        let g = b.gram(blk, &sol);
        assert!(g.to_polynomial().approx_eq(&x_poly("x1^2 - 2*x1 + 1", 1), 1e-7));
        let mut b = SosBuilder::new(1);
        b.require_sos_vanishing(&LinPoly::from_poly(&x_poly("x1^2 + 1", 1)), &[vec![1.0]]);
        let sol = solve(&b.compile(), &SdpOptions::default()).unwrap();
        assert!(!sol.is_feasible());
        let mut b = SosBuilder::new(1);
        assert!(b.sos_poly_vanishing(0, &[vec![0.5]]).is_none());
    }
}
