//! Closed semialgebraic regions: finite unions of sets `{x : g_i(x) >= 0}`.

mod disjoint;
mod letters;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{Monomial, Polynomial};

pub use disjoint::{
    closures_disjoint, is_empty, DisjointOptions, Disjointness, DisjointnessCert, Emptiness,
    PsatzCertificate,
};
pub use letters::PropositionRegions;

/// Membership tolerance on `g_i(x) >= 0`.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("a basic region needs at least one inequality")]
    NoInequalities,
    #[error("inequalities have different variable counts")]
    VarCountMismatch,
    #[error("unknown proposition '{0}'")]
    UnknownProposition(String),
}

/// Euclidean ball, closed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn distance_to(&self, other: &Ball) -> f64 {
        self.center
            .iter()
            .zip(&other.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// How a quadratic inequality `g >= 0` relates to a ball.
#[derive(Clone, Debug, PartialEq)]
pub enum BallForm {
    /// `g >= 0` is the ball.
    Inside(Ball),
    /// `g >= 0` is the closed exterior of the open ball.
    Outside(Ball),
}

/// Recognizes `g = a (r^2 - |x - c|^2)` with `a != 0`.
pub fn ball_form(g: &Polynomial) -> Option<BallForm> {
    if g.degree() != 2 {
        return None;
    }
    let n = g.nvars();
    let sq = |i: usize| {
        let mut e = vec![0; n];
        e[i] = 2;
        Monomial::from_exponents(e)
    };
    let a = -g.coeff(&sq(0));
    if a == 0.0 {
        return None;
    }
    let mut center = vec![0.0; n];
    for i in 0..n {
        if (-g.coeff(&sq(i)) - a).abs() > 1e-12 * a.abs() {
            return None;
        }
        // linear coefficient of x_i is 2 a c_i
        center[i] = g.coeff(&Monomial::var(n, i)) / (2.0 * a);
    }
    for (m, _) in g.terms() {
        let d = m.degree();
        if d == 2 && !m.exponents().contains(&2) {
            return None;
        }
    }
    let c2: f64 = center.iter().map(|c| c * c).sum();
    let r2 = g.constant_term() / a + c2;
    if !(r2 > 0.0) {
        return None;
    }
    let ball = Ball {
        center,
        radius: r2.sqrt(),
    };
    Some(if a > 0.0 {
        BallForm::Inside(ball)
    } else {
        BallForm::Outside(ball)
    })
}

/// `{x : g_i(x) >= 0 for all i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasicRegion {
    ineqs: Vec<Polynomial>,
}

impl BasicRegion {
    pub fn new(ineqs: Vec<Polynomial>) -> Result<Self, RegionError> {
        let first = ineqs.first().ok_or(RegionError::NoInequalities)?;
        if ineqs.iter().any(|g| g.nvars() != first.nvars()) {
            return Err(RegionError::VarCountMismatch);
        }
        Ok(BasicRegion { ineqs })
    }

    pub fn ineqs(&self) -> &[Polynomial] {
        &self.ineqs
    }

    pub fn nvars(&self) -> usize {
        self.ineqs[0].nvars()
    }

    /// `min_i g_i(x)`; nonnegative exactly on the region.
    pub fn depth(&self, x: &[f64]) -> f64 {
        self.ineqs
            .iter()
            .map(|g| g.evaluate(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.ineqs.iter().all(|g| g.evaluate(x) >= -tol)
    }

    /// The region itself when it is a single ball.
    pub fn ball(&self) -> Option<Ball> {
        match self.ineqs.as_slice() {
            [g] => match ball_form(g)? {
                BallForm::Inside(b) => Some(b),
                BallForm::Outside(_) => None,
            },
            _ => None,
        }
    }

    /// Smallest ball among the defining inequalities, if any.
    pub fn enclosing_ball(&self) -> Option<Ball> {
        self.ineqs
            .iter()
            .filter_map(|g| match ball_form(g)? {
                BallForm::Inside(b) => Some(b),
                BallForm::Outside(_) => None,
            })
            .min_by(|a, b| a.radius.total_cmp(&b.radius))
    }

    /// Sufficient test for `self ⊆ other`, exact for ball arrangements.
    pub fn is_subset_of(&self, other: &BasicRegion) -> bool {
        let own = self.enclosing_ball();
        other.ineqs.iter().all(|h| {
            if self.ineqs.iter().any(|g| same_inequality(g, h)) {
                return true;
            }
            let Some(b) = &own else {
                return false;
            };
            match ball_form(h) {
                Some(BallForm::Inside(hb)) => b.distance_to(&hb) + b.radius <= hb.radius,
                Some(BallForm::Outside(hb)) => b.distance_to(&hb) >= b.radius + hb.radius,
                None => false,
            }
        })
    }

    /// Rejection sample of up to `n` points from the region.
    pub fn sample<R: Rng>(&self, n: usize, bounds: &Bounds, rng: &mut R) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(n);
        let max_tries = n.saturating_mul(1000).max(10_000);
        for _ in 0..max_tries {
            if out.len() >= n {
                break;
            }
            let x = bounds.sample(rng);
            if self.contains(&x, 0.0) {
                out.push(x);
            }
        }
        out
    }

    fn canonical(&self) -> Vec<String> {
        let mut v: Vec<String> = self.ineqs.iter().map(canonical_poly).collect();
        v.sort();
        v.dedup();
        v
    }
}

fn canonical_poly(g: &Polynomial) -> String {
    let s = g.max_abs_coeff();
    let scale = if s > 0.0 { 1.0 / s } else { 1.0 };
    let mut parts = Vec::new();
    for (m, c) in g.terms() {
        parts.push(format!("{:?}:{:.12e}", m.exponents(), c * scale));
    }
    parts.join(" ")
}

fn same_inequality(g: &Polynomial, h: &Polynomial) -> bool {
    canonical_poly(g) == canonical_poly(h)
}

/// Axis-aligned box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Bounds {
    pub fn of_ball(b: &Ball) -> Bounds {
        Bounds {
            lo: b.center.iter().map(|c| c - b.radius).collect(),
            hi: b.center.iter().map(|c| c + b.radius).collect(),
        }
    }

    pub fn hull(&self, other: &Bounds) -> Bounds {
        Bounds {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    pub fn intersect(&self, other: &Bounds) -> Bounds {
        Bounds {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l > h)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| if h > l { rng.gen_range(l..=h) } else { l })
            .collect()
    }
}

/// Finite union of basic regions; the empty list is the empty set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    nvars: usize,
    parts: Vec<BasicRegion>,
}

impl Region {
    pub fn empty(nvars: usize) -> Self {
        Region {
            nvars,
            parts: Vec::new(),
        }
    }

    pub fn basic(b: BasicRegion) -> Self {
        Region {
            nvars: b.nvars(),
            parts: vec![b],
        }
    }

    pub fn from_ineqs(ineqs: Vec<Polynomial>) -> Result<Self, RegionError> {
        Ok(Region::basic(BasicRegion::new(ineqs)?))
    }

    pub fn from_parts(nvars: usize, parts: Vec<BasicRegion>) -> Result<Self, RegionError> {
        if parts.iter().any(|p| p.nvars() != nvars) {
            return Err(RegionError::VarCountMismatch);
        }
        Ok(Region { nvars, parts })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn parts(&self) -> &[BasicRegion] {
        &self.parts
    }

    pub fn is_trivially_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn union(&self, other: &Region) -> Region {
        let mut parts = self.parts.clone();
        for p in &other.parts {
            if !parts.contains(p) {
                parts.push(p.clone());
            }
        }
        Region {
            nvars: self.nvars,
            parts,
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.parts.iter().any(|p| p.contains(x, tol))
    }

    /// Drops parts contained in another part (sufficient test only).
    pub fn simplified(&self) -> Region {
        let mut keep: Vec<BasicRegion> = Vec::new();
        for (i, p) in self.parts.iter().enumerate() {
            let covered = self.parts.iter().enumerate().any(|(j, q)| {
                j != i && p.is_subset_of(q) && (!q.is_subset_of(p) || j < i)
            });
            if !covered {
                keep.push(p.clone());
            }
        }
        Region {
            nvars: self.nvars,
            parts: keep,
        }
    }

    /// Bounding box of the parts that have a ball inequality; `None` if any
    /// part is unbounded as far as this test can tell.
    pub fn bounds(&self) -> Option<Bounds> {
        let mut out: Option<Bounds> = None;
        for p in &self.parts {
            let b = Bounds::of_ball(&p.enclosing_ball()?);
            out = Some(match out {
                Some(o) => o.hull(&b),
                None => b,
            });
        }
        out
    }

    /// Ball containing the region, from ball inequalities of its parts.
    pub fn enclosing_ball(&self) -> Option<Ball> {
        let balls: Vec<Ball> = self
            .parts
            .iter()
            .map(|p| p.enclosing_ball())
            .collect::<Option<_>>()?;
        if balls.len() == 1 {
            return balls.into_iter().next();
        }
        let b = self.bounds()?;
        let center = b.center();
        let radius = balls
            .iter()
            .map(|bl| {
                bl.radius
                    + bl.center
                        .iter()
                        .zip(&center)
                        .map(|(a, c)| (a - c) * (a - c))
                        .sum::<f64>()
                        .sqrt()
            })
            .fold(0.0, f64::max);
        Some(Ball { center, radius })
    }

    /// Order-independent key; equal keys denote identical descriptions.
    pub fn canonical_key(&self) -> String {
        let mut parts: Vec<String> = self
            .parts
            .iter()
            .map(|p| format!("{{{}}}", p.canonical().join(" & ")))
            .collect();
        parts.sort();
        parts.dedup();
        parts.join(" | ")
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.parts.is_empty() {
            return "empty".into();
        }
        self.parts
            .iter()
            .map(|p| {
                let gs: Vec<String> = p
                    .ineqs
                    .iter()
                    .map(|g| format!("{} >= 0", g.to_string_with(names)))
                    .collect();
                format!("{{{}}}", gs.join(", "))
            })
            .collect::<Vec<_>>()
            .join(" ∪ ")
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&crate::poly::default_var_names(self.nvars)))
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::poly::default_var_names;

    pub fn poly(text: &str) -> Polynomial {
        Polynomial::parse(text, &default_var_names(2)).unwrap()
    }

    pub fn disk(cx: f64, cy: f64, r: f64) -> Polynomial {
        poly(&format!("{} - (x1 - {cx})^2 - (x2 - {cy})^2", r * r))
    }

    pub fn example1() -> (Region, Vec<Region>) {
        let x = Region::from_ineqs(vec![poly("49 - x1^2 - x2^2")]).unwrap();
        let s3 = 3f64.sqrt();
        let props = vec![
            Region::from_ineqs(vec![disk(-2.0, 4.5, 0.25)]).unwrap(),
            Region::from_ineqs(vec![disk(s3, 0.0, s3)]).unwrap(),
            Region::from_ineqs(vec![disk(4.0, 4.0, 1.0)]).unwrap(),
            Region::from_ineqs(vec![disk(0.0, -3.0, 2.0)]).unwrap(),
        ];
        (x, props)
    }
}
