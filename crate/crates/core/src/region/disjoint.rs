//! Three-valued emptiness and closure-disjointness checks: exact ball tests,
//! Positivstellensatz refutations, and a grid plus local-search falsifier.

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ball_form, BallForm, Bounds, Region, MEMBERSHIP_TOL};
use crate::poly::Polynomial;
use crate::sdp::{self, SdpOptions};
use crate::sos::{GramPoly, LinPoly, SosBuilder};

#[derive(Clone, Debug)]
pub struct DisjointOptions {
    /// Identity degrees tried for refutations, in order.
    pub psatz_degrees: Vec<u32>,
    pub grid_per_dim: usize,
    pub grid_cap: usize,
    pub multistarts: usize,
    pub seed: u64,
    /// Search box used when a region has no ball inequality.
    pub fallback_bounds: Option<Bounds>,
    pub sdp: SdpOptions,
}

impl Default for DisjointOptions {
    fn default() -> Self {
        DisjointOptions {
            psatz_degrees: vec![4, 6],
            grid_per_dim: 200,
            grid_cap: 1_000_000,
            multistarts: 50,
            seed: 0,
            fallback_bounds: None,
            sdp: SdpOptions::default(),
        }
    }
}

/// Identity `-1 = sigma + sum_i s_i g_i` in coordinates `z`, `x = center + scale z`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PsatzCertificate {
    pub degree: u32,
    pub center: Vec<f64>,
    pub scale: f64,
    /// Inequalities in scaled coordinates, as strings over `z1..zn`.
    pub ineqs: Vec<String>,
    pub multipliers: Vec<GramPoly>,
    pub sos: GramPoly,
    /// Sum of absolute coefficient residuals of the identity.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum DisjointnessCert {
    /// Two balls whose centers are farther apart than the radius sum.
    Balls { distance: f64, radius_sum: f64 },
    /// A ball strictly inside an excluded ball.
    BallInHole { distance: f64, radius: f64, hole: f64 },
    Psatz(PsatzCertificate),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Disjointness {
    /// One certificate per pair of parts.
    ProvedDisjoint(Vec<DisjointnessCert>),
    FoundIntersection(Vec<f64>),
    Unknown,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Emptiness {
    Empty(Vec<DisjointnessCert>),
    NonEmpty(Vec<f64>),
    Unknown,
}

enum Basic {
    Empty(DisjointnessCert),
    Point(Vec<f64>),
    Unknown,
}

/// Decides whether `cl r1 ∩ cl r2 = ∅`.
pub fn closures_disjoint(r1: &Region, r2: &Region, opts: &DisjointOptions) -> Disjointness {
    let mut certs = Vec::new();
    let mut unknown = false;
    for a in r1.parts() {
        for b in r2.parts() {
            if let (Some(ba), Some(bb)) = (a.ball(), b.ball()) {
                let d = ba.distance_to(&bb);
                if d > ba.radius + bb.radius {
                    certs.push(DisjointnessCert::Balls {
                        distance: d,
                        radius_sum: ba.radius + bb.radius,
                    });
                    continue;
                }
                if let Some(x) = ball_witness(&ba, &bb) {
                    if a.contains(&x, MEMBERSHIP_TOL) && b.contains(&x, MEMBERSHIP_TOL) {
                        return Disjointness::FoundIntersection(x);
                    }
                }
            }
            let mut ineqs = a.ineqs().to_vec();
            ineqs.extend(b.ineqs().iter().cloned());
            match basic_emptiness(&ineqs, opts) {
                Basic::Empty(c) => certs.push(c),
                Basic::Point(x) => return Disjointness::FoundIntersection(x),
                Basic::Unknown => unknown = true,
            }
        }
    }
    if unknown {
        Disjointness::Unknown
    } else {
        Disjointness::ProvedDisjoint(certs)
    }
}

pub fn is_empty(r: &Region, opts: &DisjointOptions) -> Emptiness {
    let mut certs = Vec::new();
    let mut unknown = false;
    for p in r.parts() {
        match basic_emptiness(p.ineqs(), opts) {
            Basic::Empty(c) => certs.push(c),
            Basic::Point(x) => return Emptiness::NonEmpty(x),
            Basic::Unknown => unknown = true,
        }
    }
    if unknown {
        Emptiness::Unknown
    } else {
        Emptiness::Empty(certs)
    }
}

/// Point on the segment between the centers lying in both balls.
fn ball_witness(a: &super::Ball, b: &super::Ball) -> Option<Vec<f64>> {
    let d = a.distance_to(b);
    if d == 0.0 {
        return Some(a.center.clone());
    }
    // midpoint of the overlap along the center line
    let lo = (d - b.radius).max(-a.radius);
    let hi = a.radius.min(d + b.radius);
    if lo > hi {
        return None;
    }
    let t = 0.5 * (lo + hi) / d;
    Some(
        a.center
            .iter()
            .zip(&b.center)
            .map(|(ca, cb)| ca + t * (cb - ca))
            .collect(),
    )
}

fn basic_emptiness(ineqs: &[Polynomial], opts: &DisjointOptions) -> Basic {
    if let Some(c) = ball_certificate(ineqs) {
        return Basic::Empty(c);
    }
    let enclosing = ineqs
        .iter()
        .filter_map(|g| match ball_form(g)? {
            BallForm::Inside(b) => Some(b),
            _ => None,
        })
        .min_by(|a, b| a.radius.total_cmp(&b.radius));
    let bounds = enclosing
        .as_ref()
        .map(Bounds::of_ball)
        .or_else(|| opts.fallback_bounds.clone());
    let (center, scale) = match (&enclosing, &bounds) {
        (Some(b), _) => (b.center.clone(), b.radius),
        (None, Some(bx)) => {
            let c = bx.center();
            let r = bx
                .lo
                .iter()
                .zip(&bx.hi)
                .map(|(l, h)| 0.25 * (h - l) * (h - l))
                .sum::<f64>()
                .sqrt();
            (c, r.max(1e-12))
        }
        (None, None) => (vec![0.0; ineqs[0].nvars()], 1.0),
    };
    for &d in &opts.psatz_degrees {
        if let Some(c) = psatz(ineqs, d, &center, scale, &opts.sdp) {
            return Basic::Empty(DisjointnessCert::Psatz(c));
        }
    }
    match bounds {
        Some(b) => match falsify(ineqs, &b, opts) {
            Some(x) => Basic::Point(x),
            None => Basic::Unknown,
        },
        None => Basic::Unknown,
    }
}

fn ball_certificate(ineqs: &[Polynomial]) -> Option<DisjointnessCert> {
    let forms: Vec<BallForm> = ineqs.iter().filter_map(ball_form).collect();
    for (i, f) in forms.iter().enumerate() {
        let BallForm::Inside(a) = f else { continue };
        for g in &forms[i + 1..] {
            if let BallForm::Inside(b) = g {
                let d = a.distance_to(b);
                if d > a.radius + b.radius {
                    return Some(DisjointnessCert::Balls {
                        distance: d,
                        radius_sum: a.radius + b.radius,
                    });
                }
            }
        }
        for g in &forms {
            if let BallForm::Outside(h) = g {
                let d = a.distance_to(h);
                if d + a.radius < h.radius {
                    return Some(DisjointnessCert::BallInHole {
                        distance: d,
                        radius: a.radius,
                        hole: h.radius,
                    });
                }
            }
        }
    }
    None
}

fn psatz(
    ineqs: &[Polynomial],
    degree: u32,
    center: &[f64],
    scale: f64,
    sdp_opts: &SdpOptions,
) -> Option<PsatzCertificate> {
    let n = ineqs[0].nvars();
    let scaled: Vec<Polynomial> = ineqs
        .iter()
        .map(|g| {
            let h = g.compose_affine(center, scale);
            let s = h.max_abs_coeff();
            if s > 0.0 {
                h.scale(1.0 / s)
            } else {
                h
            }
        })
        .collect();
    if scaled.iter().any(|g| g.degree() > degree) {
        return None;
    }
    let mut b = SosBuilder::new(n);
    let mut expr = LinPoly::from_poly(&Polynomial::constant(n, -1.0));
    let mut mult_blocks = Vec::new();
    for g in &scaled {
        let (blk, s) = b.multiplier(degree - g.degree());
        expr.add_scaled(&s.mul_poly(g), -1.0);
        mult_blocks.push(blk);
    }
    let sigma_blk = b.require_sos(&expr);
    let sol = sdp::solve(&b.compile(), sdp_opts).ok()?;
    if !sol.is_feasible() {
        return None;
    }
    let multipliers: Vec<GramPoly> = mult_blocks.iter().map(|&k| b.gram(k, &sol)).collect();
    let sos = b.gram(sigma_blk, &sol);
    if multipliers
        .iter()
        .chain(std::iter::once(&sos))
        .any(|g| g.min_eigenvalue() < -1e-8)
    {
        return None;
    }
    let mut lhs = Polynomial::constant(n, -1.0);
    for (m, g) in multipliers.iter().zip(&scaled) {
        lhs = &lhs - &(&m.to_polynomial() * g);
    }
    let diff = &lhs - &sos.to_polynomial();
    let residual: f64 = diff.terms().map(|(_, c)| c.abs()).sum();
    // on the unit ball every monomial is at most one in magnitude
    if residual > 1e-6 {
        return None;
    }
    let names: Vec<String> = (1..=n).map(|i| format!("z{i}")).collect();
    Some(PsatzCertificate {
        degree,
        center: center.to_vec(),
        scale,
        ineqs: scaled.iter().map(|g| g.to_string_with(&names)).collect(),
        multipliers,
        sos,
        residual,
    })
}

struct Violation<'a> {
    ineqs: &'a [Polynomial],
}

impl CostFunction for Violation<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> Result<f64, argmin::core::Error> {
        Ok(violation(self.ineqs, x))
    }
}

fn violation(ineqs: &[Polynomial], x: &[f64]) -> f64 {
    ineqs
        .iter()
        .map(|g| -g.evaluate(x))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Grid scan followed by Nelder-Mead descents on the worst violation.
fn falsify(ineqs: &[Polynomial], bounds: &Bounds, opts: &DisjointOptions) -> Option<Vec<f64>> {
    let n = bounds.lo.len();
    let per_dim = ((opts.grid_cap as f64).powf(1.0 / n as f64).floor() as usize)
        .clamp(2, opts.grid_per_dim.max(2));
    let total = per_dim.pow(n as u32);
    let mut best: Vec<(f64, Vec<f64>)> = Vec::new();
    let keep = opts.multistarts / 2 + 1;
    let mut x = vec![0.0; n];
    for idx in 0..total {
        let mut k = idx;
        for d in 0..n {
            let i = k % per_dim;
            k /= per_dim;
            x[d] = bounds.lo[d] + (bounds.hi[d] - bounds.lo[d]) * i as f64 / (per_dim - 1) as f64;
        }
        let v = violation(ineqs, &x);
        if v <= MEMBERSHIP_TOL {
            return Some(x);
        }
        if best.len() < keep || v < best[best.len() - 1].0 {
            let pos = best.partition_point(|(b, _)| *b <= v);
            best.insert(pos, (v, x.clone()));
            best.truncate(keep);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts: Vec<Vec<f64>> = best.into_iter().map(|(_, x)| x).collect();
    while starts.len() < opts.multistarts {
        starts.push(bounds.sample(&mut rng));
    }
    let width = bounds
        .lo
        .iter()
        .zip(&bounds.hi)
        .map(|(l, h)| h - l)
        .fold(0.0, f64::max)
        .max(1e-9);
    for s in starts.into_iter().take(opts.multistarts) {
        let mut simplex = vec![s.clone()];
        for d in 0..n {
            let mut p = s.clone();
            p[d] += 0.05 * width;
            simplex.push(p);
        }
        let Ok(solver) = NelderMead::new(simplex).with_sd_tolerance(1e-14) else {
            continue;
        };
        let res = Executor::new(Violation { ineqs }, solver)
            .configure(|st| st.max_iters(400))
            .run();
        if let Ok(r) = res {
            if let Some(p) = r.state().best_param.clone() {
                if violation(ineqs, &p) <= MEMBERSHIP_TOL {
                    return Some(p);
                }
            }
        }
    }
    None
}
