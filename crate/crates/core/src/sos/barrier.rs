//! Barrier certificates between a start set `Y0` and a target set `Y1` inside
//! a transit set `Y`:
//!
//! ```text
//! -B - s0 g0             is SOS   for every part of Y0
//!  B - eps - s1 g1       is SOS   for every part of Y1
//! -L_f B - s2 g + s3 g1  is SOS   for every part of Y
//! ```
//!
//! All sets are moved into the unit ball first; the certificate is mapped back.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{GramPoly, LinPoly, SosBuilder};
use crate::poly::{Polynomial, VectorField};
use crate::region::{BasicRegion, Bounds, Region};
use crate::sdp::{self, SdpOptions, SdpProblem, SdpSolution, SdpStatus};
use crate::sim;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SosError {
    #[error("barrier degree {degree} exceeds the cap {cap}")]
    DegreeTooHigh { degree: u32, cap: u32 },
    #[error("{0} is empty")]
    EmptyRegion(&'static str),
    #[error("solver did not report a feasible point ({0:?})")]
    NotFeasible(SdpStatus),
    #[error("solution insufficiently feasible: identity residual {residual:.3e}")]
    InsufficientlyFeasible { residual: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BarrierOptions {
    pub epsilon: f64,
    pub max_degree: u32,
    /// Identity residual accepted per coefficient.
    pub identity_tol: f64,
    pub gram_eig_tol: f64,
    pub samples_per_region: usize,
    pub trajectories: usize,
    pub trajectory_horizon: f64,
    pub trajectory_step: f64,
    pub seed: u64,
    pub sdp: SdpOptions,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        BarrierOptions {
            epsilon: 1e-3,
            max_degree: 12,
            identity_tol: 1e-6,
            gram_eig_tol: 1e-8,
            samples_per_region: 10_000,
            trajectories: 100,
            trajectory_horizon: 20.0,
            trajectory_step: 1e-2,
            seed: 0,
            sdp: SdpOptions::default(),
        }
    }
}

/// `x = center + scale * z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub center: Vec<f64>,
    pub scale: f64,
}

impl Scaling {
    pub fn identity(n: usize) -> Self {
        Scaling {
            center: vec![0.0; n],
            scale: 1.0,
        }
    }

    fn to_scaled(&self, p: &Polynomial) -> Polynomial {
        p.compose_affine(&self.center, self.scale)
    }

    fn to_original(&self, p: &Polynomial) -> Polynomial {
        let c: Vec<f64> = self.center.iter().map(|c| -c / self.scale).collect();
        p.compose_affine(&c, 1.0 / self.scale)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentityKind {
    /// `-B - sum s g`
    Start,
    /// `B - eps - sum s g`
    Target,
    /// `-L_f B - sum s g + sum s' h`
    Flow,
}

#[derive(Clone, Debug)]
struct IdentitySpec {
    kind: IdentityKind,
    label: String,
    sos_block: Option<usize>,
    /// (multiplier block, inequality in scaled coordinates, sign in the identity)
    terms: Vec<(usize, Polynomial, f64)>,
}

/// One copy of each condition per part, over a Gram-matrix SDP.
#[derive(Clone, Debug)]
pub struct SosProgram {
    pub degree: u32,
    pub epsilon: f64,
    pub scaling: Scaling,
    field: VectorField,
    builder: SosBuilder,
    b: LinPoly,
    identities: Vec<IdentitySpec>,
}

impl SosProgram {
    pub fn num_identities(&self) -> usize {
        self.identities.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.builder.num_blocks()
    }
}

fn normalized(p: &Polynomial) -> Polynomial {
    let s = p.max_abs_coeff();
    if s > 0.0 {
        p.scale(1.0 / s)
    } else {
        p.clone()
    }
}

fn scaled_parts(r: &Region, s: &Scaling) -> Vec<Vec<Polynomial>> {
    r.parts()
        .iter()
        .map(|p| p.ineqs().iter().map(|g| normalized(&s.to_scaled(g))).collect())
        .collect()
}

/// Scaling that maps the transit set into the unit ball.
pub fn unit_ball_scaling(y0: &Region, y1: &Region, y: &Region) -> Scaling {
    let whole = y.union(y0).union(y1);
    match y.enclosing_ball().or_else(|| whole.enclosing_ball()) {
        Some(b) if b.radius > 0.0 => Scaling {
            center: b.center,
            scale: b.radius,
        },
        _ => Scaling::identity(y.nvars()),
    }
}

fn multiplier_degree(target: u32, g: &Polynomial) -> u32 {
    target.saturating_sub(g.degree())
}

/// Builds the program with a barrier of degree at most `degree`. `B` is
/// parametrized through the first start identity, `B = -sigma - sum s g`.
const ZERO_TOL: f64 = 1e-9;

/// Rest points of `f` in the box `[-r, r]^n`, by Newton's method from a grid.
fn equilibria(f: &VectorField, r: f64) -> Vec<Vec<f64>> {
    let n = f.dim();
    let jac: Vec<Vec<Polynomial>> = f.components().iter().map(|c| c.gradient()).collect();
    let per_dim = ((2000f64).powf(1.0 / n as f64).floor() as usize).clamp(2, 64);
    let total = per_dim.pow(n as u32);
    let mut found: Vec<Vec<f64>> = Vec::new();
    for k in 0..total {
        let mut x: Vec<f64> = (0..n)
            .map(|d| {
                let i = (k / per_dim.pow(d as u32)) % per_dim;
                -r + 2.0 * r * (i as f64 + 0.5) / per_dim as f64
            })
            .collect();
        let mut ok = false;
        for _ in 0..60 {
            let fx = f.evaluate(&x);
            let norm = fx.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if norm < 1e-13 {
                ok = true;
                break;
            }
            let j = nalgebra::DMatrix::from_fn(n, n, |a, b| jac[a][b].evaluate(&x));
            let Some(step) = j.lu().solve(&nalgebra::DVector::from_vec(fx)) else {
                break;
            };
            for (xi, si) in x.iter_mut().zip(step.iter()) {
                *xi -= si;
            }
            if x.iter().any(|v| !v.is_finite() || v.abs() > 4.0 * r) {
                break;
            }
        }
        if ok
            && x.iter().all(|v| v.abs() <= r)
            && !found
                .iter()
                .any(|y| y.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-7))
        {
            found.push(x);
        }
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    found
}

pub fn build_barrier_program(
    y0: &Region,
    y1: &Region,
    y: &Region,
    f: &VectorField,
    degree: u32,
    opts: &BarrierOptions,
) -> Result<SosProgram, SosError> {
    if degree > opts.max_degree {
        return Err(SosError::DegreeTooHigh {
            degree,
            cap: opts.max_degree,
        });
    }
    for (r, name) in [(y0, "Y0"), (y1, "Y1"), (y, "Y")] {
        if r.is_trivially_empty() {
            return Err(SosError::EmptyRegion(name));
        }
    }
    let n = f.dim();
    let scaling = unit_ball_scaling(y0, y1, y);
    let fz = f.compose_affine(&scaling.center, scaling.scale);
    let p0 = scaled_parts(y0, &scaling);
    let p1 = scaled_parts(y1, &scaling);
    let py = scaled_parts(y, &scaling);
    let mut builder = SosBuilder::new(n);
    let mut identities = Vec::new();
    let deg_b = degree.max(1);
    let even_b = deg_b + deg_b % 2;

    // B from the first part of Y0
    let (sigma0, sigma_poly) = builder.sos_poly(deg_b / 2);
    let mut b = sigma_poly.scaled(-1.0);
    let mut terms = Vec::new();
    for g in &p0[0] {
        let (blk, s) = builder.multiplier(multiplier_degree(deg_b, g));
        b.add_scaled(&s.mul_poly(g), -1.0);
        terms.push((blk, g.clone(), -1.0));
    }
    identities.push(IdentitySpec {
        kind: IdentityKind::Start,
        label: "start[0]".into(),
        sos_block: Some(sigma0),
        terms,
    });

    for (k, part) in p0.iter().enumerate().skip(1) {
        let mut expr = b.scaled(-1.0);
        let mut terms = Vec::new();
        for g in part {
            let (blk, s) = builder.multiplier(multiplier_degree(even_b, g));
            expr.add_scaled(&s.mul_poly(g), -1.0);
            terms.push((blk, g.clone(), -1.0));
        }
        let sos_block = Some(builder.require_sos(&expr));
        identities.push(IdentitySpec {
            kind: IdentityKind::Start,
            label: format!("start[{k}]"),
            sos_block,
            terms,
        });
    }

    for (k, part) in p1.iter().enumerate() {
        let mut expr = b.clone();
        expr.add_scaled(&LinPoly::from_poly(&Polynomial::constant(n, opts.epsilon)), -1.0);
        let mut terms = Vec::new();
        for g in part {
            let (blk, s) = builder.multiplier(multiplier_degree(even_b, g));
            expr.add_scaled(&s.mul_poly(g), -1.0);
            terms.push((blk, g.clone(), -1.0));
        }
        let sos_block = Some(builder.require_sos(&expr));
        identities.push(IdentitySpec {
            kind: IdentityKind::Target,
            label: format!("target[{k}]"),
            sos_block,
            terms,
        });
    }

    let lie = b.lie_derivative(&fz);
    let lie_deg = deg_b + fz.max_degree().max(1) - 1;
    let flow_deg = lie_deg + lie_deg % 2;
    let targets: Vec<&Polynomial> = p1.iter().filter(|t| t.len() == 1).map(|t| &t[0]).collect();
    let rest = equilibria(&fz, 1.05);
    for (k, part) in py.iter().enumerate() {
        // at a rest point inside the part and outside the targets every
        // term of the identity vanishes
        let zeros: Vec<Vec<f64>> = rest
            .iter()
            .filter(|z| part.iter().all(|g| g.evaluate(z) >= -ZERO_TOL))
            .filter(|z| targets.iter().all(|h| h.evaluate(z) <= ZERO_TOL))
            .cloned()
            .collect();
        let mut expr = lie.scaled(-1.0);
        let mut terms = Vec::new();
        for (g, sign) in part
            .iter()
            .map(|g| (g, -1.0))
            .chain(targets.iter().map(|h| (*h, 1.0)))
        {
            let at: Vec<Vec<f64>> = zeros
                .iter()
                .filter(|z| sign * g.evaluate(z) < -ZERO_TOL)
                .cloned()
                .collect();
            let half = multiplier_degree(flow_deg, g) / 2;
            if let Some((blk, s)) = builder.sos_poly_vanishing(half, &at) {
                expr.add_scaled(&s.mul_poly(g), sign);
                terms.push((blk, g.clone(), sign));
            }
        }
        let sos_block = builder.require_sos_vanishing(&expr, &zeros);
        identities.push(IdentitySpec {
            kind: IdentityKind::Flow,
            label: format!("flow[{k}]"),
            sos_block,
            terms,
        });
    }

    Ok(SosProgram {
        degree,
        epsilon: opts.epsilon,
        scaling,
        field: fz,
        builder,
        b,
        identities,
    })
}

pub fn compile_to_sdp(p: &SosProgram) -> SdpProblem {
    p.builder.compile()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SosIdentity {
    pub label: String,
    pub kind: IdentityKind,
    /// Inequalities in scaled coordinates with their multipliers and signs.
    pub ineqs: Vec<Polynomial>,
    pub multipliers: Vec<GramPoly>,
    pub signs: Vec<f64>,
    pub sos: GramPoly,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BarrierCertificate {
    pub degree: u32,
    pub epsilon: f64,
    /// `B` in the original coordinates.
    pub barrier: Polynomial,
    /// `B` in scaled coordinates `z`.
    pub barrier_scaled: Polynomial,
    pub scaling: Scaling,
    pub field_scaled: VectorField,
    pub identities: Vec<SosIdentity>,
    pub margin: Option<f64>,
    pub iterations: usize,
}

impl BarrierCertificate {
    fn identity_residual(&self, id: &SosIdentity) -> f64 {
        let n = self.barrier_scaled.nvars();
        let mut lhs = match id.kind {
            IdentityKind::Start => self.barrier_scaled.scale(-1.0),
            IdentityKind::Target => {
                &self.barrier_scaled - &Polynomial::constant(n, self.epsilon)
            }
            IdentityKind::Flow => self
                .barrier_scaled
                .lie_derivative(&self.field_scaled)
                .expect("matching dimensions")
                .scale(-1.0),
        };
        for ((m, g), s) in id.multipliers.iter().zip(&id.ineqs).zip(&id.signs) {
            lhs = &lhs + &(&m.to_polynomial() * g).scale(*s);
        }
        let diff = &lhs - &id.sos.to_polynomial();
        diff.terms().map(|(_, c)| c.abs()).fold(0.0, f64::max)
    }

    /// Largest coefficient residual over all identities.
    pub fn max_identity_residual(&self) -> f64 {
        self.identities
            .iter()
            .map(|id| self.identity_residual(id))
            .fold(0.0, f64::max)
    }

    pub fn min_gram_eigenvalue(&self) -> f64 {
        self.identities
            .iter()
            .flat_map(|id| id.multipliers.iter().chain(std::iter::once(&id.sos)))
            .map(|g| g.min_eigenvalue())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn lie_derivative(&self, f: &VectorField) -> Polynomial {
        self.barrier.lie_derivative(f).expect("matching dimensions")
    }
}

pub fn extract_certificate(
    p: &SosProgram,
    sol: &SdpSolution,
    opts: &BarrierOptions,
) -> Result<BarrierCertificate, SosError> {
    if !sol.is_feasible() || sol.blocks.len() != p.builder.num_blocks() {
        return Err(SosError::NotFeasible(sol.status.clone()));
    }
    let vars = p.builder.values(sol);
    let barrier_scaled = p.b.evaluate(&vars);
    let identities = p
        .identities
        .iter()
        .map(|id| SosIdentity {
            label: id.label.clone(),
            kind: id.kind,
            ineqs: id.terms.iter().map(|t| t.1.clone()).collect(),
            multipliers: id.terms.iter().map(|t| p.builder.gram(t.0, sol)).collect(),
            signs: id.terms.iter().map(|t| t.2).collect(),
            sos: p.builder.gram_or_zero(id.sos_block, sol),
        })
        .collect();
    let cert = BarrierCertificate {
        degree: p.degree,
        epsilon: p.epsilon,
        barrier: p.scaling.to_original(&barrier_scaled),
        barrier_scaled,
        scaling: p.scaling.clone(),
        field_scaled: p.field.clone(),
        identities,
        margin: sol.margin,
        iterations: sol.iterations,
    };
    let residual = cert.max_identity_residual();
    if !(residual <= opts.identity_tol) {
        return Err(SosError::InsufficientlyFeasible { residual });
    }
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Largest identity coefficient residual.
    pub identity: Check,
    /// Smallest Gram eigenvalue.
    pub gram: Check,
    /// Largest `B` on start samples.
    pub start: Check,
    /// Smallest `B` on target samples.
    pub target: Check,
    /// Largest Lie derivative on transit samples outside the target.
    pub flow: Check,
    /// Trajectories from the start set reaching the target inside the
    /// transit set; `worst` is the largest `B` seen along them.
    pub trajectories: Check,
}

impl ValidationReport {
    pub fn algebraic_passed(&self) -> bool {
        self.identity.passed && self.gram.passed
    }

    pub fn passed(&self) -> bool {
        self.identity.passed
            && self.gram.passed
            && self.start.passed
            && self.target.passed
            && self.flow.passed
            && self.trajectories.passed
    }
}

fn part_bounds(p: &BasicRegion, fallback: Option<&Bounds>) -> Option<Bounds> {
    p.enclosing_ball()
        .map(|b| Bounds::of_ball(&b))
        .or_else(|| fallback.cloned())
}

fn sample_region(
    r: &Region,
    n: usize,
    fallback: Option<&Bounds>,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for p in r.parts() {
        if let Some(b) = part_bounds(p, fallback) {
            out.extend(p.sample(n, &b, rng));
        }
    }
    out
}

/// Algebraic, sampled and simulated checks of a certificate.
pub fn validate_certificate(
    c: &BarrierCertificate,
    y0: &Region,
    y1: &Region,
    y: &Region,
    f: &VectorField,
    opts: &BarrierOptions,
) -> ValidationReport {
    let residual = c.max_identity_residual();
    let min_eig = c.min_gram_eigenvalue();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let fallback = y.union(y0).union(y1).bounds();
    let n = opts.samples_per_region;
    let lie = c.lie_derivative(f);

    let s0 = sample_region(y0, n, fallback.as_ref(), &mut rng);
    let worst0 = s0
        .iter()
        .map(|x| c.barrier.evaluate(x))
        .fold(f64::NEG_INFINITY, f64::max);
    let s1 = sample_region(y1, n, fallback.as_ref(), &mut rng);
    let worst1 = s1
        .iter()
        .map(|x| c.barrier.evaluate(x))
        .fold(f64::INFINITY, f64::min);
    let sy: Vec<Vec<f64>> = sample_region(y, n, fallback.as_ref(), &mut rng)
        .into_iter()
        .filter(|x| !y1.contains(x, 0.0))
        .collect();
    let worsty = sy
        .iter()
        .map(|x| lie.evaluate(x))
        .fold(f64::NEG_INFINITY, f64::max);

    let starts: Vec<Vec<f64>> = s0.iter().take(opts.trajectories).cloned().collect();
    let mut reached = false;
    let mut worst_b = f64::NEG_INFINITY;
    for x0 in &starts {
        let Ok(tr) = sim::integrate(f, x0, opts.trajectory_horizon, opts.trajectory_step, Some(y))
        else {
            continue;
        };
        for x in &tr.states {
            worst_b = worst_b.max(c.barrier.evaluate(x));
            if y1.contains(x, 0.0) {
                reached = true;
            }
        }
    }

    ValidationReport {
        identity: Check {
            passed: residual <= opts.identity_tol,
            worst: residual,
            samples: c.identities.len(),
        },
        gram: Check {
            passed: min_eig >= -opts.gram_eig_tol,
            worst: min_eig,
            samples: c.identities.len(),
        },
        start: Check {
            passed: !s0.is_empty() && worst0 <= 1e-7,
            worst: worst0,
            samples: s0.len(),
        },
        target: Check {
            passed: !s1.is_empty() && worst1 >= c.epsilon / 2.0,
            worst: worst1,
            samples: s1.len(),
        },
        flow: Check {
            passed: worsty <= 1e-7,
            worst: worsty,
            samples: sy.len(),
        },
        trajectories: Check {
            passed: !reached && worst_b <= 1e-6,
            worst: worst_b,
            samples: starts.len(),
        },
    }
}

/// One degree of the schedule.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Attempt {
    pub degree: u32,
    pub status: String,
    pub margin: Option<f64>,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Synthesis {
    pub certificate: Option<(BarrierCertificate, ValidationReport)>,
    pub attempts: Vec<Attempt>,
}

impl Synthesis {
    /// Largest margin among failed attempts, as a distance-to-feasibility hint.
    pub fn best_margin(&self) -> Option<f64> {
        self.attempts
            .iter()
            .filter_map(|a| a.margin)
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
    }
}

/// Tries barrier degrees 2, 4, ... up to the cap and stops at the first
/// certificate that passes validation.
pub fn synthesize(
    y0: &Region,
    y1: &Region,
    y: &Region,
    f: &VectorField,
    opts: &BarrierOptions,
) -> Synthesis {
    synthesize_with(y0, y1, y, f, opts, &mut |_, _| {})
}

/// As [`synthesize`], handing every SDP to `observe` with its degree before solving.
pub fn synthesize_with(
    y0: &Region,
    y1: &Region,
    y: &Region,
    f: &VectorField,
    opts: &BarrierOptions,
    observe: &mut dyn FnMut(u32, &SdpProblem),
) -> Synthesis {
    let mut attempts = Vec::new();
    let mut degree = 2;
    while degree <= opts.max_degree {
        if opts.sdp.deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let t0 = Instant::now();
        let prog = match build_barrier_program(y0, y1, y, f, degree, opts) {
            Ok(p) => p,
            Err(e) => {
                attempts.push(Attempt {
                    degree,
                    status: e.to_string(),
                    margin: None,
                    seconds: t0.elapsed().as_secs_f64(),
                });
                break;
            }
        };
        let problem = compile_to_sdp(&prog);
        observe(degree, &problem);
        let sol = sdp::solve(&problem, &opts.sdp).expect("well-formed program");
        let outcome = extract_certificate(&prog, &sol, opts).map(|c| {
            let report = validate_certificate(&c, y0, y1, y, f, opts);
            (c, report)
        });
        let status = match &outcome {
            Ok((_, r)) if r.passed() => "certified".to_string(),
            Ok((_, r)) => format!("validation failed: {r:?}"),
            Err(SosError::NotFeasible(s)) => format!("{s:?}"),
            Err(e) => e.to_string(),
        };
        attempts.push(Attempt {
            degree,
            status,
            margin: sol.margin,
            seconds: t0.elapsed().as_secs_f64(),
        });
        if let Ok((c, r)) = outcome {
            if r.passed() {
                return Synthesis {
                    certificate: Some((c, r)),
                    attempts,
                };
            }
        }
        degree += 2;
    }
    Synthesis {
        certificate: None,
        attempts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::fixtures::{disk, poly};

    fn ball(cx: f64, cy: f64, r: f64) -> Region {
        Region::from_ineqs(vec![disk(cx, cy, r)]).unwrap()
    }

    fn contracting() -> VectorField {
        VectorField::new(vec![poly("-x1"), poly("-x2")]).unwrap()
    }

    fn quick() -> BarrierOptions {
        BarrierOptions {
            samples_per_region: 500,
            trajectories: 20,
            trajectory_horizon: 5.0,
            ..BarrierOptions::default()
        }
    }

    #[test]
    fn contracting_flow_has_quadratic_barrier() {
        let (y0, y1, y) = (ball(0.0, 0.0, 0.5), ball(3.0, 0.0, 0.5), ball(0.0, 0.0, 5.0));
        let s = synthesize(&y0, &y1, &y, &contracting(), &quick());
        let (c, report) = s.certificate.expect("certified");
        assert_eq!(c.degree, 2);
        assert!(report.passed());
        assert!(c.barrier.evaluate(&[0.0, 0.0]) <= 1e-7);
        assert!(c.barrier.evaluate(&[3.0, 0.0]) >= 1e-3);
    }

    #[test]
    fn overlapping_start_and_target_is_infeasible() {
        let y0 = ball(1.0, 1.0, 0.5);
        let prog = build_barrier_program(&y0, &y0, &ball(0.0, 0.0, 5.0), &contracting(), 4, &quick())
            .unwrap();
        let sol = sdp::solve(&compile_to_sdp(&prog), &SdpOptions::default()).unwrap();
        assert!(matches!(sol.status, SdpStatus::Infeasible { .. }), "{:?}", sol.status);
        assert!(matches!(
            extract_certificate(&prog, &sol, &quick()),
            Err(SosError::NotFeasible(_))
        ));
    }

    #[test]
    fn perturbed_solution_is_rejected() {
        let (y0, y1, y) = (ball(0.0, 0.0, 0.5), ball(3.0, 0.0, 0.5), ball(0.0, 0.0, 5.0));
        let prog = build_barrier_program(&y0, &y1, &y, &contracting(), 2, &quick()).unwrap();
        let mut sol = sdp::solve(&compile_to_sdp(&prog), &SdpOptions::default()).unwrap();
        assert!(extract_certificate(&prog, &sol, &quick()).is_ok());
        let last = sol.blocks.len() - 1;
        sol.blocks[last][(0, 0)] += 1e-3;
        assert!(matches!(
            extract_certificate(&prog, &sol, &quick()),
            Err(SosError::InsufficientlyFeasible { .. })
        ));
    }

    #[test]
    fn rest_points_of_example_field() {
        let f = VectorField::new(vec![poly("x2"), poly("-x1 + x1^3/3 - x2")]).unwrap();
        let fz = f.compose_affine(&[0.0, 0.0], 7.0);
        let e = equilibria(&fz, 1.05);
        assert_eq!(e.len(), 3);
        let s3 = 3f64.sqrt() / 7.0;
        for (z, x1) in e.iter().zip([-s3, 0.0, s3]) {
            assert!((z[0] - x1).abs() < 1e-12 && z[1].abs() < 1e-12);
        }
    }

    #[test]
    fn degree_cap_is_enforced() {
        let r = ball(0.0, 0.0, 1.0);
        let err = build_barrier_program(&r, &r, &r, &contracting(), 14, &quick()).unwrap_err();
        assert_eq!(err, SosError::DegreeTooHigh { degree: 14, cap: 12 });
    }

    #[test]
    fn certificate_serializes() {
        let (y0, y1, y) = (ball(0.0, 0.0, 0.5), ball(3.0, 0.0, 0.5), ball(0.0, 0.0, 5.0));
        let (c, _) = synthesize(&y0, &y1, &y, &contracting(), &quick()).certificate.unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: BarrierCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back.barrier, c.barrier);
    }
}
