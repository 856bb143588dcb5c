//! Fixed-step RK4 simulation, trace extraction and a finite-trace monitor used
//! as a falsification oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automaton::BuchiAutomaton;
use crate::formula::{letter_to_string, Letter};
use crate::poly::VectorField;
use crate::problem::System;
use crate::region::{PropositionRegions, Region, MEMBERSHIP_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("step size must be positive")]
    NonPositiveStep,
    #[error("horizon must be at least one step")]
    HorizonTooShort,
    #[error("initial state has {got} components, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// The trajectory left the domain and was cut at the exit point.
    pub exited: bool,
    /// Set when integration stopped on a non-finite state.
    pub diagnostic: Option<String>,
}

fn rk4_step(f: &VectorField, x: &[f64], h: f64) -> Vec<f64> {
    let n = x.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    f.evaluate_into(x, &mut k1);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * h * k1[i];
    }
    f.evaluate_into(&tmp, &mut k2);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * h * k2[i];
    }
    f.evaluate_into(&tmp, &mut k3);
    for i in 0..n {
        tmp[i] = x[i] + h * k3[i];
    }
    f.evaluate_into(&tmp, &mut k4);
    (0..n)
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Integrates `x' = f(x)` from `x0` up to time `horizon`. With a domain, the
/// trajectory stops at the first exit, located by bisection to `1e-9` in time.
pub fn integrate(
    f: &VectorField,
    x0: &[f64],
    horizon: f64,
    h: f64,
    domain: Option<&Region>,
) -> Result<Trajectory, SimError> {
    if !(h > 0.0) {
        return Err(SimError::NonPositiveStep);
    }
    if !(horizon >= h) {
        return Err(SimError::HorizonTooShort);
    }
    if x0.len() != f.dim() {
        return Err(SimError::DimensionMismatch {
            expected: f.dim(),
            got: x0.len(),
        });
    }
    let inside = |x: &[f64]| domain.is_none_or(|d| d.contains(x, MEMBERSHIP_TOL));
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x0.to_vec()],
        exited: false,
        diagnostic: None,
    };
    if !inside(x0) {
        traj.exited = true;
        return Ok(traj);
    }
    let steps = (horizon / h).round() as usize;
    let mut x = x0.to_vec();
    for k in 0..steps {
        let t = k as f64 * h;
        let next = rk4_step(f, &x, h);
        if next.iter().any(|v| !v.is_finite()) {
            traj.diagnostic = Some(format!("non-finite state at t = {:.6}", t + h));
            break;
        }
        if !inside(&next) {
            let (mut lo, mut hi) = (0.0, h);
            while hi - lo > 1e-9 {
                let mid = 0.5 * (lo + hi);
                if inside(&rk4_step(f, &x, mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if lo > 0.0 {
                traj.times.push(t + lo);
                traj.states.push(rk4_step(f, &x, lo));
            }
            traj.exited = true;
            break;
        }
        x = next;
        traj.times.push(t + h);
        traj.states.push(x.clone());
    }
    Ok(traj)
}

/// Stutter-free letter sequence of a sampled trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub letters: Vec<Letter>,
    /// Sample index at which each letter starts.
    pub switch_indices: Vec<usize>,
    /// The horizon or domain exit cut the trajectory short.
    pub truncated: bool,
}

pub fn trace_of(traj: &Trajectory, regions: &PropositionRegions) -> Trace {
    let mut letters = Vec::new();
    let mut switch_indices = Vec::new();
    for (k, x) in traj.states.iter().enumerate() {
        let a = regions.letter_at(x, MEMBERSHIP_TOL);
        if letters.last() != Some(&a) {
            letters.push(a);
            switch_indices.push(k);
        }
    }
    Trace {
        letters,
        switch_indices,
        truncated: true,
    }
}

/// Length of the shortest prefix after which the automaton can sit in an
/// accepting state with an unconditional self-loop, i.e. every continuation
/// of the prefix is accepted.
pub fn monitor_violation(a: &BuchiAutomaton, letters: &[Letter]) -> Option<usize> {
    let sink: Vec<bool> = (0..a.num_states())
        .map(|q| a.is_accepting(q) && a.guard(q, q).is_some_and(|g| g.is_true()))
        .collect();
    let mut current: Vec<bool> = vec![false; a.num_states()];
    for &q in a.initial() {
        current[q] = true;
    }
    for (i, &l) in letters.iter().enumerate() {
        let mut next = vec![false; a.num_states()];
        for t in a.transitions() {
            if current[t.from] && t.guard.eval(l) {
                next[t.to] = true;
            }
        }
        current = next;
        if current.iter().zip(&sink).any(|(c, s)| *c && *s) {
            return Some(i + 1);
        }
        if !current.iter().any(|c| *c) {
            return None;
        }
    }
    None
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FalsifyOptions {
    pub samples: usize,
    pub horizon: f64,
    pub step: f64,
    pub seed: u64,
}

impl Default for FalsifyOptions {
    fn default() -> Self {
        FalsifyOptions {
            samples: 500,
            horizon: 30.0,
            step: 1e-2,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Counterexample {
    pub sample: usize,
    pub x0: Vec<f64>,
    pub trace: Trace,
    /// Trace letters read before the monitor flagged the violation.
    pub prefix_len: usize,
    pub trajectory: Trajectory,
}

impl Counterexample {
    pub fn describe(&self, props: &[String]) -> String {
        self.trace.letters[..self.prefix_len]
            .iter()
            .map(|&a| letter_to_string(a, props))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Initial states: half uniform in the domain, the rest spread over the
/// proposition regions.
pub fn initial_states(system: &System, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let regions = &system.regions;
    let domain = regions.domain();
    let Some(bounds) = domain.bounds() else {
        return Vec::new();
    };
    let mut targets: Vec<(&crate::region::BasicRegion, crate::region::Bounds)> = Vec::new();
    for i in 0..regions.props().len() {
        for p in regions.region(i).parts() {
            let b = p
                .enclosing_ball()
                .map(|b| crate::region::Bounds::of_ball(&b))
                .unwrap_or_else(|| bounds.clone());
            targets.push((p, b));
        }
    }
    let mut out = Vec::with_capacity(n);
    let uniform = if targets.is_empty() { n } else { n.div_ceil(2) };
    let mut guard = 0usize;
    while out.len() < uniform && guard < 1000 * n.max(1) {
        guard += 1;
        let x = bounds.sample(&mut rng);
        if domain.contains(&x, 0.0) {
            out.push(x);
        }
    }
    let mut k = 0usize;
    while out.len() < n && guard < 2000 * n.max(1) {
        guard += 1;
        let (part, b) = &targets[k % targets.len()];
        let x = b.sample(&mut rng);
        if part.contains(&x, 0.0) && domain.contains(&x, 0.0) {
            out.push(x);
            k += 1;
        }
    }
    out
}

/// Simulates from sampled initial states and returns the first trajectory,
/// by sample index, whose trace the monitor flags.
pub fn falsify(
    system: &System,
    negated: &BuchiAutomaton,
    opts: &FalsifyOptions,
) -> Option<Counterexample> {
    if opts.samples == 0 {
        return None;
    }
    let starts = initial_states(system, opts.samples, opts.seed);
    let found: Vec<Option<Counterexample>> = starts
        .par_iter()
        .enumerate()
        .map(|(i, x0)| {
            let traj = integrate(
                &system.field,
                x0,
                opts.horizon,
                opts.step,
                Some(system.regions.domain()),
            )
            .ok()?;
            let trace = trace_of(&traj, &system.regions);
            let prefix_len = monitor_violation(negated, &trace.letters)?;
            Some(Counterexample {
                sample: i,
                x0: x0.clone(),
                trace,
                prefix_len,
                trajectory: traj,
            })
        })
        .collect();
    found.into_iter().flatten().next()
}

/// CSV with header `t,<vars>,letter`.
pub fn trajectory_csv(traj: &Trajectory, system: &System) -> String {
    let mut s = String::from("t");
    for v in &system.variables {
        s.push(',');
        s.push_str(v);
    }
    s.push_str(",letter\n");
    for (t, x) in traj.times.iter().zip(&traj.states) {
        s.push_str(&format!("{t}"));
        for v in x {
            s.push_str(&format!(",{v}"));
        }
        let a = system.regions.letter_at(x, MEMBERSHIP_TOL);
        s.push_str(&format!(",\"{}\"\n", letter_to_string(a, system.regions.props())));
    }
    s
}
