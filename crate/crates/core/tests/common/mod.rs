//! Oracles and planted instances shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use ltlbc::automaton::{Graph, State};
use ltlbc::sdp::{BlockSpec, Entry, SdpProblem};
use nalgebra::DMatrix;
use rand::Rng;

pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

pub fn random_pd<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    &a * a.transpose() + DMatrix::identity(n, n) * rng.gen_range(0.1..1.0)
}

/// Upper-triangular entries of a symmetric matrix in block `blk`.
pub fn entries(blk: usize, m: &DMatrix<f64>) -> Vec<Entry> {
    let n = m.nrows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            if m[(i, j)] != 0.0 {
                out.push(Entry::new(blk, i, j, m[(i, j)]));
            }
        }
    }
    out
}

pub fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.component_mul(b).sum()
}

pub fn min_eig(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.min()
}

pub struct Planted {
    pub problem: SdpProblem,
    pub mats: Vec<DMatrix<f64>>,
    pub size: usize,
}

impl Planted {
    /// `sum y_i A_i` as a dense matrix.
    pub fn combine(&self, y: &[f64]) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(self.size, self.size);
        for (a, yi) in self.mats.iter().zip(y) {
            s += a * *yi;
        }
        s
    }
}

fn dims<R: Rng>(rng: &mut R) -> (usize, usize) {
    let n = rng.gen_range(2..=6);
    let m = rng.gen_range(1..=n * (n + 1) / 2 - 1);
    (n, m)
}

fn build(n: usize, mats: Vec<DMatrix<f64>>, rhs: Vec<f64>) -> Planted {
    let mut problem = SdpProblem::new(vec![BlockSpec::dense(n)]);
    for (a, b) in mats.iter().zip(&rhs) {
        problem.add_constraint(entries(0, a), *b);
    }
    Planted {
        problem,
        mats,
        size: n,
    }
}

/// Constraints satisfied by a planted positive definite `X0`.
pub fn planted_feasible<R: Rng>(rng: &mut R) -> (Planted, DMatrix<f64>) {
    let (n, m) = dims(rng);
    let x0 = random_pd(rng, n);
    let mats: Vec<_> = (0..m).map(|_| random_symmetric(rng, n)).collect();
    let rhs = mats.iter().map(|a| inner(a, &x0)).collect();
    (build(n, mats, rhs), x0)
}

/// Constraints with a planted Farkas certificate: `sum y_i A_i` positive
/// definite and `b' y = -1`, so no `X >= 0` can satisfy them.
pub fn planted_infeasible<R: Rng>(rng: &mut R) -> (Planted, Vec<f64>) {
    let (n, m) = dims(rng);
    let y: Vec<f64> = (0..m)
        .map(|_| {
            let v: f64 = rng.gen_range(0.5..1.5);
            if rng.gen_bool(0.5) {
                v
            } else {
                -v
            }
        })
        .collect();
    let mut mats: Vec<_> = (0..m).map(|_| random_symmetric(rng, n)).collect();
    let mut rhs: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let s = random_pd(rng, n);
    let mut rest = s;
    for i in 0..m - 1 {
        rest -= &mats[i] * y[i];
    }
    mats[m - 1] = rest / y[m - 1];
    let partial: f64 = (0..m - 1).map(|i| rhs[i] * y[i]).sum();
    rhs[m - 1] = (-1.0 - partial) / y[m - 1];
    (build(n, mats, rhs), y)
}

/// Checks an infeasibility ray independently: after fixing its sign so that
/// `b' r < 0`, `sum r_i A_i` must be positive semidefinite up to `tol`.
pub fn ray_certifies(p: &Planted, ray: &[f64], tol: f64) -> bool {
    let by: f64 = p.problem.rhs.iter().zip(ray).map(|(b, r)| b * r).sum();
    if by == 0.0 || !by.is_finite() {
        return false;
    }
    let scale = -1.0 / by;
    let r: Vec<f64> = ray.iter().map(|v| v * scale).collect();
    let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    min_eig(&p.combine(&r)) >= -tol * norm.max(1.0)
}

/// Every walk from `q` to `q2` that never repeats an edge, never takes a
/// self-loop and meets `q2` only at its end, by exhaustive search over
/// edge subsets in use. `[q]` is added when `q == q2` has a self-loop.
pub fn brute_force(g: &Graph, q: State, q2: State) -> BTreeSet<Vec<State>> {
    fn extend(
        g: &Graph,
        q2: State,
        walk: &mut Vec<State>,
        used: &mut BTreeSet<(State, State)>,
        out: &mut BTreeSet<Vec<State>>,
    ) {
        let v = *walk.last().unwrap();
        for u in 0..g.num_vertices() {
            if u == v || !g.has_edge(v, u) || used.contains(&(v, u)) {
                continue;
            }
            walk.push(u);
            if u == q2 {
                out.insert(walk.clone());
            } else {
                used.insert((v, u));
                extend(g, q2, walk, used, out);
                used.remove(&(v, u));
            }
            walk.pop();
        }
    }
    let mut out = BTreeSet::new();
    if q == q2 && g.has_edge(q, q) {
        out.insert(vec![q]);
    }
    extend(g, q2, &mut vec![q], &mut BTreeSet::new(), &mut out);
    out
}
