//! Infeasible-start primal-dual path following with Nesterov-Todd scaling and
//! Mehrotra predictor-corrector steps.
//!
//! Internal form: minimize `C . X` s.t. `A_i . X = b_i`, `X >= 0`; dual
//! maximize `b' y` s.t. `sum y_i A_i + Z = C`, `Z >= 0`.

use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen, LU, SVD};

use super::{min_eigenvalue, BlockKind, Entry, SdpOptions, SdpProblem, SdpSolution, SdpStatus};

#[derive(Clone, Copy, Debug)]
struct IEntry {
    blk: usize,
    r: usize,
    c: usize,
    v: f64,
}

struct Internal {
    dims: Vec<usize>,
    cons: Vec<Vec<IEntry>>,
    b: Vec<f64>,
    cmin: Vec<IEntry>,
}

#[derive(Debug, PartialEq, Clone, Copy)]
enum IpmStatus {
    Converged,
    MaxIter,
    Failure,
}

struct IpmOut {
    status: IpmStatus,
    /// Residuals and gap fell below the square root of the tolerance.
    near: bool,
    x: Vec<DMatrix<f64>>,
    y: DVector<f64>,
    pobj: f64,
    dobj: f64,
    iters: usize,
}

type Blocks = Vec<DMatrix<f64>>;

/// Maps user blocks to internal dense blocks; diagonal blocks become 1x1 blocks.
struct BlockMap {
    /// first internal block of each user block
    start: Vec<usize>,
    kinds: Vec<BlockKind>,
    sizes: Vec<usize>,
    dims: Vec<usize>,
}

impl BlockMap {
    fn new(p: &SdpProblem) -> Self {
        let mut start = Vec::new();
        let mut dims = Vec::new();
        for b in &p.blocks {
            start.push(dims.len());
            match b.kind {
                BlockKind::Dense => dims.push(b.size),
                BlockKind::Diagonal => dims.extend(std::iter::repeat_n(1, b.size)),
            }
        }
        BlockMap {
            start,
            kinds: p.blocks.iter().map(|b| b.kind).collect(),
            sizes: p.blocks.iter().map(|b| b.size).collect(),
            dims,
        }
    }

    fn map(&self, e: &Entry) -> IEntry {
        match self.kinds[e.block] {
            BlockKind::Dense => IEntry {
                blk: self.start[e.block],
                r: e.row,
                c: e.col,
                v: e.value,
            },
            BlockKind::Diagonal => IEntry {
                blk: self.start[e.block] + e.row,
                r: 0,
                c: 0,
                v: e.value,
            },
        }
    }

    fn gather(&self, x: &[DMatrix<f64>]) -> Blocks {
        (0..self.sizes.len())
            .map(|b| match self.kinds[b] {
                BlockKind::Dense => x[self.start[b]].clone(),
                BlockKind::Diagonal => DMatrix::from_fn(self.sizes[b], self.sizes[b], |i, j| {
                    if i == j {
                        x[self.start[b] + i][(0, 0)]
                    } else {
                        0.0
                    }
                }),
            })
            .collect()
    }
}

pub(super) fn solve_objective(p: &SdpProblem, opts: &SdpOptions) -> SdpSolution {
    let map = BlockMap::new(p);
    let prob = Internal {
        dims: map.dims.clone(),
        cons: p
            .constraints
            .iter()
            .map(|c| c.iter().map(|e| map.map(e)).collect())
            .collect(),
        b: p.rhs.clone(),
        cmin: p
            .objective
            .iter()
            .map(|e| {
                let mut ie = map.map(e);
                ie.v = -ie.v;
                ie
            })
            .collect(),
    };
    let out = ipm(&prob, opts);
    let blocks = map.gather(&out.x);
    let primal_residual = p.primal_residual(&blocks);
    let min_eig = min_eigenvalue(&blocks);
    let ok = primal_residual <= opts.feas_tol && min_eig >= -opts.eig_tol;
    let status = match out.status {
        IpmStatus::Converged if ok => SdpStatus::Feasible,
        IpmStatus::MaxIter => SdpStatus::MaxIter,
        _ => SdpStatus::NumericalFailure,
    };
    SdpSolution {
        status,
        primal_objective: p.objective_value(&blocks),
        dual_objective: -out.dobj,
        blocks,
        y: out.y.iter().copied().collect(),
        primal_residual,
        min_eigenvalue: min_eig,
        margin: None,
        iterations: out.iters,
    }
}

/// Margin maximization. Variables are `X'` plus scalars `w, s >= 0`:
///
/// ```text
/// min w  s.t.  A_i . X' - w tr(A_i) = b_i - tr(A_i),   tr X' + w + s = M
/// ```
///
/// and `X = X' + (1 - w) I`. The trace row keeps both problems bounded.
pub(super) fn solve_margin(p: &SdpProblem, opts: &SdpOptions) -> SdpSolution {
    let map = BlockMap::new(p);
    let n_total: usize = map.dims.iter().sum();
    let bmax = p.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut bound = 10.0 * (n_total as f64 + 1.0) * bmax.max(1.0);
    let mut last = None;
    for _attempt in 0..4 {
        let (sol, bound_binding) = margin_attempt(p, &map, bound, opts);
        let retry = bound_binding && sol.status != SdpStatus::Feasible;
        last = Some(sol);
        if !retry {
            break;
        }
        bound *= 100.0;
    }
    last.expect("at least one attempt")
}

fn margin_attempt(
    p: &SdpProblem,
    map: &BlockMap,
    bound: f64,
    opts: &SdpOptions,
) -> (SdpSolution, bool) {
    let nb = map.dims.len();
    let w_blk = nb;
    let s_blk = nb + 1;
    let mut dims = map.dims.clone();
    dims.push(1);
    dims.push(1);
    let mut cons: Vec<Vec<IEntry>> = Vec::with_capacity(p.constraints.len() + 1);
    let mut b = Vec::with_capacity(p.constraints.len() + 1);
    for (i, c) in p.constraints.iter().enumerate() {
        let mut row: Vec<IEntry> = c.iter().map(|e| map.map(e)).collect();
        let tr: f64 = row.iter().filter(|e| e.r == e.c).map(|e| e.v).sum();
        if tr != 0.0 {
            row.push(IEntry {
                blk: w_blk,
                r: 0,
                c: 0,
                v: -tr,
            });
        }
        cons.push(row);
        b.push(p.rhs[i] - tr);
    }
    let mut trace_row = Vec::new();
    for (blk, &d) in map.dims.iter().enumerate() {
        for k in 0..d {
            trace_row.push(IEntry { blk, r: k, c: k, v: 1.0 });
        }
    }
    trace_row.push(IEntry { blk: w_blk, r: 0, c: 0, v: 1.0 });
    trace_row.push(IEntry { blk: s_blk, r: 0, c: 0, v: 1.0 });
    cons.push(trace_row);
    b.push(bound);
    let prob = Internal {
        dims,
        cons,
        b,
        cmin: vec![IEntry {
            blk: w_blk,
            r: 0,
            c: 0,
            v: 1.0,
        }],
    };
    let out = ipm(&prob, opts);
    let w = out.x[w_blk][(0, 0)];
    let s = out.x[s_blk][(0, 0)];
    let t = 1.0 - w;
    let shifted: Blocks = out.x[..nb]
        .iter()
        .map(|m| m + DMatrix::identity(m.nrows(), m.ncols()) * t)
        .collect();
    let blocks = map.gather(&shifted);
    let primal_residual = p.primal_residual(&blocks);
    let min_eig = min_eigenvalue(&blocks);
    let m = p.constraints.len();
    let y: Vec<f64> = out.y.iter().take(m).copied().collect();
    let point_ok = primal_residual <= opts.feas_tol && min_eig >= -opts.eig_tol;
    let solved = out.status == IpmStatus::Converged || out.near;
    let status = if point_ok {
        SdpStatus::Feasible
    } else if solved && t < -opts.infeas_margin {
        SdpStatus::Infeasible { ray: y.clone() }
    } else if out.status == IpmStatus::MaxIter {
        SdpStatus::MaxIter
    } else {
        SdpStatus::NumericalFailure
    };
    // without the trace row the margin problem is always feasible, so an
    // active row or a diverging dual both mean the bound was too small
    let dual_diverged = out.dobj > 1e6 * (1.0 + out.pobj.abs() + bound);
    let bound_binding = s <= 1e-6 * bound || dual_diverged;
    (
        SdpSolution {
            status,
            blocks,
            y,
            primal_residual,
            min_eigenvalue: min_eig,
            margin: Some(t),
            primal_objective: 1.0 - out.pobj,
            dual_objective: 1.0 - out.dobj,
            iterations: out.iters,
        },
        bound_binding,
    )
}

fn to_blocks(entries: &[IEntry], dims: &[usize]) -> Blocks {
    let mut out: Blocks = dims.iter().map(|&d| DMatrix::zeros(d, d)).collect();
    for e in entries {
        out[e.blk][(e.r, e.c)] += e.v;
        if e.r != e.c {
            out[e.blk][(e.c, e.r)] += e.v;
        }
    }
    out
}

fn apply_a(cons: &[Vec<IEntry>], x: &[DMatrix<f64>]) -> DVector<f64> {
    DVector::from_iterator(
        cons.len(),
        cons.iter().map(|row| {
            row.iter()
                .map(|e| {
                    let v = x[e.blk][(e.r, e.c)];
                    if e.r == e.c {
                        e.v * v
                    } else {
                        2.0 * e.v * v
                    }
                })
                .sum::<f64>()
        }),
    )
}

fn apply_at(cons: &[Vec<IEntry>], y: &DVector<f64>, dims: &[usize]) -> Blocks {
    let mut out: Blocks = dims.iter().map(|&d| DMatrix::zeros(d, d)).collect();
    for (row, yi) in cons.iter().zip(y.iter()) {
        for e in row {
            out[e.blk][(e.r, e.c)] += yi * e.v;
            if e.r != e.c {
                out[e.blk][(e.c, e.r)] += yi * e.v;
            }
        }
    }
    out
}

fn dot(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn fro(a: &[DMatrix<f64>]) -> f64 {
    dot(a, a).sqrt()
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Largest `alpha` with `X + alpha dX >= 0`, capped at `1e6`.
fn max_step(x: &[DMatrix<f64>], dx: &[DMatrix<f64>]) -> f64 {
    let mut alpha: f64 = 1e6;
    for (xb, db) in x.iter().zip(dx) {
        let Some(ch) = Cholesky::new(xb.clone()) else {
            return 0.0;
        };
        let l = ch.l();
        let n = l.nrows();
        let linv = l
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .unwrap_or_else(|| DMatrix::identity(n, n));
        let t = sym(&linv * db * linv.transpose());
        let lmin = SymmetricEigen::new(t)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}

struct Scaling {
    g: DMatrix<f64>,
    ginv: DMatrix<f64>,
    w: DMatrix<f64>,
    d: DVector<f64>,
}

fn nt_scaling(x: &DMatrix<f64>, z: &DMatrix<f64>) -> Option<Scaling> {
    let lx = Cholesky::new(x.clone())?.l();
    let lz = Cholesky::new(z.clone())?.l();
    let n = x.nrows();
    let svd = SVD::new(lz.transpose() * &lx, true, true);
    let v = svd.v_t?.transpose();
    let d = svd.singular_values;
    if d.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return None;
    }
    let dm12 = DMatrix::from_diagonal(&d.map(|s| 1.0 / s.sqrt()));
    let dp12 = DMatrix::from_diagonal(&d.map(f64::sqrt));
    let g = &lx * &v * dm12;
    let lxinv = lx.solve_lower_triangular(&DMatrix::identity(n, n))?;
    let ginv = dp12 * v.transpose() * lxinv;
    let w = sym(&g * g.transpose());
    Some(Scaling { g, ginv, w, d })
}

fn ipm(p: &Internal, opts: &SdpOptions) -> IpmOut {
    let dims = &p.dims;
    let m = p.cons.len();
    let n_total: usize = dims.iter().sum::<usize>().max(1);
    let b = DVector::from_vec(p.b.clone());
    let c = to_blocks(&p.cmin, dims);
    let nrm_b = 1.0 + b.norm();
    let nrm_c = 1.0 + fro(&c);

    let root_n = (n_total as f64).sqrt();
    let mut xi: f64 = 10f64.max(root_n);
    let mut eta: f64 = 10f64.max(root_n).max(fro(&c));
    for (i, row) in p.cons.iter().enumerate() {
        let nrm = row
            .iter()
            .map(|e| if e.r == e.c { e.v * e.v } else { 2.0 * e.v * e.v })
            .sum::<f64>()
            .sqrt();
        xi = xi.max(root_n * (1.0 + p.b[i].abs()) / (1.0 + nrm));
        eta = eta.max(nrm);
    }
    let mut x: Blocks = dims.iter().map(|&d| DMatrix::identity(d, d) * xi).collect();
    let mut z: Blocks = dims.iter().map(|&d| DMatrix::identity(d, d) * eta).collect();
    let mut y = DVector::zeros(m);

    let mut status = IpmStatus::MaxIter;
    let mut near = false;
    let mut pobj = 0.0;
    let mut dobj = 0.0;
    let mut iters = 0;
    let mut stalls = 0;
    for it in 0..opts.max_iter {
        iters = it;
        if let Some(dl) = opts.deadline {
            if Instant::now() >= dl {
                break;
            }
        }
        let rp = &b - apply_a(&p.cons, &x);
        let aty = apply_at(&p.cons, &y, dims);
        let rd: Blocks = (0..dims.len()).map(|k| &c[k] - &z[k] - &aty[k]).collect();
        pobj = dot(&c, &x);
        dobj = b.dot(&y);
        let mu = dot(&x, &z) / n_total as f64;
        let pinf = rp.norm() / nrm_b;
        let dinf = fro(&rd) / nrm_c;
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if !(pinf.is_finite() && dinf.is_finite() && mu.is_finite()) {
            status = IpmStatus::Failure;
            break;
        }
        let tol_near = opts.tol.sqrt() * 1e-2;
        near = pinf < tol_near && dinf < tol_near && gap < tol_near;
        if pinf < opts.tol && dinf < opts.tol && gap < opts.tol {
            status = IpmStatus::Converged;
            break;
        }

        let mut scal = Vec::with_capacity(dims.len());
        for k in 0..dims.len() {
            match nt_scaling(&x[k], &z[k]) {
                Some(s) => scal.push(s),
                None => {
                    status = IpmStatus::Failure;
                    break;
                }
            }
        }
        if status == IpmStatus::Failure {
            break;
        }

        // B_j = W A_j W, only on blocks touched by A_j
        let bmats: Vec<Vec<(usize, DMatrix<f64>)>> = p
            .cons
            .iter()
            .map(|row| {
                let mut acc: Vec<(usize, DMatrix<f64>)> = Vec::new();
                for e in row {
                    let w = &scal[e.blk].w;
                    let pos = match acc.iter().position(|(blk, _)| *blk == e.blk) {
                        Some(pos) => pos,
                        None => {
                            acc.push((e.blk, DMatrix::zeros(dims[e.blk], dims[e.blk])));
                            acc.len() - 1
                        }
                    };
                    let target = &mut acc[pos].1;
                    let wr = w.column(e.r);
                    let wc = w.column(e.c);
                    if e.r == e.c {
                        target.ger(e.v, &wr, &wr, 1.0);
                    } else {
                        target.ger(e.v, &wr, &wc, 1.0);
                        target.ger(e.v, &wc, &wr, 1.0);
                    }
                }
                acc
            })
            .collect();
        let mut schur = DMatrix::zeros(m, m);
        for j in 0..m {
            for i in 0..=j {
                let mut s = 0.0;
                for e in &p.cons[i] {
                    if let Some((_, bm)) = bmats[j].iter().find(|(blk, _)| *blk == e.blk) {
                        let v = bm[(e.r, e.c)];
                        s += if e.r == e.c { e.v * v } else { 2.0 * e.v * v };
                    }
                }
                schur[(i, j)] = s;
                schur[(j, i)] = s;
            }
        }
        let solver = SchurSolver::new(schur);
        let Some(solver) = solver else {
            status = IpmStatus::Failure;
            break;
        };

        let w_rd_w: Blocks = (0..dims.len())
            .map(|k| &scal[k].w * &rd[k] * &scal[k].w)
            .collect();
        let direction = |rcu: &Blocks| -> Option<(Blocks, DVector<f64>, Blocks)> {
            let tmp: Blocks = (0..dims.len()).map(|k| &rcu[k] - &w_rd_w[k]).collect();
            let rhs = &rp - apply_a(&p.cons, &tmp);
            let dy = solver.solve(&rhs)?;
            let atdy = apply_at(&p.cons, &dy, dims);
            let dz: Blocks = (0..dims.len()).map(|k| sym(&rd[k] - &atdy[k])).collect();
            let dx: Blocks = (0..dims.len())
                .map(|k| sym(&rcu[k] - &scal[k].w * &dz[k] * &scal[k].w))
                .collect();
            Some((dx, dy, dz))
        };

        // predictor
        let rcu_aff: Blocks = x.iter().map(|xb| -xb).collect();
        let Some((dx_a, _dy_a, dz_a)) = direction(&rcu_aff) else {
            status = IpmStatus::Failure;
            break;
        };
        let ap = max_step(&x, &dx_a).min(1.0);
        let ad = max_step(&z, &dz_a).min(1.0);
        let x_aff: Blocks = (0..dims.len()).map(|k| &x[k] + &dx_a[k] * ap).collect();
        let z_aff: Blocks = (0..dims.len()).map(|k| &z[k] + &dz_a[k] * ad).collect();
        let mu_aff = dot(&x_aff, &z_aff) / n_total as f64;
        let sigma = if mu > 0.0 {
            (mu_aff / mu).clamp(0.0, 1.0).powi(3)
        } else {
            0.0
        };

        // corrector in the scaled space
        let rcu: Blocks = (0..dims.len())
            .map(|k| {
                let s = &scal[k];
                let dxt = &s.ginv * &dx_a[k] * s.ginv.transpose();
                let dzt = s.g.transpose() * &dz_a[k] * &s.g;
                let cross = &dxt * &dzt + &dzt * &dxt;
                let n = dims[k];
                let mut rhs = -cross;
                for i in 0..n {
                    rhs[(i, i)] += 2.0 * sigma * mu - 2.0 * s.d[i] * s.d[i];
                }
                let lyap = DMatrix::from_fn(n, n, |i, j| rhs[(i, j)] / (s.d[i] + s.d[j]));
                sym(&s.g * lyap * s.g.transpose())
            })
            .collect();
        let Some((dx, dy, dz)) = direction(&rcu) else {
            status = IpmStatus::Failure;
            break;
        };
        let amax_p = max_step(&x, &dx);
        let amax_d = max_step(&z, &dz);
        let gamma = 0.9 + 0.09 * ap.min(ad);
        let step_p = (gamma * amax_p).min(1.0);
        let step_d = (gamma * amax_d).min(1.0);
        for k in 0..dims.len() {
            x[k] += &dx[k] * step_p;
            z[k] += &dz[k] * step_d;
        }
        y += dy * step_d;
        if step_p < 1e-9 && step_d < 1e-9 {
            stalls += 1;
            if stalls >= 3 {
                status = IpmStatus::Failure;
                break;
            }
        } else {
            stalls = 0;
        }
    }
    if status == IpmStatus::MaxIter {
        iters = iters.max(1);
    }
    IpmOut {
        status,
        near: near || status == IpmStatus::Converged,
        x,
        y,
        pobj,
        dobj,
        iters,
    }
}

enum SchurSolver {
    Chol(Cholesky<f64, nalgebra::Dyn>),
    Lu(LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl SchurSolver {
    fn new(mut m: DMatrix<f64>) -> Option<Self> {
        if m.nrows() == 0 {
            return Some(SchurSolver::Lu(LU::new(m)));
        }
        if let Some(ch) = Cholesky::new(m.clone()) {
            return Some(SchurSolver::Chol(ch));
        }
        let scale = (0..m.nrows()).map(|i| m[(i, i)].abs()).fold(0.0, f64::max);
        for i in 0..m.nrows() {
            m[(i, i)] += 1e-13 * scale.max(1e-300);
        }
        if let Some(ch) = Cholesky::new(m.clone()) {
            return Some(SchurSolver::Chol(ch));
        }
        let lu = LU::new(m);
        lu.is_invertible().then_some(SchurSolver::Lu(lu))
    }

    fn solve(&self, rhs: &DVector<f64>) -> Option<DVector<f64>> {
        let out = match self {
            SchurSolver::Chol(c) => c.solve(rhs),
            SchurSolver::Lu(l) => l.solve(rhs)?,
        };
        out.iter().all(|v| v.is_finite()).then_some(out)
    }
}
