//! Dense primal-dual interior-point solver for small block-diagonal SDPs.
//!
//! Standard form: maximize `C . X` subject to `A_i . X = b_i`, `X >= 0`,
//! where `X` is block diagonal. Constraint and objective matrices are given
//! by their upper-triangular entries and are implicitly symmetric.
//!
//! A problem without objective is a feasibility problem, solved by
//! maximizing the margin `t` such that `X - t I >= 0` is still attainable.

mod ipm;
mod presolve;
mod sdpa;

use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use sdpa::{export_sdpa, import_sdpa};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdpError {
    #[error("block index {0} out of range")]
    BlockOutOfRange(usize),
    #[error("entry ({row},{col}) outside block {block} of size {size}")]
    EntryOutOfRange {
        block: usize,
        row: usize,
        col: usize,
        size: usize,
    },
    #[error("off-diagonal entry ({row},{col}) in diagonal block {block}")]
    OffDiagonalInDiagonalBlock { block: usize, row: usize, col: usize },
    #[error("{constraints} constraints but {rhs} right-hand sides")]
    RhsMismatch { constraints: usize, rhs: usize },
    #[error("malformed SDPA input at line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    Dense,
    Diagonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub size: usize,
    pub kind: BlockKind,
}

impl BlockSpec {
    pub fn dense(size: usize) -> Self {
        BlockSpec {
            size,
            kind: BlockKind::Dense,
        }
    }

    pub fn diagonal(size: usize) -> Self {
        BlockSpec {
            size,
            kind: BlockKind::Diagonal,
        }
    }
}

/// Entry `(row, col)` of a symmetric coefficient matrix, 0-based, `row <= col`.
/// The mirrored entry `(col, row)` carries the same value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

impl Entry {
    pub fn new(block: usize, row: usize, col: usize, value: f64) -> Self {
        Entry {
            block,
            row: row.min(col),
            col: row.max(col),
            value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct SdpProblem {
    pub blocks: Vec<BlockSpec>,
    pub constraints: Vec<Vec<Entry>>,
    pub rhs: Vec<f64>,
    pub objective: Vec<Entry>,
}

impl SdpProblem {
    pub fn new(blocks: Vec<BlockSpec>) -> Self {
        SdpProblem {
            blocks,
            ..Default::default()
        }
    }

    pub fn add_constraint(&mut self, entries: Vec<Entry>, rhs: f64) -> usize {
        self.constraints.push(entries);
        self.rhs.push(rhs);
        self.constraints.len() - 1
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_feasibility(&self) -> bool {
        self.objective.iter().all(|e| e.value == 0.0)
    }

    pub fn validate(&self) -> Result<(), SdpError> {
        if self.rhs.len() != self.constraints.len() {
            return Err(SdpError::RhsMismatch {
                constraints: self.constraints.len(),
                rhs: self.rhs.len(),
            });
        }
        for e in self.constraints.iter().flatten().chain(&self.objective) {
            let spec = self
                .blocks
                .get(e.block)
                .ok_or(SdpError::BlockOutOfRange(e.block))?;
            if e.row > e.col || e.col >= spec.size {
                return Err(SdpError::EntryOutOfRange {
                    block: e.block,
                    row: e.row,
                    col: e.col,
                    size: spec.size,
                });
            }
            if spec.kind == BlockKind::Diagonal && e.row != e.col {
                return Err(SdpError::OffDiagonalInDiagonalBlock {
                    block: e.block,
                    row: e.row,
                    col: e.col,
                });
            }
        }
        Ok(())
    }

    /// `A_i . X` for block matrices `x`.
    pub fn apply(&self, i: usize, x: &[DMatrix<f64>]) -> f64 {
        inner(&self.constraints[i], x)
    }

    pub fn objective_value(&self, x: &[DMatrix<f64>]) -> f64 {
        inner(&self.objective, x)
    }

    /// Largest absolute constraint violation.
    pub fn primal_residual(&self, x: &[DMatrix<f64>]) -> f64 {
        (0..self.constraints.len())
            .map(|i| (self.apply(i, x) - self.rhs[i]).abs())
            .fold(0.0, f64::max)
    }
}

fn inner(entries: &[Entry], x: &[DMatrix<f64>]) -> f64 {
    entries
        .iter()
        .map(|e| {
            let v = x[e.block][(e.row, e.col)];
            if e.row == e.col {
                e.value * v
            } else {
                2.0 * e.value * v
            }
        })
        .sum()
}

/// Solver knobs, shared by every caller.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SdpOptions {
    /// Relative residual and gap tolerance of the interior-point loop.
    pub tol: f64,
    pub max_iter: usize,
    /// Feasible requires a primal residual at most this.
    pub feas_tol: f64,
    /// Feasible requires block eigenvalues at least `-eig_tol`.
    pub eig_tol: f64,
    /// Infeasible requires the optimal margin below `-infeas_margin`.
    pub infeas_margin: f64,
    #[serde(skip)]
    pub deadline: Option<Instant>,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            tol: 1e-8,
            max_iter: 200,
            feas_tol: 1e-7,
            eig_tol: 1e-8,
            infeas_margin: 1e-9,
            deadline: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SdpStatus {
    Feasible,
    /// Dual multipliers of the margin problem act as the improving ray.
    Infeasible { ray: Vec<f64> },
    MaxIter,
    NumericalFailure,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SdpSolution {
    pub status: SdpStatus,
    #[serde(skip)]
    pub blocks: Vec<DMatrix<f64>>,
    pub y: Vec<f64>,
    pub primal_residual: f64,
    pub min_eigenvalue: f64,
    /// Optimal margin of a feasibility problem.
    pub margin: Option<f64>,
    /// `C . X`, or the margin for feasibility problems.
    pub primal_objective: f64,
    /// Dual bound on the primal objective.
    pub dual_objective: f64,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn is_feasible(&self) -> bool {
        self.status == SdpStatus::Feasible
    }
}

/// Smallest eigenvalue over all blocks.
pub fn min_eigenvalue(blocks: &[DMatrix<f64>]) -> f64 {
    blocks
        .iter()
        .filter(|b| b.nrows() > 0)
        .map(|b| {
            nalgebra::SymmetricEigen::new(b.clone())
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Solves `p` after removing dependent equality constraints. Feasibility
/// problems (no objective) are solved for the largest margin `t` with
/// `X - t I` feasible.
pub fn solve(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution, SdpError> {
    p.validate()?;
    let m = p.num_constraints();
    let keep = match presolve::presolve(p) {
        presolve::Presolve::Rows(keep) => keep,
        presolve::Presolve::Inconsistent(ray) => {
            let blocks: Vec<DMatrix<f64>> = p
                .blocks
                .iter()
                .map(|b| DMatrix::zeros(b.size, b.size))
                .collect();
            return Ok(SdpSolution {
                status: SdpStatus::Infeasible { ray: ray.clone() },
                primal_residual: p.primal_residual(&blocks),
                min_eigenvalue: 0.0,
                blocks,
                y: ray,
                margin: None,
                primal_objective: f64::NEG_INFINITY,
                dual_objective: f64::NEG_INFINITY,
                iterations: 0,
            });
        }
    };
    let run = |q: &SdpProblem| {
        if q.is_feasibility() {
            ipm::solve_margin(q, opts)
        } else {
            ipm::solve_objective(q, opts)
        }
    };
    if keep.len() == m {
        return Ok(run(p));
    }
    let reduced = SdpProblem {
        blocks: p.blocks.clone(),
        constraints: keep.iter().map(|&i| p.constraints[i].clone()).collect(),
        rhs: keep.iter().map(|&i| p.rhs[i]).collect(),
        objective: p.objective.clone(),
    };
    let mut sol = run(&reduced);
    let expand = |v: &[f64]| {
        let mut full = vec![0.0; m];
        for (k, &i) in keep.iter().enumerate() {
            full[i] = v[k];
        }
        full
    };
    sol.y = expand(&sol.y);
    if let SdpStatus::Infeasible { ray } = &sol.status {
        sol.status = SdpStatus::Infeasible { ray: expand(ray) };
    }
    sol.primal_residual = p.primal_residual(&sol.blocks);
    if sol.status == SdpStatus::Feasible && sol.primal_residual > opts.feas_tol {
        sol.status = SdpStatus::NumericalFailure;
    }
    Ok(sol)
}
