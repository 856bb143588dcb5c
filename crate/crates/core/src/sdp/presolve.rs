//! Removal of linearly dependent equality constraints.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};

use super::SdpProblem;

/// Pivots below this fraction of a unit row are treated as dependent.
const PIVOT_TOL: f64 = 1e-14;
const CONSISTENCY_TOL: f64 = 1e-9;

pub(super) enum Presolve {
    /// Indices of a maximal independent subset of the constraints.
    Rows(Vec<usize>),
    /// The equalities alone are inconsistent; `y` has `y' A = 0`, `y' b != 0`.
    Inconsistent(Vec<f64>),
}

/// Rows as sparse vectors over the upper-triangular entries of `X`.
fn sparse_rows(p: &SdpProblem) -> Vec<Vec<(usize, f64)>> {
    let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
    p.constraints
        .iter()
        .map(|c| {
            let mut row: BTreeMap<usize, f64> = BTreeMap::new();
            for e in c {
                let (i, j) = (e.row.min(e.col), e.row.max(e.col));
                let n = index.len();
                let col = *index.entry((e.block, i, j)).or_insert(n);
                *row.entry(col).or_insert(0.0) += if i == j { e.value } else { 2.0 * e.value };
            }
            row.into_iter().filter(|(_, c)| *c != 0.0).collect()
        })
        .collect()
}

pub(super) fn presolve(p: &SdpProblem) -> Presolve {
    let rows = sparse_rows(p);
    let m = rows.len();
    let norms: Vec<f64> = rows
        .iter()
        .map(|r| r.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt())
        .collect();
    let bmax = p.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut live = Vec::new();
    for i in 0..m {
        if norms[i] > 0.0 {
            live.push(i);
        } else if p.rhs[i].abs() > CONSISTENCY_TOL * (1.0 + bmax) {
            let mut y = vec![0.0; m];
            y[i] = 1.0;
            return Presolve::Inconsistent(y);
        }
    }
    // Gram matrix of the normalized rows through the column incidence
    let pos: HashMap<usize, usize> = live.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut by_col: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    for &i in &live {
        for &(c, v) in &rows[i] {
            by_col.entry(c).or_default().push((pos[&i], v / norms[i]));
        }
    }
    let n = live.len();
    let mut g = DMatrix::<f64>::zeros(n, n);
    for entries in by_col.values() {
        for &(a, va) in entries {
            for &(b, vb) in entries {
                g[(a, b)] += va * vb;
            }
        }
    }
    // pivoted Cholesky; pivots are the kept rows
    let mut d: Vec<f64> = (0..n).map(|i| g[(i, i)]).collect();
    let mut l = DMatrix::<f64>::zeros(n, n);
    let mut chosen: Vec<usize> = Vec::new();
    let mut used = vec![false; n];
    for k in 0..n {
        let (piv, dmax) = (0..n)
            .filter(|&i| !used[i])
            .map(|i| (i, d[i]))
            .fold((usize::MAX, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        if piv == usize::MAX || dmax <= PIVOT_TOL {
            break;
        }
        used[piv] = true;
        chosen.push(piv);
        let s = dmax.sqrt();
        for i in 0..n {
            if used[i] && i != piv {
                continue;
            }
            let mut v = g[(i, piv)];
            for t in 0..k {
                v -= l[(i, t)] * l[(piv, t)];
            }
            l[(i, k)] = v / s;
        }
        for i in 0..n {
            if !used[i] {
                d[i] -= l[(i, k)] * l[(i, k)];
            }
        }
    }
    if chosen.len() == n {
        return Presolve::Rows(live);
    }
    // dependent rows: least-squares combination of the kept ones
    let k = chosen.len();
    let gkk = DMatrix::from_fn(k, k, |a, b| g[(chosen[a], chosen[b])]);
    let bhat = |i: usize| p.rhs[live[i]] / norms[live[i]];
    let bk = DVector::from_fn(k, |a, _| bhat(chosen[a]));
    let chol = gkk.cholesky();
    for i in (0..n).filter(|i| !used[*i]) {
        let gi = DVector::from_fn(k, |a, _| g[(chosen[a], i)]);
        let c = match &chol {
            Some(ch) => ch.solve(&gi),
            None => DVector::zeros(k),
        };
        let predicted = c.dot(&bk);
        if (bhat(i) - predicted).abs() > CONSISTENCY_TOL * (1.0 + bmax) {
            let mut y = vec![0.0; m];
            y[live[i]] = 1.0 / norms[live[i]];
            for a in 0..k {
                y[live[chosen[a]]] -= c[a] / norms[live[chosen[a]]];
            }
            return Presolve::Inconsistent(y);
        }
    }
    let mut keep: Vec<usize> = chosen.iter().map(|&a| live[a]).collect();
    keep.sort_unstable();
    Presolve::Rows(keep)
}

#[cfg(test)]
mod tests {
    use super::super::{BlockSpec, Entry};
    use super::*;

    #[test]
    fn drops_duplicate_rows() {
        let mut p = SdpProblem::new(vec![BlockSpec::dense(2)]);
        p.add_constraint(vec![Entry::new(0, 0, 0, 1.0)], 1.0);
        p.add_constraint(vec![Entry::new(0, 0, 0, 2.0)], 2.0);
        p.add_constraint(vec![Entry::new(0, 1, 1, 1.0), Entry::new(0, 0, 1, 1.0)], 0.5);
        match presolve(&p) {
            Presolve::Rows(r) => assert_eq!(r.len(), 2),
            Presolve::Inconsistent(_) => panic!(),
        }
    }

    #[test]
    fn detects_inconsistency() {
        let mut p = SdpProblem::new(vec![BlockSpec::dense(2)]);
        p.add_constraint(vec![Entry::new(0, 0, 0, 1.0)], 1.0);
        p.add_constraint(vec![Entry::new(0, 0, 0, 2.0)], 3.0);
        let Presolve::Inconsistent(y) = presolve(&p) else {
            panic!()
        };
        // y' A = 0 and y' b != 0
        assert!((y[0] + 2.0 * y[1]).abs() < 1e-12);
        assert!((y[0] + 3.0 * y[1]).abs() > 1e-3);
    }
}
