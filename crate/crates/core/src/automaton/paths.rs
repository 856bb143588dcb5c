//! Edge-simple, non-stuttering path enumeration and length-3 subpaths.

use std::collections::BTreeSet;

use super::{Graph, State};

/// Paths from `q` to `q2` with no repeated edge and no consecutive repeated
/// state. The target only occurs as the last state; when `q == q2` the
/// single-state path `[q]` is included iff `q` has a self-loop.
///
/// Follows the stack discipline of the classic algorithm: the last pushed
/// vertex is expanded first, and neighbors are scanned in ascending order.
pub fn dfs_paths(g: &Graph, q: State, q2: State) -> Vec<Vec<State>> {
    let mut found = Vec::new();
    if q == q2 && g.has_edge(q, q) {
        found.push(vec![q]);
    }
    let mut to_visit = vec![q];
    let mut paths = vec![vec![q]];
    while let Some(v) = to_visit.pop() {
        let path2v = paths.pop().expect("paths and to_visit stay aligned");
        for &nb in g.neighbors(v) {
            if nb == v {
                continue;
            }
            if nb == q2 {
                let mut p = path2v.clone();
                p.push(nb);
                found.push(p);
            } else if !followed_by(&path2v, v, nb) {
                let mut p = path2v.clone();
                p.push(nb);
                to_visit.push(nb);
                paths.push(p);
            }
        }
    }
    found
}

fn followed_by(path: &[State], v: State, nb: State) -> bool {
    path.windows(2).any(|w| w[0] == v && w[1] == nb)
}

/// Union over initial states of the paths to `q`, sorted and deduplicated.
pub fn path_paths(g: &Graph, initial: &BTreeSet<State>, q: State) -> Vec<Vec<State>> {
    let mut all: BTreeSet<Vec<State>> = BTreeSet::new();
    for &q0 in initial {
        all.extend(dfs_paths(g, q0, q));
    }
    all.into_iter().collect()
}

/// Cycles through `q`; empty when `q` is unreachable from every initial state.
pub fn cyc_paths(g: &Graph, initial: &BTreeSet<State>, q: State) -> Vec<Vec<State>> {
    if path_paths(g, initial, q).is_empty() {
        return Vec::new();
    }
    let mut all = dfs_paths(g, q, q);
    all.sort();
    all.dedup();
    all
}

/// All contiguous state triples of `p`.
pub fn pf3(p: &[State]) -> Vec<[State; 3]> {
    p.windows(3).map(|w| [w[0], w[1], w[2]]).collect()
}

/// Number of triples over both path families of `q`.
pub fn examined_triples(g: &Graph, initial: &BTreeSet<State>, q: State) -> usize {
    let cyc = cyc_paths(g, initial, q);
    let path = path_paths(g, initial, q);
    cyc.iter().chain(&path).map(|p| pf3(p).len()).sum()
}

/// `(|E|-1)(|Q|-1)^(|E|-1)(1+|Q0|)`, saturating; zero when there are no edges.
pub fn triple_bound(num_edges: usize, num_states: usize, num_initial: usize) -> u128 {
    if num_edges == 0 {
        return 0;
    }
    let e1 = (num_edges - 1) as u128;
    let base = num_states.saturating_sub(1) as u128;
    let pow = u32::try_from(num_edges - 1)
        .ok()
        .and_then(|k| base.checked_pow(k))
        .unwrap_or(u128::MAX);
    e1.saturating_mul(pow)
        .saturating_mul(1 + num_initial as u128)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::reference_automaton;
    use super::*;

    #[test]
    fn reference_paths() {
        let a = reference_automaton();
        let g = a.graph();
        let mut p = dfs_paths(&g, 0, 4);
        p.sort();
        assert_eq!(p, vec![vec![0, 1, 4], vec![0, 2, 3, 4], vec![0, 3, 4]]);
        assert_eq!(dfs_paths(&g, 4, 4), vec![vec![4]]);
        assert_eq!(cyc_paths(&g, a.initial(), 4), vec![vec![4]]);
        assert_eq!(path_paths(&g, a.initial(), 4).len(), 3);
    }

    #[test]
    fn pf3_examples() {
        assert_eq!(pf3(&[0, 2, 3, 4]), vec![[0, 2, 3], [2, 3, 4]]);
        assert!(pf3(&[4]).is_empty());
        assert_eq!(pf3(&[0, 1, 2, 3, 4, 5]).len(), 4);
    }

    #[test]
    fn unreachable_accepting_state_has_no_cycles() {
        let g = Graph::new(3, [(0, 1), (2, 2)]);
        let init = BTreeSet::from([0]);
        assert!(cyc_paths(&g, &init, 2).is_empty());
    }

    #[test]
    fn bound_saturates() {
        assert_eq!(triple_bound(3, 3, 1), 2 * 4 * 2);
        assert_eq!(triple_bound(0, 5, 1), 0);
        assert_eq!(triple_bound(200, 100, 1), u128::MAX);
    }
}
