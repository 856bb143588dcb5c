//! Tableau translation to a generalized Büchi automaton, followed by
//! degeneralization and a bisimulation quotient.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::{tarjan_scc, BuchiAutomaton, Cube, Guard, State};
use crate::formula::Formula;

type Obligations = BTreeSet<Formula>;

/// Builds an automaton accepting exactly the words satisfying `f`.
pub fn translate(f: &Formula, props: &[String]) -> BuchiAutomaton {
    let root = f.nnf();
    let mut eventualities = BTreeSet::new();
    collect_eventualities(&root, &mut eventualities);
    let eventualities: Vec<Formula> = eventualities.into_iter().collect();

    // generalized automaton over obligation sets
    let mut ids: HashMap<Obligations, usize> = HashMap::new();
    let mut sets: Vec<Obligations> = Vec::new();
    let mut edges: Vec<Vec<(Cube, usize)>> = Vec::new();
    let init: Obligations = [root].into_iter().filter(|f| *f != Formula::True).collect();
    ids.insert(init.clone(), 0);
    sets.push(init);
    let mut i = 0;
    while i < sets.len() {
        let mut out = Vec::new();
        for (cube, mut next) in expand_state(&sets[i]) {
            next.remove(&Formula::True);
            let j = *ids.entry(next.clone()).or_insert_with(|| {
                sets.push(next);
                sets.len() - 1
            });
            out.push((cube, j));
        }
        edges.push(out);
        i += 1;
    }

    // acc[k][s]: s belongs to the k-th acceptance set
    let acc: Vec<Vec<bool>> = eventualities
        .iter()
        .map(|u| sets.iter().map(|s| !s.contains(u)).collect())
        .collect();
    let (n, trans, accepting) = degeneralize(&edges, &acc);
    let (n, trans, accepting) = prune(n, trans, accepting);
    let (n, trans, accepting) = quotient(n, &trans, &accepting, props.len());
    let (n, trans, accepting) = renumber(n, &trans, &accepting);
    BuchiAutomaton::new(
        props.to_vec(),
        n,
        trans,
        [0],
        accepting,
    )
    .expect("translation produces consistent states")
}

fn collect_eventualities(f: &Formula, out: &mut BTreeSet<Formula>) {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => {}
        Formula::Until(a, b) => {
            out.insert(f.clone());
            collect_eventualities(a, out);
            collect_eventualities(b, out);
        }
        Formula::Eventually(a) => {
            out.insert(f.clone());
            collect_eventualities(a, out);
        }
        Formula::Not(a) | Formula::Always(a) => collect_eventualities(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Release(a, b) => {
            collect_eventualities(a, out);
            collect_eventualities(b, out);
        }
    }
}

fn expand_state(s: &Obligations) -> Vec<(Cube, Obligations)> {
    let mut out = Vec::new();
    expand(s.iter().cloned().collect(), Cube::TRUE, BTreeSet::new(), &mut out);
    out.sort();
    out.dedup();
    // drop branches dominated by a weaker guard with fewer obligations
    let keep: Vec<bool> = (0..out.len())
        .map(|i| {
            !(0..out.len()).any(|j| {
                j != i && out[j].0.subsumes(&out[i].0) && out[j].1.is_subset(&out[i].1)
            })
        })
        .collect();
    out.into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(e, _)| e)
        .collect()
}

fn expand(
    mut todo: Vec<Formula>,
    mut cube: Cube,
    mut next: Obligations,
    out: &mut Vec<(Cube, Obligations)>,
) {
    while let Some(f) = todo.pop() {
        match f {
            Formula::True => {}
            Formula::False => return,
            Formula::Atom(i) => {
                cube.pos |= 1 << i;
                if cube.pos & cube.neg != 0 {
                    return;
                }
            }
            Formula::Not(a) => match *a {
                Formula::Atom(i) => {
                    cube.neg |= 1 << i;
                    if cube.pos & cube.neg != 0 {
                        return;
                    }
                }
                _ => unreachable!("input is in negation normal form"),
            },
            Formula::And(a, b) => {
                todo.push(*a);
                todo.push(*b);
            }
            Formula::Or(a, b) => {
                let mut left = todo.clone();
                left.push(*a);
                expand(left, cube, next.clone(), out);
                todo.push(*b);
            }
            Formula::Until(ref a, ref b) => {
                let mut now = todo.clone();
                now.push((**b).clone());
                expand(now, cube, next.clone(), out);
                todo.push((**a).clone());
                next.insert(f);
            }
            Formula::Release(ref a, ref b) => {
                let mut both = todo.clone();
                both.push((**a).clone());
                both.push((**b).clone());
                expand(both, cube, next.clone(), out);
                todo.push((**b).clone());
                next.insert(f);
            }
            Formula::Eventually(ref a) => {
                let mut now = todo.clone();
                now.push((**a).clone());
                expand(now, cube, next.clone(), out);
                next.insert(f);
            }
            Formula::Always(ref a) => {
                todo.push((**a).clone());
                next.insert(f);
            }
            Formula::Implies(..) => unreachable!("input is in negation normal form"),
        }
    }
    out.push((cube, next));
}

type Trans = Vec<(State, Guard, State)>;

/// Level counters with jumps, restricted to each strongly connected
/// component: only acceptance sets that cover part of a component are
/// tracked there, and the level resets when a transition leaves it. A state
/// is accepting when it completes the remaining sets of its level.
fn degeneralize(edges: &[Vec<(Cube, usize)>], acc: &[Vec<bool>]) -> (usize, Trans, Vec<bool>) {
    let n = edges.len();
    let adj: Vec<Vec<usize>> = edges
        .iter()
        .map(|l| l.iter().map(|(_, t)| *t).collect())
        .collect();
    let comp = tarjan_scc(n, &adj);
    let num_comp = comp.iter().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); num_comp];
    for v in 0..n {
        members[comp[v]].push(v);
    }
    // None: the component can never be accepting
    let relevant: Vec<Option<Vec<usize>>> = members
        .iter()
        .map(|m| {
            let cyclic = m.len() > 1 || adj[m[0]].contains(&m[0]);
            if !cyclic {
                return None;
            }
            let mut sets = Vec::new();
            for (k, a) in acc.iter().enumerate() {
                let hit = m.iter().filter(|&&v| a[v]).count();
                if hit == 0 {
                    return None;
                }
                if hit < m.len() {
                    sets.push(k);
                }
            }
            Some(sets)
        })
        .collect();

    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut nodes = vec![(0usize, 0usize)];
    ids.insert((0, 0), 0);
    let mut trans: BTreeMap<(usize, usize), Vec<Cube>> = BTreeMap::new();
    let mut accepting = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let (s, level) = nodes[i];
        let (done, next_level) = match &relevant[comp[s]] {
            None => (false, 0),
            Some(sets) => {
                let mut j = level;
                while j < sets.len() && acc[sets[j]][s] {
                    j += 1;
                }
                if j >= sets.len() {
                    (true, 0)
                } else {
                    (false, j)
                }
            }
        };
        accepting.push(done);
        for &(cube, t) in &edges[s] {
            let key = (t, if comp[t] == comp[s] { next_level } else { 0 });
            let id = *ids.entry(key).or_insert_with(|| {
                nodes.push(key);
                nodes.len() - 1
            });
            trans.entry((i, id)).or_default().push(cube);
        }
        i += 1;
    }
    let trans = trans
        .into_iter()
        .map(|((a, b), cubes)| (a, Guard::from_cubes(cubes), b))
        .collect();
    (nodes.len(), trans, accepting)
}

/// Removes states that cannot reach an accepting cycle and clears
/// acceptance outside nontrivial components. State 0 stays initial.
fn prune(n: usize, trans: Trans, accepting: Vec<bool>) -> (usize, Trans, Vec<bool>) {
    let mut adj = vec![Vec::new(); n];
    let mut radj = vec![Vec::new(); n];
    for (a, _, b) in &trans {
        adj[*a].push(*b);
        radj[*b].push(*a);
    }
    let comp = tarjan_scc(n, &adj);
    let mut size = vec![0usize; n];
    for &c in &comp {
        size[c] += 1;
    }
    let cyclic: Vec<bool> = (0..n)
        .map(|v| size[comp[v]] > 1 || adj[v].contains(&v))
        .collect();
    let mut useful = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| accepting[v] && cyclic[v]).collect();
    for &v in &stack {
        useful[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &u in &radj[v] {
            if !useful[u] {
                useful[u] = true;
                stack.push(u);
            }
        }
    }
    if !useful[0] {
        return (1, Vec::new(), vec![false]);
    }
    let mut map = vec![usize::MAX; n];
    let mut count = 0;
    for v in 0..n {
        if useful[v] {
            map[v] = count;
            count += 1;
        }
    }
    let trans = trans
        .into_iter()
        .filter(|(a, _, b)| useful[*a] && useful[*b])
        .map(|(a, g, b)| (map[a], g, map[b]))
        .collect();
    let accepting = (0..n)
        .filter(|&v| useful[v])
        .map(|v| accepting[v] && cyclic[v])
        .collect();
    (count, trans, accepting)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum GuardKey {
    Table(Vec<u64>),
    Syntax(Guard),
}

fn guard_key(g: &Guard, n_props: usize) -> GuardKey {
    if n_props <= 16 {
        GuardKey::Table(g.truth_table(n_props))
    } else {
        GuardKey::Syntax(g.clone())
    }
}

/// Coarsest forward bisimulation respecting acceptance; guards into each
/// target block are compared semantically.
fn quotient(n: usize, trans: &Trans, accepting: &[bool], n_props: usize) -> (usize, Trans, Vec<bool>) {
    let mut out_edges: Vec<Vec<(usize, &Guard)>> = vec![Vec::new(); n];
    for (a, g, b) in trans {
        out_edges[*a].push((*b, g));
    }
    let mut block: Vec<usize> = accepting.iter().map(|&a| a as usize).collect();
    let mut num_blocks = block.iter().copied().collect::<BTreeSet<_>>().len();
    loop {
        let mut sigs: BTreeMap<(usize, Vec<(usize, GuardKey)>), usize> = BTreeMap::new();
        let mut new_block = vec![0; n];
        for v in 0..n {
            let mut per: BTreeMap<usize, Guard> = BTreeMap::new();
            for (t, g) in &out_edges[v] {
                per.entry(block[*t])
                    .and_modify(|e| *e = e.or(g))
                    .or_insert_with(|| (*g).clone());
            }
            let sig: Vec<(usize, GuardKey)> = per
                .into_iter()
                .map(|(b, g)| (b, guard_key(&g, n_props)))
                .collect();
            let next_id = sigs.len();
            new_block[v] = *sigs.entry((block[v], sig)).or_insert(next_id);
        }
        let count = sigs.len();
        block = new_block;
        if count == num_blocks {
            break;
        }
        num_blocks = count;
    }
    let mut rep = vec![usize::MAX; num_blocks];
    for v in (0..n).rev() {
        rep[block[v]] = v;
    }
    let mut q_trans: BTreeMap<(usize, usize), Guard> = BTreeMap::new();
    for b in 0..num_blocks {
        for (t, g) in &out_edges[rep[b]] {
            q_trans
                .entry((b, block[*t]))
                .and_modify(|e| *e = e.or(g))
                .or_insert_with(|| (*g).clone());
        }
    }
    let acc = (0..num_blocks).map(|b| accepting[rep[b]]).collect();
    // keep the initial state's block first
    let init = block[0];
    let swap = |b: usize| {
        if b == init {
            0
        } else if b == 0 {
            init
        } else {
            b
        }
    };
    let mut acc_vec: Vec<bool> = acc;
    acc_vec.swap(0, init);
    let trans = q_trans
        .into_iter()
        .map(|((a, b), g)| (swap(a), g, swap(b)))
        .collect();
    (num_blocks, trans, acc_vec)
}

/// Breadth-first numbering from state 0, successors visited in guard order.
fn renumber(n: usize, trans: &Trans, accepting: &[bool]) -> (usize, Trans, Vec<State>) {
    let mut out_edges: Vec<Vec<(&Guard, usize)>> = vec![Vec::new(); n];
    for (a, g, b) in trans {
        out_edges[*a].push((g, *b));
    }
    for l in &mut out_edges {
        l.sort();
    }
    let mut map = vec![usize::MAX; n];
    let mut queue = VecDeque::from([0]);
    map[0] = 0;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &(_, t) in &out_edges[v] {
            if map[t] == usize::MAX {
                map[t] = count;
                count += 1;
                queue.push_back(t);
            }
        }
    }
    let trans = trans
        .iter()
        .filter(|(a, _, b)| map[*a] != usize::MAX && map[*b] != usize::MAX)
        .map(|(a, g, b)| (map[*a], g.clone(), map[*b]))
        .collect();
    let acc = (0..n)
        .filter(|&v| map[v] != usize::MAX && accepting[v])
        .map(|v| map[v])
        .collect();
    (count, trans, acc)
}
