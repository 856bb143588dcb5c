//! Nondeterministic Büchi automata with symbolic guards.

mod guard;
mod io;
mod paths;
mod translate;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, LassoWord};

pub use guard::{Cube, Guard};
pub use paths::{cyc_paths, dfs_paths, examined_triples, path_paths, pf3, triple_bound};
pub use translate::translate;

pub type State = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AutomatonError {
    #[error("no transition from q{0} to q{1}")]
    MissingEdge(State, State),
    #[error("state q{0} out of range")]
    StateOutOfRange(State),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub from: State,
    pub to: State,
    pub guard: Guard,
}

/// States are `0..num_states`. At most one transition per ordered state pair;
/// parallel guards are merged by disjunction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuchiAutomaton {
    props: Vec<String>,
    num_states: usize,
    transitions: Vec<Transition>,
    initial: BTreeSet<State>,
    accepting: BTreeSet<State>,
}

impl BuchiAutomaton {
    pub fn new(
        props: Vec<String>,
        num_states: usize,
        transitions: impl IntoIterator<Item = (State, Guard, State)>,
        initial: impl IntoIterator<Item = State>,
        accepting: impl IntoIterator<Item = State>,
    ) -> Result<Self, AutomatonError> {
        let mut merged: BTreeMap<(State, State), Guard> = BTreeMap::new();
        for (q, g, q2) in transitions {
            for s in [q, q2] {
                if s >= num_states {
                    return Err(AutomatonError::StateOutOfRange(s));
                }
            }
            if g.is_false() {
                continue;
            }
            merged
                .entry((q, q2))
                .and_modify(|e| *e = e.or(&g))
                .or_insert(g);
        }
        let initial: BTreeSet<State> = initial.into_iter().collect();
        let accepting: BTreeSet<State> = accepting.into_iter().collect();
        for &s in initial.iter().chain(&accepting) {
            if s >= num_states {
                return Err(AutomatonError::StateOutOfRange(s));
            }
        }
        Ok(BuchiAutomaton {
            props,
            num_states,
            transitions: merged
                .into_iter()
                .map(|((from, to), guard)| Transition { from, to, guard })
                .collect(),
            initial,
            accepting,
        })
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn initial(&self) -> &BTreeSet<State> {
        &self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<State> {
        &self.accepting
    }

    pub fn is_accepting(&self, q: State) -> bool {
        self.accepting.contains(&q)
    }

    pub fn guard(&self, q: State, q2: State) -> Option<&Guard> {
        self.transitions
            .binary_search_by(|t| (t.from, t.to).cmp(&(q, q2)))
            .ok()
            .map(|i| &self.transitions[i].guard)
    }

    /// Disjunction of all guards on the edge `q -> q2`.
    pub fn guard_letters(&self, q: State, q2: State) -> Result<Formula, AutomatonError> {
        self.guard(q, q2)
            .map(Guard::to_formula)
            .ok_or(AutomatonError::MissingEdge(q, q2))
    }

    pub fn successors(&self, q: State) -> impl Iterator<Item = &Transition> {
        let start = self.transitions.partition_point(|t| t.from < q);
        self.transitions[start..].iter().take_while(move |t| t.from == q)
    }

    pub fn graph(&self) -> Graph {
        Graph::new(
            self.num_states,
            self.transitions.iter().map(|t| (t.from, t.to)),
        )
    }

    /// Keeps only the transitions accepted by `keep`.
    pub fn retain_transitions(&self, mut keep: impl FnMut(&Transition) -> bool) -> BuchiAutomaton {
        let mut out = self.clone();
        out.transitions.retain(|t| keep(t));
        out
    }

    /// Whether some run on `w` visits an accepting state infinitely often.
    pub fn accepts(&self, w: &LassoWord) -> bool {
        let len = w.len();
        let ns = self.num_states;
        let node = |pos: usize, q: State| pos * ns + q;
        let total = len * ns;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
        for pos in 0..len {
            let a = w.letter(pos);
            let next = w.succ(pos);
            for t in &self.transitions {
                if t.guard.eval(a) {
                    adj[node(pos, t.from)].push(node(next, t.to));
                }
            }
        }
        let mut reach = vec![false; total];
        let mut stack: Vec<usize> = self.initial.iter().map(|&q| node(0, q)).collect();
        for &s in &stack {
            reach[s] = true;
        }
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !reach[u] {
                    reach[u] = true;
                    stack.push(u);
                }
            }
        }
        let comp = tarjan_scc(total, &adj);
        let mut size = vec![0usize; total];
        for &c in &comp {
            size[c] += 1;
        }
        (0..total).any(|v| {
            reach[v]
                && self.accepting.contains(&(v % ns))
                && (size[comp[v]] > 1 || adj[v].contains(&v))
        })
    }

    pub fn to_text(&self) -> String {
        io::to_text(self)
    }

    pub fn from_text(text: &str) -> Result<BuchiAutomaton, AutomatonError> {
        io::from_text(text)
    }
}

/// Underlying directed graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<State>>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (State, State)>) -> Graph {
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            adj[a].push(b);
        }
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        Graph { adj }
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn neighbors(&self, v: State) -> &[State] {
        &self.adj[v]
    }

    pub fn has_edge(&self, a: State, b: State) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (State, State)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, l)| l.iter().map(move |&b| (a, b)))
    }
}

/// Iterative Tarjan; returns a component id per vertex.
pub(crate) fn tarjan_scc(n: usize, adj: &[Vec<usize>]) -> Vec<usize> {
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSET; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, i)) = call.last() {
            if i < adj[v].len() {
                let u = adj[v][i];
                call.last_mut().unwrap().1 += 1;
                if index[u] == UNSET {
                    index[u] = next_index;
                    low[u] = next_index;
                    next_index += 1;
                    stack.push(u);
                    on_stack[u] = true;
                    call.push((u, 0));
                } else if on_stack[u] {
                    low[v] = low[v].min(index[u]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn props4() -> Vec<String> {
        (0..4).map(|i| format!("p{i}")).collect()
    }

    fn lit(f: &str) -> Guard {
        Guard::from_formula(&Formula::parse(f, &props4()).unwrap()).unwrap()
    }

    /// The five-state automaton for the negated running example, with the
    /// simplified, region-independent guards.
    pub fn reference_automaton() -> BuchiAutomaton {
        BuchiAutomaton::new(
            props4(),
            5,
            [
                (0, lit("p0"), 1),
                (0, lit("true"), 2),
                (0, lit("p2"), 3),
                (1, lit("!p1"), 1),
                (1, lit("p2"), 4),
                (2, lit("true"), 2),
                (2, lit("p2"), 3),
                (3, lit("true"), 3),
                (3, lit("p3"), 4),
                (4, lit("true"), 4),
            ],
            [0],
            [4],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn reference_acceptance() {
        let a = reference_automaton();
        let w = LassoWord::new(vec![0b0100, 0b1000], vec![0]).unwrap();
        assert!(a.accepts(&w));
        let empty = LassoWord::new(vec![], vec![0]).unwrap();
        assert!(!a.accepts(&empty));
    }

    #[test]
    fn guard_letters_and_missing_edges() {
        let a = reference_automaton();
        assert_eq!(a.guard_letters(2, 2).unwrap(), Formula::True);
        assert_eq!(a.guard_letters(0, 1).unwrap(), Formula::Atom(0));
        assert_eq!(a.guard_letters(4, 0), Err(AutomatonError::MissingEdge(4, 0)));
    }

    #[test]
    fn scc_components() {
        let adj = vec![vec![1], vec![2], vec![0, 3], vec![]];
        let c = tarjan_scc(4, &adj);
        assert_eq!(c[0], c[1]);
        assert_eq!(c[1], c[2]);
        assert_ne!(c[2], c[3]);
    }
}
