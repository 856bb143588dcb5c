//! Verification pipeline: translate the negated specification, prune
//! transitions with empty guard regions, enumerate cycle and path families
//! per accepting state, and discharge length-3 subpath obligations by
//! disjointness or barrier certificates.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automaton::{cyc_paths, path_paths, pf3, translate, BuchiAutomaton, State};
use crate::formula::Formula;
use crate::problem::{Problem, ProblemOptions, System};
use crate::region::{
    closures_disjoint, is_empty, ball_form, BallForm, DisjointOptions, Disjointness,
    DisjointnessCert, Emptiness, PropositionRegions, Region,
};
use crate::sdp::export_sdpa;
use crate::sos::{synthesize_with, Attempt, BarrierCertificate, BarrierOptions, Synthesis, ValidationReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("invalid option: {0}")]
    Option(String),
    #[error("formula mentions {0} propositions but the system defines {1}")]
    Propositions(usize, usize),
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub barrier: BarrierOptions,
    pub disjoint: DisjointOptions,
    /// Seconds per obligation.
    pub time_budget: f64,
    /// Zero out timings in the report.
    pub normalize_timings: bool,
    /// Directory receiving every barrier SDP in SDPA format.
    pub sdpa_dir: Option<PathBuf>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            barrier: BarrierOptions::default(),
            disjoint: DisjointOptions::default(),
            time_budget: 120.0,
            normalize_timings: false,
            sdpa_dir: None,
        }
    }
}

impl VerifyOptions {
    /// Defaults overridden by the options table of a problem file.
    pub fn from_problem(p: &ProblemOptions) -> Self {
        let mut o = VerifyOptions::default();
        if let Some(d) = p.max_degree {
            o.barrier.max_degree = d;
        }
        if let Some(e) = p.epsilon {
            o.barrier.epsilon = e;
        }
        if let Some(t) = p.time_budget {
            o.time_budget = t;
        }
        if let Some(s) = p.seed {
            o.barrier.seed = s;
            o.disjoint.seed = s;
        }
        o
    }

    fn check(&self) -> Result<(), VerifyError> {
        if !(self.barrier.epsilon > 0.0) {
            return Err(VerifyError::Option("epsilon must be positive".into()));
        }
        if self.barrier.max_degree < 2 {
            return Err(VerifyError::Option("max degree must be at least 2".into()));
        }
        if !(self.time_budget > 0.0) {
            return Err(VerifyError::Option("time budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Cycle,
    Path,
}

/// One triple `(q0, q1, q2)` of a representative path, with the guard
/// regions `Y0` of `q0 -> q1`, `Y1` of `q1 -> q2` and, when `q1` has a
/// self-loop, `Ys` of `q1 -> q1`.
#[derive(Clone, Debug)]
pub struct Obligation {
    pub id: usize,
    pub state: State,
    pub family: Family,
    pub path: Vec<State>,
    pub triple: [State; 3],
    pub start: Region,
    pub target: Region,
    pub self_loop: Option<Region>,
}

impl Obligation {
    /// Transit set for the barrier: `Y0 u Y1`, plus the self-loop region.
    pub fn transit(&self) -> Region {
        let mut y = self.start.union(&self.target);
        if let Some(s) = &self.self_loop {
            y = y.union(s);
        }
        y.simplified()
    }
}

/// Obligation ids of one representative path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathGroup {
    pub path: Vec<State>,
    pub obligations: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateObligations {
    pub state: State,
    pub cycles: Vec<PathGroup>,
    pub paths: Vec<PathGroup>,
}

#[derive(Clone, Debug)]
pub struct ObligationSet {
    /// Automaton after pruning.
    pub automaton: BuchiAutomaton,
    pub pruned: Vec<(State, State)>,
    pub obligations: Vec<Obligation>,
    pub states: Vec<StateObligations>,
}

/// Removes transitions whose guard region is proved empty, then enumerates
/// the cycle and path families of every accepting state.
pub fn build_obligations(
    a: &BuchiAutomaton,
    regions: &PropositionRegions,
    opts: &DisjointOptions,
) -> ObligationSet {
    let mut guard_regions: BTreeMap<(State, State), Region> = BTreeMap::new();
    let mut pruned = Vec::new();
    for t in a.transitions() {
        let r = regions.guard_region(&t.guard);
        let empty = r.is_trivially_empty() || matches!(is_empty(&r, opts), Emptiness::Empty(_));
        if empty {
            pruned.push((t.from, t.to));
        } else {
            guard_regions.insert((t.from, t.to), r);
        }
    }
    let automaton = a.retain_transitions(|t| guard_regions.contains_key(&(t.from, t.to)));
    let g = automaton.graph();
    let mut obligations = Vec::new();
    let mut states = Vec::new();
    for &q in automaton.accepting() {
        let mut group = |family: Family, p: Vec<State>| {
            let ids = pf3(&p)
                .into_iter()
                .map(|t| {
                    let id = obligations.len();
                    obligations.push(Obligation {
                        id,
                        state: q,
                        family,
                        path: p.clone(),
                        triple: t,
                        start: guard_regions[&(t[0], t[1])].clone(),
                        target: guard_regions[&(t[1], t[2])].clone(),
                        self_loop: guard_regions.get(&(t[1], t[1])).cloned(),
                    });
                    id
                })
                .collect();
            PathGroup {
                path: p,
                obligations: ids,
            }
        };
        let cycles = cyc_paths(&g, automaton.initial(), q)
            .into_iter()
            .map(|p| group(Family::Cycle, p))
            .collect();
        let paths = path_paths(&g, automaton.initial(), q)
            .into_iter()
            .map(|p| group(Family::Path, p))
            .collect();
        states.push(StateObligations {
            state: q,
            cycles,
            paths,
        });
    }
    ObligationSet {
        automaton,
        pruned,
        obligations,
        states,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Closures of `Y0` and `Y1` are disjoint.
    DisjointClosures,
    /// Barrier with `Y = Y0 u Y1`.
    Barrier2,
    /// Barrier with `Y = Y0 u Y1 u Ys`.
    Barrier3,
    /// Self-loop region proved empty.
    EmptyLoop,
    /// Same sets as an earlier obligation.
    ReusedFrom(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub method: Method,
    /// Method of the original evidence when reused.
    pub origin: Method,
    pub disjointness: Vec<DisjointnessCert>,
    pub barrier: Option<String>,
    pub degree: Option<u32>,
    pub validation: Option<ValidationReport>,
    #[serde(skip)]
    pub certificate: Option<Arc<BarrierCertificate>>,
}

impl Evidence {
    fn reused(&self, from: usize) -> Evidence {
        Evidence {
            method: Method::ReusedFrom(from),
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ObligationReport {
    pub id: usize,
    pub state: State,
    pub family: Family,
    pub path: Vec<State>,
    pub triple: [State; 3],
    pub start: String,
    pub target: String,
    pub transit: String,
    pub self_loop: bool,
    pub discharged: bool,
    /// Evidence for strings of the form `a0 a1`.
    pub direct: Option<Evidence>,
    /// Evidence for strings with repetitions of the self-loop.
    pub repeated: Option<Evidence>,
    pub attempts: Vec<Attempt>,
    pub notes: Vec<String>,
    pub best_margin: Option<f64>,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Satisfied,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct StateReport {
    pub state: State,
    /// Family whose every path got a discharged triple.
    pub condition: Option<Family>,
    pub cycles: Vec<PathGroup>,
    pub paths: Vec<PathGroup>,
    /// Discharged obligation per path of the chosen family.
    pub witnesses: Vec<(Vec<State>, usize)>,
    pub reasons: Vec<String>,
    /// Largest margin among failed barrier attempts, with its obligation.
    pub near_miss: Option<(usize, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AutomatonStats {
    pub states: usize,
    pub transitions: usize,
    pub pruned: Vec<(State, State)>,
    pub initial: Vec<State>,
    pub accepting: Vec<State>,
    pub text: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub formula: String,
    pub negated: String,
    pub variables: Vec<String>,
    pub automaton: AutomatonStats,
    pub states: Vec<StateReport>,
    pub obligations: Vec<ObligationReport>,
    /// Obligations attempted without success.
    pub failed: Vec<usize>,
    pub seconds: f64,
}

impl Verdict {
    pub fn is_satisfied(&self) -> bool {
        self.status == Status::Satisfied
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable verdict")
    }

    pub fn obligation(&self, id: usize) -> Option<&ObligationReport> {
        self.obligations.iter().find(|o| o.id == id)
    }

    /// Certificates of all discharged obligations, without duplicates.
    pub fn certificates(&self) -> Vec<(usize, Arc<BarrierCertificate>)> {
        let mut seen: Vec<*const BarrierCertificate> = Vec::new();
        let mut out = Vec::new();
        for o in &self.obligations {
            for e in [&o.direct, &o.repeated].into_iter().flatten() {
                if let Some(c) = &e.certificate {
                    if !seen.contains(&Arc::as_ptr(c)) {
                        seen.push(Arc::as_ptr(c));
                        out.push((o.id, c.clone()));
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone)]
struct BarrierResult {
    origin: usize,
    evidence: Option<Evidence>,
    attempts: Vec<Attempt>,
    best_margin: Option<f64>,
}

#[derive(Default)]
struct Cache {
    disjoint: BTreeMap<(String, String), (usize, Disjointness)>,
    barrier: BTreeMap<(String, String, String), BarrierResult>,
}

struct Discharger<'a> {
    system: &'a System,
    opts: &'a VerifyOptions,
    cache: Cache,
    reports: BTreeMap<usize, ObligationReport>,
}

impl Discharger<'_> {
    fn names(&self) -> &[String] {
        &self.system.variables
    }

    fn disjointness(&mut self, o: &Obligation, deadline: Instant) -> (usize, Disjointness) {
        let key = (o.start.canonical_key(), o.target.canonical_key());
        if let Some(hit) = self.cache.disjoint.get(&key) {
            return hit.clone();
        }
        let mut d = self.opts.disjoint.clone();
        d.sdp.deadline = Some(deadline);
        let r = (o.id, closures_disjoint(&o.start, &o.target, &d));
        self.cache.disjoint.insert(key, r.clone());
        r
    }

    fn barrier(&mut self, o: &Obligation, y: &Region, method: Method, deadline: Instant) -> BarrierResult {
        let key = (
            o.start.canonical_key(),
            o.target.canonical_key(),
            y.canonical_key(),
        );
        if let Some(hit) = self.cache.barrier.get(&key) {
            return hit.clone();
        }
        let mut b = self.opts.barrier.clone();
        b.sdp.deadline = Some(deadline);
        let dir = self.opts.sdpa_dir.clone();
        let mut export_errors = Vec::new();
        let mut observe = |degree: u32, p: &crate::sdp::SdpProblem| {
            if let Some(dir) = &dir {
                let path = dir.join(format!("obligation{}_degree{degree}.dat-s", o.id));
                if let Err(e) = std::fs::write(&path, export_sdpa(p)) {
                    export_errors.push(format!("{}: {e}", path.display()));
                }
            }
        };
        let Synthesis {
            certificate,
            mut attempts,
        } = synthesize_with(&o.start, &o.target, y, &self.system.field, &b, &mut observe);
        for e in export_errors {
            attempts.push(Attempt {
                degree: 0,
                status: format!("export failed: {e}"),
                margin: None,
                seconds: 0.0,
            });
        }
        let best_margin = attempts
            .iter()
            .filter_map(|a| a.margin)
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
        let evidence = certificate.map(|(c, report)| Evidence {
            method,
            origin: method,
            disjointness: Vec::new(),
            barrier: Some(c.barrier.to_string_with(self.names())),
            degree: Some(c.degree),
            validation: Some(report),
            certificate: Some(Arc::new(c)),
        });
        let r = BarrierResult {
            origin: o.id,
            evidence,
            attempts,
            best_margin,
        };
        self.cache.barrier.insert(key, r.clone());
        r
    }

    fn discharge(&mut self, o: &Obligation) -> bool {
        if let Some(r) = self.reports.get(&o.id) {
            return r.discharged;
        }
        let t0 = Instant::now();
        let deadline = t0 + Duration::from_secs_f64(self.opts.time_budget);
        let mut notes = Vec::new();
        let mut attempts = Vec::new();
        let mut best_margin = None;

        let (origin, disj) = self.disjointness(o, deadline);
        let intersecting = matches!(disj, Disjointness::FoundIntersection(_));
        let mut direct = match &disj {
            Disjointness::ProvedDisjoint(certs) => {
                let e = Evidence {
                    method: Method::DisjointClosures,
                    origin: Method::DisjointClosures,
                    disjointness: certs.clone(),
                    barrier: None,
                    degree: None,
                    validation: None,
                    certificate: None,
                };
                Some(if origin == o.id { e } else { e.reused(origin) })
            }
            Disjointness::FoundIntersection(x) => {
                notes.push(format!("closures of Y0 and Y1 meet at {x:?}"));
                None
            }
            Disjointness::Unknown => {
                notes.push("disjointness of Y0 and Y1 undecided".into());
                None
            }
        };

        let mut repeated = None;
        let mut needs_repeated = false;
        if let Some(s) = &o.self_loop {
            let mut d = self.opts.disjoint.clone();
            d.sdp.deadline = Some(deadline);
            if let Emptiness::Empty(certs) = is_empty(s, &d) {
                repeated = Some(Evidence {
                    method: Method::EmptyLoop,
                    origin: Method::EmptyLoop,
                    disjointness: certs,
                    barrier: None,
                    degree: None,
                    validation: None,
                    certificate: None,
                });
            } else {
                needs_repeated = true;
            }
        }

        // a barrier separates Y0 from Y1, so it also covers the direct strings
        let y = o.transit();
        if !intersecting && (needs_repeated || direct.is_none()) {
            let method = if needs_repeated {
                Method::Barrier3
            } else {
                Method::Barrier2
            };
            let r = self.barrier(o, &y, method, deadline);
            attempts = r.attempts.clone();
            best_margin = r.best_margin;
            match r.evidence {
                Some(e) => {
                    let e = if r.origin == o.id { e } else { e.reused(r.origin) };
                    if direct.is_none() {
                        direct = Some(e.clone());
                    }
                    if needs_repeated {
                        repeated = Some(e);
                    }
                }
                None => notes.push(format!(
                    "no barrier up to degree {}",
                    self.opts.barrier.max_degree
                )),
            }
        }

        let discharged = direct.is_some() && (!needs_repeated || repeated.is_some());
        let seconds = if self.opts.normalize_timings {
            0.0
        } else {
            t0.elapsed().as_secs_f64()
        };
        let names = self.system.variables.clone();
        self.reports.insert(
            o.id,
            ObligationReport {
                id: o.id,
                state: o.state,
                family: o.family,
                path: o.path.clone(),
                triple: o.triple,
                start: o.start.display_with(&names),
                target: o.target.display_with(&names),
                transit: y.display_with(&names),
                self_loop: o.self_loop.is_some(),
                discharged,
                direct,
                repeated,
                attempts: if self.opts.normalize_timings {
                    attempts
                        .into_iter()
                        .map(|a| Attempt { seconds: 0.0, ..a })
                        .collect()
                } else {
                    attempts
                },
                notes,
                best_margin,
                seconds,
            },
        );
        discharged
    }
}

/// Start and target given by disjoint balls: cheapest triples first.
fn ease(o: &Obligation) -> u8 {
    let balls = |r: &Region| -> Vec<crate::region::Ball> {
        r.parts()
            .iter()
            .flat_map(|p| p.ineqs())
            .filter_map(|g| match ball_form(g) {
                Some(BallForm::Inside(b)) => Some(b),
                _ => None,
            })
            .collect()
    };
    let (a, b) = (balls(&o.start), balls(&o.target));
    let disjoint = o.start.parts().len() == 1
        && o.target.parts().len() == 1
        && a.iter()
            .any(|x| b.iter().any(|y| x.distance_to(y) > x.radius + y.radius));
    match (disjoint, o.self_loop.is_some()) {
        (true, false) => 0,
        (true, true) => 1,
        (false, false) => 2,
        (false, true) => 3,
    }
}

/// Some triple of every path in `groups` is discharged.
fn condition(
    d: &mut Discharger,
    set: &ObligationSet,
    groups: &[PathGroup],
    reasons: &mut Vec<String>,
    label: &str,
) -> Option<Vec<(Vec<State>, usize)>> {
    let mut witnesses = Vec::new();
    for g in groups {
        if g.obligations.is_empty() {
            reasons.push(format!("{label} {:?} has no length-3 subpath", g.path));
            return None;
        }
    }
    for g in groups {
        let mut order: Vec<&Obligation> = g.obligations.iter().map(|&i| &set.obligations[i]).collect();
        order.sort_by_key(|o| ease(o));
        match order.into_iter().find(|o| d.discharge(o)) {
            Some(o) => witnesses.push((g.path.clone(), o.id)),
            None => {
                reasons.push(format!("{label} {:?}: no triple discharged", g.path));
                return None;
            }
        }
    }
    Some(witnesses)
}

pub fn verify(
    system: &System,
    formula: &Formula,
    formula_text: &str,
    opts: &VerifyOptions,
) -> Result<Verdict, VerifyError> {
    opts.check()?;
    let props = system.regions.props();
    if formula.atom_bound() > props.len() {
        return Err(VerifyError::Propositions(formula.atom_bound(), props.len()));
    }
    let t0 = Instant::now();
    let negated = formula.negate();
    let a = translate(&negated, props);
    let set = build_obligations(&a, &system.regions, &opts.disjoint);
    let mut d = Discharger {
        system,
        opts,
        cache: Cache::default(),
        reports: BTreeMap::new(),
    };
    let mut states = Vec::new();
    for s in &set.states {
        let mut reasons = Vec::new();
        let mut chosen = None;
        let mut witnesses = Vec::new();
        for (family, groups, label) in [
            (Family::Cycle, &s.cycles, "cycle"),
            (Family::Path, &s.paths, "path"),
        ] {
            if let Some(w) = condition(&mut d, &set, groups, &mut reasons, label) {
                chosen = Some(family);
                witnesses = w;
                break;
            }
        }
        let near_miss = if chosen.is_none() {
            d.reports
                .values()
                .filter(|r| r.state == s.state && !r.discharged)
                .filter_map(|r| r.best_margin.map(|m| (r.id, m)))
                .fold(None, |best: Option<(usize, f64)>, c| match best {
                    Some(b) if b.1 >= c.1 => Some(b),
                    _ => Some(c),
                })
        } else {
            None
        };
        states.push(StateReport {
            state: s.state,
            condition: chosen,
            cycles: s.cycles.clone(),
            paths: s.paths.clone(),
            witnesses,
            reasons,
            near_miss,
        });
    }
    let status = if states.iter().all(|s| s.condition.is_some()) {
        Status::Satisfied
    } else {
        Status::Inconclusive
    };
    let obligations: Vec<ObligationReport> = d.reports.into_values().collect();
    let failed = obligations
        .iter()
        .filter(|o| !o.discharged)
        .map(|o| o.id)
        .collect();
    let aut = &set.automaton;
    Ok(Verdict {
        status,
        formula: formula_text.to_string(),
        negated: negated.display_with(props).to_string(),
        variables: system.variables.clone(),
        automaton: AutomatonStats {
            states: aut.num_states(),
            transitions: aut.transitions().len(),
            pruned: set.pruned.clone(),
            initial: aut.initial().iter().copied().collect(),
            accepting: aut.accepting().iter().copied().collect(),
            text: aut.to_text(),
        },
        states,
        obligations,
        failed,
        seconds: if opts.normalize_timings {
            0.0
        } else {
            t0.elapsed().as_secs_f64()
        },
    })
}

/// Verifies a parsed problem.
pub fn verify_problem(p: &Problem, opts: &VerifyOptions) -> Result<Verdict, VerifyError> {
    verify(&p.system, &p.formula, &p.formula_text, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::fixtures::reference_automaton;
    use crate::problem::EXAMPLE1;

    fn example() -> Problem {
        Problem::parse(EXAMPLE1).unwrap()
    }

    #[test]
    fn reference_obligations() {
        let p = example();
        let set = build_obligations(&reference_automaton(), &p.system.regions, &DisjointOptions::default());
        assert!(set.pruned.is_empty());
        assert_eq!(set.states.len(), 1);
        let s = &set.states[0];
        assert_eq!(s.state, 4);
        assert_eq!(s.cycles.len(), 1);
        assert_eq!(s.cycles[0].path, vec![4]);
        assert!(s.cycles[0].obligations.is_empty());
        let paths: Vec<(Vec<State>, usize)> = s
            .paths
            .iter()
            .map(|g| (g.path.clone(), g.obligations.len()))
            .collect();
        assert_eq!(
            paths,
            vec![(vec![0, 1, 4], 1), (vec![0, 2, 3, 4], 2), (vec![0, 3, 4], 1)]
        );
        let o = &set.obligations[s.paths[0].obligations[0]];
        assert_eq!(o.triple, [0, 1, 4]);
        assert!(o.self_loop.is_some());
        let o = &set.obligations[s.paths[1].obligations[0]];
        assert_eq!(o.triple, [0, 2, 3]);
        assert_eq!(o.start, *p.system.regions.domain());
    }

    #[test]
    fn empty_guards_are_pruned() {
        let p = example();
        let a = translate(&p.formula.negate(), p.system.regions.props());
        let set = build_obligations(&a, &p.system.regions, &DisjointOptions::default());
        assert_eq!(set.pruned.len(), 2);
        assert_eq!(set.automaton.transitions().len(), a.transitions().len() - 2);
    }

    #[test]
    fn valid_formula_needs_no_obligations() {
        let p = example().with_formula("p0 | !p0").unwrap();
        let v = verify_problem(&p, &VerifyOptions::default()).unwrap();
        assert!(v.is_satisfied());
        assert!(v.obligations.is_empty());
    }

    #[test]
    fn loop_free_middle_state_has_no_repeated_part() {
        let p = example();
        let a = BuchiAutomaton::new(
            p.system.regions.props().to_vec(),
            3,
            [
                (0, crate::automaton::Guard::from_cubes([crate::automaton::Cube { pos: 0b100, neg: 0 }]), 1),
                (1, crate::automaton::Guard::from_cubes([crate::automaton::Cube { pos: 0b1000, neg: 0 }]), 2),
                (2, crate::automaton::Guard::truth(), 2),
            ],
            [0],
            [2],
        )
        .unwrap();
        let set = build_obligations(&a, &p.system.regions, &DisjointOptions::default());
        let o = &set.obligations[set.states[0].paths[0].obligations[0]];
        assert!(o.self_loop.is_none());
        assert_eq!(o.transit().parts().len(), 2);
    }

    #[test]
    fn unsatisfiable_state_reports_reasons() {
        // G !p1 is violated; nothing separates X from X1
        let p = example().with_formula("G !p1").unwrap();
        let opts = VerifyOptions {
            barrier: BarrierOptions {
                max_degree: 2,
                ..BarrierOptions::default()
            },
            ..VerifyOptions::default()
        };
        let v = verify_problem(&p, &opts).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
        let s = &v.states[0];
        assert!(s.condition.is_none());
        assert!(s.reasons.iter().any(|r| r.contains("no length-3 subpath")));
        let json: serde_json::Value = serde_json::from_str(&v.to_json()).unwrap();
        assert_eq!(json["status"], "Inconclusive");
    }

    #[test]
    fn rejects_bad_options() {
        let p = example();
        let mut o = VerifyOptions::default();
        o.barrier.epsilon = 0.0;
        assert!(verify_problem(&p, &o).is_err());
    }
}
