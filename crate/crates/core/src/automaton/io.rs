//! Plain-text automaton format.
//!
//! ```text
//! # comment
//! props p0 p1 p2 p3
//! states 5
//! initial 0
//! accepting 4
//! 0 -> 1 : p0 & !p1
//! 1 -> 1 : !p1
//! ```
//!
//! Guards are propositional formulas over the declared propositions.

use super::{AutomatonError, BuchiAutomaton, Guard};
use crate::formula::Formula;

pub(super) fn to_text(a: &BuchiAutomaton) -> String {
    let mut s = String::new();
    s.push_str(&format!("props {}\n", a.props.join(" ")));
    s.push_str(&format!("states {}\n", a.num_states));
    let list = |set: &std::collections::BTreeSet<usize>| {
        set.iter()
            .map(|q| q.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    s.push_str(format!("initial {}\n", list(&a.initial)).trim_end());
    s.push('\n');
    s.push_str(format!("accepting {}\n", list(&a.accepting)).trim_end());
    s.push('\n');
    for t in &a.transitions {
        s.push_str(&format!(
            "{} -> {} : {}\n",
            t.from,
            t.to,
            t.guard.display(&a.props)
        ));
    }
    s
}

pub(super) fn from_text(text: &str) -> Result<BuchiAutomaton, AutomatonError> {
    let mut props: Option<Vec<String>> = None;
    let mut states: Option<usize> = None;
    let mut initial = Vec::new();
    let mut accepting = Vec::new();
    let mut trans = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |m: String| AutomatonError::Parse {
            line: line_no,
            message: m,
        };
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let ints = |rest: &str| -> Result<Vec<usize>, AutomatonError> {
            rest.split_whitespace()
                .map(|t| t.parse().map_err(|_| err(format!("bad state '{t}'"))))
                .collect()
        };
        match head {
            "props" => props = Some(rest.split_whitespace().map(String::from).collect()),
            "states" => {
                states = Some(
                    rest.trim()
                        .parse()
                        .map_err(|_| err("bad state count".into()))?,
                )
            }
            "initial" => initial.extend(ints(rest)?),
            "accepting" => accepting.extend(ints(rest)?),
            _ => {
                let (edge, guard) = line
                    .split_once(':')
                    .ok_or_else(|| err("expected 'from -> to : guard'".into()))?;
                let (from, to) = edge
                    .split_once("->")
                    .ok_or_else(|| err("expected 'from -> to'".into()))?;
                let from: usize = from.trim().parse().map_err(|_| err("bad source".into()))?;
                let to: usize = to.trim().parse().map_err(|_| err("bad target".into()))?;
                let table = props
                    .as_ref()
                    .ok_or_else(|| err("props must precede transitions".into()))?;
                let f = Formula::parse(guard.trim(), table).map_err(|e| err(e.to_string()))?;
                let g = Guard::from_formula(&f)
                    .ok_or_else(|| err("guard must be propositional".into()))?;
                trans.push((from, g, to, line_no));
            }
        }
    }
    let props = props.unwrap_or_default();
    let n = states.ok_or(AutomatonError::Parse {
        line: 0,
        message: "missing 'states'".into(),
    })?;
    for &(from, _, to, line) in &trans {
        if from >= n || to >= n {
            return Err(AutomatonError::Parse {
                line,
                message: "state out of range".into(),
            });
        }
    }
    BuchiAutomaton::new(
        props,
        n,
        trans.into_iter().map(|(a, g, b, _)| (a, g, b)),
        initial,
        accepting,
    )
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::reference_automaton;
    use super::*;

    #[test]
    fn text_round_trip() {
        let a = reference_automaton();
        let text = a.to_text();
        assert!(text.contains("1 -> 1 : !p1"));
        let b = BuchiAutomaton::from_text(&text).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn malformed_lines() {
        assert!(BuchiAutomaton::from_text("states 2\n0 -> 1 : p0\n").is_err());
        assert!(BuchiAutomaton::from_text("props p0\nstates 2\n0 -> 5 : p0\n").is_err());
        assert!(BuchiAutomaton::from_text("props p0\nstates 2\n0 1 p0\n").is_err());
    }
}
