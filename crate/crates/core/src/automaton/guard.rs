use std::fmt;

use serde::{Deserialize, Serialize};

use crate::formula::{Formula, Letter};

/// Conjunction of literals: `pos` atoms must hold, `neg` atoms must not.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cube {
    pub pos: u64,
    pub neg: u64,
}

impl Cube {
    pub const TRUE: Cube = Cube { pos: 0, neg: 0 };

    pub fn eval(&self, a: Letter) -> bool {
        a & self.pos == self.pos && a & self.neg == 0
    }

    /// True when every letter satisfying `other` also satisfies `self`.
    pub fn subsumes(&self, other: &Cube) -> bool {
        self.pos & other.pos == self.pos && self.neg & other.neg == self.neg
    }

    pub fn and(&self, other: &Cube) -> Option<Cube> {
        let c = Cube {
            pos: self.pos | other.pos,
            neg: self.neg | other.neg,
        };
        (c.pos & c.neg == 0).then_some(c)
    }

    pub fn literals(&self) -> u32 {
        self.pos.count_ones() + self.neg.count_ones()
    }

    pub fn to_formula(&self) -> Formula {
        let mut lits = Vec::new();
        for i in 0..64 {
            if self.pos >> i & 1 == 1 {
                lits.push(Formula::Atom(i));
            }
            if self.neg >> i & 1 == 1 {
                lits.push(Formula::not(Formula::Atom(i)));
            }
        }
        lits.into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    pub fn display(&self, props: &[String]) -> String {
        let mut lits = Vec::new();
        for i in 0..64 {
            let name = || props.get(i).cloned().unwrap_or_else(|| format!("p{i}"));
            if self.pos >> i & 1 == 1 {
                lits.push(name());
            }
            if self.neg >> i & 1 == 1 {
                lits.push(format!("!{}", name()));
            }
        }
        if lits.is_empty() {
            "true".into()
        } else {
            lits.join(" & ")
        }
    }
}

/// Propositional guard in disjunctive normal form. An empty cube list is
/// unsatisfiable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Guard {
    cubes: Vec<Cube>,
}

impl Guard {
    pub fn from_cubes(cubes: impl IntoIterator<Item = Cube>) -> Guard {
        let mut g = Guard {
            cubes: cubes.into_iter().filter(|c| c.pos & c.neg == 0).collect(),
        };
        g.simplify();
        g
    }

    pub fn truth() -> Guard {
        Guard {
            cubes: vec![Cube::TRUE],
        }
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn is_false(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn is_true(&self) -> bool {
        self.cubes.contains(&Cube::TRUE)
    }

    pub fn eval(&self, a: Letter) -> bool {
        self.cubes.iter().any(|c| c.eval(a))
    }

    pub fn or(&self, other: &Guard) -> Guard {
        Guard::from_cubes(self.cubes.iter().chain(&other.cubes).copied())
    }

    pub fn and(&self, other: &Guard) -> Guard {
        let mut out = Vec::new();
        for a in &self.cubes {
            for b in &other.cubes {
                if let Some(c) = a.and(b) {
                    out.push(c);
                }
            }
        }
        Guard::from_cubes(out)
    }

    /// Atoms mentioned by any cube.
    pub fn support(&self) -> u64 {
        self.cubes.iter().fold(0, |acc, c| acc | c.pos | c.neg)
    }

    /// Satisfying letters over the first `n_props` propositions.
    pub fn letters(&self, n_props: usize) -> Vec<Letter> {
        assert!(n_props <= 20, "letter enumeration limited to 20 propositions");
        (0..1u64 << n_props).filter(|a| self.eval(*a)).collect()
    }

    /// Truth table over the first `n_props` propositions, packed in u64 words.
    pub fn truth_table(&self, n_props: usize) -> Vec<u64> {
        let n = 1usize << n_props;
        let mut words = vec![0u64; n.div_ceil(64)];
        for a in 0..n {
            if self.eval(a as u64) {
                words[a / 64] |= 1 << (a % 64);
            }
        }
        words
    }

    pub fn to_formula(&self) -> Formula {
        self.cubes
            .iter()
            .map(Cube::to_formula)
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Converts a propositional formula into DNF.
    pub fn from_formula(f: &Formula) -> Option<Guard> {
        if !f.is_propositional() {
            return None;
        }
        Some(dnf(&f.nnf()))
    }

    pub fn display(&self, props: &[String]) -> String {
        match self.cubes.len() {
            0 => "false".into(),
            1 => self.cubes[0].display(props),
            _ => self
                .cubes
                .iter()
                .map(|c| {
                    if c.literals() > 1 {
                        format!("({})", c.display(props))
                    } else {
                        c.display(props)
                    }
                })
                .collect::<Vec<_>>()
                .join(" | "),
        }
    }

    fn simplify(&mut self) {
        loop {
            self.cubes.sort();
            self.cubes.dedup();
            let n = self.cubes.len();
            let mut keep = vec![true; n];
            for i in 0..n {
                for j in 0..n {
                    if i != j && keep[j] && self.cubes[j].subsumes(&self.cubes[i]) {
                        keep[i] = false;
                        break;
                    }
                }
            }
            let mut cubes: Vec<Cube> = self
                .cubes
                .iter()
                .zip(&keep)
                .filter(|(_, k)| **k)
                .map(|(c, _)| *c)
                .collect();
            let mut merged = false;
            'outer: for i in 0..cubes.len() {
                for j in i + 1..cubes.len() {
                    let (a, b) = (cubes[i], cubes[j]);
                    let flip = (a.pos ^ b.pos) | (a.neg ^ b.neg);
                    if flip.count_ones() == 1
                        && (a.pos & flip != 0 && b.neg & flip != 0
                            || a.neg & flip != 0 && b.pos & flip != 0)
                    {
                        cubes[i] = Cube {
                            pos: a.pos & !flip,
                            neg: a.neg & !flip,
                        };
                        cubes.remove(j);
                        merged = true;
                        break 'outer;
                    }
                }
            }
            let done = !merged && cubes.len() == self.cubes.len();
            self.cubes = cubes;
            if done {
                self.cubes.sort();
                return;
            }
        }
    }
}

fn dnf(f: &Formula) -> Guard {
    match f {
        Formula::True => Guard::truth(),
        Formula::False => Guard::from_cubes([]),
        Formula::Atom(i) => Guard::from_cubes([Cube { pos: 1 << i, neg: 0 }]),
        Formula::Not(a) => match a.as_ref() {
            Formula::Atom(i) => Guard::from_cubes([Cube { pos: 0, neg: 1 << i }]),
            _ => unreachable!("nnf"),
        },
        Formula::And(a, b) => dnf(a).and(&dnf(b)),
        Formula::Or(a, b) => dnf(a).or(&dnf(b)),
        _ => unreachable!("propositional nnf"),
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display(&[]))
    }
}
