//! LTL without the next operator.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! formula := or ( "->" formula )?
//! or      := and ( "|" and )*
//! and     := binary ( "&" binary )*
//! binary  := unary ( ( "U" | "R" ) binary )?
//! unary   := ( "!" | "G" | "F" ) unary | atom
//! atom    := "true" | "false" | ident | "(" formula ")"
//! ```
//!
//! `->`, `U` and `R` associate to the right. `X` is rejected.

mod eval;
pub mod gen;
mod parse;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eval::eval_lasso;

/// A letter: the set of propositions that hold, as a bitset over the
/// proposition table.
pub type Letter = u64;

pub const MAX_PROPS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormulaError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("next operator not permitted (column {column})")]
    NextOperator { column: usize },
    #[error("unknown proposition '{0}'")]
    UnknownProposition(String),
    #[error("too many propositions ({0}, at most 64)")]
    TooManyPropositions(usize),
    #[error("lasso cycle must be nonempty")]
    EmptyCycle,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    True,
    False,
    Atom(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn atom(i: usize) -> Self {
        Atom(i)
    }
    pub fn not(f: Formula) -> Self {
        Not(Box::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Self {
        And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Self {
        Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Self {
        Implies(Box::new(a), Box::new(b))
    }
    pub fn until(a: Formula, b: Formula) -> Self {
        Until(Box::new(a), Box::new(b))
    }
    pub fn release(a: Formula, b: Formula) -> Self {
        Release(Box::new(a), Box::new(b))
    }
    pub fn eventually(f: Formula) -> Self {
        Eventually(Box::new(f))
    }
    pub fn always(f: Formula) -> Self {
        Always(Box::new(f))
    }

    /// Parses against a fixed proposition table.
    pub fn parse(text: &str, props: &[String]) -> Result<Formula, FormulaError> {
        parse::parse(text, Some(props)).map(|(f, _)| f)
    }

    /// Parses and builds the proposition table from the atoms that occur,
    /// sorted with numeric suffixes compared as numbers (`p2 < p10`).
    pub fn parse_auto(text: &str) -> Result<(Formula, Vec<String>), FormulaError> {
        parse::parse(text, None)
    }

    /// Highest atom index plus one.
    pub fn atom_bound(&self) -> usize {
        match self {
            True | False => 0,
            Atom(i) => i + 1,
            Not(a) | Eventually(a) | Always(a) => a.atom_bound(),
            And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) | Release(a, b) => {
                a.atom_bound().max(b.atom_bound())
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            True | False | Atom(_) => 1,
            Not(a) | Eventually(a) | Always(a) => 1 + a.size(),
            And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) | Release(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// `!f` in negation normal form.
    pub fn negate(&self) -> Formula {
        nnf(self, true)
    }

    /// Negation normal form: negations only on atoms, no implications.
    pub fn nnf(&self) -> Formula {
        nnf(self, false)
    }

    /// Rewrites into the core operators `true`, atoms, `!`, `|`, `U`.
    pub fn to_core(&self) -> Formula {
        match self {
            True => True,
            False => Formula::not(True),
            Atom(i) => Atom(*i),
            Not(a) => Formula::not(a.to_core()),
            Or(a, b) => Formula::or(a.to_core(), b.to_core()),
            And(a, b) => Formula::not(Formula::or(
                Formula::not(a.to_core()),
                Formula::not(b.to_core()),
            )),
            Implies(a, b) => Formula::or(Formula::not(a.to_core()), b.to_core()),
            Until(a, b) => Formula::until(a.to_core(), b.to_core()),
            Release(a, b) => Formula::not(Formula::until(
                Formula::not(a.to_core()),
                Formula::not(b.to_core()),
            )),
            Eventually(a) => Formula::until(True, a.to_core()),
            Always(a) => Formula::not(Formula::until(True, Formula::not(a.to_core()))),
        }
    }

    /// Propositional evaluation on a single letter. Temporal operators are
    /// not allowed.
    pub fn eval_letter(&self, a: Letter) -> bool {
        match self {
            True => true,
            False => false,
            Atom(i) => a >> i & 1 == 1,
            Not(x) => !x.eval_letter(a),
            And(x, y) => x.eval_letter(a) && y.eval_letter(a),
            Or(x, y) => x.eval_letter(a) || y.eval_letter(a),
            Implies(x, y) => !x.eval_letter(a) || y.eval_letter(a),
            _ => panic!("temporal operator in propositional formula"),
        }
    }

    pub fn is_propositional(&self) -> bool {
        match self {
            True | False | Atom(_) => true,
            Not(a) => a.is_propositional(),
            And(a, b) | Or(a, b) | Implies(a, b) => a.is_propositional() && b.is_propositional(),
            _ => false,
        }
    }

    pub fn display_with<'a>(&'a self, props: &'a [String]) -> FormulaDisplay<'a> {
        FormulaDisplay { f: self, props }
    }
}

fn nnf(f: &Formula, neg: bool) -> Formula {
    match (f, neg) {
        (True, false) | (False, true) => True,
        (True, true) | (False, false) => False,
        (Atom(i), false) => Atom(*i),
        (Atom(i), true) => Formula::not(Atom(*i)),
        (Not(a), _) => nnf(a, !neg),
        (And(a, b), false) => Formula::and(nnf(a, false), nnf(b, false)),
        (And(a, b), true) => Formula::or(nnf(a, true), nnf(b, true)),
        (Or(a, b), false) => Formula::or(nnf(a, false), nnf(b, false)),
        (Or(a, b), true) => Formula::and(nnf(a, true), nnf(b, true)),
        (Implies(a, b), false) => Formula::or(nnf(a, true), nnf(b, false)),
        (Implies(a, b), true) => Formula::and(nnf(a, false), nnf(b, true)),
        (Until(a, b), false) => Formula::until(nnf(a, false), nnf(b, false)),
        (Until(a, b), true) => Formula::release(nnf(a, true), nnf(b, true)),
        (Release(a, b), false) => Formula::release(nnf(a, false), nnf(b, false)),
        (Release(a, b), true) => Formula::until(nnf(a, true), nnf(b, true)),
        (Eventually(a), false) => Formula::eventually(nnf(a, false)),
        (Eventually(a), true) => Formula::always(nnf(a, true)),
        (Always(a), false) => Formula::always(nnf(a, false)),
        (Always(a), true) => Formula::eventually(nnf(a, true)),
    }
}

pub struct FormulaDisplay<'a> {
    f: &'a Formula,
    props: &'a [String],
}

impl FormulaDisplay<'_> {
    fn write(&self, f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |g: &Formula, out: &mut fmt::Formatter<'_>| {
            FormulaDisplay {
                f: g,
                props: self.props,
            }
            .write(g, out)
        };
        let bin = |op: &str, a: &Formula, b: &Formula, out: &mut fmt::Formatter<'_>| {
            out.write_str("(")?;
            sub(a, out)?;
            write!(out, " {op} ")?;
            sub(b, out)?;
            out.write_str(")")
        };
        match f {
            True => out.write_str("true"),
            False => out.write_str("false"),
            Atom(i) => match self.props.get(*i) {
                Some(n) => out.write_str(n),
                None => write!(out, "p{i}"),
            },
            Not(a) => {
                out.write_str("!")?;
                sub(a, out)
            }
            Eventually(a) => {
                out.write_str("F ")?;
                sub(a, out)
            }
            Always(a) => {
                out.write_str("G ")?;
                sub(a, out)
            }
            And(a, b) => bin("&", a, b, out),
            Or(a, b) => bin("|", a, b, out),
            Implies(a, b) => bin("->", a, b, out),
            Until(a, b) => bin("U", a, b, out),
            Release(a, b) => bin("R", a, b, out),
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.f, f)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        FormulaDisplay { f: self, props: &[] }.write(self, f)
    }
}

/// An ultimately periodic word `prefix . cycle^omega`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LassoWord {
    prefix: Vec<Letter>,
    cycle: Vec<Letter>,
}

impl LassoWord {
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self, FormulaError> {
        if cycle.is_empty() {
            return Err(FormulaError::EmptyCycle);
        }
        Ok(LassoWord { prefix, cycle })
    }

    pub fn prefix(&self) -> &[Letter] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[Letter] {
        &self.cycle
    }

    /// Number of distinct positions (`|prefix| + |cycle|`).
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letter(&self, pos: usize) -> Letter {
        if pos < self.prefix.len() {
            self.prefix[pos]
        } else {
            self.cycle[(pos - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Successor position in the folded lasso.
    pub fn succ(&self, pos: usize) -> usize {
        if pos + 1 < self.len() {
            pos + 1
        } else {
            self.prefix.len()
        }
    }
}

/// Formats a letter as `{p0,p2}`.
pub fn letter_to_string(a: Letter, props: &[String]) -> String {
    let names: Vec<&str> = (0..props.len())
        .filter(|i| a >> i & 1 == 1)
        .map(|i| props[i].as_str())
        .collect();
    format!("{{{}}}", names.join(","))
}
