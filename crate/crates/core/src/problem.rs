//! Problem files: dynamics, domain, proposition regions and a formula in TOML.
//!
//! ```toml
//! variables = ["x1", "x2"]
//! dynamics = ["x2", "-x1 + x1^3/3 - x2"]
//! domain = ["49 - x1^2 - x2^2"]
//! formula = "G(p2 -> G !p3)"
//!
//! [[proposition]]
//! name = "p2"
//! region = ["1 - (x1 - 4)^2 - (x2 - 4)^2"]
//!
//! [options]
//! max_degree = 12
//! ```
//!
//! Every region is a list of polynomials `g` read as `g >= 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;
use crate::poly::{Polynomial, VectorField};
use crate::region::{PropositionRegions, Region};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("line {line}, column {column}: {message}")]
    At {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Optional numeric overrides; unset fields keep the verifier defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemOptions {
    pub max_degree: Option<u32>,
    pub epsilon: Option<f64>,
    pub time_budget: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub horizon: Option<f64>,
    pub step: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProposition {
    name: String,
    region: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    variables: Vec<String>,
    dynamics: Vec<String>,
    domain: Vec<String>,
    formula: String,
    #[serde(default)]
    proposition: Vec<RawProposition>,
    #[serde(default)]
    options: ProblemOptions,
}

/// Dynamics plus proposition regions inside the domain.
#[derive(Clone, Debug)]
pub struct System {
    pub variables: Vec<String>,
    pub field: VectorField,
    pub regions: PropositionRegions,
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub system: System,
    pub formula_text: String,
    pub formula: Formula,
    pub options: ProblemOptions,
}

impl Problem {
    pub fn parse(text: &str) -> Result<Problem, ProblemError> {
        let raw: RawProblem = toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_col(text, s.start))
                .unwrap_or((0, 0));
            ProblemError::At {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        let vars = raw.variables.clone();
        if vars.is_empty() {
            return Err(ProblemError::Invalid("no variables declared".into()));
        }
        if raw.dynamics.len() != vars.len() {
            return Err(ProblemError::Invalid(format!(
                "{} variables but {} dynamics components",
                vars.len(),
                raw.dynamics.len()
            )));
        }
        let poly = |s: &str| -> Result<Polynomial, ProblemError> {
            Polynomial::parse(s, &vars).map_err(|e| located(text, s, e.column, &e.message))
        };
        let field = VectorField::new(
            raw.dynamics
                .iter()
                .map(|s| poly(s))
                .collect::<Result<_, _>>()?,
        )
        .map_err(|e| ProblemError::Invalid(e.to_string()))?;
        let ineqs = |list: &[String], what: &str| -> Result<Region, ProblemError> {
            let gs = list.iter().map(|s| poly(s)).collect::<Result<Vec<_>, _>>()?;
            Region::from_ineqs(gs).map_err(|e| ProblemError::Invalid(format!("{what}: {e}")))
        };
        let domain = ineqs(&raw.domain, "domain")?;
        let mut names = Vec::new();
        let mut regions = Vec::new();
        for p in &raw.proposition {
            if names.contains(&p.name) {
                return Err(ProblemError::Invalid(format!(
                    "proposition '{}' declared twice",
                    p.name
                )));
            }
            names.push(p.name.clone());
            regions.push(ineqs(&p.region, &p.name)?);
        }
        let formula = Formula::parse(&raw.formula, &names).map_err(|e| {
            let col = match &e {
                crate::formula::FormulaError::Syntax { column, .. }
                | crate::formula::FormulaError::NextOperator { column } => *column,
                _ => 1,
            };
            located(text, &raw.formula, col, &e.to_string())
        })?;
        let regions = PropositionRegions::new(names, regions, domain)
            .map_err(|e| ProblemError::Invalid(e.to_string()))?;
        Ok(Problem {
            system: System {
                variables: vars,
                field,
                regions,
            },
            formula_text: raw.formula,
            formula,
            options: raw.options,
        })
    }

    /// Same system with another specification.
    pub fn with_formula(&self, text: &str) -> Result<Problem, ProblemError> {
        let formula = Formula::parse(text, self.system.regions.props())
            .map_err(|e| ProblemError::Invalid(e.to_string()))?;
        Ok(Problem {
            formula_text: text.to_string(),
            formula,
            ..self.clone()
        })
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
    (line, column)
}

/// Error located at `column` (1-based) of the string value `s` in `text`.
fn located(text: &str, s: &str, column: usize, message: &str) -> ProblemError {
    match text.find(s) {
        Some(off) => {
            let (line, col) = line_col(text, off);
            ProblemError::At {
                line,
                column: col + column.saturating_sub(1),
                message: message.to_string(),
            }
        }
        None => ProblemError::Invalid(message.to_string()),
    }
}

/// The bundled running example.
pub const EXAMPLE1: &str = include_str!("../problems/example1.problem");
