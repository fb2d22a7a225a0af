//! A small predicate language.
//!
//! ```text
//! R3 (tr' = tr ^ <a> /\ v' = v)
//! P || M || Q
//! exists x . x' = x [eps/tr]
//! ```
//!
//! From loosest to tightest: `||`, `;` (left), `<| b |>` (right), `=>`
//! (right), `\/`, `/\`, the prefix forms `~`, `R1`…`Rm` and `exists x .`,
//! then postfix substitution `P[e/x]`. Terms combine with `^` and `-`,
//! both left associative.

mod ast;
mod eval;
mod lexer;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::reactive::TheoryError;
use crate::relation::RelError;

pub use ast::{Formula, HealthOp, Term, VarName};
pub use eval::{Env, Sort};
pub use parser::{parse, parse_term};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub found: String,
    pub expected: BTreeSet<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.col)?;
        if self.expected.is_empty() {
            return f.write_str(&self.found);
        }
        let expected: Vec<&str> = self.expected.iter().map(String::as_str).collect();
        write!(f, "expected {}, found {}", expected.join(" or "), self.found)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DslError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("`{0}` is not in scope")]
    Scope(String),
    #[error("`{0}` is not defined")]
    Undefined(String),
    #[error("definition `{0}` refers to itself")]
    Recursive(String),
    #[error("substitution has {terms} terms for {vars} variables")]
    SubstitutionArity { terms: usize, vars: usize },
    #[error("{0}")]
    Sort(String),
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
}
