//! A relational calculus over finite universes.
//!
//! Every variable ranges over a finite [`Domain`], so a predicate can be
//! represented by the set of bindings that satisfy it. All operators are
//! computed on those sets, and every equality between predicates is decidable
//! by comparing them.

mod alphabet;
mod domain;
mod predicate;
mod value;

use thiserror::Error;

pub use alphabet::{Alphabet, AlphabetBuilder, Binding, Role, VarDecl, VarId, MAX_BINDINGS};
pub use domain::{timed_universe, Domain, DomainKind, TraceTable, TraceUniverse, TIMED_UNIVERSE_LIMIT};
pub use predicate::{find_monotonicity_violation, Predicate, SubstFn};
pub use value::{TraceValue, Value, ValueError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RelError {
    #[error("predicates are over different alphabets")]
    AlphabetMismatch,
    #[error("the condition of a conditional must not mention primed variables")]
    ConditionMentionsAfterVars,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("value {value} is outside the domain of `{var}`")]
    DomainViolation { var: String, value: String },
    #[error("fixed-point iteration is not monotone (step {iteration})")]
    NonMonotoneDetected { iteration: usize },
    #[error("sequential composition needs every unprimed variable to have a primed twin")]
    NotHomogeneous,
    #[error("not a reactive alphabet: {0}")]
    NotReactiveAlphabet(String),
    #[error("domains must be non-empty")]
    EmptyDomain,
    #[error("duplicate domain value {0}")]
    DuplicateValue(String),
    #[error("trace universe is not closed: {0}")]
    NotClosed(String),
    #[error("universe has {size} elements, more than the limit of {limit}")]
    UniverseTooLarge { size: usize, limit: usize },
    #[error(transparent)]
    Value(#[from] ValueError),
}
