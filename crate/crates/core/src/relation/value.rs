//! Values bound to alphabet variables.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::models::{EventSeq, NonNegRat, TimedTrace};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ValueError {
    #[error("type mismatch: expected {expected}, found {found}")]
    Type { expected: String, found: String },
    #[error("{0}")]
    Timed(#[from] crate::models::TimedTraceError),
}

/// A trace from one of the three models.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TraceValue {
    Seq(EventSeq),
    Rat(NonNegRat),
    Timed(TimedTrace),
}

impl TraceValue {
    pub fn kind(&self) -> &'static str {
        match self {
            TraceValue::Seq(_) => "seq",
            TraceValue::Rat(_) => "rat",
            TraceValue::Timed(_) => "timed",
        }
    }

    fn mismatch(&self, other: &TraceValue) -> ValueError {
        ValueError::Type {
            expected: format!("{} trace", self.kind()),
            found: format!("{} trace", other.kind()),
        }
    }

    pub fn concat(&self, other: &TraceValue) -> Result<TraceValue, ValueError> {
        match (self, other) {
            (TraceValue::Seq(x), TraceValue::Seq(y)) => Ok(TraceValue::Seq(x.concat(y))),
            (TraceValue::Rat(x), TraceValue::Rat(y)) => Ok(TraceValue::Rat(x + y)),
            (TraceValue::Timed(x), TraceValue::Timed(y)) => Ok(TraceValue::Timed(x.concat(y)?)),
            _ => Err(self.mismatch(other)),
        }
    }

    /// `self ≤ other`.
    pub fn is_prefix_of(&self, other: &TraceValue) -> Result<bool, ValueError> {
        match (self, other) {
            (TraceValue::Seq(x), TraceValue::Seq(y)) => Ok(x.is_prefix_of(y)),
            (TraceValue::Rat(x), TraceValue::Rat(y)) => Ok(x <= y),
            (TraceValue::Timed(x), TraceValue::Timed(y)) => Ok(x.is_prefix_of(y)),
            _ => Err(self.mismatch(other)),
        }
    }

    /// `self − prefix` with the ε fallback.
    pub fn subtract(&self, prefix: &TraceValue) -> Result<TraceValue, ValueError> {
        match (self, prefix) {
            (TraceValue::Seq(y), TraceValue::Seq(x)) => Ok(TraceValue::Seq(y.subtract(x))),
            (TraceValue::Rat(y), TraceValue::Rat(x)) => Ok(TraceValue::Rat(
                y.checked_sub(x).unwrap_or_else(NonNegRat::zero),
            )),
            (TraceValue::Timed(y), TraceValue::Timed(x)) => Ok(TraceValue::Timed(y.subtract(x))),
            _ => Err(self.mismatch(prefix)),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            TraceValue::Seq(x) => x.is_empty(),
            TraceValue::Rat(x) => x.is_zero(),
            TraceValue::Timed(x) => x.is_empty(),
        }
    }
}

impl fmt::Display for TraceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceValue::Seq(x) => write!(f, "{x}"),
            TraceValue::Rat(x) => write!(f, "\"{}\"", x.to_interchange()),
            TraceValue::Timed(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for TraceValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            TraceValue::Seq(x) => x.serialize(serializer),
            TraceValue::Rat(x) => x.serialize(serializer),
            TraceValue::Timed(x) => x.serialize(serializer),
        }
    }
}

/// Anything a variable can hold.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Sym(String),
    Trace(TraceValue),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Bool(_) => "bool",
            Value::Int(_) => "int",
            Value::Sym(_) => "symbol",
            Value::Trace(t) => t.kind(),
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_trace(&self) -> Option<&TraceValue> {
        match self {
            Value::Trace(t) => Some(t),
            _ => None,
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<EventSeq> for Value {
    fn from(s: EventSeq) -> Self {
        Value::Trace(TraceValue::Seq(s))
    }
}

impl From<NonNegRat> for Value {
    fn from(r: NonNegRat) -> Self {
        Value::Trace(TraceValue::Rat(r))
    }
}

impl From<TimedTrace> for Value {
    fn from(t: TimedTrace) -> Self {
        Value::Trace(TraceValue::Timed(t))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Sym(s) => write!(f, "'{s}'"),
            Value::Trace(t) => write!(f, "{t}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Bool(b) => serializer.serialize_bool(*b),
            Value::Int(i) => serializer.serialize_i64(*i),
            Value::Sym(s) => serializer.serialize_str(s),
            Value::Trace(t) => t.serialize(serializer),
        }
    }
}
