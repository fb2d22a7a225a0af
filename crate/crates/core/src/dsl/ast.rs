use std::fmt;

use crate::models::{Event, NonNegRat, TimedTrace};

/// A healthiness condition applied in a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HealthOp {
    R1,
    R2c,
    R3,
    R,
    R2m,
    Rm,
}

impl HealthOp {
    pub const ALL: [HealthOp; 6] = [HealthOp::R1, HealthOp::R2c, HealthOp::R3, HealthOp::R, HealthOp::R2m, HealthOp::Rm];

    pub fn keyword(self) -> &'static str {
        match self {
            HealthOp::R1 => "R1",
            HealthOp::R2c => "R2c",
            HealthOp::R3 => "R3",
            HealthOp::R => "R",
            HealthOp::R2m => "R2m",
            HealthOp::Rm => "Rm",
        }
    }

    pub fn from_keyword(s: &str) -> Option<HealthOp> {
        HealthOp::ALL.into_iter().find(|h| h.keyword() == s)
    }
}

/// A variable as written: `x`, `x'` or `0.x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarName(pub String);

impl VarName {
    pub fn new(name: impl Into<String>) -> Self {
        VarName(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `0.x` and `1.x`.
    pub fn is_indexed(&self) -> bool {
        self.0.as_bytes().first().is_some_and(u8::is_ascii_digit)
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(VarName),
    /// `eps`
    Eps,
    /// `<a, b>`
    Seq(Vec<Event>),
    /// `"p/q"`
    Rat(NonNegRat),
    /// `{...}`, a timed trace in its JSON interchange form.
    Timed(TimedTrace),
    Int(i64),
    Bool(bool),
    /// `'sym'`
    Sym(String),
    /// `s ^ t`
    Concat(Box<Term>, Box<Term>),
    /// `s - t`
    Minus(Box<Term>, Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    /// `II`
    Skip,
    /// An uppercase name bound in the evaluation environment.
    Named(String),
    /// A boolean variable used as a formula.
    Var(VarName),
    Eq(Term, Term),
    /// `s <= t`: the prefix order on traces, `≤` on integers.
    Le(Term, Term),
    Assign(VarName, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// `P <| b |> Q`, stored as `(P, b, Q)`.
    Cond(Box<Formula>, Box<Formula>, Box<Formula>),
    Exists(VarName, Box<Formula>),
    /// `P[e₁, e₂/x₁, x₂]`
    Subst(Box<Formula>, Vec<Term>, Vec<VarName>),
    Apply(HealthOp, Box<Formula>),
    Seq(Box<Formula>, Box<Formula>),
    /// `P || M || Q`
    Par(Box<Formula>, Box<Formula>, Box<Formula>),
}

// Binding strength, loosest first.
const PAR: u8 = 0;
const SEQ: u8 = 1;
const COND: u8 = 2;
const IMPLIES: u8 = 3;
const OR: u8 = 4;
const AND: u8 = 5;
const UNARY: u8 = 6;
const POSTFIX: u8 = 7;
const ATOM: u8 = 8;

impl Formula {
    fn level(&self) -> u8 {
        match self {
            Formula::Par(..) => PAR,
            Formula::Seq(..) => SEQ,
            Formula::Cond(..) => COND,
            Formula::Implies(..) => IMPLIES,
            Formula::Or(..) => OR,
            Formula::And(..) => AND,
            Formula::Not(_) | Formula::Apply(..) | Formula::Exists(..) => UNARY,
            Formula::Subst(..) => POSTFIX,
            _ => ATOM,
        }
    }

    /// Writes `self` where the grammar expects something binding at least as
    /// tightly as `min`. `exists` extends as far right as possible, so it is
    /// bracketed whenever it is an operand.
    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min || matches!(self, Formula::Exists(..)) && min > PAR {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn seq(self, other: Formula) -> Formula {
        Formula::Seq(Box::new(self), Box::new(other))
    }

    pub fn apply(self, h: HealthOp) -> Formula {
        Formula::Apply(h, Box::new(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Skip => f.write_str("II"),
            Formula::Named(n) => f.write_str(n),
            Formula::Var(v) => write!(f, "{v}"),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Le(a, b) => write!(f, "{a} <= {b}"),
            Formula::Assign(x, e) => write!(f, "{x} := {e}"),
            Formula::Not(p) => {
                f.write_str("~")?;
                p.write_at(f, UNARY)
            }
            Formula::Apply(h, p) => {
                write!(f, "{} ", h.keyword())?;
                p.write_at(f, UNARY)
            }
            Formula::Exists(x, p) => write!(f, "exists {x} . {p}"),
            Formula::And(p, q) => binary(f, p, "/\\", q, AND, AND + 1),
            Formula::Or(p, q) => binary(f, p, "\\/", q, OR, OR + 1),
            Formula::Implies(p, q) => binary(f, p, "=>", q, IMPLIES + 1, IMPLIES),
            Formula::Seq(p, q) => binary(f, p, ";", q, SEQ, SEQ + 1),
            Formula::Cond(p, b, q) => {
                p.write_at(f, COND + 1)?;
                write!(f, " <| {b} |> ")?;
                q.write_at(f, COND)
            }
            Formula::Par(p, m, q) => {
                p.write_at(f, SEQ)?;
                f.write_str(" || ")?;
                m.write_at(f, SEQ)?;
                f.write_str(" || ")?;
                q.write_at(f, SEQ)
            }
            Formula::Subst(p, terms, vars) => {
                p.write_at(f, POSTFIX)?;
                f.write_str("[")?;
                comma_list(f, terms)?;
                f.write_str("/")?;
                comma_list(f, vars)?;
                f.write_str("]")
            }
        }
    }
}

fn binary(f: &mut fmt::Formatter<'_>, p: &Formula, op: &str, q: &Formula, left: u8, right: u8) -> fmt::Result {
    p.write_at(f, left)?;
    write!(f, " {op} ")?;
    q.write_at(f, right)
}

fn comma_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Eps => f.write_str("eps"),
            Term::Seq(events) => {
                f.write_str("<")?;
                comma_list(f, events)?;
                f.write_str(">")
            }
            Term::Rat(r) => write!(f, "\"{}\"", r.to_interchange()),
            Term::Timed(t) => f.write_str(&serde_json::to_string(t).map_err(|_| fmt::Error)?),
            Term::Int(n) => write!(f, "{n}"),
            Term::Bool(b) => write!(f, "{b}"),
            Term::Sym(s) => write!(f, "'{s}'"),
            Term::Concat(a, b) => term_binary(f, a, "^", b),
            Term::Minus(a, b) => term_binary(f, a, "-", b),
        }
    }
}

fn term_binary(f: &mut fmt::Formatter<'_>, a: &Term, op: &str, b: &Term) -> fmt::Result {
    write!(f, "{a} {op} ")?;
    match b {
        Term::Concat(..) | Term::Minus(..) => write!(f, "({b})"),
        _ => write!(f, "{b}"),
    }
}
