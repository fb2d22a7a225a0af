//! Generalised reactive processes.
//!
//! A reactive alphabet has a trace pair `tr, tr'` over one bounded trace
//! universe, a boolean pair `wait, wait'`, and any number of program
//! variables. The healthiness conditions are:
//!
//! ```text
//! R1(P)  = P ∧ tr ≤ tr'
//! R2c(P) = P[ε, tr' − tr / tr, tr'] ◁ tr ≤ tr' ▷ P
//! R3(P)  = II ◁ wait ▷ P
//! R      = R3 ∘ R2c ∘ R1
//! ```
//!
//! R2c works for any trace model: it deletes the history only on bindings
//! where `tr` is a prefix of `tr'`, which is why subtraction's ε fallback
//! never matters here.

mod sampling;
mod theorems;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::relation::{Alphabet, Domain, Predicate, RelError, Role, TraceTable, Value, VarId};

pub use sampling::{
    micro_tier, quantale_suite, random_predicate, theory_suite, SampleKind, DENSITIES,
};
pub use theorems::{
    check_closures, check_quantale, check_seq_contribution, compare, first_difference, seq_decomposition,
    TheoryCounterexample, TheoryReport,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TheoryError {
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error("member {index} of the set is not {condition}-healthy")]
    UnhealthyMember { index: usize, condition: String },
    #[error("the set must be non-empty")]
    EmptySet,
    #[error("{0}")]
    Unsupported(String),
}

/// A reactive alphabet together with the predicates every healthiness
/// condition needs.
#[derive(Debug, Clone)]
pub struct ReactiveAlphabet {
    alphabet: Arc<Alphabet>,
    tr: VarId,
    tr_after: VarId,
    wait: VarId,
    wait_after: VarId,
    program: Vec<VarId>,
    trace_order: Predicate,
    waiting: Predicate,
    skip: Predicate,
}

impl ReactiveAlphabet {
    /// Builds `tr, wait, v₁, …` with their primed twins.
    pub fn new(traces: Arc<Domain>, program: &[(String, Arc<Domain>)]) -> Result<Self, RelError> {
        let mut b = Alphabet::builder()
            .var("tr", traces)
            .var("wait", Arc::new(Domain::bool()));
        for (name, domain) in program {
            b = b.var(name, domain.clone());
        }
        ReactiveAlphabet::detect(&b.build()?)
    }

    /// Recognises an existing alphabet as reactive.
    pub fn detect(alphabet: &Arc<Alphabet>) -> Result<Self, RelError> {
        let fail = |why: &str| RelError::NotReactiveAlphabet(why.to_string());
        let find = |name: &str| alphabet.lookup(name).map_err(|_| fail(&format!("missing `{name}`")));
        let (tr, tr_after) = (find("tr")?, find("tr'")?);
        let (wait, wait_after) = (find("wait")?, find("wait'")?);
        if alphabet.domain(tr).trace_table().is_none() {
            return Err(fail("`tr` must range over a trace universe"));
        }
        if !alphabet.domain(wait).is_bool() {
            return Err(fail("`wait` must be boolean"));
        }
        if !alphabet.is_homogeneous() {
            return Err(fail("every variable needs a primed twin"));
        }
        let program = alphabet
            .ids()
            .filter(|&id| alphabet.var(id).role() == Role::Before && id != tr && id != wait)
            .collect();
        let table = alphabet.domain(tr).trace_table().expect("checked above").clone();
        let trace_order =
            Predicate::cylinder(alphabet, &[tr, tr_after], |d| table.prefix(d[0], d[1]));
        let waiting = Predicate::cylinder(alphabet, &[wait], |d| d[0] == 1);
        Ok(ReactiveAlphabet {
            alphabet: alphabet.clone(),
            tr,
            tr_after,
            wait,
            wait_after,
            program,
            trace_order,
            waiting,
            skip: Predicate::skip(alphabet),
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn tr(&self) -> VarId {
        self.tr
    }

    pub fn tr_after(&self) -> VarId {
        self.tr_after
    }

    pub fn wait(&self) -> VarId {
        self.wait
    }

    pub fn wait_after(&self) -> VarId {
        self.wait_after
    }

    /// The program variables, unprimed.
    pub fn program(&self) -> &[VarId] {
        &self.program
    }

    pub fn traces(&self) -> &Arc<Domain> {
        self.alphabet.domain(self.tr)
    }

    pub fn table(&self) -> &TraceTable {
        self.traces().trace_table().expect("reactive alphabets have trace tables")
    }

    /// `tr ≤ tr'`.
    pub fn trace_order(&self) -> &Predicate {
        &self.trace_order
    }

    /// `wait`, as a condition.
    pub fn waiting(&self) -> &Predicate {
        &self.waiting
    }

    /// `II` over the whole alphabet.
    pub fn skip(&self) -> &Predicate {
        &self.skip
    }

    pub fn check(&self, p: &Predicate) -> Result<(), RelError> {
        if Arc::ptr_eq(p.alphabet(), &self.alphabet) || **p.alphabet() == *self.alphabet {
            Ok(())
        } else {
            Err(RelError::NotReactiveAlphabet(
                "predicate is over a different alphabet".into(),
            ))
        }
    }

    /// `P[ε, t/tr, tr']` for a trace index `t`.
    pub fn fix_traces(&self, p: &Predicate, t: u32) -> Predicate {
        let (tr, tr_after, empty) = (self.tr.index(), self.tr_after.index(), self.table().empty());
        p.remap(|_, target| {
            target[tr] = empty;
            target[tr_after] = t;
        })
    }

    /// `tr' = tr ⌢ t` for a trace value `t`, evaluated on values so that
    /// intermediate results may leave the universe.
    pub fn extends_by(&self, t: &Value) -> Result<Predicate, RelError> {
        let dom = self.traces().clone();
        let t = t.as_trace().ok_or_else(|| RelError::Value(crate::relation::ValueError::Type {
            expected: "trace".into(),
            found: t.kind().into(),
        }))?;
        let mut err = None;
        let p = Predicate::cylinder(&self.alphabet, &[self.tr, self.tr_after], |d| {
            let before = dom.value(d[0]).as_trace().expect("trace domain");
            let after = dom.value(d[1]);
            match before.concat(t) {
                Ok(v) => Value::Trace(v) == *after,
                Err(e) => {
                    err.get_or_insert(e);
                    false
                }
            }
        });
        match err {
            Some(e) => Err(e.into()),
            None => Ok(p),
        }
    }
}

/// `P ∧ tr ≤ tr'`.
pub fn r1(ra: &ReactiveAlphabet, p: &Predicate) -> Result<Predicate, RelError> {
    ra.check(p)?;
    p.and(&ra.trace_order)
}

/// `P[ε, tr' − tr / tr, tr'] ◁ tr ≤ tr' ▷ P`.
pub fn r2c(ra: &ReactiveAlphabet, p: &Predicate) -> Result<Predicate, RelError> {
    ra.check(p)?;
    let table = ra.table();
    let (tr, tr_after) = (ra.tr.index(), ra.tr_after.index());
    Ok(p.remap(|d, target| {
        if table.prefix(d[tr], d[tr_after]) {
            target[tr] = table.empty();
            target[tr_after] = table.subtract(d[tr_after], d[tr]);
        }
    }))
}

/// `II ◁ wait ▷ P`.
pub fn r3(ra: &ReactiveAlphabet, p: &Predicate) -> Result<Predicate, RelError> {
    ra.check(p)?;
    Predicate::cond(&ra.skip, &ra.waiting, p)
}

/// `R3 ∘ R2c ∘ R1`.
pub fn r(ra: &ReactiveAlphabet, p: &Predicate) -> Result<Predicate, RelError> {
    r3(ra, &r2c(ra, &r1(ra, p)?)?)
}

/// The reactive healthiness conditions as values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Healthiness {
    R1,
    R2c,
    R3,
    R,
}

impl Healthiness {
    pub const ALL: [Healthiness; 4] = [Healthiness::R1, Healthiness::R2c, Healthiness::R3, Healthiness::R];

    pub fn apply(self, ra: &ReactiveAlphabet, p: &Predicate) -> Result<Predicate, RelError> {
        match self {
            Healthiness::R1 => r1(ra, p),
            Healthiness::R2c => r2c(ra, p),
            Healthiness::R3 => r3(ra, p),
            Healthiness::R => r(ra, p),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Healthiness::R1 => "R1",
            Healthiness::R2c => "R2c",
            Healthiness::R3 => "R3",
            Healthiness::R => "R",
        }
    }
}

impl fmt::Display for Healthiness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Healthiness {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Healthiness::ALL
            .into_iter()
            .find(|h| h.name() == s)
            .ok_or_else(|| format!("unknown healthiness condition `{s}`"))
    }
}

/// `H(P) = P`.
pub fn is_healthy(h: Healthiness, ra: &ReactiveAlphabet, p: &Predicate) -> Result<bool, RelError> {
    Ok(h.apply(ra, p)? == *p)
}

/// R1 and R2c together, the precondition of the sequential theorems.
pub fn r1_r2c(ra: &ReactiveAlphabet, p: &Predicate) -> Result<Predicate, RelError> {
    r1(ra, &r2c(ra, p)?)
}

fn check_members(ra: &ReactiveAlphabet, set: &[Predicate]) -> Result<(), TheoryError> {
    for (index, p) in set.iter().enumerate() {
        if !is_healthy(Healthiness::R, ra, p)? {
            return Err(TheoryError::UnhealthyMember { index, condition: "R".into() });
        }
    }
    Ok(())
}

/// The infimum within the healthy predicates, `R(⨅ A)`.
pub fn theory_inf(ra: &ReactiveAlphabet, set: &[Predicate]) -> Result<Predicate, TheoryError> {
    check_members(ra, set)?;
    Ok(r(ra, &Predicate::lattice_inf(ra.alphabet(), set)?)?)
}

/// The supremum within the healthy predicates.
///
/// Each healthy member is a fixed point of a row-monotone transformer, so
/// the intersection of the members is itself a fixed point. `R(⨆ A)` is
/// therefore the plain supremum, and the least healthy upper bound. The
/// result is checked, and a failure reported as an error rather than
/// searched around.
pub fn theory_sup(ra: &ReactiveAlphabet, set: &[Predicate]) -> Result<Predicate, TheoryError> {
    check_members(ra, set)?;
    let sup = r(ra, &Predicate::lattice_sup(ra.alphabet(), set)?)?;
    for p in set {
        if !p.refines(&sup)? {
            return Err(TheoryError::Unsupported(
                "R of the supremum is not an upper bound".into(),
            ));
        }
    }
    Ok(sup)
}

/// `∃ t • P[ε, t/tr, tr'] ∧ tr' = tr ⌢ t`, with `t` ranging over the trace
/// universe.
pub fn contribution_form(ra: &ReactiveAlphabet, p: &Predicate) -> Result<Predicate, RelError> {
    ra.check(p)?;
    let mut acc = Predicate::falsity(ra.alphabet());
    for t in 0..ra.traces().len() as u32 {
        let fixed = ra.fix_traces(p, t);
        if fixed.is_false() {
            continue;
        }
        let ext = ra.extends_by(ra.traces().value(t))?;
        acc = acc.or(&fixed.and(&ext)?)?;
    }
    Ok(acc)
}
