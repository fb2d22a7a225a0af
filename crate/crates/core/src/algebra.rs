//! The abstract trace algebra and its law suite.
//!
//! A trace algebra is a monoid `(T, ⌢, ε)` that is cancellative on both sides
//! and has no inverses. Prefix and subtraction are derived from it:
//!
//! ```text
//! x ≤ y   iff  there is some z with y = x ⌢ z
//! y − x   =    the unique z with y = x ⌢ z   when x ≤ y
//!         =    ε                             otherwise
//! ```
//!
//! Models implement the derived operators directly (the description operator
//! is not executable); the law suite checks that the direct implementations
//! obey every law the derivation implies.

use std::fmt;

use rand_chacha::ChaCha8Rng;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed;

/// Failure to produce a trace value for law checking.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("generator failed: {0}")]
pub struct GeneratorError(pub String);

/// Errors raised by [`check_laws`] that are not law failures.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LawSuiteError {
    #[error("model `{0}` has no finite enumerator; exhaustive mode is unavailable")]
    NoEnumerator(String),
    #[error("model `{model}` enumerator is empty")]
    EmptyEnumeration { model: String },
    #[error("while checking {law}: {source}")]
    Generator {
        law: &'static str,
        #[source]
        source: GeneratorError,
    },
}

/// A trace algebra together with the machinery needed to test it.
///
/// Implementations must make `concat` total on the carrier. `prefix` and
/// `subtract` are the derived operators, implemented directly.
pub trait TraceModel: Sync {
    type Trace: Clone + PartialEq + fmt::Display + Send + Sync;

    fn name(&self) -> String;

    fn empty(&self) -> Self::Trace;

    fn concat(&self, x: &Self::Trace, y: &Self::Trace) -> Self::Trace;

    /// `x ≤ y`.
    fn prefix(&self, x: &Self::Trace, y: &Self::Trace) -> bool;

    /// `y − x`, totalised with ε when `x` is not a prefix of `y`.
    fn subtract(&self, y: &Self::Trace, x: &Self::Trace) -> Self::Trace;

    /// All carrier elements up to the model's bound, smallest first.
    ///
    /// The order is the shrink order: exhaustive checking visits tuples
    /// lexicographically in it, so the first counterexample found is minimal.
    fn enumerate(&self) -> Option<Vec<Self::Trace>> {
        None
    }

    fn generate(&self, rng: &mut ChaCha8Rng) -> Result<Self::Trace, GeneratorError>;

    /// Generates the arguments of one test case.
    ///
    /// Models whose carrier is partitioned (for example timed traces over
    /// different variable sets) override this so that a case never mixes
    /// partitions.
    fn generate_case(
        &self,
        rng: &mut ChaCha8Rng,
        arity: usize,
    ) -> Result<Vec<Self::Trace>, GeneratorError> {
        (0..arity).map(|_| self.generate(rng)).collect()
    }

    /// Strictly smaller candidates for `x`, most aggressive first.
    fn shrink(&self, _x: &Self::Trace) -> Vec<Self::Trace> {
        Vec::new()
    }
}

/// The laws checked by [`check_laws`], in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Law {
    Ta1,
    Ta2,
    Ta3,
    Ta4,
    Ta5,
    Tp1,
    Tp2,
    Tp3,
    Tp4,
    Ts1,
    Ts2,
    Ts3,
    Ts4,
    Ts5,
    Ts6,
    Ts7,
    Ts8,
}

impl Law {
    pub const ALL: [Law; 17] = [
        Law::Ta1,
        Law::Ta2,
        Law::Ta3,
        Law::Ta4,
        Law::Ta5,
        Law::Tp1,
        Law::Tp2,
        Law::Tp3,
        Law::Tp4,
        Law::Ts1,
        Law::Ts2,
        Law::Ts3,
        Law::Ts4,
        Law::Ts5,
        Law::Ts6,
        Law::Ts7,
        Law::Ts8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Law::Ta1 => "TA1",
            Law::Ta2 => "TA2",
            Law::Ta3 => "TA3",
            Law::Ta4 => "TA4",
            Law::Ta5 => "TA5",
            Law::Tp1 => "TP1",
            Law::Tp2 => "TP2",
            Law::Tp3 => "TP3",
            Law::Tp4 => "TP4",
            Law::Ts1 => "TS1",
            Law::Ts2 => "TS2",
            Law::Ts3 => "TS3",
            Law::Ts4 => "TS4",
            Law::Ts5 => "TS5",
            Law::Ts6 => "TS6",
            Law::Ts7 => "TS7",
            Law::Ts8 => "TS8",
        }
    }

    /// A one-line statement of the law.
    pub fn statement(self) -> &'static str {
        match self {
            Law::Ta1 => "x ⌢ (y ⌢ z) = (x ⌢ y) ⌢ z",
            Law::Ta2 => "ε ⌢ x = x ⌢ ε = x",
            Law::Ta3 => "x ⌢ y = x ⌢ z ⟹ y = z",
            Law::Ta4 => "x ⌢ z = y ⌢ z ⟹ x = y",
            Law::Ta5 => "x ⌢ y = ε ⟹ x = ε (and y = ε)",
            Law::Tp1 => "≤ is reflexive, antisymmetric and transitive",
            Law::Tp2 => "ε ≤ x",
            Law::Tp3 => "x ≤ x ⌢ y",
            Law::Tp4 => "x ⌢ y ≤ x ⌢ z ⟺ y ≤ z",
            Law::Ts1 => "x − ε = x",
            Law::Ts2 => "ε − x = ε",
            Law::Ts3 => "x − x = ε",
            Law::Ts4 => "(x ⌢ y) − x = y",
            Law::Ts5 => "(x − y) − z = x − (y ⌢ z)",
            Law::Ts6 => "(x ⌢ y) − (x ⌢ z) = y − z",
            Law::Ts7 => "(y ≤ x ∧ x − y = ε) ⟺ x = y",
            Law::Ts8 => "x ≤ y ⟹ x ⌢ (y − x) = y",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Law::Ta2 | Law::Tp2 | Law::Ts1 | Law::Ts2 | Law::Ts3 => 1,
            Law::Ta5 | Law::Tp3 | Law::Ts4 | Law::Ts7 | Law::Ts8 => 2,
            Law::Ta1
            | Law::Ta3
            | Law::Ta4
            | Law::Tp1
            | Law::Tp4
            | Law::Ts5
            | Law::Ts6 => 3,
        }
    }

    /// Evaluates the law on one case. Returns the failing clause, if any.
    pub fn violation<M: TraceModel + ?Sized>(self, m: &M, a: &[M::Trace]) -> Option<&'static str> {
        let eps = m.empty();
        let fail = |ok: bool, clause: &'static str| if ok { None } else { Some(clause) };
        match self {
            Law::Ta1 => {
                let (x, y, z) = (&a[0], &a[1], &a[2]);
                let left = m.concat(x, &m.concat(y, z));
                let right = m.concat(&m.concat(x, y), z);
                fail(left == right, "associativity")
            }
            Law::Ta2 => {
                let x = &a[0];
                fail(m.concat(&eps, x) == *x, "left unit")
                    .or_else(|| fail(m.concat(x, &eps) == *x, "right unit"))
            }
            Law::Ta3 => {
                let (x, y, z) = (&a[0], &a[1], &a[2]);
                fail(m.concat(x, y) != m.concat(x, z) || y == z, "left cancellation")
            }
            Law::Ta4 => {
                let (x, y, z) = (&a[0], &a[1], &a[2]);
                fail(m.concat(x, z) != m.concat(y, z) || x == y, "right cancellation")
            }
            Law::Ta5 => {
                let (x, y) = (&a[0], &a[1]);
                let xy_empty = m.concat(x, y) == eps;
                fail(!xy_empty || *x == eps, "no inverses")
                    .or_else(|| fail(!xy_empty || *y == eps, "no inverses (dual)"))
            }
            Law::Tp1 => {
                let (x, y, z) = (&a[0], &a[1], &a[2]);
                fail(m.prefix(x, x), "reflexivity")
                    .or_else(|| {
                        fail(!(m.prefix(x, y) && m.prefix(y, x)) || x == y, "antisymmetry")
                    })
                    .or_else(|| {
                        fail(
                            !(m.prefix(x, y) && m.prefix(y, z)) || m.prefix(x, z),
                            "transitivity",
                        )
                    })
            }
            Law::Tp2 => fail(m.prefix(&eps, &a[0]), "least element"),
            Law::Tp3 => fail(m.prefix(&a[0], &m.concat(&a[0], &a[1])), "extension"),
            Law::Tp4 => {
                let (x, y, z) = (&a[0], &a[1], &a[2]);
                let left = m.prefix(&m.concat(x, y), &m.concat(x, z));
                fail(left == m.prefix(y, z), "monotonicity")
            }
            Law::Ts1 => fail(m.subtract(&a[0], &eps) == a[0], "right unit"),
            Law::Ts2 => fail(m.subtract(&eps, &a[0]) == eps, "left zero"),
            Law::Ts3 => fail(m.subtract(&a[0], &a[0]) == eps, "self"),
            Law::Ts4 => {
                let (x, y) = (&a[0], &a[1]);
                fail(m.subtract(&m.concat(x, y), x) == *y, "inverse of concatenation")
            }
            Law::Ts5 => {
                let (x, y, z) = (&a[0], &a[1], &a[2]);
                let left = m.subtract(&m.subtract(x, y), z);
                let right = m.subtract(x, &m.concat(y, z));
                fail(left == right, "iterated subtraction")
            }
            Law::Ts6 => {
                let (x, y, z) = (&a[0], &a[1], &a[2]);
                let left = m.subtract(&m.concat(x, y), &m.concat(x, z));
                fail(left == m.subtract(y, z), "common prefix")
            }
            Law::Ts7 => {
                let (x, y) = (&a[0], &a[1]);
                let left = m.prefix(y, x) && m.subtract(x, y) == eps;
                fail(left == (x == y), "equality characterisation")
            }
            Law::Ts8 => {
                let (x, y) = (&a[0], &a[1]);
                fail(
                    !m.prefix(x, y) || m.concat(x, &m.subtract(y, x)) == *y,
                    "split",
                )
            }
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How [`check_laws`] chooses cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Every tuple over the model's finite enumeration.
    Exhaustive,
    /// `count` generated cases per law from a deterministic seed.
    Randomized { count: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clause: Option<String>,
    pub values: Vec<String>,
}

/// Outcome of one law.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub law: String,
    pub cases: u64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl LawReport {
    fn new(law: Law, cases: u64, counterexample: Option<Counterexample>) -> Self {
        LawReport {
            law: law.name().to_string(),
            cases,
            passed: counterexample.is_none(),
            counterexample,
        }
    }
}

fn counterexample<T: fmt::Display>(clause: &str, values: &[T]) -> Counterexample {
    Counterexample {
        clause: Some(clause.to_string()),
        values: values.iter().map(ToString::to_string).collect(),
    }
}

/// Runs every law of [`Law::ALL`] against `model`.
///
/// Laws are checked concurrently; each randomized law draws from its own
/// generator derived from the master seed and the law name, so the reports
/// do not depend on scheduling.
pub fn check_laws<M: TraceModel>(model: &M, mode: Mode) -> Result<Vec<LawReport>, LawSuiteError> {
    let enumeration = match mode {
        Mode::Exhaustive => {
            let values = model
                .enumerate()
                .ok_or_else(|| LawSuiteError::NoEnumerator(model.name()))?;
            if values.is_empty() {
                return Err(LawSuiteError::EmptyEnumeration { model: model.name() });
            }
            Some(values)
        }
        Mode::Randomized { .. } => None,
    };
    Law::ALL
        .par_iter()
        .map(|&law| match (&enumeration, mode) {
            (Some(values), _) => Ok(check_exhaustive(model, law, values)),
            (None, Mode::Randomized { count, seed }) => check_randomized(model, law, count, seed),
            (None, Mode::Exhaustive) => unreachable!("enumeration computed above"),
        })
        .collect()
}

/// Checks one law over all tuples of `values`, in lexicographic order.
pub fn check_exhaustive<M: TraceModel>(model: &M, law: Law, values: &[M::Trace]) -> LawReport {
    let arity = law.arity();
    let n = values.len();
    let mut digits = vec![0usize; arity];
    let mut args: Vec<M::Trace> = digits.iter().map(|&d| values[d].clone()).collect();
    let mut cases = 0u64;
    loop {
        cases += 1;
        if let Some(clause) = law.violation(model, &args) {
            return LawReport::new(law, cases, Some(counterexample(clause, &args)));
        }
        // Odometer increment, last position fastest.
        let mut pos = arity;
        loop {
            if pos == 0 {
                return LawReport::new(law, cases, None);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < n {
                args[pos] = values[digits[pos]].clone();
                break;
            }
            digits[pos] = 0;
            args[pos] = values[0].clone();
        }
    }
}

/// Checks one law on `count` generated cases, shrinking any failure.
pub fn check_randomized<M: TraceModel>(
    model: &M,
    law: Law,
    count: u64,
    seed: u64,
) -> Result<LawReport, LawSuiteError> {
    let mut rng = seed::rng(seed, law.name(), 0);
    for case in 0..count {
        let mut args = model
            .generate_case(&mut rng, law.arity())
            .map_err(|source| LawSuiteError::Generator { law: law.name(), source })?;
        correlate(model, &mut rng, &mut args);
        if law.violation(model, &args).is_some() {
            let (args, clause) = shrink_case(model, law, args);
            return Ok(LawReport::new(law, case + 1, Some(counterexample(clause, &args))));
        }
    }
    Ok(LawReport::new(law, count, None))
}

/// Makes some arguments extensions or copies of earlier ones.
///
/// Independent draws almost never satisfy the premises of the conditional
/// laws (cancellation, TS7, TS8); building extensions through `concat`
/// exercises them without changing the carrier.
fn correlate<M: TraceModel>(model: &M, rng: &mut ChaCha8Rng, args: &mut [M::Trace]) {
    for i in 1..args.len() {
        let j = rng.gen_range(0..i);
        match rng.gen_range(0..8) {
            0 | 1 => args[i] = model.concat(&args[j], &args[i]),
            2 => args[i] = args[j].clone(),
            3 => args[j] = model.concat(&args[i], &args[j]),
            _ => {}
        }
    }
}

/// Greedy shrinking: replace one argument at a time by the first smaller
/// candidate that still violates the law, until no candidate does.
fn shrink_case<M: TraceModel>(
    model: &M,
    law: Law,
    mut args: Vec<M::Trace>,
) -> (Vec<M::Trace>, &'static str) {
    let mut clause = law.violation(model, &args).expect("shrinking a failing case");
    'outer: loop {
        for i in 0..args.len() {
            for candidate in model.shrink(&args[i]) {
                let mut trial = args.clone();
                trial[i] = candidate;
                if let Some(c) = law.violation(model, &trial) {
                    args = trial;
                    clause = c;
                    continue 'outer;
                }
            }
        }
        return (args, clause);
    }
}
