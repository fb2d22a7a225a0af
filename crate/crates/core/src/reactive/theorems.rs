//! Executable forms of the reactive-process theorems.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{is_healthy, r, r1_r2c, Healthiness, ReactiveAlphabet, TheoryError};
use crate::relation::{Predicate, RelError, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoryCounterexample {
    /// Which predicate failed, e.g. `sample 17 (231 rows)`.
    pub predicate: String,
    /// A binding on which the two sides of the law disagree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binding: Option<BTreeMap<String, Value>>,
}

/// The outcome of checking one theorem on one or more cases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoryReport {
    pub theorem: String,
    pub verified: bool,
    pub cases: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<TheoryCounterexample>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub precondition_failed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl TheoryReport {
    pub fn verified(theorem: &str, cases: u64) -> Self {
        TheoryReport {
            theorem: theorem.to_string(),
            verified: true,
            cases,
            counterexample: None,
            precondition_failed: false,
            note: None,
        }
    }

    pub fn refuted(theorem: &str, cases: u64, counterexample: TheoryCounterexample) -> Self {
        TheoryReport {
            verified: false,
            counterexample: Some(counterexample),
            ..TheoryReport::verified(theorem, cases)
        }
    }

    pub fn precondition(theorem: &str, note: String) -> Self {
        TheoryReport {
            verified: false,
            precondition_failed: true,
            note: Some(note),
            ..TheoryReport::verified(theorem, 0)
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// The first binding in exactly one of `a` and `b`.
pub fn first_difference(a: &Predicate, b: &Predicate) -> Option<usize> {
    let mut diff = a.rows().clone();
    diff.symmetric_difference_with(b.rows());
    diff.ones().next()
}

/// `None` when `lhs = rhs`, otherwise a counterexample naming `label`.
pub fn compare(label: &str, lhs: &Predicate, rhs: &Predicate) -> Option<TheoryCounterexample> {
    first_difference(lhs, rhs).map(|row| TheoryCounterexample {
        predicate: label.to_string(),
        binding: Some(lhs.binding(row)),
    })
}

fn single(theorem: &str, lhs: &Predicate, rhs: &Predicate) -> TheoryReport {
    match compare("given predicates", lhs, rhs) {
        None => TheoryReport::verified(theorem, 1),
        Some(cx) => TheoryReport::refuted(theorem, 1, cx),
    }
}

fn r1_r2c_healthy(ra: &ReactiveAlphabet, p: &Predicate) -> Result<bool, RelError> {
    Ok(r1_r2c(ra, p)? == *p)
}

/// `∃ t₁, t₂ • (P[ε, t₁/tr, tr'] ; Q[ε, t₂/tr, tr']) ∧ tr' = tr ⌢ t₁ ⌢ t₂`.
pub fn seq_decomposition(
    ra: &ReactiveAlphabet,
    p: &Predicate,
    q: &Predicate,
) -> Result<Predicate, RelError> {
    let traces = ra.traces().clone();
    let n = traces.len() as u32;
    let fixed_q: Vec<Predicate> = (0..n).map(|t| ra.fix_traces(q, t)).collect();
    let mut acc = Predicate::falsity(ra.alphabet());
    for t1 in 0..n {
        let p1 = ra.fix_traces(p, t1);
        if p1.is_false() {
            continue;
        }
        let v1 = traces.value(t1).as_trace().expect("trace domain");
        for (t2, q2) in fixed_q.iter().enumerate() {
            if q2.is_false() {
                continue;
            }
            let v2 = traces.value(t2 as u32).as_trace().expect("trace domain");
            let both = Value::Trace(v1.concat(v2)?);
            acc = acc.or(&p1.seq(q2)?.and(&ra.extends_by(&both)?)?)?;
        }
    }
    Ok(acc)
}

/// Checks `P ; Q` against its two-witness decomposition. `P` and `Q` must
/// be R1 and R2c healthy; otherwise the report records a precondition
/// failure and no verdict.
pub fn check_seq_contribution(
    ra: &ReactiveAlphabet,
    p: &Predicate,
    q: &Predicate,
) -> Result<TheoryReport, RelError> {
    const NAME: &str = "R1-R2c sequential";
    for (label, x) in [("P", p), ("Q", q)] {
        if !r1_r2c_healthy(ra, x)? {
            return Ok(TheoryReport::precondition(NAME, format!("{label} is not R1-R2c healthy")));
        }
    }
    Ok(single(NAME, &p.seq(q)?, &seq_decomposition(ra, p, q)?))
}

/// Closure of R1-R2c and of R under sequential composition.
pub fn check_closures(
    ra: &ReactiveAlphabet,
    p: &Predicate,
    q: &Predicate,
) -> Result<Vec<TheoryReport>, RelError> {
    let pq = p.seq(q)?;
    let mut out = Vec::with_capacity(2);
    const R12: &str = "R1-R2c sequential closure";
    if r1_r2c_healthy(ra, p)? && r1_r2c_healthy(ra, q)? {
        out.push(single(R12, &r1_r2c(ra, &pq)?, &pq));
    } else {
        out.push(TheoryReport::precondition(R12, "P and Q must be R1-R2c healthy".into()));
    }
    const RC: &str = "R sequential closure";
    if is_healthy(Healthiness::R, ra, p)? && is_healthy(Healthiness::R, ra, q)? {
        out.push(single(RC, &r(ra, &pq)?, &pq));
    } else {
        out.push(TheoryReport::precondition(RC, "P and Q must be R healthy".into()));
    }
    Ok(out)
}

/// Q1 and Q2 (distribution of `;` through non-empty healthy infima) and Q3
/// (`II` is a two-sided unit), where `II` is the plain relational identity
/// over the whole alphabet.
pub fn check_quantale(
    ra: &ReactiveAlphabet,
    set: &[Predicate],
    p: &Predicate,
    q: &Predicate,
) -> Result<Vec<TheoryReport>, TheoryError> {
    if set.is_empty() {
        return Err(TheoryError::EmptySet);
    }
    let alpha = ra.alphabet();
    let healthy = |x: &Predicate| is_healthy(Healthiness::R, ra, x);
    let mut members_ok = true;
    for x in set {
        members_ok &= healthy(x)?;
    }
    let inf = r(ra, &Predicate::lattice_inf(alpha, set)?)?;
    let mut out = Vec::with_capacity(3);

    if members_ok && healthy(p)? {
        let lhs = p.seq(&inf)?;
        let each: Vec<Predicate> = set.iter().map(|x| p.seq(x)).collect::<Result<_, _>>()?;
        let rhs = r(ra, &Predicate::lattice_inf(alpha, &each)?)?;
        out.push(single("Q1", &lhs, &rhs));
    } else {
        out.push(TheoryReport::precondition("Q1", "A and P must be R healthy".into()));
    }

    if members_ok && healthy(q)? {
        let lhs = inf.seq(q)?;
        let each: Vec<Predicate> = set.iter().map(|x| x.seq(q)).collect::<Result<_, _>>()?;
        let rhs = r(ra, &Predicate::lattice_inf(alpha, &each)?)?;
        out.push(single("Q2", &lhs, &rhs));
    } else {
        out.push(TheoryReport::precondition("Q2", "A and Q must be R healthy".into()));
    }

    if healthy(p)? {
        let ii = ra.skip();
        let (right, left) = (p.seq(ii)?, ii.seq(p)?);
        let report = match compare("P ; II", &right, p).or_else(|| compare("II ; P", &left, p)) {
            None => TheoryReport::verified("Q3", 1),
            Some(cx) => TheoryReport::refuted("Q3", 1, cx),
        };
        out.push(report.with_note(Q3_NOTE));
    } else {
        out.push(TheoryReport::precondition("Q3", "P must be R healthy".into()));
    }
    Ok(out)
}

/// Recorded with every Q3 verdict.
pub(crate) const Q3_NOTE: &str =
    "II is the relational identity over tr, wait and every program variable; \
     it is a unit of ';' for every predicate, healthy or not";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Event, EventSeq};
    use crate::reactive::r3;
    use crate::relation::Domain;
    use std::sync::Arc;

    fn desk() -> ReactiveAlphabet {
        let traces = Arc::new(Domain::seq_traces(&[Event::new("a"), Event::new("b")], 2).unwrap());
        ReactiveAlphabet::new(traces, &[("v".into(), Arc::new(Domain::bool()))]).unwrap()
    }

    #[test]
    fn skip_on_traces_decomposes_with_empty_witnesses() {
        let ra = desk();
        let ii = r1_r2c(&ra, ra.skip()).unwrap();
        let report = check_seq_contribution(&ra, &ii, &ii).unwrap();
        assert!(report.verified, "{report:?}");
    }

    #[test]
    fn unhealthy_input_is_a_precondition_failure() {
        let ra = desk();
        let a = Value::from(EventSeq::of(&["a"]));
        let tr = ra.tr();
        let p = Predicate::from_fn(ra.alphabet(), |b| *b.get(tr) == a);
        let report = check_seq_contribution(&ra, &p, &p).unwrap();
        assert!(report.precondition_failed);
        assert!(!report.verified);
        assert!(report.counterexample.is_none());
    }

    #[test]
    fn closures_of_r_true() {
        let ra = desk();
        let p = r(&ra, &Predicate::truth(ra.alphabet())).unwrap();
        for report in check_closures(&ra, &p, &p).unwrap() {
            assert!(report.verified, "{report:?}");
        }
    }

    #[test]
    fn quantale_needs_a_non_empty_set() {
        let ra = desk();
        let p = r3(&ra, &Predicate::truth(ra.alphabet())).unwrap();
        assert_eq!(check_quantale(&ra, &[], &p, &p), Err(TheoryError::EmptySet));
    }

    #[test]
    fn report_json_shape() {
        let report = TheoryReport::verified("Q1", 1);
        assert_eq!(
            serde_json::to_string(&report).unwrap(),
            r#"{"theorem":"Q1","verified":true,"cases":1}"#
        );
    }
}
