//! Piecewise-polynomial timed traces.
//!
//! A timed trace is a partial function `[0, t) → Σ`, stored as a list of
//! segments. Each segment has a positive duration and, per variable, a
//! polynomial in the local time `τ ∈ [0, duration)`. Segments are half-open,
//! so the value at a segment boundary belongs to the later segment.
//!
//! The representation is kept canonical: two adjacent segments are merged
//! whenever the later one is just the continuation of the earlier one (its
//! polynomials equal the earlier polynomials advanced by the earlier
//! duration). Two segment lists describe the same function exactly when
//! their canonical forms are identical, so equality is structural.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::poly::Poly;
use super::rat::NonNegRat;
use crate::algebra::{GeneratorError, TraceModel};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TimedTraceError {
    #[error("segment duration must be positive")]
    NonPositiveDuration,
    #[error("variable sets differ: {left:?} vs {right:?}")]
    VariableSetMismatch { left: Vec<String>, right: Vec<String> },
    #[error("time {t} is outside the domain [0, {end})")]
    OutOfDomain { t: String, end: String },
    #[error("discrete variable `{0}` has a non-constant polynomial")]
    DiscreteNotConstant(String),
    #[error("variable `{0}` is not declared by the signature")]
    UndeclaredVariable(String),
    #[error("invalid timed trace: {0}")]
    Invalid(String),
}

/// Variable → polynomial in local time.
pub type Valuation = BTreeMap<String, Poly>;

/// Variable → value at an instant.
pub type State = BTreeMap<String, BigRational>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    duration: NonNegRat,
    valuation: Valuation,
}

impl Segment {
    pub fn new(duration: NonNegRat, valuation: Valuation) -> Result<Self, TimedTraceError> {
        if duration.is_zero() {
            return Err(TimedTraceError::NonPositiveDuration);
        }
        Ok(Segment { duration, valuation })
    }

    /// A single-variable segment; handy in tests and examples.
    pub fn single(duration: NonNegRat, var: &str, poly: Poly) -> Result<Self, TimedTraceError> {
        Segment::new(duration, BTreeMap::from([(var.to_string(), poly)]))
    }

    pub fn duration(&self) -> &NonNegRat {
        &self.duration
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    fn vars(&self) -> Vec<String> {
        self.valuation.keys().cloned().collect()
    }

    /// The valuation with local time advanced by `d`.
    fn advanced(&self, d: &BigRational) -> Valuation {
        self.valuation
            .iter()
            .map(|(k, p)| (k.clone(), p.shift(d)))
            .collect()
    }

    fn eval(&self, local: &BigRational) -> State {
        self.valuation
            .iter()
            .map(|(k, p)| (k.clone(), p.eval(local)))
            .collect()
    }
}

/// `b` continues `a`: same variables and `b`'s polynomials are `a`'s
/// advanced by `a`'s duration.
fn mergeable(a: &Segment, b: &Segment) -> bool {
    a.valuation.len() == b.valuation.len()
        && a.valuation.iter().all(|(k, p)| {
            b.valuation
                .get(k)
                .is_some_and(|q| *q == p.shift(a.duration.as_big()))
        })
}

/// Checks every timed-trace invariant of a raw segment list: positive
/// durations, one variable set, and no mergeable adjacent pair.
pub fn is_well_formed(segments: &[Segment]) -> bool {
    let Some(first) = segments.first() else {
        return true;
    };
    segments.iter().all(|s| !s.duration.is_zero())
        && segments.iter().all(|s| s.valuation.keys().eq(first.valuation.keys()))
        && segments.windows(2).all(|w| !mergeable(&w[0], &w[1]))
}

/// A canonical timed trace. The empty trace has no segments and no
/// variables, and concatenates with traces over any variable set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimedTrace {
    segments: Vec<Segment>,
}

impl TimedTrace {
    pub fn empty() -> Self {
        TimedTrace { segments: Vec::new() }
    }

    /// Validates and canonicalises a segment list.
    pub fn from_segments(segments: Vec<Segment>) -> Result<Self, TimedTraceError> {
        if let Some(first) = segments.first() {
            for s in &segments {
                if s.duration.is_zero() {
                    return Err(TimedTraceError::NonPositiveDuration);
                }
                if !s.valuation.keys().eq(first.valuation.keys()) {
                    return Err(TimedTraceError::VariableSetMismatch {
                        left: first.vars(),
                        right: s.vars(),
                    });
                }
            }
        }
        let mut out: Vec<Segment> = Vec::with_capacity(segments.len());
        for s in segments {
            push_canonical(&mut out, s);
        }
        Ok(TimedTrace { segments: out })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Variable names, empty for ε.
    pub fn vars(&self) -> Vec<String> {
        self.segments.first().map(Segment::vars).unwrap_or_default()
    }

    /// Sum of segment durations: the least time not in the domain.
    pub fn end(&self) -> NonNegRat {
        self.segments
            .iter()
            .fold(NonNegRat::zero(), |acc, s| &acc + &s.duration)
    }

    /// Samples every variable at time `t`, which must lie in `[0, end)`.
    pub fn at(&self, t: &NonNegRat) -> Result<State, TimedTraceError> {
        let mut start = BigRational::zero();
        for s in &self.segments {
            let stop = &start + s.duration.as_big();
            if *t.as_big() < stop {
                return Ok(s.eval(&(t.as_big() - &start)));
            }
            start = stop;
        }
        Err(TimedTraceError::OutOfDomain {
            t: t.to_string(),
            end: self.end().to_string(),
        })
    }

    /// `f ⌢ g = f ∪ (g ≫ end(f))`, canonicalised at the seam.
    pub fn concat(&self, other: &TimedTrace) -> Result<TimedTrace, TimedTraceError> {
        if self.is_empty() {
            return Ok(other.clone());
        }
        if other.is_empty() {
            return Ok(self.clone());
        }
        let (left, right) = (self.vars(), other.vars());
        if left != right {
            return Err(TimedTraceError::VariableSetMismatch { left, right });
        }
        let mut segments = self.segments.clone();
        let mut rest = other.segments.iter().cloned();
        if let Some(head) = rest.next() {
            push_canonical(&mut segments, head);
        }
        // Only the seam can be mergeable: the tails were already canonical.
        segments.extend(rest);
        Ok(TimedTrace { segments })
    }

    /// `self ≤ other`: `self` is `other` restricted to `[0, end(self))`.
    pub fn is_prefix_of(&self, other: &TimedTrace) -> bool {
        self.split_point(other).is_some()
    }

    /// `self − prefix`, or ε when `prefix` is not a prefix of `self`.
    pub fn subtract(&self, prefix: &TimedTrace) -> TimedTrace {
        match prefix.split_point(self) {
            None => TimedTrace::empty(),
            Some(Split::Boundary(k)) => TimedTrace {
                segments: self.segments[k..].to_vec(),
            },
            Some(Split::Inside { index, cut }) => {
                let seg = &self.segments[index];
                let remainder = Segment {
                    duration: seg.duration.checked_sub(&cut).expect("strict truncation"),
                    valuation: seg.advanced(cut.as_big()),
                };
                let mut segments = vec![remainder];
                segments.extend_from_slice(&self.segments[index + 1..]);
                TimedTrace { segments }
            }
        }
    }

    /// The prefix of duration `t`, or `None` when `t > end`.
    pub fn truncate(&self, t: &NonNegRat) -> Option<TimedTrace> {
        let mut left = t.clone();
        let mut segments = Vec::new();
        for s in &self.segments {
            if left.is_zero() {
                break;
            }
            if s.duration <= left {
                left = left.checked_sub(&s.duration).expect("checked above");
                segments.push(s.clone());
            } else {
                segments.push(Segment { duration: left, valuation: s.valuation.clone() });
                left = NonNegRat::zero();
            }
        }
        left.is_zero().then_some(TimedTrace { segments })
    }

    /// Where `self` ends inside `other`, if `self` is a prefix of it.
    fn split_point(&self, other: &TimedTrace) -> Option<Split> {
        let k = self.segments.len();
        if k == 0 {
            return Some(Split::Boundary(0));
        }
        if k > other.segments.len() || self.segments[..k - 1] != other.segments[..k - 1] {
            return None;
        }
        let (mine, theirs) = (&self.segments[k - 1], &other.segments[k - 1]);
        if mine.valuation != theirs.valuation || mine.duration > theirs.duration {
            return None;
        }
        if mine.duration == theirs.duration {
            Some(Split::Boundary(k))
        } else {
            Some(Split::Inside { index: k - 1, cut: mine.duration.clone() })
        }
    }

    /// The partial-function view used for shifting and union.
    pub fn to_fn(&self) -> PiecewiseFn {
        let mut start = BigRational::zero();
        let mut pieces = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            let end = &start + s.duration.as_big();
            pieces.push(Piece {
                start: start.clone(),
                end: end.clone(),
                origin: start.clone(),
                valuation: s.valuation.clone(),
            });
            start = end;
        }
        PiecewiseFn { pieces }
    }
}

enum Split {
    Boundary(usize),
    Inside { index: usize, cut: NonNegRat },
}

fn push_canonical(out: &mut Vec<Segment>, s: Segment) {
    if let Some(last) = out.last_mut() {
        if mergeable(last, &s) {
            last.duration = &last.duration + &s.duration;
            return;
        }
    }
    out.push(s);
}

/// Executable witness of closure under concatenation: `f ⌢ g` exists and is
/// a well-formed timed trace.
pub fn closure_check(f: &TimedTrace, g: &TimedTrace) -> bool {
    f.concat(g).is_ok_and(|fg| is_well_formed(fg.segments()))
}

impl fmt::Display for TimedTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("ε");
        }
        f.write_str("[")?;
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "d={}", s.duration)?;
            for (k, p) in &s.valuation {
                write!(f, ", {k}↦{p}")?;
            }
        }
        f.write_str("]")
    }
}

#[derive(Serialize, Deserialize)]
struct SegmentJson {
    duration: NonNegRat,
    valuation: BTreeMap<String, Poly>,
}

#[derive(Serialize, Deserialize)]
struct TimedTraceJson {
    vars: Vec<String>,
    segments: Vec<SegmentJson>,
}

impl Serialize for TimedTrace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TimedTraceJson {
            vars: self.vars(),
            segments: self
                .segments
                .iter()
                .map(|s| SegmentJson {
                    duration: s.duration.clone(),
                    valuation: s.valuation.clone(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TimedTrace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = TimedTraceJson::deserialize(deserializer)?;
        let declared: BTreeSet<&String> = raw.vars.iter().collect();
        let mut segments = Vec::with_capacity(raw.segments.len());
        for s in raw.segments {
            let keys: BTreeSet<&String> = s.valuation.keys().collect();
            if keys != declared {
                return Err(D::Error::custom(TimedTraceError::Invalid(format!(
                    "segment variables {keys:?} do not match declared {declared:?}"
                ))));
            }
            segments.push(Segment::new(s.duration, s.valuation).map_err(D::Error::custom)?);
        }
        TimedTrace::from_segments(segments).map_err(D::Error::custom)
    }
}

/// Declares which variables a family of traces carries, and which of them
/// are discrete (piecewise constant).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub continuous: BTreeSet<String>,
    pub discrete: BTreeSet<String>,
}

impl Signature {
    pub fn check(&self, trace: &TimedTrace) -> Result<(), TimedTraceError> {
        for s in trace.segments() {
            for (k, p) in s.valuation() {
                if self.discrete.contains(k) {
                    if !p.is_constant() {
                        return Err(TimedTraceError::DiscreteNotConstant(k.clone()));
                    }
                } else if !self.continuous.contains(k) {
                    return Err(TimedTraceError::UndeclaredVariable(k.clone()));
                }
            }
        }
        let declared = self.continuous.len() + self.discrete.len();
        match trace.segments().first() {
            Some(s) if s.valuation().len() != declared => Err(TimedTraceError::VariableSetMismatch {
                left: self.continuous.iter().chain(&self.discrete).cloned().collect(),
                right: trace.vars(),
            }),
            _ => Ok(()),
        }
    }
}

/// One piece of a [`PiecewiseFn`]: on `[start, end)` the value is the
/// valuation evaluated at `x − origin`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub start: BigRational,
    pub end: BigRational,
    pub origin: BigRational,
    pub valuation: Valuation,
}

/// A partial function `ℚ≥0 ⇸ Σ` made of disjoint half-open pieces.
///
/// This is the semantic side of timed traces: shifting and union act on it
/// directly, and the trace operators are specified through it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PiecewiseFn {
    pieces: Vec<Piece>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("domains overlap on [{start}, {end})")]
pub struct Overlap {
    pub start: String,
    pub end: String,
}

impl PiecewiseFn {
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// `f ≫ n = λx • f(x − n)`.
    pub fn shift(&self, n: &NonNegRat) -> PiecewiseFn {
        let n = n.as_big();
        PiecewiseFn {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    start: &p.start + n,
                    end: &p.end + n,
                    origin: &p.origin + n,
                    valuation: p.valuation.clone(),
                })
                .collect(),
        }
    }

    /// Union of partial functions with disjoint domains.
    pub fn union(&self, other: &PiecewiseFn) -> Result<PiecewiseFn, Overlap> {
        for a in &self.pieces {
            for b in &other.pieces {
                if a.start < b.end && b.start < a.end {
                    let start = a.start.clone().max(b.start.clone());
                    let end = a.end.clone().min(b.end.clone());
                    return Err(Overlap { start: start.to_string(), end: end.to_string() });
                }
            }
        }
        let mut pieces: Vec<Piece> = self.pieces.iter().chain(&other.pieces).cloned().collect();
        pieces.sort_by(|a, b| a.start.cmp(&b.start));
        Ok(PiecewiseFn { pieces })
    }

    /// The value at `x`, or `None` outside the domain.
    pub fn at(&self, x: &BigRational) -> Option<State> {
        self.pieces
            .iter()
            .find(|p| p.start <= *x && *x < p.end)
            .map(|p| {
                let local = x - &p.origin;
                p.valuation
                    .iter()
                    .map(|(k, poly)| (k.clone(), poly.eval(&local)))
                    .collect()
            })
    }

    /// All piece endpoints, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<BigRational> {
        let set: BTreeSet<BigRational> = self
            .pieces
            .iter()
            .flat_map(|p| [p.start.clone(), p.end.clone()])
            .collect();
        set.into_iter().collect()
    }
}

/// Timed traces as a trace algebra.
///
/// The carrier is partitioned by variable set; each generated case picks one
/// of the configured variable sets so concatenation stays total.
#[derive(Debug, Clone)]
pub struct TimedModel {
    var_sets: Vec<Vec<String>>,
}

impl Default for TimedModel {
    fn default() -> Self {
        TimedModel {
            var_sets: vec![vec!["x".into()], vec!["x".into(), "y".into()]],
        }
    }
}

impl TimedModel {
    pub fn new(var_sets: Vec<Vec<String>>) -> Self {
        TimedModel { var_sets }
    }

    /// Generates one canonical trace over `vars`: 0–3 segments, durations
    /// from {1/4, 1/2, 1, 3/2}, polynomials of degree ≤ 2 with integer
    /// coefficients in −2..=2. A third of later segments continue their
    /// predecessor so that canonicalisation has merges to perform.
    pub fn generate_over(&self, rng: &mut ChaCha8Rng, vars: &[String]) -> TimedTrace {
        const DURATIONS: [(u64, u64); 4] = [(1, 4), (1, 2), (1, 1), (3, 2)];
        let count = rng.gen_range(0..=3);
        let mut segments: Vec<Segment> = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, d) = DURATIONS[rng.gen_range(0..DURATIONS.len())];
            let duration = NonNegRat::ratio(n, d);
            let valuation = match segments.last() {
                Some(prev) if rng.gen_ratio(1, 3) => prev.advanced(prev.duration.as_big()),
                _ => vars
                    .iter()
                    .map(|v| {
                        let degree = rng.gen_range(0..=2);
                        let coeffs: Vec<i64> = (0..=degree).map(|_| rng.gen_range(-2..=2)).collect();
                        (v.clone(), Poly::from_ints(&coeffs))
                    })
                    .collect(),
            };
            segments.push(Segment { duration, valuation });
        }
        TimedTrace::from_segments(segments).expect("generated segments are valid")
    }

    fn pick_vars(&self, rng: &mut ChaCha8Rng) -> Result<&[String], GeneratorError> {
        if self.var_sets.is_empty() {
            return Err(GeneratorError("timed model has no variable sets".into()));
        }
        Ok(&self.var_sets[rng.gen_range(0..self.var_sets.len())])
    }
}

impl TraceModel for TimedModel {
    type Trace = TimedTrace;

    fn name(&self) -> String {
        "timed".into()
    }

    fn empty(&self) -> TimedTrace {
        TimedTrace::empty()
    }

    fn concat(&self, x: &TimedTrace, y: &TimedTrace) -> TimedTrace {
        x.concat(y)
            .expect("cases never mix variable sets, so concatenation is total")
    }

    fn prefix(&self, x: &TimedTrace, y: &TimedTrace) -> bool {
        x.is_prefix_of(y)
    }

    fn subtract(&self, y: &TimedTrace, x: &TimedTrace) -> TimedTrace {
        y.subtract(x)
    }

    fn generate(&self, rng: &mut ChaCha8Rng) -> Result<TimedTrace, GeneratorError> {
        let vars = self.pick_vars(rng)?.to_vec();
        Ok(self.generate_over(rng, &vars))
    }

    fn generate_case(
        &self,
        rng: &mut ChaCha8Rng,
        arity: usize,
    ) -> Result<Vec<TimedTrace>, GeneratorError> {
        let vars = self.pick_vars(rng)?.to_vec();
        Ok((0..arity).map(|_| self.generate_over(rng, &vars)).collect())
    }

    fn shrink(&self, x: &TimedTrace) -> Vec<TimedTrace> {
        let mut out = Vec::new();
        if !x.is_empty() {
            out.push(TimedTrace::empty());
        }
        for i in 0..x.segments.len() {
            let mut segs = x.segments.clone();
            segs.remove(i);
            if let Ok(t) = TimedTrace::from_segments(segs) {
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        out
    }
}

/// `p/q` as an exact rational; a small helper for examples.
pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{check_laws, Mode};

    fn q(s: &str) -> NonNegRat {
        s.parse().unwrap()
    }

    fn seg(d: &str, coeffs: &[i64]) -> Segment {
        Segment::single(q(d), "v", Poly::from_ints(coeffs)).unwrap()
    }

    fn trace(segs: Vec<Segment>) -> TimedTrace {
        TimedTrace::from_segments(segs).unwrap()
    }

    #[test]
    fn end_of_empty_is_zero() {
        assert_eq!(TimedTrace::empty().end(), q("0"));
    }

    #[test]
    fn end_of_single_segment() {
        assert_eq!(trace(vec![seg("3/2", &[1])]).end(), q("3/2"));
    }

    #[test]
    fn sampling() {
        let f = trace(vec![seg("2", &[0, 0, 1])]);
        assert_eq!(f.at(&q("3/2")).unwrap()["v"], rational(9, 4));
        assert!(matches!(f.at(&q("2")), Err(TimedTraceError::OutOfDomain { .. })));
        assert!(TimedTrace::empty().at(&q("0")).is_err());
    }

    #[test]
    fn continuation_merges_into_one_segment() {
        let f = trace(vec![seg("1", &[0, 1])]);
        let g = trace(vec![seg("1", &[1, 1])]);
        let fg = f.concat(&g).unwrap();
        assert_eq!(fg.segments(), &[seg("2", &[0, 1])]);
        // The unmerged list is rejected by the validator.
        assert!(!is_well_formed(&[seg("1", &[0, 1]), seg("1", &[1, 1])]));
        assert!(is_well_formed(fg.segments()));
    }

    #[test]
    fn discontinuity_is_kept() {
        let f = trace(vec![seg("1", &[0, 1])]);
        let g = trace(vec![seg("1", &[0, 1])]);
        assert_eq!(f.concat(&g).unwrap().segments().len(), 2);
    }

    #[test]
    fn empty_is_a_unit() {
        let f = trace(vec![seg("1/2", &[2, -1]), seg("1", &[0])]);
        assert_eq!(TimedTrace::empty().concat(&f).unwrap(), f);
        assert_eq!(f.concat(&TimedTrace::empty()).unwrap(), f);
    }

    #[test]
    fn mismatched_variables_are_rejected() {
        let f = trace(vec![seg("1", &[0])]);
        let g = trace(vec![Segment::single(q("1"), "w", Poly::zero()).unwrap()]);
        assert!(matches!(f.concat(&g), Err(TimedTraceError::VariableSetMismatch { .. })));
    }

    #[test]
    fn truncation_prefix_and_remainder() {
        let x = trace(vec![seg("1", &[0, 1])]);
        let y = trace(vec![seg("2", &[0, 1])]);
        assert!(x.is_prefix_of(&y));
        let z = y.subtract(&x);
        assert_eq!(z, trace(vec![seg("1", &[1, 1])]));
        assert_eq!(x.concat(&z).unwrap(), y);
        assert_eq!(y.subtract(&y), TimedTrace::empty());
    }

    #[test]
    fn truncation() {
        let y = trace(vec![seg("1", &[0, 1]), seg("1", &[5])]);
        assert_eq!(y.truncate(&q("1/2")).unwrap(), trace(vec![seg("1/2", &[0, 1])]));
        assert_eq!(y.truncate(&q("1")).unwrap(), trace(vec![seg("1", &[0, 1])]));
        assert_eq!(y.truncate(&q("2")).unwrap(), y);
        assert_eq!(y.truncate(&q("0")).unwrap(), TimedTrace::empty());
        assert!(y.truncate(&q("3")).is_none());
        assert!(y.truncate(&q("3/2")).unwrap().is_prefix_of(&y));
    }

    #[test]
    fn different_valuation_is_not_a_prefix() {
        let x = trace(vec![seg("1", &[0, 1])]);
        let y = trace(vec![seg("1", &[0, 2])]);
        assert!(!x.is_prefix_of(&y));
        assert_eq!(y.subtract(&x), TimedTrace::empty());
    }

    #[test]
    fn closure_witness() {
        let f = trace(vec![seg("1", &[0, 1])]);
        let g = trace(vec![seg("1/4", &[3])]);
        assert!(closure_check(&f, &g));
        assert!(closure_check(&TimedTrace::empty(), &TimedTrace::empty()));
    }

    #[test]
    fn zero_duration_is_rejected() {
        assert_eq!(
            Segment::single(q("0"), "v", Poly::zero()),
            Err(TimedTraceError::NonPositiveDuration)
        );
    }

    #[test]
    fn shift_samples() {
        let f = trace(vec![seg("1", &[5])]).to_fn();
        let shifted = f.shift(&q("2"));
        assert_eq!(shifted.at(&rational(5, 2)).unwrap()["v"], rational(5, 1));
        assert!(shifted.at(&rational(1, 1)).is_none());
        assert_eq!(f.shift(&q("0")), f);
    }

    #[test]
    fn union_rejects_overlap() {
        let f = trace(vec![seg("1", &[5])]).to_fn();
        assert!(f.union(&f).is_err());
        assert!(f.union(&f.shift(&q("1"))).is_ok());
    }

    #[test]
    fn json_interchange() {
        let f = trace(vec![seg("1/2", &[0, 1]), seg("1", &[3])]);
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(
            json,
            r#"{"vars":["v"],"segments":[{"duration":"1/2","valuation":{"v":["0/1","1/1"]}},{"duration":"1/1","valuation":{"v":["3/1"]}}]}"#
        );
        assert_eq!(serde_json::from_str::<TimedTrace>(&json).unwrap(), f);
        // Non-canonical input is canonicalised on the way in.
        let raw = r#"{"vars":["v"],"segments":[{"duration":"1","valuation":{"v":["0","1"]}},{"duration":"1","valuation":{"v":["1","1"]}}]}"#;
        assert_eq!(serde_json::from_str::<TimedTrace>(raw).unwrap(), trace(vec![seg("2", &[0, 1])]));
        let bad = r#"{"vars":["v","w"],"segments":[{"duration":"1","valuation":{"v":["0"]}}]}"#;
        assert!(serde_json::from_str::<TimedTrace>(bad).is_err());
    }

    #[test]
    fn discrete_variables_must_be_constant() {
        let sig = Signature {
            continuous: BTreeSet::from(["x".to_string()]),
            discrete: BTreeSet::from(["mode".to_string()]),
        };
        let good = Segment::new(
            q("1"),
            BTreeMap::from([("x".into(), Poly::from_ints(&[0, 1])), ("mode".into(), Poly::from_ints(&[1]))]),
        )
        .unwrap();
        assert!(sig.check(&trace(vec![good])).is_ok());
        let bad = Segment::new(
            q("1"),
            BTreeMap::from([("x".into(), Poly::zero()), ("mode".into(), Poly::from_ints(&[0, 1]))]),
        )
        .unwrap();
        assert_eq!(
            sig.check(&trace(vec![bad])),
            Err(TimedTraceError::DiscreteNotConstant("mode".into()))
        );
    }

    #[test]
    fn randomized_laws() {
        let reports = check_laws(&TimedModel::default(), Mode::Randomized { count: 300, seed: 3 }).unwrap();
        assert!(reports.iter().all(|r| r.passed), "{reports:?}");
    }
}
