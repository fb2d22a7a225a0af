//! A semantic oracle for timed traces that reads only the raw segment list.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use reactive_traces::models::{NonNegRat, Poly, Segment, TimedModel, TimedTrace};

pub fn horner(coefficients: &[BigRational], t: &BigRational) -> BigRational {
    coefficients.iter().rev().fold(BigRational::zero(), |acc, a| acc * t + a)
}

/// Coefficients of `t ↦ p(t + c)`, by binomial expansion.
pub fn advance(coefficients: &[BigRational], c: &BigRational) -> Vec<BigRational> {
    let n = coefficients.len();
    let mut out = vec![BigRational::zero(); n];
    for (k, a) in coefficients.iter().enumerate() {
        // a·(t + c)^k = a · Σ_j C(k, j) c^(k−j) t^j
        let mut binom = BigRational::one();
        for j in 0..=k {
            if j > 0 {
                binom = binom * BigRational::from_integer((k + 1 - j).into()) / BigRational::from_integer(j.into());
            }
            let mut term = a * &binom;
            for _ in 0..(k - j) {
                term *= c;
            }
            out[j] += term;
        }
    }
    out
}

pub fn end(f: &TimedTrace) -> BigRational {
    f.segments().iter().fold(BigRational::zero(), |acc, s| acc + s.duration().as_big())
}

/// Segment start times followed by the end time.
pub fn cuts(f: &TimedTrace) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero()];
    for s in f.segments() {
        let next = out.last().unwrap() + s.duration().as_big();
        out.push(next);
    }
    out
}

pub fn max_degree(f: &TimedTrace) -> usize {
    f.segments()
        .iter()
        .flat_map(|s| s.valuation().values())
        .map(|p| p.coefficients().len().saturating_sub(1))
        .max()
        .unwrap_or(0)
}

/// The state at `x`, or `None` outside `[0, end)`.
pub fn sample(f: &TimedTrace, x: &BigRational) -> Option<BTreeMap<String, BigRational>> {
    let mut start = BigRational::zero();
    for s in f.segments() {
        let stop = &start + s.duration().as_big();
        if start <= *x && *x < stop {
            let local = x - &start;
            return Some(
                s.valuation()
                    .iter()
                    .map(|(k, p)| (k.clone(), horner(p.coefficients(), &local)))
                    .collect(),
            );
        }
        start = stop;
    }
    None
}

/// `degree + 1` interior points of every interval between consecutive
/// breakpoints of either trace.
pub fn sample_points(f: &TimedTrace, g: &TimedTrace) -> Vec<BigRational> {
    let breaks: BTreeSet<BigRational> = cuts(f).into_iter().chain(cuts(g)).collect();
    let breaks: Vec<BigRational> = breaks.into_iter().collect();
    let per = max_degree(f).max(max_degree(g)) + 1;
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        for k in 1..=per {
            let frac = BigRational::new(k.into(), (per + 1).into());
            out.push(a + (b - a) * frac);
        }
    }
    out
}

/// Pointwise equality of the partial functions denoted by `f` and `g`.
/// On each interval both sides are polynomials of degree at most `d`, so
/// agreement on `d + 1` points decides equality there.
pub fn pointwise_eq(f: &TimedTrace, g: &TimedTrace) -> bool {
    if end(f) != end(g) {
        return false;
    }
    sample_points(f, g).iter().all(|x| sample(f, x) == sample(g, x))
}

pub fn vars(rng: &mut ChaCha8Rng) -> Vec<String> {
    if rng.gen_bool(0.5) {
        vec!["x".into()]
    } else {
        vec!["x".into(), "y".into()]
    }
}

pub fn trace(rng: &mut ChaCha8Rng, vars: &[String]) -> TimedTrace {
    TimedModel::default().generate_over(rng, vars)
}

/// The same function as `f`, with one segment cut in two at a random
/// point. The list is not canonical; `from_segments` must repair it.
pub fn resplit(f: &TimedTrace, rng: &mut ChaCha8Rng) -> Vec<Segment> {
    let mut segments: Vec<Segment> = f.segments().to_vec();
    if segments.is_empty() {
        return segments;
    }
    let i = rng.gen_range(0..segments.len());
    let s = segments[i].clone();
    let k: u64 = rng.gen_range(1..=4);
    let cut = s.duration().as_big() * BigRational::new(k.into(), 5.into());
    let first = Segment::new(NonNegRat::new(cut.clone()).unwrap(), s.valuation().clone()).unwrap();
    let rest = NonNegRat::new(s.duration().as_big() - &cut).unwrap();
    let advanced = s
        .valuation()
        .iter()
        .map(|(v, p)| (v.clone(), Poly::new(advance(p.coefficients(), &cut))))
        .collect();
    let second = Segment::new(rest, advanced).unwrap();
    segments.splice(i..=i, [first, second]);
    segments
}

/// `f` with one coefficient changed, which changes the function.
pub fn perturb(f: &TimedTrace, rng: &mut ChaCha8Rng) -> Option<TimedTrace> {
    let mut segments: Vec<Segment> = f.segments().to_vec();
    if segments.is_empty() {
        return None;
    }
    let i = rng.gen_range(0..segments.len());
    let s = &segments[i];
    let mut valuation = s.valuation().clone();
    let (_, p) = valuation.iter_mut().next().unwrap();
    let mut c = p.coefficients().to_vec();
    if c.is_empty() {
        c.push(BigRational::zero());
    }
    c[0] += BigRational::new(1.into(), 3.into());
    *p = Poly::new(c);
    segments[i] = Segment::new(s.duration().clone(), valuation).unwrap();
    TimedTrace::from_segments(segments).ok()
}
