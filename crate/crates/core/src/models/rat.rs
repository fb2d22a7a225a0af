//! Nonnegative exact rationals under addition.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{GeneratorError, TraceModel};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RatError {
    #[error("negative value {0}")]
    Negative(String),
    #[error("cannot parse `{0}` as a rational (expected \"p/q\" or \"p\")")]
    Parse(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// An exact rational `≥ 0`, always gcd-reduced with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NonNegRat(BigRational);

impl NonNegRat {
    pub fn new(value: BigRational) -> Result<Self, RatError> {
        if value.is_negative() {
            Err(RatError::Negative(value.to_string()))
        } else {
            Ok(NonNegRat(value))
        }
    }

    /// `numer / denom`. Panics if `denom` is zero.
    pub fn ratio(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "zero denominator");
        NonNegRat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn integer(n: u64) -> Self {
        NonNegRat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        NonNegRat(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn into_big(self) -> BigRational {
        self.0
    }

    /// `self − other` when `other ≤ self`.
    pub fn checked_sub(&self, other: &NonNegRat) -> Option<NonNegRat> {
        (other.0 <= self.0).then(|| NonNegRat(&self.0 - &other.0))
    }

    /// The `"p/q"` interchange form. Integers keep the `/1`.
    pub fn to_interchange(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Add for &NonNegRat {
    type Output = NonNegRat;
    fn add(self, rhs: &NonNegRat) -> NonNegRat {
        NonNegRat(&self.0 + &rhs.0)
    }
}

impl Add for NonNegRat {
    type Output = NonNegRat;
    fn add(self, rhs: NonNegRat) -> NonNegRat {
        NonNegRat(self.0 + rhs.0)
    }
}

impl fmt::Display for NonNegRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parses `"p/q"` or `"p"` into a possibly negative exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, RatError> {
    let s = text.trim();
    let parse_int = |part: &str| BigInt::from_str(part.trim()).map_err(|_| RatError::Parse(text.to_string()));
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d) = (parse_int(n)?, parse_int(d)?);
            if d.is_zero() {
                return Err(RatError::ZeroDenominator(text.to_string()));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

impl FromStr for NonNegRat {
    type Err = RatError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NonNegRat::new(parse_rational(s)?)
    }
}

impl Serialize for NonNegRat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_interchange())
    }
}

impl<'de> Deserialize<'de> for NonNegRat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `(ℚ≥0, +, 0)` as a trace algebra.
///
/// With a grid the model is also finitely enumerable (`0, step, …, max`),
/// which makes exhaustive law checking available.
#[derive(Debug, Clone, Default)]
pub struct RatModel {
    grid: Option<(NonNegRat, NonNegRat)>,
}

impl RatModel {
    pub fn new() -> Self {
        RatModel { grid: None }
    }

    pub fn with_grid(step: NonNegRat, max: NonNegRat) -> Self {
        RatModel { grid: Some((step, max)) }
    }
}

/// `{0, step, 2·step, …}` up to and including `max`.
pub fn grid(step: &NonNegRat, max: &NonNegRat) -> Vec<NonNegRat> {
    assert!(!step.is_zero(), "grid step must be positive");
    let mut out = vec![NonNegRat::zero()];
    let mut next = step.clone();
    while next <= *max {
        out.push(next.clone());
        next = &next + step;
    }
    out
}

impl TraceModel for RatModel {
    type Trace = NonNegRat;

    fn name(&self) -> String {
        "rat".into()
    }

    fn empty(&self) -> NonNegRat {
        NonNegRat::zero()
    }

    fn concat(&self, x: &NonNegRat, y: &NonNegRat) -> NonNegRat {
        x + y
    }

    fn prefix(&self, x: &NonNegRat, y: &NonNegRat) -> bool {
        x <= y
    }

    fn subtract(&self, y: &NonNegRat, x: &NonNegRat) -> NonNegRat {
        y.checked_sub(x).unwrap_or_else(NonNegRat::zero)
    }

    fn enumerate(&self) -> Option<Vec<NonNegRat>> {
        self.grid.as_ref().map(|(step, max)| grid(step, max))
    }

    fn generate(&self, rng: &mut ChaCha8Rng) -> Result<NonNegRat, GeneratorError> {
        if rng.gen_ratio(1, 6) {
            return Ok(NonNegRat::zero());
        }
        let numer = rng.gen_range(0..=24u64);
        let denom = rng.gen_range(1..=8u64);
        Ok(NonNegRat::ratio(numer, denom))
    }

    fn shrink(&self, x: &NonNegRat) -> Vec<NonNegRat> {
        if x.is_zero() {
            return Vec::new();
        }
        let big = x.as_big();
        let candidates = [
            BigRational::zero(),
            big.floor(),
            big / BigInt::from(2),
            BigRational::from_integer(big.numer().clone()),
        ];
        let mut out: Vec<NonNegRat> = Vec::new();
        for c in candidates {
            let c = NonNegRat(c);
            if c < *x && !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{check_laws, Mode};

    fn q(s: &str) -> NonNegRat {
        s.parse().unwrap()
    }

    #[test]
    fn concatenation_is_addition() {
        assert_eq!(RatModel::new().concat(&q("3/2"), &q("5/2")), q("4"));
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(RatModel::new().empty(), q("0"));
    }

    #[test]
    fn subtract_falls_back_to_zero() {
        let m = RatModel::new();
        assert_eq!(m.subtract(&q("1"), &q("2")), q("0"));
        assert_eq!(m.subtract(&q("2"), &q("1/2")), q("3/2"));
    }

    #[test]
    fn canonical_representation() {
        assert_eq!(q("6/4"), q("3/2"));
        assert_eq!(q("6/4").to_interchange(), "3/2");
        assert_eq!(q("4").to_interchange(), "4/1");
        assert_eq!(q("-2/-4"), q("1/2"));
        assert!("-1/2".parse::<NonNegRat>().is_err());
        assert!("1/0".parse::<NonNegRat>().is_err());
        assert!("x".parse::<NonNegRat>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let v = q("7/3");
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, "\"7/3\"");
        assert_eq!(serde_json::from_str::<NonNegRat>(&json).unwrap(), v);
    }

    #[test]
    fn grid_is_inclusive() {
        let g = grid(&q("1/2"), &q("2"));
        assert_eq!(g.len(), 5);
        assert_eq!(g.last().unwrap(), &q("2"));
    }

    #[test]
    fn laws_hold_on_grid_exhaustively() {
        let model = RatModel::with_grid(q("1/2"), q("2"));
        for r in check_laws(&model, Mode::Exhaustive).unwrap() {
            assert!(r.passed, "{r:?}");
        }
    }
}
