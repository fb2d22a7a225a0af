//! Univariate polynomials with exact rational coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rat::{parse_rational, RatError};

/// Coefficients constant-term first; trailing zeros are always stripped, so
/// the zero polynomial is the empty list and equality is polynomial identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly(Vec<BigRational>);

impl Poly {
    pub fn new(mut coefficients: Vec<BigRational>) -> Self {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        Poly(coefficients)
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_ints(coefficients: &[i64]) -> Self {
        Poly::new(
            coefficients
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::new(vec![c])
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.0
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * t + c)
    }

    /// `t ↦ p(t + d)`.
    pub fn shift(&self, d: &BigRational) -> Poly {
        if d.is_zero() {
            return self.clone();
        }
        // Horner in the polynomial ring: q ← q·(t + d) + c.
        let mut q: Vec<BigRational> = Vec::with_capacity(self.0.len());
        for c in self.0.iter().rev() {
            let mut next = vec![BigRational::zero(); q.len() + 1];
            for (i, qi) in q.iter().enumerate() {
                next[i + 1] += qi;
                next[i] += qi * d;
            }
            next[0] += c;
            q = next;
        }
        Poly::new(q)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}")?;
                    }
                    if i == 1 {
                        f.write_str("t")?;
                    } else {
                        write!(f, "t^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn interchange(c: &BigRational) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(interchange))
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(deserializer)?;
        let coefficients = raw
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, RatError>>()
            .map_err(serde::de::Error::custom)?;
        Ok(Poly::new(coefficients))
    }
}
