//! Exact probabilities.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::PaError;

/// An exact rational number in `[0, 1]`.
///
/// The wrapped [`BigRational`] is always stored in lowest terms with a
/// positive denominator, so two `Prob`s are equal iff they are structurally
/// equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Prob(BigRational);

impl Prob {
    pub fn zero() -> Self {
        Prob(BigRational::zero())
    }

    pub fn one() -> Self {
        Prob(BigRational::one())
    }

    pub fn half() -> Self {
        Prob::ratio(1, 2)
    }

    /// Builds `numer / denom`. Panics if the value is outside `[0, 1]` or
    /// `denom` is zero; use [`Prob::new`] for untrusted input.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Prob::new(BigRational::new(numer.into(), denom.into()))
            .expect("ratio outside [0, 1]")
    }

    pub fn new(value: BigRational) -> Result<Self, PaError> {
        if value < BigRational::zero() || value > BigRational::one() {
            return Err(PaError::Input(format!("probability {value} is outside [0, 1]")));
        }
        Ok(Prob(value))
    }

    /// `1 - 2^-exp`, the schedule thresholds used by witness certificates.
    pub fn one_minus_pow2(exp: u32) -> Self {
        let denom = BigInt::one() << exp as usize;
        Prob(BigRational::one() - BigRational::new(BigInt::one(), denom))
    }

    /// Wraps a rational the caller already knows lies in `[0, 1]`.
    pub(crate) fn from_rational_unchecked(value: BigRational) -> Self {
        debug_assert!(value >= BigRational::zero() && value <= BigRational::one());
        Prob(value)
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn halved(&self) -> Self {
        Prob(&self.0 / BigRational::from_integer(2.into()))
    }
}

impl Mul for &Prob {
    type Output = Prob;

    fn mul(self, rhs: &Prob) -> Prob {
        Prob(&self.0 * &rhs.0)
    }
}

impl Default for Prob {
    fn default() -> Self {
        Prob::zero()
    }
}

/// Writes `n` for integers and `p/q` otherwise.
impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Parses `"n"` or `"p/q"`; non-canonical fractions such as `"2/4"` are
/// reduced.
impl FromStr for Prob {
    type Err = PaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PaError::Input(format!("malformed probability {s:?}, expected \"n\" or \"p/q\""));
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        let s = s.trim();
        let value = match s.split_once('/') {
            Some((p, q)) => {
                if !digits(p) || !digits(q) {
                    return Err(bad());
                }
                let q: BigInt = q.parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(PaError::Input(format!("zero denominator in {s:?}")));
                }
                BigRational::new(p.parse().map_err(|_| bad())?, q)
            }
            None => {
                if !digits(s) {
                    return Err(bad());
                }
                BigRational::from_integer(s.parse().map_err(|_| bad())?)
            }
        };
        Prob::new(value)
    }
}
