//! Exact rational scalars.
//!
//! Every coordinate, time and speed in the simulator is a [`Rational`]:
//! an arbitrary-precision signed fraction kept in canonical form
//! (positive denominator, numerator and denominator coprime). Exactness
//! is what makes collision ordering deterministic; there is no floating
//! point anywhere on the simulation path.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact signed fraction in canonical form.
///
/// The text form is `p/q` with an optional leading sign; a bare `p` is
/// shorthand for `p/1`. A zero denominator is rejected when parsing and
/// cannot be constructed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

/// Error for rational construction, parsing and checked division.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RationalError {
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("not a rational literal: {0:?}")]
    Malformed(String),
}

impl Rational {
    /// Builds `numer/denom`, canonicalizing. Panics if `denom == 0`;
    /// use [`Rational::checked_new`] for untrusted input.
    pub fn new(numer: i64, denom: i64) -> Rational {
        assert!(denom != 0, "Rational::new with zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn checked_new(numer: i64, denom: i64) -> Result<Rational, RationalError> {
        if denom == 0 {
            Err(RationalError::ZeroDenominator)
        } else {
            Ok(Rational::new(numer, denom))
        }
    }

    pub fn int(n: i64) -> Rational {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Rational {
        Rational(BigRational::zero())
    }

    pub fn one() -> Rational {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    /// Exact division; division by zero is an error, never a panic.
    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational, RationalError> {
        if rhs.is_zero() {
            Err(RationalError::DivisionByZero)
        } else {
            Ok(Rational(&self.0 / &rhs.0))
        }
    }

    /// Reciprocal; zero has none.
    pub fn recip(&self) -> Result<Rational, RationalError> {
        Rational::one().checked_div(self)
    }

    pub fn min(self, other: Rational) -> Rational {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Rational) -> Rational {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Approximate value for rendering only. Never used on the
    /// simulation path.
    pub fn to_f64(&self) -> f64 {
        let n = self.0.numer();
        let d = self.0.denom();
        // Good enough for viewport scaling; exactness is not needed here.
        str::parse::<f64>(&n.to_string()).unwrap_or(0.0) / str::parse::<f64>(&d.to_string()).unwrap_or(1.0)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

impl Default for Rational {
    fn default() -> Rational {
        Rational::zero()
    }
}

impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Rational {
    type Err = RationalError;

    fn from_str(s: &str) -> Result<Rational, RationalError> {
        let s = s.trim();
        if let Some((_, den)) = s.split_once('/') {
            let den = den.trim();
            if den.chars().all(|c| c == '0' || c == '+' || c == '-') && den.contains('0') {
                return Err(RationalError::ZeroDenominator);
            }
        }
        BigRational::from_str(s)
            .map(Rational)
            .map_err(|_| RationalError::Malformed(s.to_string()))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Rational {
        Rational::int(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0 $op rhs.0)
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0 $op &rhs.0)
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(&self.0 $op rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// Shorthand used throughout tests and generators: `rat(1, 3)` is 1/3.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom)
}

/// Total-order comparison, exposed as a named operation alongside the
/// `Ord` impl.
pub fn compare(a: &Rational, b: &Rational) -> Ordering {
    a.cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_stays_canonical() {
        assert_eq!(rat(1, 3) + rat(1, 6), rat(1, 2));
        assert_eq!(rat(3, 1) * rat(0, 1), Rational::zero());
        assert_eq!(compare(&rat(2, 4), &rat(1, 2)), Ordering::Equal);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            rat(1, 2).checked_div(&Rational::zero()),
            Err(RationalError::DivisionByZero)
        );
        assert_eq!(rat(1, 2).checked_div(&rat(1, 4)), Ok(rat(2, 1)));
    }

    #[test]
    fn text_form_round_trips() {
        for s in ["1/3", "-7/2", "5", "0", "-12"] {
            let r: Rational = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert_eq!("2/4".parse::<Rational>().unwrap(), rat(1, 2));
        assert_eq!(
            "1/0".parse::<Rational>(),
            Err(RationalError::ZeroDenominator)
        );
        assert!("abc".parse::<Rational>().is_err());
    }

    #[test]
    fn denominator_always_positive() {
        let r = Rational(BigRational::new(BigInt::from(3), BigInt::from(-6)));
        assert_eq!(r, rat(-1, 2));
        assert!(r.denom() > &BigInt::from(0));
    }
}
