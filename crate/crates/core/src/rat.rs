//! Arbitrary-precision rational scalar.
//!
//! Every coordinate in this crate is a [`Rat`]: a normalized fraction with a
//! positive denominator and no common factor between numerator and
//! denominator. Equality is exact value equality, there is no floating point
//! anywhere on a decision path. Decimal output exists only for display and is
//! always labeled as such by callers.
//!
//! The text form is canonical: `"p"` for integers, `"p/q"` otherwise, with
//! `q > 1`, no leading zeros and no sign on the denominator. The parser
//! rejects anything else (`"1//3"`, `"2/4"`, `"+1"`, `"1/0"`, `"03"`), so a
//! string round-trips to the same bytes and serialized files are stable.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number. Wraps a normalized big rational.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    /// Builds `num/den` from machine integers. Panics on a zero denominator;
    /// use [`Rat::from_str`] for untrusted input.
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(n: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    /// Sign as -1, 0 or +1.
    pub fn signum(&self) -> i32 {
        match self.0.cmp(&BigRational::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    /// Integer power with negative exponents allowed (`self` nonzero then).
    pub fn pow(&self, exp: i32) -> Rat {
        assert!(exp >= 0 || !self.is_zero(), "negative power of zero");
        Rat(self.0.pow(exp))
    }

    pub fn min(self, other: Rat) -> Rat {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Rat) -> Rat {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Nearest double, for display and diagnostics only.
    pub fn to_f64_lossy(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    fn from_big(r: BigRational) -> Rat {
        Rat(r)
    }
}

/// Digits with no leading zero (a bare `"0"` is allowed when `allow_zero`).
fn valid_digits(s: &str, allow_zero: bool) -> bool {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return false;
    }
    if s.len() > 1 && s.starts_with('0') {
        return false;
    }
    if !allow_zero && s == "0" {
        return false;
    }
    true
}

impl FromStr for Rat {
    type Err = Error;

    /// Strict canonical parse: `-?digits` or `-?digits/digits` with the
    /// fraction already in lowest terms and the denominator > 1.
    fn from_str(s: &str) -> Result<Rat> {
        let bad = || Error::Parse(format!("not a canonical rational: {s:?}"));
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (num_s, den_s) = match body.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (body, None),
        };
        if !valid_digits(num_s, true) {
            return Err(bad());
        }
        let mut num: BigInt = num_s.parse().map_err(|_| bad())?;
        if neg {
            if num.is_zero() {
                return Err(bad()); // "-0"
            }
            num = -num;
        }
        let den: BigInt = match den_s {
            None => BigInt::one(),
            Some(d) => {
                if !valid_digits(d, false) || d == "1" {
                    return Err(bad());
                }
                d.parse().map_err(|_| bad())?
            }
        };
        let r = BigRational::new(num.clone(), den.clone());
        // `BigRational::new` reduces; reject input that was not already reduced.
        if r.numer() != &num || r.denom() != &den {
            return Err(bad());
        }
        Ok(Rat(r))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e: Error| D::Error::custom(e.to_string()))
    }
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat::from_big((self.0).$method(rhs.0))
            }
        }
        impl $trait for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat::from_big((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat::from_big((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat::from_big((&self.0).$method(rhs.0))
            }
        }
    };
}

rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);
rat_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0.clone())
    }
}
