//! Exact rationals over `i64` with checked arithmetic.
//!
//! Values are kept in lowest terms with a positive denominator. The
//! `checked_*` methods report overflow as [`Error::Overflow`]; the operator
//! impls panic on overflow instead of wrapping and are meant for small values.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// Builds `num/den`, reducing to lowest terms.
    pub fn new(num: i64, den: i64) -> Result<Rational> {
        if den == 0 {
            return Err(Error::Parse(format!("zero denominator in {num}/0")));
        }
        Self::from_i128(num as i128, den as i128)
    }

    pub fn integer(n: i64) -> Rational {
        Rational { num: n, den: 1 }
    }

    fn from_i128(num: i128, den: i128) -> Result<Rational> {
        let g = gcd(num, den).max(1);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(num), Ok(den)) => Ok(Rational { num, den }),
            _ => Err(Error::Overflow),
        }
    }

    pub fn numer(self) -> i64 {
        self.num
    }

    pub fn denom(self) -> i64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_positive(self) -> bool {
        self.num > 0
    }

    pub fn is_integer(self) -> bool {
        self.den == 1
    }

    pub fn checked_add(self, o: Rational) -> Result<Rational> {
        let (a, b, c, d) = (self.num as i128, self.den as i128, o.num as i128, o.den as i128);
        Self::from_i128(a * d + c * b, b * d)
    }

    pub fn checked_sub(self, o: Rational) -> Result<Rational> {
        self.checked_add(-o)
    }

    pub fn checked_mul(self, o: Rational) -> Result<Rational> {
        let (a, b, c, d) = (self.num as i128, self.den as i128, o.num as i128, o.den as i128);
        Self::from_i128(a * c, b * d)
    }

    pub fn checked_div(self, o: Rational) -> Result<Rational> {
        if o.num == 0 {
            return Err(Error::Parse("division by zero".into()));
        }
        let (a, b, c, d) = (self.num as i128, self.den as i128, o.num as i128, o.den as i128);
        Self::from_i128(a * d, b * c)
    }

    pub fn checked_pow(self, p: u32) -> Result<Rational> {
        let mut acc = Rational::ONE;
        for _ in 0..p {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    pub fn abs(self) -> Rational {
        Rational { num: self.num.abs(), den: self.den }
    }

    /// Absolute difference, the quantity `|s - t|` used throughout.
    pub fn abs_diff(self, o: Rational) -> Result<Rational> {
        Ok(self.checked_sub(o)?.abs())
    }

    /// Smallest `k/m` with `k` an integer and `k/m >= self`.
    pub fn ceil_to(self, m: i64) -> Result<Rational> {
        let scaled = (self.num as i128) * (m as i128);
        let den = self.den as i128;
        let k = scaled.div_euclid(den) + i128::from(scaled.rem_euclid(den) != 0);
        Self::from_i128(k, m as i128)
    }

    /// Decimal approximation, for display only.
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Ord for Rational {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.num as i128 * o.den as i128).cmp(&(o.num as i128 * self.den as i128))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational { num: self.num.checked_neg().expect("rational overflow"), den: self.den }
    }
}

macro_rules! panicking_op {
    ($tr:ident, $f:ident, $checked:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $f(self, o: Rational) -> Rational {
                self.$checked(o).expect("rational overflow")
            }
        }
    };
}

panicking_op!(Add, add, checked_add);
panicking_op!(Sub, sub, checked_sub);
panicking_op!(Mul, mul, checked_mul);
panicking_op!(Div, div, checked_div);

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Rational> {
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                Rational::new(n, d)
            }
            None => Ok(Rational::integer(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for `Rational::new(n, d).unwrap()` in tests and tables.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d).expect("valid rational literal")
}
