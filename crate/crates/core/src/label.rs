//! Exact rational function values.
//!
//! Every precondition of the edit calculus is an order or emptiness predicate
//! on label intervals, so labels are kept as arbitrary-precision rationals.
//! On the wire a label is a decimal string (`"0.25"`, `"-3"`, `"1e-3"`) or,
//! when it has no finite decimal expansion, a fraction string (`"1/3"`).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseLabelError;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Label(BigRational);

impl Label {
    pub fn zero() -> Self {
        Label(BigRational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Label(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`; panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Label(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Label(r)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Label(self.0.abs())
    }

    pub fn abs_diff(&self, other: &Label) -> Self {
        Label((&self.0 - &other.0).abs())
    }

    pub fn midpoint(&self, other: &Label) -> Self {
        Label((&self.0 + &other.0) / BigInt::from(2))
    }

    pub fn half(&self) -> Self {
        Label(&self.0 / BigInt::from(2))
    }

    pub fn scale(&self, factor: &Label) -> Self {
        Label(&self.0 * &factor.0)
    }

    /// Lossy conversion for reporting only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// True when the reduced denominator has no prime factors besides 2 and 5.
    fn has_finite_decimal(&self) -> bool {
        let mut d = self.0.denom().clone();
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        while d.is_even() {
            d /= &two;
        }
        while (&d % &five).is_zero() {
            d /= &five;
        }
        d.is_one()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.0;
        if r.is_integer() {
            return write!(f, "{}", r.numer());
        }
        if !self.has_finite_decimal() {
            return write!(f, "{}/{}", r.numer(), r.denom());
        }
        // Finite expansion: scale by 10^k until integral.
        let neg = r.is_negative();
        let abs = r.abs();
        let ten = BigInt::from(10);
        let mut k = 0usize;
        let mut scale = BigInt::one();
        loop {
            let scaled = &abs * BigRational::from_integer(scale.clone());
            if scaled.is_integer() {
                let digits = scaled.to_integer().to_string();
                let digits = if digits.len() <= k {
                    format!("{}{}", "0".repeat(k + 1 - digits.len()), digits)
                } else {
                    digits
                };
                let (int_part, frac_part) = digits.split_at(digits.len() - k);
                if neg {
                    write!(f, "-")?;
                }
                return write!(f, "{int_part}.{frac_part}");
            }
            k += 1;
            scale *= &ten;
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Label {
    type Err = ParseLabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() {
            return Err(ParseLabelError::Empty);
        }
        if let Some((num, den)) = t.split_once('/') {
            let num: BigInt = num
                .trim()
                .parse()
                .map_err(|_| ParseLabelError::Malformed(s.to_string()))?;
            let den: BigInt = den
                .trim()
                .parse()
                .map_err(|_| ParseLabelError::Malformed(s.to_string()))?;
            if den.is_zero() {
                return Err(ParseLabelError::ZeroDenominator(s.to_string()));
            }
            return Ok(Label(BigRational::new(num, den)));
        }
        parse_decimal(t).ok_or_else(|| {
            let lower = t.to_ascii_lowercase();
            if lower.contains("nan") || lower.contains("inf") {
                ParseLabelError::NonFinite(s.to_string())
            } else {
                ParseLabelError::Malformed(s.to_string())
            }
        })
    }
}

fn parse_decimal(t: &str) -> Option<Label> {
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().ok()?;
    if neg {
        num = -num;
    }
    let exp = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if exp >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, exp as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-exp) as usize))
    };
    Some(Label(r))
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Label> for &Label {
            type Output = Label;
            fn $m(self, rhs: &Label) -> Label {
                Label($tr::$m(&self.0, &rhs.0))
            }
        }
        impl $tr<Label> for Label {
            type Output = Label;
            fn $m(self, rhs: Label) -> Label {
                Label($tr::$m(self.0, rhs.0))
            }
        }
        impl $tr<&Label> for Label {
            type Output = Label;
            fn $m(self, rhs: &Label) -> Label {
                Label($tr::$m(self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Label {
    type Output = Label;
    fn neg(self) -> Label {
        Label(-self.0)
    }
}

impl Neg for &Label {
    type Output = Label;
    fn neg(self) -> Label {
        Label(-&self.0)
    }
}

impl std::iter::Sum for Label {
    fn sum<I: Iterator<Item = Label>>(iter: I) -> Label {
        iter.fold(Label::zero(), |a, b| a + b)
    }
}

impl From<i64> for Label {
    fn from(n: i64) -> Self {
        Label::from_int(n)
    }
}
