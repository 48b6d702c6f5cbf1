//! Arithmetic modes.
//!
//! Every probability computed by the enumeration engine is a finite sum of
//! integer counts times products of letter probabilities, so it can be carried
//! either as an exact [`BigRational`] or as an `f64`. Code that produces such
//! values is generic over [`Scalar`] and the caller picks the mode by type.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::alphabet::Theta;
use crate::error::{Error, Result};

/// Tolerance used for identity checks in floating mode.
pub const FLOAT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ExactRational,
    Float,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::ExactRational => f.write_str("exact-rational"),
            Mode::Float => f.write_str("float"),
        }
    }
}

pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    const MODE: Mode;

    fn from_u64(v: u64) -> Self;

    fn from_rational(v: &BigRational) -> Self;

    fn as_f64(&self) -> f64;

    /// Letter probabilities of `theta` in this representation.
    fn letter_probs(theta: &Theta) -> Result<Vec<Self>>;

    /// Equality in the sense of the mode: literal for rationals, within
    /// [`FLOAT_TOL`] for floats.
    fn same(&self, other: &Self) -> bool;

    fn to_json(&self) -> serde_json::Value;

    fn powu(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    fn from_ratio(num: u64, den: u64) -> Self {
        Self::from_u64(num) / Self::from_u64(den)
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_u64(v: u64) -> Self {
        v as f64
    }

    fn from_rational(v: &BigRational) -> Self {
        ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
    }

    fn as_f64(&self) -> f64 {
        *self
    }

    fn letter_probs(theta: &Theta) -> Result<Vec<Self>> {
        Ok(theta.probs().to_vec())
    }

    fn same(&self, other: &Self) -> bool {
        (self - other).abs() <= FLOAT_TOL
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self)
    }
}

impl Scalar for BigRational {
    const MODE: Mode = Mode::ExactRational;

    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_rational(v: &BigRational) -> Self {
        v.clone()
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn letter_probs(theta: &Theta) -> Result<Vec<Self>> {
        theta.exact_probs().map(<[_]>::to_vec).ok_or(Error::NotRational)
    }

    fn same(&self, other: &Self) -> bool {
        self == other
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

/// Parses a decimal (`0.7`, `1e-3`) or fraction (`3/10`) literal exactly.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a number: {text:?}"));
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = text[pos + 1..].parse().map_err(|_| bad())?;
            (&text[..pos], exp)
        }
        None => (text, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    if digits == "-" || digits == "+" {
        return Err(bad());
    }
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= ten.pow(scale);
    } else {
        value /= ten.pow(-scale);
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("0.7").unwrap(), q(7, 10));
        assert_eq!(parse_rational("3/10").unwrap(), q(3, 10));
        assert_eq!(parse_rational("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_rational("2.5E1").unwrap(), q(25, 1));
        assert_eq!(parse_rational(".25").unwrap(), q(1, 4));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn powu_matches_repeated_product() {
        let x = q(7, 10);
        assert_eq!(x.powu(0), q(1, 1));
        assert_eq!(x.powu(3), q(343, 1000));
        assert!((0.5f64.powu(10) - 1.0 / 1024.0).abs() < 1e-18);
    }
}
