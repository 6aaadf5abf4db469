//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! The LP kernel, the correlation algebra and the condition battery are all
//! written once against [`Scalar`]. Floating point types use the tolerance
//! passed in by the caller; exact types compare with zero slack.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rational = BigRational;

pub trait Scalar:
    Num + Signed + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// `true` when arithmetic is exact and all tolerances collapse to zero.
    const EXACT: bool;

    /// Slack used for comparisons: `tol` for floats, zero for exact types.
    fn slack(tol: f64) -> Self;

    /// Parses a decimal (`-1.25e-3`) or ratio (`3/4`) literal.
    fn parse_literal(text: &str) -> Option<Self>;

    fn is_finite_value(&self) -> bool;

    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("integer counts are representable")
    }

    fn ratio(num: i64, den: i64) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn slack(tol: f64) -> Self {
                tol as $t
            }

            fn parse_literal(text: &str) -> Option<Self> {
                let text = text.trim();
                let value = match text.split_once('/') {
                    Some((num, den)) => {
                        let num: $t = num.trim().parse().ok()?;
                        let den: $t = den.trim().parse().ok()?;
                        if den == 0.0 {
                            return None;
                        }
                        num / den
                    }
                    None => text.parse().ok()?,
                };
                value.is_finite().then_some(value)
            }

            fn is_finite_value(&self) -> bool {
                self.is_finite()
            }

            fn ratio(num: i64, den: i64) -> Self {
                (num as f64 / den as f64) as $t
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn slack(_tol: f64) -> Self {
        Self::zero()
    }

    fn parse_literal(text: &str) -> Option<Self> {
        let text = text.trim();
        match text.split_once('/') {
            Some((num, den)) => {
                let num = parse_decimal(num.trim())?;
                let den = parse_decimal(den.trim())?;
                if den.is_zero() {
                    return None;
                }
                Some(num / den)
            }
            None => parse_decimal(text),
        }
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// Exact parse of `[+-]digits[.digits][(e|E)[+-]digits]`.
fn parse_decimal(text: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let power = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= power;
    } else {
        value /= power;
    }
    Some(if negative { -value } else { value })
}

/// Larger of two partially ordered values (the first on ties or NaN).
pub fn max_of<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

pub fn min_of<T: Scalar>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

/// `|a - b| <= slack`.
pub fn approx_eq<T: Scalar>(a: &T, b: &T, slack: &T) -> bool {
    (a.clone() - b.clone()).abs() <= *slack
}

pub fn half<T: Scalar>() -> T {
    T::one() / (T::one() + T::one())
}

pub(crate) fn sum<'a, T: Scalar>(values: impl IntoIterator<Item = &'a T>) -> T {
    values.into_iter().fold(T::zero(), |acc, v| acc + v.clone())
}
