//! Coefficient fields for truncated tensors.
//!
//! Three fields are supported: exact rationals ([`Rational`]), binary64
//! reals and binary64 complex numbers. Exact rationals are the only kind
//! that can certify that a coefficient is zero.

use std::fmt::Debug;
use std::ops::Neg;

use num::traits::{NumAssignRef, NumRef, ToPrimitive};
use num::{BigInt, BigRational, Complex, One, Zero};
use serde::{Deserialize, Serialize};

pub use num::complex::Complex64;

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Rational,
    F64,
    C64,
}

impl ScalarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarKind::Rational => "rational",
            ScalarKind::F64 => "f64",
            ScalarKind::C64 => "c64",
        }
    }
}

/// A coefficient field usable inside a [`TruncatedTensor`](crate::TruncatedTensor).
pub trait Scalar:
    NumRef + NumAssignRef + Neg<Output = Self> + Clone + Debug + PartialEq + Send + Sync + 'static
{
    const KIND: ScalarKind;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Absolute value (complex modulus) as binary64.
    fn modulus(&self) -> f64;

    fn to_c64(&self) -> Complex64;

    /// The exact value, for rational scalars.
    fn as_rational(&self) -> Option<&Rational> {
        None
    }

    /// Whether zero tests on this field are exact certificates.
    fn is_exact() -> bool {
        Self::KIND == ScalarKind::Rational
    }
}

/// Scalars with an order, used for path coordinates.
pub trait RealScalar: Scalar + PartialOrd {
    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for Rational {
    const KIND: ScalarKind = ScalarKind::Rational;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn modulus(&self) -> f64 {
        RealScalar::to_f64(self).abs()
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(RealScalar::to_f64(self), 0.0)
    }

    fn as_rational(&self) -> Option<&Rational> {
        Some(self)
    }
}

impl RealScalar for Rational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::F64;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn modulus(&self) -> f64 {
        f64::abs(*self)
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
}

impl RealScalar for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Complex64 {
    const KIND: ScalarKind = ScalarKind::C64;

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(num as f64 / den as f64, 0.0)
    }

    fn modulus(&self) -> f64 {
        self.norm()
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }
}

/// Formats a rational as `"p/q"`, denominator always present.
pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"p/q"`, an integer, or a decimal literal (optionally with an
/// exponent) into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all_digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num::pow(ten, (-scale) as usize))
    };
    Some(value)
}

pub(crate) fn factorial_u64(n: usize) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    BigRational::from_integer(acc)
}

pub(crate) fn factorial_f64(n: usize) -> f64 {
    (2..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("3/6"), Some(Rational::from_ratio(1, 2)));
        assert_eq!(parse_rational("-4"), Some(Rational::from_ratio(-4, 1)));
        assert_eq!(parse_rational("0.125"), Some(Rational::from_ratio(1, 8)));
        assert_eq!(parse_rational("-1.5e2"), Some(Rational::from_ratio(-150, 1)));
        assert_eq!(parse_rational("25e-2"), Some(Rational::from_ratio(1, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn rationals_are_normalized() {
        let q = Rational::from_ratio(6, -4);
        assert_eq!(rational_to_string(&q), "-3/2");
        assert_eq!(rational_to_string(&Rational::zero()), "0/1");
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial_u64(5), Rational::from_ratio(120, 1));
        assert_eq!(factorial_f64(0), 1.0);
        assert_eq!(factorial_f64(6), 720.0);
    }
}
