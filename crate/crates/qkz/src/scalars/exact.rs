//! Exact scalars: rationals, Gaussian rationals, and the [`Field`] trait the
//! exact-algebra modules are generic over.

use alloc::string::{String, ToString};
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::real::Real;
use super::Cx;

pub type Rational = BigRational;

/// Complex number with exact rational real and imaginary parts.
pub type GaussRational = Complex<Rational>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    Empty,
    ZeroDenominator(String),
    Malformed(String),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Empty => write!(f, "empty rational literal"),
            ParseError::ZeroDenominator(s) => write!(f, "zero denominator in rational literal {s:?}"),
            ParseError::Malformed(s) => write!(f, "malformed rational literal {s:?}"),
        }
    }
}

fn parse_int(s: &str, whole: &str) -> Result<BigInt, ParseError> {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::Malformed(whole.to_string()));
    }
    s.trim_start_matches('+')
        .parse::<BigInt>()
        .map_err(|_| ParseError::Malformed(whole.to_string()))
}

/// Parses `"a"`, `"a/b"` or a plain decimal such as `"-0.125"` into an
/// exact rational. Decimals are read exactly (`"0.1"` is `1/10`).
pub fn parse_rational(s: &str) -> Result<Rational, ParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_int(num.trim(), s)?;
        let d = parse_int(den.trim(), s)?;
        if d.is_zero() {
            return Err(ParseError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseError::Malformed(s.to_string()));
        }
        let negative = int.starts_with('-');
        let int_part = match int.trim_start_matches(['+', '-']) {
            "" => BigInt::zero(),
            digits => parse_int(digits, s)?,
        };
        let frac_part = parse_int(frac, s)?;
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        let magnitude = Rational::new(int_part * &scale + frac_part, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    Ok(Rational::from_integer(parse_int(s, s)?))
}

/// Canonical text form: `"a"` for integers, `"a/b"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Returns `Some(k)` when `r` is an integer that fits in `i64`.
pub fn as_integer(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        i64::try_from(r.to_integer()).ok()
    } else {
        None
    }
}

/// Exact arithmetic field used by the sl(2), Yangian, R-matrix and block
/// computations. Implemented for [`Rational`] and [`GaussRational`].
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(r: &Rational) -> Self;

    /// Least common multiple of all denominators; multiplying by it yields an
    /// element with integral coordinates.
    fn denominator_lcm(&self) -> BigInt;

    fn to_cx(&self) -> Cx;

    /// Stable textual key, used for caching.
    fn key(&self) -> String {
        self.to_string()
    }

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&int(n))
    }
}

impl Field for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn denominator_lcm(&self) -> BigInt {
        self.denom().clone()
    }

    fn to_cx(&self) -> Cx {
        Cx::from_real(Real::from_rational(self))
    }
}

impl Field for GaussRational {
    fn from_rational(r: &Rational) -> Self {
        Complex::new(r.clone(), Rational::zero())
    }

    fn denominator_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }

    fn to_cx(&self) -> Cx {
        Cx::new(Real::from_rational(&self.re), Real::from_rational(&self.im))
    }

    fn key(&self) -> String {
        alloc::format!("{}|{}", self.re, self.im)
    }
}

/// Formats a Gaussian rational as the pair of rational strings `[re, im]`.
pub fn format_gauss(z: &GaussRational) -> [String; 2] {
    [format_rational(&z.re), format_rational(&z.im)]
}

pub fn gauss(re: Rational, im: Rational) -> GaussRational {
    Complex::new(re, im)
}

/// Floor of a rational, exactly.
pub fn floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn is_nonneg_integer(r: &Rational) -> bool {
    r.is_integer() && !r.is_negative()
}

/// `true` when `r` lies in `p·Z` (p nonzero).
pub fn in_multiples_of(r: &Rational, p: &Rational) -> bool {
    (r / p).is_integer()
}

impl core::error::Error for ParseError {}
