//! Real numbers at the global working precision, backed by `astro-float`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use core::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use astro_float::{BigFloat, Consts, RoundingMode, Sign as FSign, Word};
use num_bigint::{BigInt, Sign};
use num_traits::Zero;

use super::exact::Rational;

const RM: RoundingMode = RoundingMode::ToEven;
const DEFAULT_DIGITS: usize = 30;
/// Extra bits carried beyond the requested decimal digits.
const GUARD_BITS: usize = 40;

static DIGITS: AtomicUsize = AtomicUsize::new(DEFAULT_DIGITS);
/// Pool of constant caches: a thread takes one for the duration of a call,
/// so the lock is only held to pop and push.
static CONSTS: spin::Mutex<Vec<Consts>> = spin::Mutex::new(Vec::new());

/// Sets the number of significant decimal digits used by all floating
/// computations. Values below 16 are raised to 16.
pub fn set_precision_digits(digits: usize) {
    DIGITS.store(digits.max(16), AtomicOrdering::SeqCst);
}

pub fn precision_digits() -> usize {
    DIGITS.load(AtomicOrdering::SeqCst)
}

/// Working precision in bits, including guard bits.
pub fn working_bits() -> usize {
    (precision_digits() * 3322).div_ceil(1000) + GUARD_BITS
}

/// Decimal digits actually carried (requested digits plus guard).
pub fn working_digits() -> usize {
    working_bits() * 301 / 1000
}

pub(crate) fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    let taken = CONSTS.lock().pop();
    let mut cc = taken.unwrap_or_else(|| Consts::new().expect("constants cache allocation"));
    let r = f(&mut cc);
    CONSTS.lock().push(cc);
    r
}

/// `10^(-k)` as an `f64`, for tolerance bookkeeping.
pub fn ten_pow_neg(k: usize) -> f64 {
    let mut x = 1.0f64;
    for _ in 0..k {
        x /= 10.0;
    }
    x
}

#[derive(Clone)]
pub struct Real(pub(crate) BigFloat);

impl Real {
    pub fn zero() -> Self {
        Real(BigFloat::from_word(0, working_bits()))
    }

    pub fn one() -> Self {
        Real(BigFloat::from_word(1, working_bits()))
    }

    pub fn from_f64(x: f64) -> Self {
        Real(BigFloat::from_f64(x, working_bits()))
    }

    pub fn from_i64(n: i64) -> Self {
        Real(BigFloat::from_i64(n, working_bits()))
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Real(Real::from_bigint_exact(n).add(&BigFloat::from_word(0, 64), working_bits(), RM))
    }

    pub fn from_rational(r: &Rational) -> Self {
        let n = Real::from_bigint_exact(r.numer());
        let d = Real::from_bigint_exact(r.denom());
        Real(n.div(&d, working_bits(), RM))
    }

    fn from_bigint_exact(n: &BigInt) -> BigFloat {
        let (sign, digits) = n.to_u64_digits();
        if digits.is_empty() {
            return BigFloat::from_word(0, 64);
        }
        let words: Vec<Word> = digits.iter().map(|&d| d as Word).collect();
        let s = if sign == Sign::Minus { FSign::Neg } else { FSign::Pos };
        let e = (words.len() * Word::BITS as usize) as astro_float::Exponent;
        BigFloat::from_words(&words, s, e)
    }

    pub fn pi() -> Self {
        with_consts(|cc| Real(cc.pi(working_bits(), RM)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs())
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.sqrt(working_bits(), RM))
    }

    pub fn exp(&self) -> Self {
        with_consts(|cc| Real(self.0.exp(working_bits(), RM, cc)))
    }

    pub fn ln(&self) -> Self {
        with_consts(|cc| Real(self.0.ln(working_bits(), RM, cc)))
    }

    pub fn sin(&self) -> Self {
        with_consts(|cc| Real(self.0.sin(working_bits(), RM, cc)))
    }

    pub fn cos(&self) -> Self {
        with_consts(|cc| Real(self.0.cos(working_bits(), RM, cc)))
    }

    pub fn sinh(&self) -> Self {
        with_consts(|cc| Real(self.0.sinh(working_bits(), RM, cc)))
    }

    pub fn cosh(&self) -> Self {
        with_consts(|cc| Real(self.0.cosh(working_bits(), RM, cc)))
    }

    pub fn atan(&self) -> Self {
        with_consts(|cc| Real(self.0.atan(working_bits(), RM, cc)))
    }

    /// Four-quadrant arctangent of `y / x`, in `(-π, π]`.
    pub fn atan2(y: &Real, x: &Real) -> Real {
        if x.is_zero() {
            let half_pi = Real::pi() / Real::from_i64(2);
            return if y.is_negative() { -half_pi } else if y.is_zero() { Real::zero() } else { half_pi };
        }
        let base = (y / x).atan();
        if !x.is_negative() {
            base
        } else if y.is_negative() {
            base - Real::pi()
        } else {
            base + Real::pi()
        }
    }

    pub fn powi(&self, n: usize) -> Self {
        Real(self.0.powi(n, working_bits(), RM))
    }

    pub fn max(a: &Real, b: &Real) -> Real {
        if a >= b { a.clone() } else { b.clone() }
    }

    /// Nearest integer, rounding half to even.
    pub fn round_to_bigint(&self) -> BigInt {
        let r = self.0.round(0, RM);
        if r.is_zero() {
            return BigInt::zero();
        }
        let (words, _bits, sign, e, _) = r.as_raw_parts().expect("finite value");
        let p = (words.len() * Word::BITS as usize) as i64;
        let mut m = BigInt::from_slice(
            Sign::Plus,
            &words.iter().flat_map(|w| [(*w as u64) as u32, ((*w as u64) >> 32) as u32]).collect::<Vec<u32>>(),
        );
        let shift = e as i64 - p;
        if shift >= 0 {
            m <<= shift as usize;
        } else {
            m >>= (-shift) as usize;
        }
        if sign == FSign::Neg { -m } else { m }
    }

    /// Nearest `f64` (precision loss intended; used for tolerances and
    /// diagnostics only).
    pub fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf() {
            return if self.0.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        if self.0.is_zero() {
            return 0.0;
        }
        let (words, _bits, sign, e, _) = self.0.as_raw_parts().expect("finite value");
        let top = *words.last().expect("nonempty mantissa") as u64;
        let mut x = top as f64 / 18446744073709551616.0;
        let mut e = e as i64;
        while e > 0 {
            let step = e.min(60);
            x *= (1u64 << step) as f64;
            e -= step;
        }
        while e < 0 {
            let step = (-e).min(60);
            x /= (1u64 << step) as f64;
            e += step;
        }
        if sign == FSign::Neg { -x } else { x }
    }

    /// Decimal scientific notation with `digits` significant digits,
    /// e.g. `-1.2500000000e-3`.
    pub fn to_decimal(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return alloc::format!("0.{}e0", "0".repeat(digits - 1));
        }
        if !self.is_finite() {
            return String::from("NaN");
        }
        let approx = self.abs().to_f64();
        let mut exp10 = if approx > 0.0 && approx.is_finite() { log10_floor(approx) } else { 0 };
        let ten = Real::from_i64(10);
        let mut mantissa;
        loop {
            let shift = digits as i64 - 1 - exp10;
            let scaled = if shift >= 0 {
                self.abs() * ten.powi(shift as usize)
            } else {
                self.abs() / ten.powi((-shift) as usize)
            };
            mantissa = scaled.round_to_bigint();
            let upper = num_traits::pow(BigInt::from(10u32), digits);
            let lower = num_traits::pow(BigInt::from(10u32), digits - 1);
            if mantissa >= upper {
                exp10 += 1;
            } else if mantissa < lower {
                exp10 -= 1;
            } else {
                break;
            }
        }
        let text = mantissa.to_string();
        let sign = if self.is_negative() { "-" } else { "" };
        let (head, tail) = text.split_at(1);
        if tail.is_empty() {
            alloc::format!("{sign}{head}e{exp10}")
        } else {
            alloc::format!("{sign}{head}.{tail}e{exp10}")
        }
    }

    /// Parses a decimal string (as produced by [`Real::to_decimal`]).
    pub fn parse(s: &str) -> Option<Real> {
        let v = with_consts(|cc| BigFloat::parse(s, astro_float::Radix::Dec, working_bits(), RM, cc));
        if v.is_nan() { None } else { Some(Real(v)) }
    }
}

fn log10_floor(x: f64) -> i64 {
    let mut e = 0i64;
    let mut y = x;
    while y >= 10.0 {
        y /= 10.0;
        e += 1;
    }
    while y < 1.0 {
        y *= 10.0;
        e -= 1;
    }
    e
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(precision_digits()))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

macro_rules! real_binop {
    ($tr:ident, $method:ident, $op:ident, $atr:ident, $amethod:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real(self.0.$op(&rhs.0, working_bits(), RM))
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
        impl $atr<&Real> for Real {
            fn $amethod(&mut self, rhs: &Real) {
                *self = (&*self).$method(rhs);
            }
        }
        impl $atr<Real> for Real {
            fn $amethod(&mut self, rhs: Real) {
                *self = (&*self).$method(&rhs);
            }
        }
    };
}

real_binop!(Add, add, add, AddAssign, add_assign);
real_binop!(Sub, sub, sub, SubAssign, sub_assign);
real_binop!(Mul, mul, mul, MulAssign, mul_assign);

impl Div<&Real> for &Real {
    type Output = Real;
    fn div(self, rhs: &Real) -> Real {
        Real(self.0.div(&rhs.0, working_bits(), RM))
    }
}
impl Div<Real> for Real {
    type Output = Real;
    fn div(self, rhs: Real) -> Real {
        &self / &rhs
    }
}
impl Div<&Real> for Real {
    type Output = Real;
    fn div(self, rhs: &Real) -> Real {
        &self / rhs
    }
}
impl Div<Real> for &Real {
    type Output = Real;
    fn div(self, rhs: Real) -> Real {
        self / &rhs
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(self.0.neg())
    }
}
impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(self.0.clone().neg())
    }
}

impl From<&Rational> for Real {
    fn from(r: &Rational) -> Self {
        Real::from_rational(r)
    }
}
