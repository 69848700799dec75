//! Complex numbers at the global working precision.

use alloc::string::String;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use super::exact::{GaussRational, Rational};
use super::real::Real;

#[derive(Clone, PartialEq)]
pub struct Cx {
    pub re: Real,
    pub im: Real,
}

impl Cx {
    pub fn new(re: Real, im: Real) -> Self {
        Cx { re, im }
    }

    pub fn from_real(re: Real) -> Self {
        Cx { re, im: Real::zero() }
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        Cx::new(Real::from_f64(re), Real::from_f64(im))
    }

    pub fn from_i64(n: i64) -> Self {
        Cx::from_real(Real::from_i64(n))
    }

    pub fn from_rational(r: &Rational) -> Self {
        Cx::from_real(Real::from_rational(r))
    }

    pub fn from_gauss(z: &GaussRational) -> Self {
        Cx::new(Real::from_rational(&z.re), Real::from_rational(&z.im))
    }

    pub fn zero() -> Self {
        Cx::from_real(Real::zero())
    }

    pub fn one() -> Self {
        Cx::from_real(Real::one())
    }

    pub fn i() -> Self {
        Cx::new(Real::zero(), Real::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Cx {
        Cx::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> Real {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn abs_f64(&self) -> f64 {
        let (a, b) = (self.re.to_f64(), self.im.to_f64());
        if a.is_finite() && b.is_finite() && (a != 0.0 || b != 0.0) {
            let m = a.abs().max(b.abs());
            let (x, y) = (a / m, b / m);
            return m * libm::sqrt(x * x + y * y);
        }
        self.abs().to_f64()
    }

    pub fn scale(&self, k: &Real) -> Cx {
        Cx::new(&self.re * k, &self.im * k)
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Cx {
        Cx::new(-&self.im, self.re.clone())
    }

    pub fn exp(&self) -> Cx {
        let m = self.re.exp();
        if self.im.is_zero() {
            return Cx::from_real(m);
        }
        Cx::new(&m * self.im.cos(), &m * self.im.sin())
    }

    /// Principal logarithm, imaginary part in `(-π, π]`.
    pub fn ln(&self) -> Cx {
        let modulus = self.norm_sqr().ln() / Real::from_i64(2);
        Cx::new(modulus, Real::atan2(&self.im, &self.re))
    }

    pub fn arg(&self) -> Real {
        Real::atan2(&self.im, &self.re)
    }

    pub fn sin(&self) -> Cx {
        if self.im.is_zero() {
            return Cx::from_real(self.re.sin());
        }
        Cx::new(self.re.sin() * self.im.cosh(), self.re.cos() * self.im.sinh())
    }

    pub fn cos(&self) -> Cx {
        if self.im.is_zero() {
            return Cx::from_real(self.re.cos());
        }
        Cx::new(self.re.cos() * self.im.cosh(), -(self.re.sin() * self.im.sinh()))
    }

    /// `exp(i·π·x)`.
    pub fn exp_i_pi(x: &Cx) -> Cx {
        (x.mul_i().scale(&Real::pi())).exp()
    }

    pub fn powi(&self, n: i64) -> Cx {
        let mut base = if n < 0 { Cx::one() / self } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Cx::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// `[re, im]` as decimal strings with `digits` significant digits.
    pub fn to_decimal_pair(&self, digits: usize) -> [String; 2] {
        [self.re.to_decimal(digits), self.im.to_decimal(digits)]
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Debug for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}i)", self.re, self.im)
    }
}

impl Add<&Cx> for &Cx {
    type Output = Cx;
    fn add(self, rhs: &Cx) -> Cx {
        Cx::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&Cx> for &Cx {
    type Output = Cx;
    fn sub(self, rhs: &Cx) -> Cx {
        Cx::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&Cx> for &Cx {
    type Output = Cx;
    fn mul(self, rhs: &Cx) -> Cx {
        if self.im.is_zero() {
            return Cx::new(&self.re * &rhs.re, &self.re * &rhs.im);
        }
        if rhs.im.is_zero() {
            return Cx::new(&self.re * &rhs.re, &self.im * &rhs.re);
        }
        Cx::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div<&Cx> for &Cx {
    type Output = Cx;
    fn div(self, rhs: &Cx) -> Cx {
        if rhs.im.is_zero() {
            return Cx::new(&self.re / &rhs.re, &self.im / &rhs.re);
        }
        let d = rhs.norm_sqr();
        let num = self * &rhs.conj();
        Cx::new(&num.re / &d, &num.im / &d)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident, $atr:ident, $amethod:ident) => {
        impl $tr<Cx> for Cx {
            type Output = Cx;
            fn $method(self, rhs: Cx) -> Cx {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Cx> for Cx {
            type Output = Cx;
            fn $method(self, rhs: &Cx) -> Cx {
                (&self).$method(rhs)
            }
        }
        impl $tr<Cx> for &Cx {
            type Output = Cx;
            fn $method(self, rhs: Cx) -> Cx {
                self.$method(&rhs)
            }
        }
        impl $atr<&Cx> for Cx {
            fn $amethod(&mut self, rhs: &Cx) {
                *self = (&*self).$method(rhs);
            }
        }
        impl $atr<Cx> for Cx {
            fn $amethod(&mut self, rhs: Cx) {
                *self = (&*self).$method(&rhs);
            }
        }
    };
}

forward_owned!(Add, add, AddAssign, add_assign);
forward_owned!(Sub, sub, SubAssign, sub_assign);
forward_owned!(Mul, mul, MulAssign, mul_assign);

impl Div<Cx> for Cx {
    type Output = Cx;
    fn div(self, rhs: Cx) -> Cx {
        &self / &rhs
    }
}
impl Div<&Cx> for Cx {
    type Output = Cx;
    fn div(self, rhs: &Cx) -> Cx {
        &self / rhs
    }
}
impl Div<Cx> for &Cx {
    type Output = Cx;
    fn div(self, rhs: Cx) -> Cx {
        self / &rhs
    }
}

impl Neg for Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx::new(-self.re, -self.im)
    }
}
impl Neg for &Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx::new(-&self.re, -&self.im)
    }
}
