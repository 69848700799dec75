//! `q = exp(iπ/p)` and q-numbers.

use num_traits::{One, Zero};

use super::cx::Cx;
use super::exact::Rational;
use super::real::Real;
use super::ScalarError;

#[derive(Clone, Debug)]
pub struct QValue {
    pub p: Rational,
    pub q: Cx,
}

impl QValue {
    pub fn new(p: &Rational) -> Result<Self, ScalarError> {
        if p.is_zero() || (Rational::one() / p).is_integer() {
            return Err(ScalarError::DegenerateQ);
        }
        let q = Cx::exp_i_pi(&Cx::from_rational(&(Rational::one() / p)));
        Ok(QValue { p: p.clone(), q })
    }

    /// `q^k = exp(iπk/p)` for rational `k`.
    pub fn pow(&self, k: &Rational) -> Cx {
        Cx::exp_i_pi(&Cx::from_rational(&(k / &self.p)))
    }

    /// `q^k` for a complex exponent.
    pub fn pow_cx(&self, k: &Cx) -> Cx {
        let inv_p = Real::from_rational(&(Rational::one() / &self.p));
        Cx::exp_i_pi(&k.scale(&inv_p))
    }
}

/// `[k]_q = (q^k − q^{−k}) / (q − q^{−1})`.
pub fn q_number(k: &Rational, q: &QValue) -> Cx {
    let num = &q.pow(k) - &q.pow(&-k);
    let den = &q.q - &(Cx::one() / &q.q);
    num / den
}

/// `[k]_q` for a complex argument (used with complex weights).
pub fn q_number_cx(k: &Cx, q: &QValue) -> Cx {
    let num = &q.pow_cx(k) - &q.pow_cx(&-k);
    let den = &q.q - &(Cx::one() / &q.q);
    num / den
}
