//! Principal-branch complex log-Gamma via upward shift and the Stirling
//! series.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::cx::Cx;
use super::exact::Rational;
use super::real::{precision_digits, ten_pow_neg, working_bits, working_digits, Real};
use super::ScalarError;

struct StirlingTable {
    bits: usize,
    /// `B_{2k} / (2k (2k-1))` for k = 1, 2, ...
    coeffs: Vec<Real>,
    half_ln_two_pi: Real,
}

static TABLE: spin::Mutex<Option<Arc<StirlingTable>>> = spin::Mutex::new(None);

/// Bernoulli numbers `B_0 ..= B_m` (with `B_1 = -1/2`).
pub fn bernoulli_numbers(m: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(m + 1);
    b.push(Rational::one());
    for k in 1..=m {
        // sum_{j<k} C(k+1, j) B_j + (k+1) B_k = 0
        let mut acc = Rational::zero();
        let mut binom = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            acc += bj * Rational::from_integer(binom.clone());
            binom = binom * BigInt::from(k + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / Rational::from_integer(BigInt::from(k + 1)));
    }
    b
}

fn shift_radius() -> f64 {
    0.37 * working_digits() as f64 + 3.0
}

fn with_table<R>(f: impl FnOnce(&StirlingTable) -> R) -> R {
    let bits = working_bits();
    let cached = TABLE.lock().as_ref().filter(|t| t.bits == bits).cloned();
    let table = cached.unwrap_or_else(|| {
        let kmax = (3.2 * shift_radius()) as usize + 8;
        let bern = bernoulli_numbers(2 * kmax);
        let coeffs = (1..=kmax)
            .map(|k| {
                let denom = Rational::from_integer(BigInt::from((2 * k) * (2 * k - 1)));
                Real::from_rational(&(&bern[2 * k] / denom))
            })
            .collect();
        let two_pi = Real::pi() * Real::from_i64(2);
        let t = Arc::new(StirlingTable {
            bits,
            coeffs,
            half_ln_two_pi: two_pi.ln() / Real::from_i64(2),
        });
        *TABLE.lock() = Some(t.clone());
        t
    });
    f(&table)
}

fn pole_tolerance() -> f64 {
    ten_pow_neg(precision_digits().saturating_sub(4))
}

/// Principal branch of `log Γ(a)`, analytic on `C` minus `(-∞, 0]`.
///
/// Fails when `a` lies within the pole tolerance of a nonpositive integer.
pub fn log_gamma(a: &Cx) -> Result<Cx, ScalarError> {
    let (x, y) = a.to_f64_pair();
    if !x.is_finite() || !y.is_finite() {
        return Err(ScalarError::NonFinite);
    }
    if x <= 0.5 {
        let m = libm::round(x);
        if m <= 0.0 {
            let dist = libm::hypot(x - m, y);
            if dist < pole_tolerance() * m.abs().max(1.0) {
                return Err(ScalarError::GammaPole { nearest: m as i64 });
            }
        }
    }

    let r = shift_radius();
    let mut shift = 0usize;
    while x + (shift as f64) < 0.0 || libm::hypot(x + shift as f64, y) < r {
        shift += 1;
    }

    // log of the shift product, with the branch fixed by the running sum of
    // principal arguments.
    let mut correction = Cx::zero();
    if shift > 0 {
        let mut prod = Cx::one();
        let mut arg_sum = 0.0f64;
        for k in 0..shift {
            let term = a + &Cx::from_i64(k as i64);
            arg_sum += libm::atan2(y, x + k as f64);
            prod = &prod * &term;
        }
        let mut lp = prod.ln();
        let two_pi = core::f64::consts::PI * 2.0;
        let winding = libm::round((arg_sum - lp.im.to_f64()) / two_pi);
        if winding != 0.0 {
            lp.im = &lp.im + &(Real::pi() * Real::from_i64(2 * winding as i64));
        }
        correction = lp;
    }

    let w = a + &Cx::from_i64(shift as i64);
    let eps = ten_pow_neg(working_digits());
    let stirling = with_table(|table| {
        let half = Real::one() / Real::from_i64(2);
        let ln_w = w.ln();
        let mut s = &(&(&w - &Cx::from_real(half)) * &ln_w) - &w;
        s = &s + &Cx::from_real(table.half_ln_two_pi.clone());
        let inv = Cx::one() / &w;
        let inv_sq = &inv * &inv;
        let mut power = inv;
        let w_abs = w.abs_f64();
        let mut mag = 1.0 / w_abs;
        for c in &table.coeffs {
            let term = power.scale(c);
            s = &s + &term;
            let cf = c.to_f64().abs();
            if cf * mag < eps * 1e-3 {
                break;
            }
            power = &power * &inv_sq;
            mag /= w_abs * w_abs;
        }
        s
    });
    Ok(&stirling - &correction)
}

/// `Γ(a) / Γ(b)` evaluated as `exp(log Γ(a) − log Γ(b))`.
pub fn gamma_ratio(a: &Cx, b: &Cx) -> Result<Cx, ScalarError> {
    Ok((&log_gamma(a)? - &log_gamma(b)?).exp())
}
