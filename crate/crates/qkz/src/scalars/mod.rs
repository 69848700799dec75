//! Numeric substrate: exact rationals, working-precision reals and complex
//! numbers, log-Gamma and q-numbers.

pub mod cx;
pub mod exact;
pub mod gamma;
pub mod qnum;
pub mod real;

use core::fmt;

pub use cx::Cx;
pub use exact::{
    as_integer, format_gauss, format_rational, gauss, int, parse_rational, rat, Field, GaussRational,
    ParseError, Rational,
};
pub use gamma::{gamma_ratio, log_gamma};
pub use qnum::{q_number, QValue};
pub use real::{precision_digits, set_precision_digits, ten_pow_neg, working_bits, working_digits, Real};

#[derive(Debug, Clone, PartialEq)]
pub enum ScalarError {
    /// Argument within tolerance of the Gamma pole at `nearest`.
    GammaPole { nearest: i64 },
    NonFinite,
    /// `q = ±1`, i.e. `1/p` is an integer.
    DegenerateQ,
}

impl fmt::Display for ScalarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarError::GammaPole { nearest } => write!(f, "argument too close to the Gamma pole at {nearest}"),
            ScalarError::NonFinite => write!(f, "non-finite argument"),
            ScalarError::DegenerateQ => write!(f, "q = exp(i*pi/p) equals +1 or -1"),
        }
    }
}

impl core::error::Error for ScalarError {}

/// Residual threshold `10^-(P-10)` for numerical identities.
pub fn tau_res() -> f64 {
    ten_pow_neg(precision_digits().saturating_sub(10))
}

/// Rank threshold `10^-(P/2)` for numerical kernels.
pub fn tau_rank() -> f64 {
    ten_pow_neg(precision_digits() / 2)
}
