//! Exact and high-precision verification engine for the sl(2) rational
//! quantized Knizhnik–Zamolodchikov (qKZ) difference equation.
//!
//! The crate is `no_std` (with `alloc`). Exact algebra is generic over
//! [`scalars::Field`]; numeric work runs at a global decimal precision set
//! by [`scalars::set_precision_digits`].

#![no_std]

extern crate alloc;

pub mod blocks;
pub mod error;
pub mod hyperint;
pub mod linalg;
pub mod params;
pub mod rmatrix_qkz;
pub mod scalars;
pub mod sl2rep;
pub mod uqsl2;
pub mod weightfn;
pub mod yangian;

pub use error::{Error, Result};
