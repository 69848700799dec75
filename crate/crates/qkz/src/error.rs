use alloc::string::String;
use core::fmt;

use crate::scalars::{ParseError, ScalarError};

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    Scalar(ScalarError),
    Parse(ParseError),
    /// A linear system expected to have a unique solution does not.
    NonUnique { context: String, nullity: usize },
    /// A linear system has no solution at all.
    Inconsistent { context: String },
    SubmoduleNotPreserved { level: usize },
    /// A singular value lies within two orders of magnitude of the rank
    /// threshold.
    RankAmbiguity { ratio: f64, threshold: f64 },
    ResidualTooLarge { context: String, residual: f64, bound: f64 },
    PoleProximity { context: String, distance: f64 },
    LaddersNotSeparable { first: usize, second: usize, detail: String },
    NonConvergence { context: String },
    UnsupportedScale { context: String },
    Precondition(String),
    DimensionMismatch { expected: usize, found: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Scalar(e) => write!(f, "{e}"),
            Error::Parse(e) => write!(f, "{e}"),
            Error::NonUnique { context, nullity } => {
                write!(f, "{context}: solution not unique (nullity {nullity})")
            }
            Error::Inconsistent { context } => write!(f, "{context}: inconsistent linear system"),
            Error::SubmoduleNotPreserved { level } => {
                write!(f, "R-matrix does not preserve the singular submodule at level {level}")
            }
            Error::RankAmbiguity { ratio, threshold } => write!(
                f,
                "numerical rank ambiguous: singular value ratio {ratio:e} too close to threshold {threshold:e}"
            ),
            Error::ResidualTooLarge { context, residual, bound } => {
                write!(f, "{context}: residual {residual:e} exceeds {bound:e}")
            }
            Error::PoleProximity { context, distance } => {
                write!(f, "{context}: within {distance:e} of a pole")
            }
            Error::LaddersNotSeparable { first, second, detail } => {
                write!(f, "pole ladders of factors {first} and {second} cannot be separated: {detail}")
            }
            Error::NonConvergence { context } => write!(f, "{context}: quadrature did not converge"),
            Error::UnsupportedScale { context } => write!(f, "unsupported problem size: {context}"),
            Error::Precondition(s) => write!(f, "precondition violated: {s}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
        }
    }
}

impl From<ScalarError> for Error {
    fn from(e: ScalarError) -> Self {
        Error::Scalar(e)
    }
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}

pub type Result<T> = core::result::Result<T, Error>;

impl core::error::Error for Error {}
