//! Dense linear algebra: exact (over any [`Field`](crate::scalars::Field))
//! and numeric (over [`Cx`](crate::scalars::Cx)).

mod exact;
mod numeric;

pub use exact::{Matrix, Triplet};
pub use numeric::{numeric_kernel, singular_values, span_residual, vec_norm, CMatrix, Svd};
