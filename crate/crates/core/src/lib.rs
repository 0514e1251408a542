//! Levi-form analysis of polynomial domains in C^n and numerical certification
//! of weighted q-pseudoconvexity hypotheses.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod convexity;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod hermitian;
pub mod poly;
pub mod quadrature;
pub mod scaling;
pub mod weights;

pub use error::{Error, Result};
pub use geometry::{DomainSpec, Point, SamplerConfig};
pub use hermitian::{CMatrix, HermitianMatrix, Inertia};
pub use poly::{parse_expr, Monomial, WirtingerPoly};
