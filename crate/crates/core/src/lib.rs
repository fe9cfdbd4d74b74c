//! Scalar curvature of monotone Riemannian metrics on the space of
//! positive definite density matrices.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod conjecture;
pub mod error;
pub mod geometry;
mod kubo_mori;
pub mod mcfun;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
