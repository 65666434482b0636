//! Bessel functions of matrix argument on the symmetric cones of rank 2 and 3.

// `!(x > 0.0)` is used on purpose so that NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod algebra;
pub mod cone;
pub mod error;
pub mod json;
pub mod linalg;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
