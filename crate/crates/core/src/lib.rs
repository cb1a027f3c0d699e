//! Gaussian security analysis for thermal-state continuous-variable QKD access networks.
//!
//! All covariance matrices use shot-noise units (vacuum quadrature variance 1) and
//! interleaved quadrature ordering `x1, p1, x2, p2, ...`.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod gaussian;
pub mod network;
pub mod numeric;
pub mod pm;
pub mod skr;

pub use error::{Error, Result};
pub use numeric::NumericPolicy;
