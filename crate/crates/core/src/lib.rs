//! Transfer operators, random Dolgopyat operators, self-conformal measures,
//! Fourier decay and fractal uncertainty norms for conformal iterated function
//! systems on the unit interval.

// Argument checks are written `!(x > 0.0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fourier;
pub mod fup;
pub mod harness;
pub mod ifs;
pub mod interval;
pub mod measures;
pub mod partition;
pub mod transfer;
