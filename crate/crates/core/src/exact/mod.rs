//! Exact arithmetic over dyadic Gaussian numbers `(a + bi) / 2^r`.
//!
//! Every gate of the supported gate set has a natural representation with
//! entries in `{0, ±1, ±i, ±1/2}`, so all circuit amplitudes, effect operators
//! and trace powers stay inside this ring and can be computed without rounding.

mod matrix;
mod scalar;

pub use matrix::{ExactMatrix, MAX_SIDE};
pub use scalar::DyadicGaussian;
