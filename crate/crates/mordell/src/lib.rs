//! Exact arithmetic and height machinery for Mordell curves `y² = x³ + d` over ℚ.
//!
//! The crate is organized bottom-up:
//!
//! - [`rational`]: parsing and small helpers on exact rationals.
//! - [`poly`] / [`ratfunc`]: dense polynomials and reduced rational functions
//!   over ℚ — enough to verify parametric curve identities as exact zeros.
//! - [`curve`]: the chord–tangent group law with exact rational coordinates.
//! - [`family`]: a three-stage parametric family of Mordell curves carrying
//!   three rational points, verified symbolically and specialized at rational
//!   parameter values.
//! - [`factor`] / [`bigfloat`]: integer factorization and arbitrary-precision
//!   reals backing the height computations.
//! - [`heights`]: canonical (Néron–Tate) heights as sums of local heights on
//!   an integral model, plus the height pairing.
//! - [`gram`]: Gram matrices of height pairings, regulators, and eigenvalue
//!   based independence certification.
//! - [`search`]: rational point search and rank lower-bound certificates.

pub mod bigfloat;
pub mod curve;
mod error;
pub mod factor;
pub mod family;
pub mod gram;
pub mod heights;
mod padic;
pub mod poly;
pub mod ratfunc;
pub mod rational;
pub mod search;

pub use error::{Error, Result};
