//! Symbolic and numerical toolkit for sums-of-squares operators on stratified
//! nilpotent Lie groups.

pub mod error;
pub mod gevrey;
pub mod induction;
pub mod lie;
pub mod linalg;
pub mod pipeline;
pub mod poly;
pub mod presets;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::{Rational, Real};

/// Exact rational polynomial.
pub type RatPoly = poly::MultiPoly<Rational>;
/// Double-precision polynomial.
pub type F64Poly = poly::MultiPoly<f64>;
/// Single-precision polynomial.
pub type F32Poly = poly::MultiPoly<f32>;
