//! Numerical laboratory for sharp martingale inequalities.
//!
//! The crate is split the same way the mathematics is:
//!
//! * [`specfun`]: Kummer series, parabolic cylinder functions, their zeros,
//!   the weak-type auxiliary function `γ` and its inverse, `I₀`.
//! * [`constants`]: closed forms and quadratures for the named constants.
//! * [`burkholder`]: the special functions behind each inequality and
//!   scanners for their majorization and smoothness properties.
//! * [`martsim`]: Monte Carlo for stochastic integrals, the Feynman–Kac
//!   transform and the extremal constructions.
//! * [`spectral`]: Fourier-multiplier Riesz transforms on the circle and torus,
//!   spherical-harmonic transforms on S², and the Ornstein–Uhlenbeck
//!   transform in one dimension.

// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod burkholder;
pub mod constants;
mod error;
pub mod lowdisc;
pub mod martsim;
pub mod quad;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
