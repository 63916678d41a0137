//! Pseudospectral laboratory for a fourth-order shallow-water model on the
//! unit circle.
//!
//! The library is organized bottom-up:
//!
//! - [`field`]: periodic grid fields, spectra, derivatives, norms, dealiasing;
//! - [`muop`]: the operator `mean - d^2 + d^4`, its inverse, and its Green's
//!   function in closed, series, and quadrature form;
//! - [`mollifier`]: Friedrichs smoothing used by the approximation lemmas;
//! - [`dynamics`]: right-hand sides (convective, transport, viscous) and the
//!   RK4 / integrating-factor RK4 steppers with conserved-quantity tracking;
//! - [`peakon`]: the exact peaked traveling wave and its error functional;
//! - [`approx`]: high-frequency approximate solutions and residual decay fits;
//! - [`nonuniform`]: the two-wave separation experiment quantifying
//!   non-uniform dependence on initial data.

// `!(x > 0)` style checks are used throughout so that NaN inputs are rejected
// along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod mollifier;
pub mod muop;
pub mod nonuniform;
pub mod peakon;

pub use error::{Error, Result};
pub use field::{PeriodicField, Spectrum};
