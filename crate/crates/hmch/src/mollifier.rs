//! Friedrichs mollification on the circle.
//!
//! The bump `j(x) = C exp(-1/(1 - 4x^2))` is supported on `(-1/2, 1/2)` with
//! `C` chosen so the integral is one; the scaled family is
//! `j_eps(x) = j(x/eps) / eps`. On the grid the sampled kernel is renormalized
//! to have discrete mean exactly one, which makes mean preservation and the
//! `L^p` contraction hold exactly in the discrete setting, not just up to
//! quadrature error.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::field::PeriodicField;

/// Unnormalized bump `exp(-1/(1 - 4x^2))` on `(-1/2, 1/2)`, zero outside.
fn bump_raw(x: f64) -> f64 {
    let q = 1.0 - 4.0 * x * x;
    if q <= 0.0 {
        0.0
    } else {
        (-1.0 / q).exp()
    }
}

/// Normalization constant `C = 1 / integral of exp(-1/(1-4x^2))`.
///
/// The integrand is smooth and flat at the endpoints, so the midpoint rule
/// converges faster than any power of the step; a single high-resolution
/// pass is cached for the process lifetime.
pub fn normalization_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let m = 400_000usize;
        let h = 1.0 / m as f64;
        let integral: f64 = (0..m)
            .map(|i| bump_raw(-0.5 + (i as f64 + 0.5) * h) * h)
            .sum();
        1.0 / integral
    })
}

/// The normalized bump `j(x)`.
pub fn bump(x: f64) -> f64 {
    normalization_constant() * bump_raw(x)
}

/// Scaled mollifier `j_eps(x) = j(x/eps) / eps`, as a function of the signed
/// periodic offset nearest zero.
pub fn bump_scaled(x: f64, eps: f64) -> f64 {
    bump(x / eps) / eps
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidMollifierWidth(eps));
    }
    Ok(())
}

/// Sampled kernel on an `n`-point grid, renormalized to discrete mean one.
///
/// Grid point `i` carries the signed offset `i/n` wrapped to `[-1/2, 1/2)`.
pub fn kernel(n: usize, eps: f64) -> Result<PeriodicField> {
    check_eps(eps)?;
    let raw = PeriodicField::from_fn(n, |x| {
        let r = if x >= 0.5 { x - 1.0 } else { x };
        bump_scaled(r, eps)
    })?;
    let mean = raw.mean();
    if !(mean > 0.0) {
        // kernel narrower than the grid spacing: every sample landed at zero
        return Err(Error::InvalidMollifierWidth(eps));
    }
    Ok(raw.scaled(1.0 / mean))
}

/// Mollified field `j_eps * f`, computed as a spectral coefficient product.
///
/// With mean-normalized coefficients, the circular quadrature convolution
/// corresponds exactly to multiplying the two spectra mode by mode.
pub fn mollify(f: &PeriodicField, eps: f64) -> Result<PeriodicField> {
    let k = kernel(f.len(), eps)?.to_spectrum()?;
    let fs = f.to_spectrum()?;
    let coeffs: Vec<_> = k
        .coeffs_fft_order()
        .iter()
        .zip(fs.coeffs_fft_order())
        .map(|(a, b)| a * b)
        .collect();
    crate::field::Spectrum::from_coeffs_fft_order(coeffs)?.to_field()
}
