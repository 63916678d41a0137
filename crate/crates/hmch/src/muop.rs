//! The fourth-order operator `A = mean - d^2/dx^2 + d^4/dx^4` on the circle,
//! its exact Fourier-multiplier inverse, and its Green's function.
//!
//! The multiplier is `lambda(k) = delta_0(k) + (2 pi k)^2 + (2 pi k)^4`,
//! strictly positive for every mode, so the operator is invertible on the
//! whole space. The Green's function has the closed form
//! `g(x) = (x - [x] - 1/2)^2 / 2 - cosh(x - [x] - 1/2) / (2 sinh(1/2)) + 47/24`
//! and the cosine series `g(x) = 1 + 2 sum_k cos(2 pi k x) / ((2 pi k)^2 + (2 pi k)^4)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::PeriodicField;

/// `lambda(k) = delta_0(k) + (2 pi k)^2 + (2 pi k)^4`.
#[inline]
pub fn multiplier(k: i64) -> f64 {
    if k == 0 {
        1.0
    } else {
        let w = 2.0 * PI * k as f64;
        let w2 = w * w;
        w2 + w2 * w2
    }
}

/// Apply `A`: `m(k) = lambda(k) u(k)`, i.e. `mean(u) - u_xx + u_xxxx`.
pub fn a_mu_apply(u: &PeriodicField) -> Result<PeriodicField> {
    let spec = u.to_spectrum()?;
    spec.multiplied(|k| num_complex::Complex64::new(multiplier(k), 0.0))
        .to_field()
}

/// Apply `A^{-1} d^j/dx^j` for `j` in `0..=3` as an exact Fourier multiplier.
///
/// Commutes with differentiation: applying `j = 1` equals differentiating
/// the `j = 0` result.
pub fn a_mu_inverse_apply(w: &PeriodicField, j: u32) -> Result<PeriodicField> {
    if j > 3 {
        return Err(Error::InverseDerivativeOrder(j));
    }
    let spec = w.to_spectrum()?.derivative(j)?;
    spec.multiplied(|k| num_complex::Complex64::new(1.0 / multiplier(k), 0.0))
        .to_field()
}

/// Green's function of `(mean - d^2/dx^2)^{-1}`: `g_mu(x) = (x-1/2)^2/2 + 23/24`
/// on `[0, 1)`.
pub fn green_mu_part(x: f64) -> f64 {
    let r = x - x.floor();
    0.5 * (r - 0.5).powi(2) + 23.0 / 24.0
}

/// Green's function of `(1 - d^2/dx^2)^{-1}`: `g_1(x) = cosh(x-1/2) / (2 sinh(1/2))`
/// on `[0, 1)`.
pub fn green_helmholtz_part(x: f64) -> f64 {
    let r = x - x.floor();
    (r - 0.5).cosh() / (2.0 * 0.5f64.sinh())
}

/// Closed-form Green's function of `A`, extended 1-periodically via `x - floor(x)`.
pub fn green_closed(x: f64) -> f64 {
    let r = x - x.floor();
    let y = r - 0.5;
    0.5 * y * y - y.cosh() / (2.0 * 0.5f64.sinh()) + 47.0 / 24.0
}

/// Partial cosine series for the Green's function through mode `k_terms`.
///
/// The absolute tail error is bounded by `2 sum_{k>K} (2 pi k)^{-2} <= 1/(pi^2 K)`.
pub fn green_series(x: f64, k_terms: u64) -> f64 {
    assert!(k_terms >= 1, "series needs at least one term");
    let mut sum = 1.0;
    for k in 1..=k_terms {
        sum += 2.0 * (2.0 * PI * k as f64 * x).cos() / multiplier(k as i64);
    }
    sum
}

/// Crude tail bound for [`green_series`]: `1 / (pi^2 K)`.
pub fn green_series_tail_bound(k_terms: u64) -> f64 {
    1.0 / (PI * PI * k_terms as f64)
}

/// Partial series evaluated at every grid point `x_i = i/n` at once.
///
/// `cos(2 pi k i / n)` only depends on `k i mod n`, so terms are first
/// aggregated by residue class; the result is the same partial sum as
/// calling [`green_series`] per point, at `O(K + n^2)` cost instead of
/// `O(K n)`.
pub fn green_series_grid(n: usize, k_terms: u64) -> Vec<f64> {
    assert!(n >= 1 && k_terms >= 1);
    let mut by_residue = vec![0.0f64; n];
    for k in 1..=k_terms {
        by_residue[(k % n as u64) as usize] += 2.0 / multiplier(k as i64);
    }
    (0..n)
        .map(|i| {
            let mut sum = 1.0;
            for (r, &w) in by_residue.iter().enumerate() {
                if w != 0.0 {
                    sum += w * (2.0 * PI * (i * r % n) as f64 / n as f64).cos();
                }
            }
            sum
        })
        .collect()
}

/// Circular quadrature of `(g * w)(x)` with the closed-form kernel.
///
/// Independent oracle for `a_mu_inverse_apply(w, 0)`; the uniform sum
/// converges at the rate set by the jump in the kernel's third derivative.
pub fn green_convolve(w: &PeriodicField) -> Result<PeriodicField> {
    if !w.is_finite() {
        return Err(Error::NonFiniteSamples);
    }
    let n = w.len();
    let kernel: Vec<f64> = (0..n).map(|m| green_closed(m as f64 / n as f64)).collect();
    let samples = w.samples();
    let inv_n = 1.0 / n as f64;
    let out: Vec<f64> = (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for (j, &wj) in samples.iter().enumerate() {
                // kernel index (i - j) mod n
                let m = if i >= j { i - j } else { i + n - j };
                acc += kernel[m] * wj;
            }
            acc * inv_n
        })
        .collect();
    Ok(PeriodicField::from_raw(out))
}
