//! Periodic fields on the unit circle and their Fourier representation.
//!
//! A [`PeriodicField`] holds real samples at the uniform grid `x_i = i/N` on
//! `[0, 1)`; a [`Spectrum`] holds the coefficients of the `e^{2*pi*i*k*x}`
//! basis, stored in FFT order. All spectral multipliers use the angular
//! wavenumber `2*pi*k`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub const MIN_GRID: usize = 16;

thread_local! {
    static FFT_CACHE: RefCell<FftCache> = RefCell::new(FftCache {
        planner: FftPlanner::new(),
        forward: HashMap::new(),
        inverse: HashMap::new(),
    });
}

struct FftCache {
    planner: FftPlanner<f64>,
    forward: HashMap<usize, Arc<dyn Fft<f64>>>,
    inverse: HashMap<usize, Arc<dyn Fft<f64>>>,
}

fn fft_forward(buf: &mut [Complex64]) {
    FFT_CACHE.with(|c| {
        let mut c = c.borrow_mut();
        let n = buf.len();
        if !c.forward.contains_key(&n) {
            let plan = c.planner.plan_fft_forward(n);
            c.forward.insert(n, plan);
        }
        c.forward[&n].process(buf);
    });
}

fn fft_inverse(buf: &mut [Complex64]) {
    FFT_CACHE.with(|c| {
        let mut c = c.borrow_mut();
        let n = buf.len();
        if !c.inverse.contains_key(&n) {
            let plan = c.planner.plan_fft_inverse(n);
            c.inverse.insert(n, plan);
        }
        c.inverse[&n].process(buf);
    });
}

fn check_grid(n: usize) -> Result<()> {
    if n < MIN_GRID {
        return Err(Error::GridTooSmall(n));
    }
    if !n.is_multiple_of(2) {
        return Err(Error::OddGridSize(n));
    }
    Ok(())
}

/// Signed wavenumber of FFT-order index `idx` on a grid of `n` points,
/// ranging over `-n/2 ..= n/2 - 1`.
#[inline]
pub fn wavenumber(idx: usize, n: usize) -> i64 {
    if idx < n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

/// `(2*pi*i*k)^j` as a complex multiplier.
#[inline]
fn deriv_multiplier(k: i64, j: u32) -> Complex64 {
    let mag = (2.0 * PI * k as f64).powi(j as i32);
    match j % 4 {
        0 => Complex64::new(mag, 0.0),
        1 => Complex64::new(0.0, mag),
        2 => Complex64::new(-mag, 0.0),
        _ => Complex64::new(0.0, -mag),
    }
}

/// Real-valued 1-periodic function sampled on the uniform grid over `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicField {
    samples: Vec<f64>,
}

impl PeriodicField {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        check_grid(samples.len())?;
        if !samples.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteSamples);
        }
        Ok(Self { samples })
    }

    /// Construct without invariant checks; internal arithmetic only.
    pub(crate) fn from_raw(samples: Vec<f64>) -> Self {
        Self { samples }
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_grid(n)?;
        let samples: Vec<f64> = (0..n).map(|i| f(i as f64 / n as f64)).collect();
        Self::new(samples)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        check_grid(n)?;
        Ok(Self {
            samples: vec![0.0; n],
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Grid abscissa `x_i = i/N`.
    pub fn grid_point(&self, i: usize) -> f64 {
        i as f64 / self.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|v| v.is_finite())
    }

    /// Forward transform to normalized Fourier coefficients.
    pub fn to_spectrum(&self) -> Result<Spectrum> {
        if !self.is_finite() {
            return Err(Error::NonFiniteSamples);
        }
        let n = self.len();
        let mut buf: Vec<Complex64> = self
            .samples
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        fft_forward(&mut buf);
        let scale = 1.0 / n as f64;
        for c in &mut buf {
            *c *= scale;
        }
        // The transform of real samples is Hermitian-symmetric in exact
        // arithmetic; enforce it exactly so that the (purely real or purely
        // imaginary, even or odd) derivative multipliers preserve it with no
        // round-off defect. Without this, the tiny asymmetry of the forward
        // FFT gets amplified by high-order multipliers on large grids.
        buf[0].im = 0.0;
        buf[n / 2].im = 0.0;
        for idx in 1..n / 2 {
            let avg = 0.5 * (buf[idx] + buf[n - idx].conj());
            buf[idx] = avg;
            buf[n - idx] = avg.conj();
        }
        Ok(Spectrum { coeffs: buf })
    }

    /// Spectral derivative of order `j <= 5`. The zero mode is annihilated
    /// exactly for `j >= 1`; the Nyquist mode is zeroed for odd `j`.
    pub fn derivative(&self, j: u32) -> Result<Self> {
        if j > 5 {
            return Err(Error::UnsupportedDerivativeOrder(j));
        }
        if j == 0 {
            return Ok(self.clone());
        }
        let spec = self.to_spectrum()?.derivative(j)?;
        spec.to_field()
    }

    /// Mean over the circle; the uniform Riemann sum is exact here.
    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.len() as f64
    }

    /// `H^s` norm: `sqrt(sum_k (1 + 4 pi^2 k^2)^s |v(k)|^2)` over resolved modes.
    pub fn sobolev_norm(&self, s: f64) -> Result<f64> {
        Ok(self.to_spectrum()?.sobolev_norm(s))
    }

    /// `L^p` norm by uniform quadrature; `p = infinity` returns `max |f|`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_infinite() && p > 0.0 {
            return Ok(self.linf_norm());
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidLpExponent(p));
        }
        let n = self.len() as f64;
        let sum: f64 = self.samples.iter().map(|v| v.abs().powf(p)).sum();
        Ok((sum / n).powf(1.0 / p))
    }

    pub fn l2_norm(&self) -> f64 {
        let n = self.len() as f64;
        (self.samples.iter().map(|v| v * v).sum::<f64>() / n).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Two-thirds-rule projection applied through the spectrum.
    pub fn dealiased(&self) -> Result<Self> {
        self.to_spectrum()?.dealias().to_field()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_raw(self.samples.iter().map(|v| c * v).collect())
    }

    /// Pointwise product on the grid. Panics on grid mismatch.
    pub fn product(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "grid mismatch in product");
        Self::from_raw(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a * b)
                .collect(),
        )
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: f64, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "grid mismatch in add_scaled");
        Self::from_raw(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + c * b)
                .collect(),
        )
    }

    pub fn shifted(&self, offset: f64) -> Self {
        Self::from_raw(self.samples.iter().map(|v| v + offset).collect())
    }
}

impl std::ops::Add for &PeriodicField {
    type Output = PeriodicField;
    fn add(self, rhs: &PeriodicField) -> PeriodicField {
        self.add_scaled(1.0, rhs)
    }
}

impl std::ops::Sub for &PeriodicField {
    type Output = PeriodicField;
    fn sub(self, rhs: &PeriodicField) -> PeriodicField {
        self.add_scaled(-1.0, rhs)
    }
}

/// Complex Fourier coefficients in FFT order (`k = 0, 1, .., N/2-1, -N/2, .., -1`).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn from_coeffs_fft_order(coeffs: Vec<Complex64>) -> Result<Self> {
        check_grid(coeffs.len())?;
        Ok(Self { coeffs })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        check_grid(n)?;
        Ok(Self {
            coeffs: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    pub fn grid_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs_fft_order(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient at signed wavenumber `k` in `-N/2 ..= N/2-1`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let n = self.grid_size() as i64;
        assert!(k >= -n / 2 && k < n / 2, "wavenumber {k} out of range");
        let idx = if k >= 0 { k } else { k + n } as usize;
        self.coeffs[idx]
    }

    pub fn set_coeff(&mut self, k: i64, value: Complex64) {
        let n = self.grid_size() as i64;
        assert!(k >= -n / 2 && k < n / 2, "wavenumber {k} out of range");
        let idx = if k >= 0 { k } else { k + n } as usize;
        self.coeffs[idx] = value;
    }

    /// Apply a wavenumber-indexed complex multiplier.
    pub fn multiplied(&self, f: impl Fn(i64) -> Complex64) -> Self {
        let n = self.grid_size();
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(idx, c)| c * f(wavenumber(idx, n)))
                .collect(),
        }
    }

    pub fn derivative(&self, j: u32) -> Result<Self> {
        if j > 5 {
            return Err(Error::UnsupportedDerivativeOrder(j));
        }
        let n = self.grid_size();
        let nyquist = -(n as i64) / 2;
        Ok(self.multiplied(|k| {
            if j > 0 && (k == 0 || (j % 2 == 1 && k == nyquist)) {
                Complex64::new(0.0, 0.0)
            } else {
                deriv_multiplier(k, j)
            }
        }))
    }

    /// Zero all modes with `|k| > N/3`.
    pub fn dealias(&self) -> Self {
        let n = self.grid_size() as i64;
        self.multiplied(|k| {
            if 3 * k.abs() > n {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
    }

    /// `sum_k |v(k)|^2`; equals the squared grid L2 norm (Parseval).
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let n = self.grid_size();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let k = wavenumber(idx, n) as f64;
                (1.0 + 4.0 * PI * PI * k * k).powf(s) * c.norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid_size();
        let scale = self
            .coeffs
            .iter()
            .fold(0.0f64, |m, c| m.max(c.norm()))
            .max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for idx in 0..n {
            let mirror = (n - idx) % n;
            let d = (self.coeffs[idx] - self.coeffs[mirror].conj()).norm();
            worst = worst.max(d / scale);
        }
        worst
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_defect() <= rel_tol
    }

    /// Inverse transform; rejects spectra that are not Hermitian-symmetric.
    ///
    /// The tolerance admits FFT roundoff amplified by high-order multipliers
    /// (a genuinely one-sided coefficient has defect of order one).
    pub fn to_field(&self) -> Result<PeriodicField> {
        if !self.is_hermitian(1e-8) {
            return Err(Error::NonHermitianSpectrum);
        }
        let mut buf = self.coeffs.clone();
        fft_inverse(&mut buf);
        Ok(PeriodicField::from_raw(buf.iter().map(|c| c.re).collect()))
    }
}
