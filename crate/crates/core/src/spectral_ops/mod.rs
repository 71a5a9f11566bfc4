//! Periodic spectral toolbox.
//!
//! Fields live on a uniform periodic grid and are stored by their Fourier
//! coefficients in FFT order, normalized so that
//! `f(x_m) = Σ_j c_j e^{i ξ_j x_m}`. The Nyquist coefficient is treated as a
//! cosine mode so that real operators keep real fields real.

mod bilinear;
mod field;
mod lp;
mod norms;

pub use bilinear::{bilinear_multiplier, bilinear_multiplier_sym};
pub use field::SpectralField;
pub use lp::{lp_block, lp_blocks, min_envelope, FrequencyEnvelope, LpBand, LpDecomposition};
pub use norms::{sobolev_norm_h, sobolev_weight, NormSpace};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Uniform periodic grid on `[0, period)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    period: f64,
}

impl Grid {
    pub fn new(n: usize, period: f64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidInput(format!("grid size {n} must be even and >= 4")));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidInput(format!("period {period} must be positive")));
        }
        Ok(Self { n, period })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Fundamental wavenumber 2π/L.
    pub fn k0(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Signed integer mode of FFT slot `j`, in `[−n/2, n/2)`.
    pub fn mode(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Wavenumber ξ_j of FFT slot `j`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        self.k0() * self.mode(j) as f64
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.wavenumber(j)).collect()
    }

    /// FFT slot holding signed mode `m`, if representable.
    pub fn slot(&self, m: i64) -> Option<usize> {
        let n = self.n as i64;
        if m >= -n / 2 && m < n / 2 {
            Some(m.rem_euclid(n) as usize)
        } else {
            None
        }
    }

    pub fn nyquist_slot(&self) -> usize {
        self.n / 2
    }

    pub fn nodes(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.n).map(|m| m as f64 * dx).collect()
    }

    /// Largest resolved wavenumber πn/L.
    pub fn xi_max(&self) -> f64 {
        PI * self.n as f64 / self.period
    }

    /// Largest mode index kept by 2/3 dealiasing: the largest k with 3k < n,
    /// so products of two dealiased fields never alias back into the band.
    pub fn dealias_cutoff(&self) -> i64 {
        ((self.n - 1) / 3) as i64
    }
}

/// Fluid depth: finite `h > 0` or the infinite-depth limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Depth {
    Finite(f64),
    Infinite,
}

impl Depth {
    pub fn finite(h: f64) -> Result<Self> {
        if h.is_finite() && h > 0.0 {
            Ok(Depth::Finite(h))
        } else {
            Err(Error::InvalidInput(format!("depth {h} must be positive")))
        }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            Depth::Finite(h) => Some(h),
            Depth::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Depth::Infinite)
    }

    /// Depth moved by `dh`; the infinite depth is unaffected.
    pub fn shifted(&self, dh: f64) -> Depth {
        match *self {
            Depth::Finite(h) => Depth::Finite(h + dh),
            Depth::Infinite => Depth::Infinite,
        }
    }

    /// tanh(hξ), or sgn(ξ) at infinite depth.
    pub fn tanh(&self, xi: f64) -> f64 {
        match *self {
            Depth::Finite(h) => (h * xi).tanh(),
            Depth::Infinite => {
                if xi > 0.0 {
                    1.0
                } else if xi < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// ξ·tanh(hξ), the flat Dirichlet-to-Neumann symbol.
    pub fn dtn_symbol(&self, xi: f64) -> f64 {
        xi * self.tanh(xi)
    }

    /// Linear gravity-wave frequency √(g ξ tanh(hξ)).
    pub fn omega(&self, g: f64, xi: f64) -> f64 {
        (g * self.dtn_symbol(xi)).sqrt()
    }

    /// Group velocity dω/dξ for ξ ≥ 0.
    pub fn group_velocity(&self, g: f64, xi: f64) -> f64 {
        let xi = xi.abs();
        match *self {
            Depth::Finite(h) => {
                if xi * h < 1e-8 {
                    return (g * h).sqrt();
                }
                let t = (h * xi).tanh();
                let sech2 = 1.0 - t * t;
                g * (t + h * xi * sech2) / (2.0 * self.omega(g, xi))
            }
            Depth::Infinite => {
                if xi == 0.0 {
                    f64::INFINITY
                } else {
                    0.5 * (g / xi).sqrt()
                }
            }
        }
    }
}

impl std::fmt::Display for Depth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Depth::Finite(h) => write!(f, "{h}"),
            Depth::Infinite => write!(f, "inf"),
        }
    }
}

/// Applies `symbol(ξ)` mode by mode.
///
/// At the Nyquist slot the symbol is replaced by the real part of
/// ½(s(ξ_N) + conj s(−ξ_N)) so that real-operator symbols preserve realness.
pub fn apply_multiplier<S>(f: &SpectralField, symbol: S) -> Result<SpectralField>
where
    S: Fn(f64) -> Complex64,
{
    let grid = f.grid();
    let n = grid.n();
    let mut out = Vec::with_capacity(n);
    let mut hermitian = true;
    for (j, c) in f.coeffs().iter().enumerate() {
        let xi = grid.wavenumber(j);
        let s = if j == grid.nyquist_slot() {
            let a = symbol(xi);
            let b = symbol(-xi);
            Complex64::new(0.5 * (a.re + b.re), 0.0)
        } else {
            symbol(xi)
        };
        if !(s.re.is_finite() && s.im.is_finite()) {
            return Err(Error::SingularSymbol { xi });
        }
        if f.is_real() && j != 0 && j != grid.nyquist_slot() {
            let m = symbol(-xi);
            if (m - s.conj()).norm() > 1e-14 * (1.0 + s.norm()) {
                hermitian = false;
            }
        } else if f.is_real() && j == 0 && s.im.abs() > 1e-14 * (1.0 + s.norm()) && c.norm() > 0.0 {
            hermitian = false;
        }
        out.push(c * s);
    }
    Ok(SpectralField::from_coeffs(grid, out, f.is_real() && hermitian))
}

/// Real-symbol variant used internally where the symbol is known finite.
pub(crate) fn apply_real_symbol<S>(f: &SpectralField, symbol: S) -> SpectralField
where
    S: Fn(f64) -> f64,
{
    let grid = f.grid();
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| c * symbol(grid.wavenumber(j)))
        .collect();
    SpectralField::from_coeffs(grid, coeffs, f.is_real())
}

/// Odd imaginary symbol `i·s(ξ)` with `s` odd; Nyquist mode dropped.
pub(crate) fn apply_odd_imag_symbol<S>(f: &SpectralField, symbol: S) -> SpectralField
where
    S: Fn(f64) -> f64,
{
    let grid = f.grid();
    let nyq = grid.nyquist_slot();
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| {
            if j == nyq {
                Complex64::new(0.0, 0.0)
            } else {
                c * Complex64::new(0.0, symbol(grid.wavenumber(j)))
            }
        })
        .collect();
    SpectralField::from_coeffs(grid, coeffs, f.is_real())
}

/// ∂_α.
pub fn derivative(f: &SpectralField) -> SpectralField {
    apply_odd_imag_symbol(f, |xi| xi)
}

/// Tilbert transform 𝒯_h = −i tanh(hD); the Hilbert transform at infinite depth.
pub fn tilbert(f: &SpectralField, h: Depth) -> SpectralField {
    apply_odd_imag_symbol(f, |xi| -h.tanh(xi))
}

/// Relative size below which a mean is treated as roundoff.
pub const MEAN_TOLERANCE: f64 = 1e-10;

fn check_mean_zero(f: &SpectralField) -> Result<()> {
    let mean = f.coeffs()[0];
    let scale = f.l2_norm() / f.grid().period().sqrt();
    if mean.norm() > MEAN_TOLERANCE * scale.max(f64::MIN_POSITIVE) && mean.norm() > 1e-300 {
        return Err(Error::MeanMode { mean: mean.norm() });
    }
    Ok(())
}

/// Inverse Tilbert transform, symbol i·coth(hξ) on nonzero modes.
///
/// The input must be mean-zero (up to roundoff, which is discarded); the
/// output is mean-zero.
pub fn tilbert_inv(f: &SpectralField, h: Depth) -> Result<SpectralField> {
    check_mean_zero(f)?;
    Ok(tilbert_inv_unchecked(f, h))
}

/// [`tilbert_inv`] without the mean check; the mean is simply dropped.
pub fn tilbert_inv_unchecked(f: &SpectralField, h: Depth) -> SpectralField {
    apply_odd_imag_symbol(f, |xi| if xi == 0.0 { 0.0 } else { 1.0 / h.tanh(xi) })
}

/// Holomorphic projection
/// `P_h u = ½[(1 − i𝒯_h) Re u + i(1 + i𝒯_h^{-1}) Im u]` on nonzero modes.
///
/// The real mean of `u` passes through unchanged, which makes the operator
/// idempotent on the periodic grid.
pub fn holomorphic_project(u: &SpectralField, h: Depth) -> Result<SpectralField> {
    let re = u.re();
    let im = u.im();
    check_mean_zero(&im)?;
    Ok(project_parts(&re, &im, h))
}

pub(crate) fn project_parts(re: &SpectralField, im: &SpectralField, h: Depth) -> SpectralField {
    // Real part ½(U − 𝒯^{-1}V), imaginary part ½(V − 𝒯U). Real constants
    // are holomorphic and real on the bottom, so the mean of U is kept whole.
    let t_re = tilbert(re, h);
    let ti_im = tilbert_inv_unchecked(im, h);
    let mean = re.coeffs()[0].re;
    let real = re.sub(&ti_im).scale(0.5).add_constant(0.5 * mean);
    let imag = im.without_mean().sub(&t_re).scale(0.5);
    SpectralField::complex_from_parts(&real, &imag)
}

/// Holomorphic trace with real part `u`: `u − i𝒯_h u`.
pub fn holomorphic_from_real(u: &SpectralField, h: Depth) -> SpectralField {
    let v = tilbert(u, h).scale(-1.0);
    SpectralField::complex_from_parts(u, &v)
}

/// Sup norm of `Im w + 𝒯_h Re w`; zero for holomorphic traces.
pub fn holomorphy_residual(w: &SpectralField, h: Depth) -> f64 {
    let re = w.re();
    let im = w.im().without_mean();
    im.add(&tilbert(&re, h)).sup_norm()
}

/// Zeroes modes with |ξ| ≥ (2/3)ξ_max.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let grid = f.grid();
    let cut = grid.dealias_cutoff();
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| if grid.mode(j).abs() > cut { Complex64::new(0.0, 0.0) } else { *c })
        .collect();
    SpectralField::from_coeffs(grid, coeffs, f.is_real())
}

/// Exponential filter exp(−36 (|k|/k_c)^order) with k_c the dealias cutoff.
pub fn exp_filter(f: &SpectralField, order: f64) -> SpectralField {
    let grid = f.grid();
    let kc = grid.dealias_cutoff() as f64;
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let r = grid.mode(j).abs() as f64 / kc;
            c * (-36.0 * r.powf(order)).exp()
        })
        .collect();
    SpectralField::from_coeffs(grid, coeffs, f.is_real())
}

#[cfg(test)]
mod tests;
