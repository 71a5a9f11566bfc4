//! Weights m with m_x ≥ 0 on the periodic cell.
//!
//! On a period of length L the primitive m(x) = ∫_{x₀}^x m_x cannot be
//! periodic; it is taken on the cell [x_s, x_s + L) with the seam x_s
//! opposite the center x₀ and jumps by −M = −∫m_x there. Integrations by
//! parts then pick up the seam term: ∫ m ∂_x A = M·A(x_s) − ∫ m_x A.

use crate::error::{Error, Result};
use crate::quadrature::Rule;
use crate::spectral_ops::{Grid, SpectralField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    /// m_x = (1 + ε²(x − x₀)²)^{−r}.
    Rational { eps: f64, r: f64 },
    /// Raised-cosine m_x of the given width with ∫m_x = 1.
    Bump { width: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    pub kind: WeightKind,
    period: f64,
    center: f64,
    total: f64,
    cell_mean: f64,
}

pub fn make_weight(kind: WeightKind, grid: &Grid, center: f64) -> Result<Weight> {
    let period = grid.period();
    match kind {
        WeightKind::Rational { eps, r } => {
            if r <= 0.5 {
                return Err(Error::NonIntegrableWeight { r });
            }
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(Error::InvalidInput(format!("weight scale eps = {eps} must be positive")));
            }
        }
        WeightKind::Bump { width } => {
            if !(width >= 2.0 * grid.spacing()) || width > period {
                return Err(Error::InvalidInput(format!(
                    "bump width {width} must lie in [2 dx, L] = [{}, {period}]",
                    2.0 * grid.spacing()
                )));
            }
        }
    }
    let mut w = Weight { kind, period, center, total: 0.0, cell_mean: 0.0 };
    w.total = w.primitive(0.5 * period) - w.primitive(-0.5 * period);
    w.cell_mean = w.offset_rule().integrate(|d| w.primitive(d)) / period;
    Ok(w)
}

fn rational_primitive(eps: f64, r: f64, d: f64) -> f64 {
    if d == 0.0 {
        return 0.0;
    }
    if r == 1.0 {
        return (eps * d).atan() / eps;
    }
    let rule = Rule::graded(0.0, d.abs(), (0.5 / eps).min(d.abs()), 2.0, 20);
    d.signum() * rule.integrate(|s| (1.0 + eps * eps * s * s).powf(-r))
}

impl Weight {
    pub fn period(&self) -> f64 {
        self.period
    }

    /// x₀.
    pub fn center(&self) -> f64 {
        self.center
    }

    /// Seam x_s = x₀ + L/2; the cell is [x_s, x_s + L).
    pub fn seam(&self) -> f64 {
        self.center + 0.5 * self.period
    }

    /// M = ∫ m_x over one period.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Same weight centered elsewhere.
    pub fn recentered(&self, center: f64) -> Weight {
        Weight { center, ..self.clone() }
    }

    /// Signed offset from the center, in [−L/2, L/2).
    pub fn offset(&self, x: f64) -> f64 {
        let l = self.period;
        (x - self.center + 0.5 * l).rem_euclid(l) - 0.5 * l
    }

    fn profile(&self, d: f64) -> f64 {
        match self.kind {
            WeightKind::Rational { eps, r } => (1.0 + eps * eps * d * d).powf(-r),
            WeightKind::Bump { width } => {
                if d.abs() >= 0.5 * width {
                    0.0
                } else {
                    (1.0 + (2.0 * PI * d / width).cos()) / width
                }
            }
        }
    }

    fn profile_dx(&self, d: f64) -> f64 {
        match self.kind {
            WeightKind::Rational { eps, r } => -2.0 * r * eps * eps * d * (1.0 + eps * eps * d * d).powf(-r - 1.0),
            WeightKind::Bump { width } => {
                if d.abs() >= 0.5 * width {
                    0.0
                } else {
                    -2.0 * PI / (width * width) * (2.0 * PI * d / width).sin()
                }
            }
        }
    }

    fn primitive(&self, d: f64) -> f64 {
        match self.kind {
            WeightKind::Rational { eps, r } => rational_primitive(eps, r, d),
            WeightKind::Bump { width } => {
                if d >= 0.5 * width {
                    0.5
                } else if d <= -0.5 * width {
                    -0.5
                } else {
                    d / width + (2.0 * PI * d / width).sin() / (2.0 * PI)
                }
            }
        }
    }

    pub fn m(&self, x: f64) -> f64 {
        self.primitive(self.offset(x))
    }

    pub fn m_x(&self, x: f64) -> f64 {
        self.profile(self.offset(x))
    }

    pub fn m_xx(&self, x: f64) -> f64 {
        self.profile_dx(self.offset(x))
    }

    /// Panels in the offset variable that respect the kinks of m_x.
    fn offset_rule(&self) -> Rule {
        let l = self.period;
        let mut breaks = vec![-0.5 * l];
        if let WeightKind::Bump { width } = self.kind {
            if width < l {
                breaks.extend([-0.5 * width, 0.5 * width]);
            }
        }
        breaks.push(0.5 * l);
        let mut fine = Vec::new();
        for w in breaks.windows(2) {
            let pieces = 64;
            for j in 0..pieces {
                fine.push(w[0] + (w[1] - w[0]) * j as f64 / pieces as f64);
            }
        }
        fine.push(0.5 * l);
        Rule::panels(&fine, 16)
    }

    /// Fourier coefficients (1/L)∫ m_x e^{−ikx} dx in FFT order.
    pub fn mx_coefficients(&self, grid: &Grid) -> Vec<Complex64> {
        let n = grid.n();
        let k0 = grid.k0();
        let rule = self.offset_rule();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (&d, &w) in rule.nodes.iter().zip(&rule.weights) {
            let x = self.center + d;
            let v = self.profile(d) * w / self.period;
            if v == 0.0 {
                continue;
            }
            let step = Complex64::from_polar(1.0, -k0 * x);
            let mut ph = Complex64::new(1.0, 0.0);
            for k in 0..=n / 2 {
                if k > 0 {
                    ph *= step;
                }
                out[k] += v * ph;
            }
        }
        for k in 1..n.div_ceil(2) {
            out[n - k] = out[k].conj();
        }
        out
    }

    /// m_x truncated to the modes |k| < N/2 of the grid.
    pub fn mx_field(&self, grid: &Grid) -> SpectralField {
        let mut c = self.mx_coefficients(grid);
        c[grid.nyquist_slot()] = Complex64::new(0.0, 0.0);
        SpectralField::from_coeffs(*grid, c, true)
    }

    /// The periodic part p = m − (M/L)·offset, truncated like [`Weight::mx_field`].
    pub fn periodic_field(&self, grid: &Grid) -> SpectralField {
        let c = self.mx_coefficients(grid);
        let mut out: Vec<Complex64> = (0..grid.n())
            .map(|j| if j == 0 { Complex64::new(self.cell_mean, 0.0) } else { c[j] / Complex64::new(0.0, grid.wavenumber(j)) })
            .collect();
        out[grid.nyquist_slot()] = Complex64::new(0.0, 0.0);
        SpectralField::from_coeffs(*grid, out, true)
    }

    /// ∫ m_x f dx over one period for a band-limited f.
    pub fn integrate_mx(&self, f: &SpectralField) -> Complex64 {
        let grid = f.grid();
        let c = self.mx_coefficients(&grid);
        let ny = grid.nyquist_slot();
        f.coeffs()
            .iter()
            .zip(&c)
            .enumerate()
            .map(|(j, (a, b))| if j == ny { a * b.re } else { a * b.conj() })
            .sum::<Complex64>()
            * self.period
    }

    /// ∫ m f dx over the cell [x_s, x_s + L) for a band-limited f.
    pub fn integrate_m(&self, f: &SpectralField) -> Complex64 {
        let grid = f.grid();
        let c = self.mx_coefficients(&grid);
        let a = self.seam();
        let l = self.period;
        let mut acc = f.coeffs()[0] * self.cell_mean * l;
        let side = |xi: f64, cj: Complex64| (Complex64::from_polar(self.total, xi * a) - cj.conj() * l) / Complex64::new(0.0, xi);
        for j in 1..grid.n() {
            let xi = grid.wavenumber(j);
            let e = if j == grid.nyquist_slot() {
                0.5 * (side(xi.abs(), c[j]) + side(-xi.abs(), c[j].conj()))
            } else {
                side(xi, c[j])
            };
            acc += f.coeffs()[j] * e;
        }
        acc
    }

    /// max |m_xx| / m_x over the grid nodes.
    pub fn curvature_ratio(&self, grid: &Grid) -> f64 {
        grid.nodes()
            .iter()
            .filter(|&&x| self.m_x(x) > 0.0)
            .map(|&x| self.m_xx(x).abs() / self.m_x(x))
            .fold(0.0, f64::max)
    }

    /// ε·r for the rational kind, 0 for the bump.
    pub fn eps_r(&self) -> f64 {
        match self.kind {
            WeightKind::Rational { eps, r } => eps * r,
            WeightKind::Bump { .. } => 0.0,
        }
    }
}
