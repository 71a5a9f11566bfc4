//! Conformal map from the strip −h < β < 0 onto the fluid domain.
//!
//! The map is `Z(ζ) = ζ + W̃(ζ) + i s` with `W̃` holomorphic, real on the
//! bottom and with mean-zero imaginary top trace. The bottom β = −h goes to
//! y = −H when h = H + s, so the constant `s` (the mean of η∘X) is absorbed
//! into the conformal depth. On the top `Im W̃ + s = η∘X`, X = α + Re W̃.

use crate::error::{Error, Result};
use crate::spectral_ops::{derivative, holomorphic_from_real, holomorphy_residual, tilbert_inv_unchecked, Depth, Grid, SpectralField};
use crate::strip_harmonics::{p_dirichlet, HoloEvaluator};
use crate::ww_solver::HoloState;
use num_complex::Complex64;

/// Largest surface slope accepted by [`build_from_surface`].
pub const MAX_SLOPE: f64 = 1.0 / 3.0;

/// Built conformal map with its iteration report.
#[derive(Debug, Clone)]
pub struct ConformalMap {
    w: SpectralField,
    shift: f64,
    depth: Depth,
    pub iterations: usize,
    pub residual: f64,
}

impl ConformalMap {
    /// Map from a holomorphic trace `w` (mean-zero imaginary part), the
    /// vertical shift `s` and the physical depth H.
    pub fn from_parts(w: SpectralField, shift: f64, depth: Depth) -> Self {
        Self { w, shift, depth, iterations: 0, residual: 0.0 }
    }

    /// Identity map of the flat strip.
    pub fn flat(grid: Grid, depth: Depth) -> Self {
        Self::from_parts(SpectralField::zeros(grid), 0.0, depth)
    }

    pub fn grid(&self) -> Grid {
        self.w.grid()
    }

    /// W̃ on the top.
    pub fn w(&self) -> &SpectralField {
        &self.w
    }

    /// W = W̃ + i s, so that Im W = η∘X.
    pub fn w_full(&self) -> SpectralField {
        self.w.add_imag_constant(self.shift)
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Physical depth H.
    pub fn depth(&self) -> Depth {
        self.depth
    }

    /// Conformal depth h = H + s.
    pub fn conformal_depth(&self) -> Depth {
        self.depth.shifted(self.shift)
    }

    /// X(α) = α + Re W̃(α) on the surface grid.
    pub fn x_of_alpha(&self) -> Vec<f64> {
        self.grid().nodes().iter().zip(self.w.real_samples()).map(|(a, r)| a + r).collect()
    }

    /// J = |1 + W_α|² on the surface grid.
    pub fn jacobian(&self) -> Vec<f64> {
        derivative(&self.w).samples().iter().map(|d| (Complex64::new(1.0, 0.0) + d).norm_sqr()).collect()
    }

    pub fn evaluator(&self) -> HoloEvaluator {
        HoloEvaluator::new(&self.w, self.conformal_depth())
    }

    /// (Z, Z') at α + iβ.
    pub fn eval(&self, alpha: f64, beta: f64) -> (Complex64, Complex64) {
        let (w, dw) = self.evaluator().eval(alpha, beta);
        (Complex64::new(alpha, beta + self.shift) + w, Complex64::new(1.0, 0.0) + dw)
    }

    /// Holomorphy residual of W̃.
    pub fn holomorphy_residual(&self) -> f64 {
        holomorphy_residual(&self.w, self.conformal_depth())
    }
}

/// Evaluates the Eulerian Fourier coefficients of a function given in
/// holomorphic coordinates: `f̂_k = (1/L) ∫ e^{−ikX(α)} f(α) X_α(α) dα`.
pub fn eulerian_coefficients(grid: Grid, x: &[f64], dx_dalpha: &[f64], f: &[f64]) -> SpectralField {
    let n = grid.n();
    let k0 = grid.k0();
    let da = grid.spacing() / grid.period();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    let half = n / 2;
    // steps e^{−ik0 X} per node, then powers by recurrence
    let steps: Vec<Complex64> = x.iter().map(|&xv| Complex64::from_polar(1.0, -k0 * xv)).collect();
    let mut ph: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); n];
    let vals: Vec<f64> = f.iter().zip(dx_dalpha).map(|(a, b)| a * b * da).collect();
    coeffs[0] = Complex64::new(vals.iter().sum(), 0.0);
    for k in 1..=half {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..n {
            ph[m] *= steps[m];
            acc += ph[m] * vals[m];
        }
        if k == half {
            coeffs[half] = Complex64::new(acc.re, 0.0);
        } else {
            coeffs[k] = acc;
            coeffs[n - k] = acc.conj();
        }
    }
    SpectralField::from_coeffs(grid, coeffs, true)
}

/// Fixed-point construction of the map whose top image is the graph of η
/// over a flat bottom at depth H.
pub fn build_from_surface(eta: &SpectralField, depth: Depth, tol: f64, max_iter: usize) -> Result<ConformalMap> {
    let grid = eta.grid();
    let slope = derivative(eta).sup_norm();
    if slope >= MAX_SLOPE {
        return Err(Error::Steepness { slope, limit: MAX_SLOPE });
    }
    if let Depth::Finite(h) = depth {
        let low = eta.real_samples().into_iter().fold(f64::INFINITY, f64::min);
        if low <= -h {
            return Err(Error::InvalidInput(format!("surface reaches the bottom (min eta = {low})")));
        }
    }
    let nodes = grid.nodes();
    let mut w = SpectralField::zeros(grid);
    let mut shift = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let x: Vec<f64> = nodes.iter().zip(w.real_samples()).map(|(a, r)| a + r).collect();
        let eta_x: Vec<f64> = eta.eval_many(&x).into_iter().map(|c| c.re).collect();
        let im_w = w.imag_samples();
        residual = eta_x.iter().zip(&im_w).map(|(e, i)| (e - shift - i).abs()).fold(0.0, f64::max);
        if residual < tol && it > 1 {
            return Ok(ConformalMap { w, shift, depth, iterations: it - 1, residual });
        }
        let target = SpectralField::from_real(grid, &eta_x)?;
        shift = target.mean().re;
        let h = depth.shifted(shift);
        let im = target.without_mean();
        let re = tilbert_inv_unchecked(&im, h).scale(-1.0);
        w = SpectralField::complex_from_parts(&re, &im);
        if !residual.is_finite() && it > 1 {
            break;
        }
    }
    Err(Error::Divergence { iterations: max_iter, residual })
}

/// Surface elevation on the Eulerian grid recovered from a map.
pub fn surface_from_map(map: &ConformalMap) -> SpectralField {
    let grid = map.grid();
    let x = map.x_of_alpha();
    let xa: Vec<f64> = derivative(&map.w.re()).real_samples().iter().map(|d| 1.0 + d).collect();
    let eta: Vec<f64> = map.w.imag_samples().iter().map(|v| v + map.shift).collect();
    eulerian_coefficients(grid, &x, &xa, &eta)
}

/// Converts Eulerian data (η, ψ) to holomorphic data.
pub fn to_holomorphic(eta: &SpectralField, psi: &SpectralField, depth: Depth, g: f64, tol: f64) -> Result<HoloState> {
    let map = build_from_surface(eta, depth, tol, 200)?;
    let x = map.x_of_alpha();
    let psi_x: Vec<f64> = psi.eval_many(&x).into_iter().map(|c| c.re).collect();
    let q = holomorphic_from_real(&SpectralField::from_real(map.grid(), &psi_x)?, map.conformal_depth());
    Ok(HoloState::new(map.w.clone(), q, map.shift, depth, g, 0.0))
}

/// Solves Z(α + iβ) = x + iy by Newton's method.
pub fn locate(x: f64, y: f64, map: &ConformalMap) -> Result<(f64, f64)> {
    let ev = map.evaluator();
    locate_with(&ev, map, x, y, None)
}

/// [`locate`] with a prebuilt evaluator and an optional starting point.
pub fn locate_with(ev: &HoloEvaluator, map: &ConformalMap, x: f64, y: f64, guess: Option<(f64, f64)>) -> Result<(f64, f64)> {
    let h = map.conformal_depth();
    if let Depth::Finite(hh) = map.depth() {
        if y < -hh - 1e-12 {
            return Err(Error::OutsideDomain { x, y });
        }
    }
    let s = map.shift();
    let (mut a, mut b) = guess.unwrap_or_else(|| {
        let (w0, _) = ev.eval(x, 0.0);
        let top = w0.im + s;
        let a0 = x - w0.re;
        let b0 = match (h, map.depth()) {
            (Depth::Finite(hc), Depth::Finite(hp)) => (y + hp) / (top + hp) * hc - hc,
            _ => y - top,
        };
        (a0, b0.min(0.0))
    });
    let target = Complex64::new(x, y);
    let scale = 1.0 + x.abs() + y.abs();
    let mut res = f64::INFINITY;
    for _ in 0..60 {
        let (w, dw) = ev.eval(a, b);
        let z = Complex64::new(a, b + s) + w;
        let r = z - target;
        res = r.norm();
        if res < 1e-13 * scale {
            break;
        }
        let step = r / (Complex64::new(1.0, 0.0) + dw);
        a -= step.re;
        b -= step.im;
    }
    if res >= 1e-11 * scale {
        return Err(Error::NewtonStall { x, y, residual: res });
    }
    if b > 1e-10 {
        return Err(Error::OutsideDomain { x, y });
    }
    Ok((a, b.min(0.0)))
}

/// Horizontal drift of a holomorphic vertical section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drift {
    /// Re Z(α₀, β) − x₀.
    pub drift: f64,
    /// Re Z(α₀, β) − x₀ + β Im W_α(α₀, β).
    pub corrected: f64,
}

pub fn strip_drift(map: &ConformalMap, alpha0: f64, beta: f64) -> Drift {
    let ev = map.evaluator();
    let (w_top, _) = ev.eval(alpha0, 0.0);
    let (w, dw) = ev.eval(alpha0, beta);
    let drift = w.re - w_top.re;
    Drift { drift, corrected: drift + beta * dw.im }
}

/// Odd symbol m(ξ, β) = [cosh((β+h)ξ) − cosh(hξ) − βξ sinh((β+h)ξ)] / sinh(hξ);
/// the corrected drift is the multiplier −i·m applied to Im W on the top.
/// Bounded by a multiple of min(1, β²|ξ|(|ξ| + 1/h)).
pub fn drift_symbol(depth: Depth, xi: f64, beta: f64) -> f64 {
    let a = xi.abs();
    if a == 0.0 {
        return 0.0;
    }
    let ratio = match depth {
        Depth::Finite(h) => -(-(2.0 * h + beta) * a).exp_m1() / -(-2.0 * h * a).exp_m1(),
        Depth::Infinite => 1.0,
    };
    xi.signum() * ((beta * a).exp_m1() * ratio - beta * a * p_dirichlet(depth, xi, beta))
}
