//! Harmonic and holomorphic extensions into the strip −h < β < 0.
//!
//! Every strip field is generated from a top trace by an exact Fourier
//! symbol evaluated on the depth nodes. The symbols are written in
//! exponentially rescaled form so that no cosh/sinh of a large argument is
//! ever formed.

use crate::error::{Error, Result};
use crate::quadrature::Rule;
use crate::spectral_ops::{apply_real_symbol, derivative, tilbert, Depth, Grid, NormSpace, SpectralField};
use crate::spectral_ops::sobolev_norm_h;
use num_complex::Complex64;

/// Depth quadrature on [−extent, 0].
#[derive(Debug, Clone, PartialEq)]
pub struct DepthGrid {
    depth: Depth,
    extent: f64,
    rule: Rule,
}

impl DepthGrid {
    /// Gauss–Legendre rule of the given order on [−h, 0].
    pub fn gauss(depth: Depth, order: usize) -> Result<Self> {
        match depth {
            Depth::Finite(h) => Ok(Self { depth, extent: h, rule: Rule::gauss(-h, 0.0, order) }),
            Depth::Infinite => Err(Error::InvalidInput("infinite depth needs a truncation extent".into())),
        }
    }

    /// Infinite depth truncated at β = −extent.
    pub fn truncated(extent: f64, order: usize) -> Self {
        Self { depth: Depth::Infinite, extent, rule: Rule::gauss(-extent, 0.0, order) }
    }

    /// Rule adapted to fields with wavenumbers in [k_min, k_max]: one
    /// 64-point panel when the whole column is at most 24 e-foldings of the
    /// highest mode deep, otherwise 24-point panels doubling in width away
    /// from the surface. Infinite depth is cut at 40/k_min.
    pub fn for_band(depth: Depth, k_min: f64, k_max: f64) -> Self {
        let extent = depth.value().unwrap_or(40.0 / k_min);
        let rule = if k_max * extent <= 24.0 {
            Rule::gauss(-extent, 0.0, 64)
        } else {
            let r = Rule::graded(0.0, extent, 4.0 / k_max, 2.0, 24);
            let mut pairs: Vec<(f64, f64)> = r.nodes.iter().zip(&r.weights).map(|(&s, &w)| (-s, w)).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
        };
        Self { depth, extent, rule }
    }

    /// Band-adapted rule for a surface grid: k_min = 2π/L, k_max = ξ_max.
    pub fn for_grid(depth: Depth, grid: &Grid) -> Self {
        Self::for_band(depth, grid.k0(), grid.xi_max())
    }

    pub fn depth(&self) -> Depth {
        self.depth
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn nodes(&self) -> &[f64] {
        &self.rule.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.rule.weights
    }

    pub fn len(&self) -> usize {
        self.rule.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rule.nodes.is_empty()
    }
}

/// Neumann symbol cosh((β+h)ξ)/cosh(hξ).
pub fn p_neumann(depth: Depth, xi: f64, beta: f64) -> f64 {
    let a = xi.abs();
    match depth {
        Depth::Finite(h) => ((a * beta).exp() + (-a * (beta + 2.0 * h)).exp()) / (1.0 + (-2.0 * h * a).exp()),
        Depth::Infinite => (a * beta).exp(),
    }
}

/// Dirichlet symbol sinh((β+h)ξ)/sinh(hξ), equal to (β+h)/h at ξ = 0.
pub fn p_dirichlet(depth: Depth, xi: f64, beta: f64) -> f64 {
    let a = xi.abs();
    match depth {
        Depth::Finite(h) => {
            if a == 0.0 {
                (beta + h) / h
            } else {
                ((a * beta).exp() - (-a * (beta + 2.0 * h)).exp()) / (-(-2.0 * h * a).exp_m1())
            }
        }
        Depth::Infinite => (a * beta).exp(),
    }
}

/// ∂_β p_N = ξ tanh(hξ) p_D.
pub fn dp_neumann(depth: Depth, xi: f64, beta: f64) -> f64 {
    let a = xi.abs();
    match depth {
        Depth::Finite(h) => a * ((a * beta).exp() - (-a * (beta + 2.0 * h)).exp()) / (1.0 + (-2.0 * h * a).exp()),
        Depth::Infinite => a * (a * beta).exp(),
    }
}

/// ∂_β p_D = ξ coth(hξ) p_N, equal to 1/h at ξ = 0.
pub fn dp_dirichlet(depth: Depth, xi: f64, beta: f64) -> f64 {
    let a = xi.abs();
    match depth {
        Depth::Finite(h) => {
            if a == 0.0 {
                1.0 / h
            } else {
                a * ((a * beta).exp() + (-a * (beta + 2.0 * h)).exp()) / (-(-2.0 * h * a).exp_m1())
            }
        }
        Depth::Infinite => a * (a * beta).exp(),
    }
}

/// Factor E_ξ(β) with `W(α+iβ) = Σ Û_ξ E_ξ(β) e^{iξα}`, Û the coefficients of
/// Re W on the top. It is e^{−ξ(β+h)}/cosh(hξ).
pub fn holo_factor(depth: Depth, xi: f64, beta: f64) -> f64 {
    if xi == 0.0 {
        return 1.0;
    }
    let a = xi.abs();
    match depth {
        Depth::Finite(h) => {
            let den = 1.0 + (-2.0 * h * a).exp();
            if xi > 0.0 {
                2.0 * (-a * (beta + 2.0 * h)).exp() / den
            } else {
                2.0 * (a * beta).exp() / den
            }
        }
        Depth::Infinite => {
            if xi > 0.0 {
                0.0
            } else {
                2.0 * (a * beta).exp()
            }
        }
    }
}

/// Bottom condition carried by a strip field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bottom {
    Dirichlet,
    Neumann,
    Free,
}

/// Field on the tensor grid (α_m, β_j), stored one Fourier layer per depth node.
#[derive(Debug, Clone)]
pub struct StripField {
    depth_grid: DepthGrid,
    layers: Vec<SpectralField>,
    bottom: Bottom,
}

impl StripField {
    fn generate<S>(trace: &SpectralField, dg: &DepthGrid, bottom: Bottom, symbol: S) -> Self
    where
        S: Fn(f64, f64) -> f64,
    {
        let layers = dg.nodes().iter().map(|&b| apply_real_symbol(trace, |xi| symbol(xi, b))).collect();
        Self { depth_grid: dg.clone(), layers, bottom }
    }

    pub fn grid(&self) -> Grid {
        self.layers[0].grid()
    }

    pub fn depth_grid(&self) -> &DepthGrid {
        &self.depth_grid
    }

    pub fn bottom(&self) -> Bottom {
        self.bottom
    }

    pub fn layers(&self) -> &[SpectralField] {
        &self.layers
    }

    pub fn layer(&self, j: usize) -> &SpectralField {
        &self.layers[j]
    }

    /// Samples of layer j on the surface grid.
    pub fn values(&self, j: usize) -> Vec<Complex64> {
        self.layers[j].samples()
    }

    /// All samples, indexed `[j][m]`.
    pub fn sample_matrix(&self) -> Vec<Vec<Complex64>> {
        self.layers.iter().map(|l| l.samples()).collect()
    }

    pub fn d_alpha(&self) -> StripField {
        Self { depth_grid: self.depth_grid.clone(), layers: self.layers.iter().map(derivative).collect(), bottom: Bottom::Free }
    }
}

/// Harmonic extension with Neumann bottom: symbol p_N.
pub fn extend_neumann(f: &SpectralField, dg: &DepthGrid) -> StripField {
    let d = dg.depth();
    StripField::generate(f, dg, Bottom::Neumann, |xi, b| p_neumann(d, xi, b))
}

/// ∂_β of [`extend_neumann`].
pub fn extend_neumann_dbeta(f: &SpectralField, dg: &DepthGrid) -> StripField {
    let d = dg.depth();
    StripField::generate(f, dg, Bottom::Dirichlet, |xi, b| dp_neumann(d, xi, b))
}

/// Harmonic extension vanishing on the bottom: symbol p_D.
pub fn extend_dirichlet(g: &SpectralField, dg: &DepthGrid) -> StripField {
    let d = dg.depth();
    StripField::generate(g, dg, Bottom::Dirichlet, |xi, b| p_dirichlet(d, xi, b))
}

/// ∂_β of [`extend_dirichlet`].
pub fn extend_dirichlet_dbeta(g: &SpectralField, dg: &DepthGrid) -> StripField {
    let d = dg.depth();
    StripField::generate(g, dg, Bottom::Neumann, |xi, b| dp_dirichlet(d, xi, b))
}

/// Holomorphic extension of a top trace `w` real on the bottom. Only Re w is
/// used; the imaginary mean of `w`, if any, is carried as a constant.
pub fn extend_holomorphic(w: &SpectralField, dg: &DepthGrid) -> StripField {
    let d = dg.depth();
    let re = w.re();
    let grid = re.grid();
    let nyq = grid.nyquist_slot();
    let im_mean = w.mean().im;
    let layers = dg
        .nodes()
        .iter()
        .map(|&b| {
            let coeffs = re
                .coeffs()
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let xi = grid.wavenumber(j);
                    let e = if j == nyq { 0.5 * (holo_factor(d, xi, b) + holo_factor(d, -xi, b)) } else { holo_factor(d, xi, b) };
                    c * e
                })
                .collect();
            let layer = SpectralField::from_coeffs(grid, coeffs, false);
            if im_mean != 0.0 {
                layer.add_imag_constant(im_mean)
            } else {
                layer
            }
        })
        .collect();
    StripField { depth_grid: dg.clone(), layers, bottom: Bottom::Free }
}

/// Pointwise evaluation of a holomorphic function and its derivative from
/// the coefficients of its top real part.
#[derive(Debug, Clone)]
pub struct HoloEvaluator {
    depth: Depth,
    k0: f64,
    /// (mode, Û) for nonzero coefficients, modes in (−n/2, n/2].
    modes: Vec<(i64, Complex64)>,
    mean: Complex64,
}

impl HoloEvaluator {
    pub fn new(w: &SpectralField, depth: Depth) -> Self {
        let re = w.re();
        let grid = re.grid();
        let mut modes = Vec::new();
        for (j, c) in re.coeffs().iter().enumerate() {
            if j == 0 || c.norm() == 0.0 {
                continue;
            }
            if j == grid.nyquist_slot() {
                let m = (grid.n() / 2) as i64;
                modes.push((m, 0.5 * c));
                modes.push((-m, 0.5 * c));
            } else {
                modes.push((grid.mode(j), *c));
            }
        }
        Self { depth, k0: grid.k0(), modes, mean: Complex64::new(re.coeffs()[0].re, w.mean().im) }
    }

    /// (W, W') at α + iβ.
    pub fn eval(&self, alpha: f64, beta: f64) -> (Complex64, Complex64) {
        let mut w = self.mean;
        let mut dw = Complex64::new(0.0, 0.0);
        for &(m, c) in &self.modes {
            let xi = self.k0 * m as f64;
            let e = holo_factor(self.depth, xi, beta);
            if e == 0.0 {
                continue;
            }
            let t = c * e * Complex64::from_polar(1.0, xi * alpha);
            w += t;
            dw += Complex64::new(0.0, xi) * t;
        }
        (w, dw)
    }
}

/// Dirichlet-to-Neumann map of the Neumann-bottom problem, 𝒯_h∂_α, symbol ξ tanh(hξ).
pub fn dtn_neumann(f: &SpectralField, depth: Depth) -> SpectralField {
    apply_real_symbol(f, |xi| depth.dtn_symbol(xi))
}

/// Dirichlet-to-Neumann map of the Dirichlet-bottom problem, symbol ξ coth(hξ)
/// with value 1/h at ξ = 0 (0 at infinite depth).
pub fn dtn_dirichlet(g: &SpectralField, depth: Depth) -> SpectralField {
    apply_real_symbol(g, |xi| dp_dirichlet(depth, xi, 0.0))
}

/// Top trace −𝒯_h f of the harmonic conjugate of the Neumann extension of f.
pub fn harmonic_conjugate(f: &SpectralField, depth: Depth) -> SpectralField {
    tilbert(f, depth).scale(-1.0)
}

/// ∬ weight(α) F dα dβ: trapezoid in α, depth rule in β.
pub fn depth_integral(field: &StripField, weight: &[f64]) -> Complex64 {
    moment_with(field, weight, |_| 1.0)
}

/// ∬ weight(α) (β − shift) F dα dβ.
pub fn moment_integral(field: &StripField, weight: &[f64], shift: f64) -> Complex64 {
    moment_with(field, weight, |b| b - shift)
}

fn moment_with<M: Fn(f64) -> f64>(field: &StripField, weight: &[f64], factor: M) -> Complex64 {
    let grid = field.grid();
    assert_eq!(weight.len(), grid.n(), "weight must be sampled on the surface grid");
    let da = grid.spacing();
    let dg = field.depth_grid();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, (&b, &wb)) in dg.nodes().iter().zip(dg.weights()).enumerate() {
        let row: Complex64 = field.values(j).iter().zip(weight).map(|(v, w)| v * *w).sum();
        acc += row * (wb * factor(b) * da);
    }
    acc
}

/// ‖|β|^{−s} v‖_{L²_β L^∞_α} / ‖g‖_{H^s_h} for the Dirichlet extension v of g.
///
/// The sup in α is taken over the grid; the norm in the denominator is the
/// weight max(|ξ|, 1/h)^s. Returns 0 for g = 0.
pub fn parabolic_ratio(g: &SpectralField, s: f64, dg: &DepthGrid) -> Result<f64> {
    if !(s < 0.5) {
        return Err(Error::InvalidInput(format!("parabolic estimate needs s < 1/2, got {s}")));
    }
    let h = dg.depth().value().unwrap_or(f64::INFINITY);
    let den = sobolev_norm_h(g, NormSpace::Hs(s), h)?;
    if den == 0.0 {
        return Ok(0.0);
    }
    let v = extend_dirichlet(g, dg);
    let mut num = 0.0;
    for (j, (&b, &w)) in dg.nodes().iter().zip(dg.weights()).enumerate() {
        let sup = v.layer(j).sup_norm();
        num += w * b.abs().powf(-2.0 * s) * sup * sup;
    }
    Ok(num.sqrt() / den)
}

#[cfg(test)]
mod tests;
