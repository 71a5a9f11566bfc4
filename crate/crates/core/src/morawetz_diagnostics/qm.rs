//! The depth correction Qₘ(η) = ∬ m (H_N(η)_y H_D(η)_x − H_N(η)_x H_D(η)_y) dy dx
//! by direct strip quadrature and through its bilinear symbol.
//!
//! The integrand is ∂_x(H_N(η)_y H_D(η)) − ∂_y(H_N(η)_x H_D(η)), so the depth
//! integral equals −∂_x B^h(η,η) with B^h(η,η) = η²/2 − ∫ H_N(η)_y H_D(η) dy,
//! and on the cell Qₘ = ∫ m_x B^h(η,η) dx − M·B^h(η,η)(x_s).

use super::weight::Weight;
use crate::error::Result;
use crate::kernel_analysis::symbol_bh;
use crate::spectral_ops::{derivative, Depth, SpectralField};
use crate::strip_harmonics::{extend_dirichlet, extend_dirichlet_dbeta, extend_neumann, extend_neumann_dbeta, DepthGrid};
use crate::spectral_ops::bilinear_multiplier_sym;
use num_complex::Complex64;

/// η on a grid twice as fine, so quadratic expressions are not truncated.
fn padded(eta: &SpectralField) -> Result<SpectralField> {
    eta.resample(2 * eta.grid().n())
}

/// Depth-integrated Qₘ integrand as a field in x.
pub fn qm_integrand(eta: &SpectralField, depth: Depth) -> Result<SpectralField> {
    let e = padded(eta)?;
    let grid = e.grid();
    let dg = DepthGrid::for_grid(depth, &grid);
    let ex = derivative(&e);
    let (ny, nx) = (extend_neumann_dbeta(&e, &dg), extend_neumann(&ex, &dg));
    let (dx, dy) = (extend_dirichlet(&ex, &dg), extend_dirichlet_dbeta(&e, &dg));
    let mut acc = vec![0.0; grid.n()];
    for (j, &w) in dg.weights().iter().enumerate() {
        let (a, b, c, d) = (ny.layer(j).real_samples(), dx.layer(j).real_samples(), nx.layer(j).real_samples(), dy.layer(j).real_samples());
        for m in 0..grid.n() {
            acc[m] += w * (a[m] * b[m] - c[m] * d[m]);
        }
    }
    SpectralField::from_real(grid, &acc)
}

/// Qₘ(η) by strip quadrature on the flat strip of depth h.
pub fn qm_direct(eta: &SpectralField, weight: &Weight, depth: Depth) -> Result<f64> {
    Ok(weight.integrate_m(&qm_integrand(eta, depth)?).re)
}

/// B^h(η,η) through the symbol b^h.
pub fn bh_form(eta: &SpectralField, depth: Depth) -> Result<SpectralField> {
    bilinear_multiplier_sym(|xi, zeta| Complex64::new(symbol_bh(xi, zeta, depth), 0.0), &padded(eta)?)
}

/// Qₘ(η) = ∫ m_x B^h(η,η) dx − M·B^h(η,η)(x_s).
pub fn qm_symbol(eta: &SpectralField, weight: &Weight, depth: Depth) -> Result<f64> {
    let b = bh_form(eta, depth)?;
    Ok(weight.integrate_mx(&b).re - weight.total() * b.eval(weight.seam()).re)
}
