use crate::conformal_map::ConformalMap;
use crate::error::{Error, Result};
use crate::spectral_ops::{derivative, holomorphy_residual, Depth, Grid, SpectralField};
use serde::Serialize;

/// Holomorphic traces (W̃, Q) on the top with the vertical shift s.
#[derive(Debug, Clone, PartialEq)]
pub struct HoloState {
    pub w: SpectralField,
    pub q: SpectralField,
    pub shift: f64,
    /// Physical depth H.
    pub depth: Depth,
    pub g: f64,
    pub t: f64,
}

/// Invariant summary of a state.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StateHealth {
    pub min_jacobian: f64,
    pub min_x_alpha: f64,
    pub holomorphy_w: f64,
    pub holomorphy_q: f64,
    pub imag_mean_q: f64,
}

impl HoloState {
    pub fn new(w: SpectralField, q: SpectralField, shift: f64, depth: Depth, g: f64, t: f64) -> Self {
        Self { w, q, shift, depth, g, t }
    }

    pub fn rest(grid: Grid, depth: Depth, g: f64) -> Self {
        Self::new(SpectralField::zeros(grid), SpectralField::zeros(grid), 0.0, depth, g, 0.0)
    }

    pub fn grid(&self) -> Grid {
        self.w.grid()
    }

    /// h = H + s.
    pub fn conformal_depth(&self) -> Depth {
        self.depth.shifted(self.shift)
    }

    pub fn map(&self) -> ConformalMap {
        ConformalMap::from_parts(self.w.clone(), self.shift, self.depth)
    }

    /// η∘X = Im W̃ + s on the surface grid.
    pub fn eta_alpha(&self) -> Vec<f64> {
        self.w.imag_samples().into_iter().map(|v| v + self.shift).collect()
    }

    pub fn health(&self) -> StateHealth {
        let h = self.conformal_depth();
        let wa = derivative(&self.w).samples();
        let min_jacobian = wa.iter().map(|d| (1.0 + d.re).powi(2) + d.im * d.im).fold(f64::INFINITY, f64::min);
        let min_x_alpha = wa.iter().map(|d| 1.0 + d.re).fold(f64::INFINITY, f64::min);
        StateHealth {
            min_jacobian,
            min_x_alpha,
            holomorphy_w: holomorphy_residual(&self.w, h),
            holomorphy_q: holomorphy_residual(&self.q, h),
            imag_mean_q: self.q.mean().im.abs(),
        }
    }

    /// Errors when the state has left the admissible set.
    pub fn check(&self, tol: f64) -> Result<()> {
        let hh = self.health();
        let finite = self.w.coeffs().iter().chain(self.q.coeffs()).all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            return Err(Error::Instability { t: self.t, detail: "non-finite coefficients".into() });
        }
        if hh.min_jacobian < 1e-6 {
            return Err(Error::NearDegenerate { j_min: hh.min_jacobian });
        }
        if hh.min_x_alpha <= 0.0 {
            return Err(Error::Instability { t: self.t, detail: format!("1 + Re W_alpha = {}", hh.min_x_alpha) });
        }
        let scale = 1.0 + self.w.sup_norm() + self.q.sup_norm();
        if hh.holomorphy_w > tol * scale || hh.holomorphy_q > tol * scale {
            return Err(Error::Instability {
                t: self.t,
                detail: format!("holomorphy residuals {:.3e}, {:.3e}", hh.holomorphy_w, hh.holomorphy_q),
            });
        }
        Ok(())
    }
}

/// 𝓗 = (g/2)∫(Im W)²(1 + Re W_α) dα − ½∫Re Q · Im Q_α dα.
///
/// The kinetic part is ½∫φ ∂_nφ ds with ∂_β Re Q = −∂_α Im Q; it equals
/// −¼⟨Q, 𝒯_h^{-1}Q_α⟩ for holomorphic Q.
pub fn energy(s: &HoloState) -> f64 {
    let grid = s.grid();
    let da = grid.spacing();
    let eta = s.eta_alpha();
    let xa = derivative(&s.w.re()).real_samples();
    let pot: f64 = eta.iter().zip(&xa).map(|(e, d)| e * e * (1.0 + d)).sum::<f64>() * da;
    let kin = -s.q.re().inner(&derivative(&s.q.im()));
    0.5 * s.g * pot + 0.5 * kin
}

/// 𝓜 = ∫Im W · Re Q_α dα.
pub fn momentum(s: &HoloState) -> f64 {
    s.w.im().inner(&derivative(&s.q.re()))
}

/// ∫η dx = ∫(Im W̃ + s)(1 + Re W̃_α) dα.
pub fn mass(s: &HoloState) -> f64 {
    let da = s.grid().spacing();
    let eta = s.eta_alpha();
    let xa = derivative(&s.w.re()).real_samples();
    eta.iter().zip(&xa).map(|(e, d)| e * (1.0 + d)).sum::<f64>() * da
}
