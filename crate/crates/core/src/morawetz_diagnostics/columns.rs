//! Eulerian vertical columns pulled back through the conformal map.

use crate::error::{Error, Result};
use crate::spectral_ops::Depth;
use crate::strip_harmonics::DepthGrid;
use crate::ww_solver::{HoloState, PointFields, PointSampler};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Which momentum density / flux pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Density {
    /// I₁ = ∫φ_x dy.
    I1,
    /// I₂ = ηψ_x.
    I2,
    /// I₃ = ∫∇θ·∇q dy.
    I3,
}

impl Density {
    pub const ALL: [Density; 3] = [Density::I1, Density::I2, Density::I3];

    pub fn index(self) -> usize {
        match self {
            Density::I1 => 0,
            Density::I2 => 1,
            Density::I3 => 2,
        }
    }
}

impl FromStr for Density {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "I1" => Ok(Density::I1),
            "2" | "I2" => Ok(Density::I2),
            "3" | "I3" => Ok(Density::I3),
            other => Err(Error::UnknownTag(other.into())),
        }
    }
}

/// Solves X(α) = α + Re W̃(α) = x on the top.
pub fn alpha_of_x(state: &HoloState, x: f64) -> f64 {
    let re = state.w.re();
    let d = crate::spectral_ops::derivative(&re);
    let mut a = x - re.eval(x).re;
    for _ in 0..50 {
        let r = a + re.eval(a).re - x;
        a -= r / (1.0 + d.eval(a).re);
        if r.abs() < 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    a
}

/// Fields along the vertical line through x, from the bottom to the surface.
#[derive(Debug, Clone)]
pub struct Column {
    pub x: f64,
    pub eta: f64,
    pub eta_x: f64,
    pub psi: f64,
    /// Eulerian ψ_t = −gη − (½φ_x² − ½φ_y² + η_xφ_xφ_y) at the surface.
    pub psi_t: f64,
    /// Eulerian ψ_x = φ_x + η_xφ_y.
    pub psi_x: f64,
    pub g: f64,
    pub y: Vec<f64>,
    pub weights: Vec<f64>,
    pub points: Vec<PointFields>,
}

/// Quadrature in y on [bottom, η] adapted to the grid band.
fn column_rule(state: &HoloState, eta: f64) -> DepthGrid {
    let grid = state.grid();
    let d = match state.depth {
        Depth::Finite(h) => Depth::Finite(h + eta),
        Depth::Infinite => Depth::Infinite,
    };
    DepthGrid::for_band(d, grid.k0(), grid.xi_max())
}

pub fn column(sampler: &PointSampler, state: &HoloState, x: f64) -> Result<Column> {
    let a0 = alpha_of_x(state, x);
    let top = sampler.at_strip(a0, 0.0);
    let eta = top.z.im;
    let eta_x = top.zp.im / top.zp.re;
    let (px, py) = (top.r.re, -top.r.im);
    let psi_t = -state.g * eta - (0.5 * px * px - 0.5 * py * py + eta_x * px * py);
    let dg = column_rule(state, eta);
    let hc = state.conformal_depth().value();
    let mut y = Vec::with_capacity(dg.len());
    let mut weights = Vec::with_capacity(dg.len());
    let mut points = Vec::with_capacity(dg.len());
    let mut guess = (a0, 0.0);
    let mut last_y = eta;
    // walk downward so each solve starts from its neighbor
    for (&s, &w) in dg.nodes().iter().zip(dg.weights()).rev() {
        let yy = eta + s;
        let scale = match (hc, state.depth) {
            (Some(c), Depth::Finite(h)) => c / (h + eta),
            _ => 1.0,
        };
        let g = (guess.0, (guess.1 + (yy - last_y) * scale).min(0.0));
        let p = sampler.at(x, yy, Some(g))?;
        guess = (p.alpha, p.beta);
        last_y = yy;
        y.push(yy);
        weights.push(w);
        points.push(p);
    }
    y.reverse();
    weights.reverse();
    points.reverse();
    Ok(Column { x, eta, eta_x, psi: top.phi, psi_t, psi_x: px + eta_x * py, g: state.g, y, weights, points })
}

impl Column {
    fn sum<F: Fn(&PointFields) -> f64>(&self, f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }

    pub fn density(&self, which: Density) -> f64 {
        match which {
            Density::I1 => self.sum(|p| p.r.re),
            Density::I2 => self.eta * self.psi_x,
            Density::I3 => self.sum(|p| (p.y_theta * p.r.conj()).re),
        }
    }

    /// S₁ = −∫φ_t dy − (g/2)η² + ½∫(φ_x² − φ_y²) dy,
    /// S₂ = −ηψ_t − (g/2)η² + ½∫(φ_x² − φ_y²) dy,
    /// S₃ = −(g/2)η² − ∫θ_yφ_t dy + ∫(½(φ_x² − φ_y²) + θ_tφ_y) dy.
    pub fn flux(&self, which: Density) -> f64 {
        let pot = -0.5 * self.g * self.eta * self.eta;
        let shear = 0.5 * self.sum(|p| (p.r * p.r).re);
        match which {
            Density::I1 => -self.sum(|p| p.phi_t) + pot + shear,
            Density::I2 => -self.eta * self.psi_t + pot + shear,
            Density::I3 => pot - self.sum(|p| p.y_theta.re * p.phi_t) + shear + self.sum(|p| p.theta_t * -p.r.im),
        }
    }

    /// A with I_k = I₂ + ∂_x A: ∫φ dy − ηψ for I₁, ∫θ q_x dy for I₃.
    pub fn antiderivative(&self, which: Density) -> f64 {
        match which {
            Density::I1 => self.sum(|p| p.phi) - self.eta * self.psi,
            Density::I2 => 0.0,
            Density::I3 => self.sum(|p| p.theta * p.r.im),
        }
    }

    /// min pressure over the column nodes.
    pub fn min_pressure(&self) -> f64 {
        self.points.iter().map(|p| p.pressure).fold(f64::INFINITY, f64::min)
    }
}
