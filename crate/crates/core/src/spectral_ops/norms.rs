//! Depth-adapted Sobolev norms realized as single Fourier weights.
//!
//! A space `cX` carries the norm `c^{-1}‖·‖_X`, the convention under which
//! `g^{-1/2}L² × Ḣ^{1/2}_h` reproduces twice the linear energy. Sum spaces
//! `Ḣ^a + h^{a-c}Ḣ^c` then get the weight `min(|ξ|^a, h^{c-a}|ξ|^c)` and caps
//! `Ḣ^a ∩ h^{a}L²` the weight `max(|ξ|^a, h^{-a})`; both switch at |ξ| = 1/h.

use super::SpectralField;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NormSpace {
    /// Ḣ^{1/2} + h^{-1/2}Ḣ¹.
    HalfSum,
    /// Ḣ¹ ∩ hL².
    H1,
    /// Ḣ^{1/4} ∩ h^{1/4}L².
    QuarterCap,
    /// Ḣ^{3/4} + h^{-1/4}Ḣ¹.
    ThreeQuarterSum,
    /// Ḣ^{3/2} ∩ h^{3/2}L².
    ThreeHalves,
    /// Homogeneous Ḣ^s.
    Hdot(f64),
    /// Inhomogeneous H^s at scale h: weight max(|ξ|, 1/h)^s.
    Hs(f64),
}

impl FromStr for NormSpace {
    type Err = Error;

    fn from_str(tag: &str) -> Result<Self> {
        let t = tag.trim();
        Ok(match t {
            "H1/2_h-sum" | "H½_h-sum" | "half-sum" => NormSpace::HalfSum,
            "H1_h" => NormSpace::H1,
            "H1/4_h-cap" | "H¼_h-cap" | "quarter-cap" => NormSpace::QuarterCap,
            "H3/4_h-sum" | "H¾_h-sum" | "three-quarter-sum" => NormSpace::ThreeQuarterSum,
            "H3/2_h" => NormSpace::ThreeHalves,
            _ => {
                if let Some(s) = t.strip_prefix("Hdot").or_else(|| t.strip_prefix("Ḣ")) {
                    NormSpace::Hdot(s.parse().map_err(|_| Error::UnknownTag(tag.into()))?)
                } else if let Some(s) = t.strip_prefix("Hs") {
                    NormSpace::Hs(s.parse().map_err(|_| Error::UnknownTag(tag.into()))?)
                } else {
                    return Err(Error::UnknownTag(tag.into()));
                }
            }
        })
    }
}

/// Fourier weight of `space` at wavenumber ξ and depth h (may be infinite).
pub fn sobolev_weight(space: NormSpace, xi: f64, h: f64) -> f64 {
    let a = xi.abs();
    let sum = |p: f64, q: f64| {
        if h.is_infinite() {
            a.powf(p)
        } else {
            a.powf(p).min(h.powf(q - p) * a.powf(q))
        }
    };
    let cap = |p: f64| {
        if h.is_infinite() {
            a.powf(p)
        } else {
            a.powf(p).max(h.powf(-p))
        }
    };
    match space {
        NormSpace::HalfSum => sum(0.5, 1.0),
        NormSpace::ThreeQuarterSum => sum(0.75, 1.0),
        NormSpace::H1 => cap(1.0),
        NormSpace::QuarterCap => cap(0.25),
        NormSpace::ThreeHalves => cap(1.5),
        NormSpace::Hdot(s) => {
            if a == 0.0 {
                if s == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                a.powf(s)
            }
        }
        NormSpace::Hs(s) => {
            let floor = if h.is_infinite() { 0.0 } else { 1.0 / h };
            let base = a.max(floor);
            if base == 0.0 {
                if s == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                base.powf(s)
            }
        }
    }
}

/// `(L Σ_ξ w(ξ)² |f̂(ξ)|²)^{1/2}`; equivalent to the space's norm up to
/// absolute constants.
pub fn sobolev_norm_h(f: &SpectralField, space: NormSpace, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("depth {h} must be positive")));
    }
    let grid = f.grid();
    let s: f64 = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let w = sobolev_weight(space, grid.wavenumber(j), h);
            w * w * c.norm_sqr()
        })
        .sum();
    Ok((grid.period() * s).sqrt())
}
