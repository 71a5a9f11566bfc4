//! Littlewood–Paley decomposition starting at frequency 1/h.
//!
//! The cumulative cutoff `C_λ(ξ)` equals 1 for |ξ| ≤ 2^{1/4}λ and 0 for
//! |ξ| ≥ 2^{3/4}λ with a raised-cosine profile in log₂|ξ| in between. The
//! block at λ is `C_λ − C_{λ/2}`: it is supported in
//! [2^{−3/4}λ, 2^{3/4}λ] ⊂ [λ/2, 2λ] and equal to 1 on [2^{−1/4}λ, 2^{1/4}λ].

use super::norms::{sobolev_norm_h, NormSpace};
use super::{apply_real_symbol, Depth, Grid, SpectralField};
use crate::error::Result;
use serde::Serialize;
use std::f64::consts::PI;

/// Which Littlewood–Paley piece to extract.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LpBand {
    /// Everything at frequencies ≲ the base frequency.
    Low,
    /// Dyadic block centered at λ.
    Dyadic(f64),
}

/// Base frequency of the decomposition: 1/h, or 2π/L at infinite depth.
pub fn base_frequency(depth: Depth, grid: &Grid) -> f64 {
    match depth {
        Depth::Finite(h) => 1.0 / h,
        Depth::Infinite => grid.k0(),
    }
}

fn cumulative(xi: f64, lambda: f64) -> f64 {
    let a = xi.abs();
    if a == 0.0 {
        return 1.0;
    }
    let s = (a / lambda).log2();
    if s <= 0.25 {
        1.0
    } else if s >= 0.75 {
        0.0
    } else {
        let c = (0.5 * PI * (s - 0.25) / 0.5).cos();
        c * c
    }
}

/// Multiplier of one band at wavenumber ξ.
pub fn band_symbol(band: LpBand, base: f64, xi: f64) -> f64 {
    match band {
        LpBand::Low => cumulative(xi, base),
        LpBand::Dyadic(l) => cumulative(xi, l) - cumulative(xi, 0.5 * l),
    }
}

pub fn lp_block(f: &SpectralField, band: LpBand, depth: Depth) -> SpectralField {
    let base = base_frequency(depth, &f.grid());
    apply_real_symbol(f, |xi| band_symbol(band, base, xi))
}

/// Dyadic centers base·2^j, j = 1..J, with J the first level whose cumulative
/// cutoff covers every grid wavenumber.
pub fn dyadic_levels(depth: Depth, grid: &Grid) -> Vec<f64> {
    let base = base_frequency(depth, grid);
    let mut out = Vec::new();
    let mut lam = base;
    while lam * 2f64.powf(0.25) < grid.xi_max() {
        lam *= 2.0;
        out.push(lam);
    }
    out
}

/// Full decomposition of a field.
#[derive(Debug, Clone)]
pub struct LpDecomposition {
    pub base: f64,
    pub bands: Vec<LpBand>,
    pub blocks: Vec<SpectralField>,
}

impl LpDecomposition {
    /// Sum of all blocks; reproduces the input.
    pub fn sum(&self) -> SpectralField {
        let mut acc = SpectralField::zeros(self.blocks[0].grid());
        for b in &self.blocks {
            acc = acc.add(b);
        }
        acc
    }
}

pub fn lp_blocks(f: &SpectralField, depth: Depth) -> LpDecomposition {
    let grid = f.grid();
    let mut bands = vec![LpBand::Low];
    bands.extend(dyadic_levels(depth, &grid).into_iter().map(LpBand::Dyadic));
    let blocks = bands.iter().map(|b| lp_block(f, *b, depth)).collect();
    LpDecomposition { base: base_frequency(depth, &grid), bands, blocks }
}

/// Minimal frequency envelope of a field.
#[derive(Debug, Clone, Serialize)]
pub struct FrequencyEnvelope {
    pub base_freq: f64,
    /// Block frequencies; the low block is recorded at the base frequency.
    pub lambdas: Vec<f64>,
    pub block_norms: Vec<f64>,
    pub values: Vec<f64>,
    pub delta: f64,
}

impl FrequencyEnvelope {
    /// Builds the minimal envelope over given block norms.
    pub fn from_block_norms(base_freq: f64, lambdas: Vec<f64>, block_norms: Vec<f64>, delta: f64) -> Self {
        let values = lambdas
            .iter()
            .map(|&l| {
                lambdas
                    .iter()
                    .zip(&block_norms)
                    .map(|(&m, &nm)| nm * (l / m).powf(delta).min((m / l).powf(delta)))
                    .fold(0.0, f64::max)
            })
            .collect();
        Self { base_freq, lambdas, block_norms, values, delta }
    }

    pub fn l1(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Checks domination and slow variation at relative slack `tol`.
    pub fn is_admissible(&self, tol: f64) -> bool {
        let dominates = self.values.iter().zip(&self.block_norms).all(|(c, n)| *c >= n * (1.0 - tol));
        let slow = self.lambdas.iter().enumerate().all(|(i, &l)| {
            self.lambdas.iter().enumerate().all(|(j, &m)| {
                let bound = (l / m).powf(self.delta).max((m / l).powf(self.delta));
                self.values[i] <= self.values[j] * bound * (1.0 + tol) + f64::MIN_POSITIVE
            })
        });
        dominates && slow
    }
}

pub fn min_envelope(f: &SpectralField, delta: f64, depth: Depth, space: NormSpace) -> Result<FrequencyEnvelope> {
    let dec = lp_blocks(f, depth);
    let h = depth.value().unwrap_or(f64::INFINITY);
    let mut lambdas = Vec::with_capacity(dec.bands.len());
    let mut norms = Vec::with_capacity(dec.bands.len());
    for (band, block) in dec.bands.iter().zip(&dec.blocks) {
        lambdas.push(match band {
            LpBand::Low => dec.base,
            LpBand::Dyadic(l) => *l,
        });
        norms.push(sobolev_norm_h(block, space, h)?);
    }
    Ok(FrequencyEnvelope::from_block_norms(dec.base, lambdas, norms, delta))
}
