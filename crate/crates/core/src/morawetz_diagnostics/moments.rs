//! Momentum densities, their fluxes and weighted integrals per snapshot.

use super::columns::{alpha_of_x, column, Column, Density};
use super::time;
use super::weight::Weight;
use crate::error::Result;
use crate::spectral_ops::{derivative, Depth, SpectralField};
use crate::strip_harmonics::DepthGrid;
use crate::ww_solver::{bulk_fields, surface_terms, HoloState, PointSampler, Trajectory};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// ∫_{a}^{a+L} α g(α) dα for periodic g given by its samples.
pub(crate) fn sawtooth_moment(g: &SpectralField, a: f64) -> f64 {
    let grid = g.grid();
    let l = grid.period();
    let c = g.coeffs();
    let mut acc = c[0].re * l * (a + 0.5 * l);
    for j in 1..grid.n() {
        let xi = grid.wavenumber(j);
        if j == grid.nyquist_slot() {
            acc += c[j].re * l * (xi * a).sin() / xi;
        } else {
            acc += (c[j] * Complex64::from_polar(l, xi * a) / Complex64::new(0.0, xi)).re;
        }
    }
    acc
}

/// Weighted integrals of one snapshot.
#[derive(Debug, Clone, Serialize)]
pub struct SnapshotMoments {
    pub t: f64,
    /// ∫ I_k dx.
    pub total: [f64; 3],
    /// ∫ m I_k dx over the cell.
    pub weighted: [f64; 3],
    /// ∫ m_x S_k dx − M S_k(x_s): the time derivative of `weighted`.
    pub flux: [f64; 3],
    /// S_k(x_s).
    pub seam_flux: [f64; 3],
    /// ∫ m_x η² dx.
    pub potential: f64,
    /// ∬ m_x |∇φ|² dy dx.
    pub kinetic: f64,
    /// ∫ m_x φ_x²(x, −h) dx, zero at infinite depth.
    pub bottom: f64,
    /// Smallest pressure over the strip nodes and the seam column.
    pub min_pressure: f64,
    pub eta_min: f64,
    pub eta_max: f64,
    pub slope_max: f64,
}

/// Evaluates all weighted integrals on the conformal strip, with the seam
/// terms from an Eulerian column at x_s.
///
/// The weight enters through its truncation to the grid band, so the
/// integrands stay smooth in α even where m_x has kinks; the error is set
/// by the Eulerian spectrum of the fields above N/2.
pub fn snapshot_moments(state: &HoloState, weight: &Weight) -> Result<SnapshotMoments> {
    let grid = state.grid();
    let h = state.conformal_depth();
    let dg = DepthGrid::for_grid(h, &grid);
    let bulk = bulk_fields(state, &dg);
    let top = surface_terms(state);
    let da = grid.spacing();
    let g = state.g;
    let n = grid.n();
    let mx = weight.mx_field(&grid);
    let mx_at = |xs: &[f64]| -> Vec<f64> { mx.eval_many(xs).into_iter().map(|v| v.re).collect() };

    let mut total1 = 0.0;
    let mut total3 = 0.0;
    let mut a1 = 0.0;
    let mut a3 = 0.0;
    let mut kin = 0.0;
    let mut shear = 0.0;
    let mut phit = 0.0;
    let mut s3_bulk = 0.0;
    let mut pmin = f64::INFINITY;
    for (j, &wb) in dg.weights().iter().enumerate() {
        let xs: Vec<f64> = bulk.z[j].iter().map(|z| z.re).collect();
        let mxs = mx_at(&xs);
        for m in 0..n {
            let w = wb * da * bulk.jac[j][m];
            let wm = w * mxs[m];
            let r = bulk.r[j][m];
            let yt = bulk.y_theta[j][m];
            total1 += w * r.re;
            total3 += w * (yt * r.conj()).re;
            a1 += wm * bulk.phi[j][m];
            a3 += wm * bulk.theta[j][m] * r.im;
            kin += wm * r.norm_sqr();
            shear += wm * 0.5 * (r * r).re;
            phit += wm * bulk.phi_t[j][m];
            s3_bulk += wm * (-yt.re * bulk.phi_t[j][m] - bulk.theta_t[j][m] * r.im);
            pmin = pmin.min(bulk.pressure[j][m]);
        }
    }

    let qa = derivative(&state.q).samples();
    let mxs = mx_at(&top.x);
    let mut total2 = 0.0;
    let mut surf_a1 = 0.0;
    let mut pot = 0.0;
    let mut s2_surf = 0.0;
    let mut g_samples = Vec::with_capacity(n);
    for m in 0..n {
        let dx = top.x_alpha[m] * da * mxs[m];
        let e = top.eta[m];
        g_samples.push(e * qa[m].re);
        total2 += da * e * qa[m].re;
        surf_a1 += dx * e * top.psi[m];
        pot += dx * e * e;
        s2_surf += dx * (-e * top.psi_t[m]);
    }
    let a1 = a1 - surf_a1;

    // ∫ m(X) g dα with m = (M/L)(X − x₀) + p(X) on the cell
    let l = grid.period();
    let mm = weight.total();
    let x0 = weight.center();
    let gfield = SpectralField::from_real(grid, &g_samples)?;
    let alpha_s = alpha_of_x(state, x0 - 0.5 * l);
    let re_w = state.w.real_samples();
    let p = weight.periodic_field(&grid);
    let ps: Vec<f64> = p.eval_many(&top.x).into_iter().map(|v| v.re).collect();
    let mut periodic = 0.0;
    let mut shift_part = 0.0;
    for m in 0..n {
        periodic += da * ps[m] * g_samples[m];
        shift_part += da * re_w[m] * g_samples[m];
    }
    let w2 = mm / l * (sawtooth_moment(&gfield, alpha_s) + shift_part - x0 * gfield.coeffs()[0].re * l) + periodic;

    let sampler = PointSampler::new(state);
    let col = column(&sampler, state, weight.seam())?;
    let seam = [col.flux(Density::I1), col.flux(Density::I2), col.flux(Density::I3)];
    let w1 = w2 - a1 + mm * col.antiderivative(Density::I1);
    let w3 = w2 - a3 + mm * col.antiderivative(Density::I3);
    let flux1 = -phit - 0.5 * g * pot + shear;
    let flux2 = s2_surf - 0.5 * g * pot + shear;
    let flux3 = -0.5 * g * pot + s3_bulk + shear;

    let bottom = match h {
        Depth::Finite(hc) => {
            let pts: Vec<_> = grid.nodes().iter().map(|&a| sampler.at_strip(a, -hc)).collect();
            let xs: Vec<f64> = pts.iter().map(|p| p.z.re).collect();
            let mxs = mx_at(&xs);
            pts.iter().zip(&mxs).fold(0.0, |acc, (p, w)| {
                pmin = pmin.min(p.pressure);
                acc + da * p.zp.re * w * p.r.re * p.r.re
            })
        }
        Depth::Infinite => 0.0,
    };
    Ok(SnapshotMoments {
        t: state.t,
        total: [total1, total2, total3],
        weighted: [w1, w2, w3],
        flux: [flux1 - mm * seam[0], flux2 - mm * seam[1], flux3 - mm * seam[2]],
        seam_flux: seam,
        potential: pot,
        kinetic: kin,
        bottom,
        min_pressure: pmin.min(col.min_pressure()),
        eta_min: top.eta.iter().cloned().fold(f64::INFINITY, f64::min),
        eta_max: top.eta.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        slope_max: top.eta_x.iter().fold(0.0f64, |a, b| a.max(b.abs())),
    })
}

pub fn moment_series(traj: &Trajectory, weight: &Weight) -> Result<Vec<SnapshotMoments>> {
    traj.states.iter().map(|s| snapshot_moments(s, weight)).collect()
}

/// Integrated local conservation law for one density.
#[derive(Debug, Clone, Serialize)]
pub struct ConservationResidual {
    pub which: Density,
    pub times: Vec<f64>,
    /// ∫ m I dx |₀ᵗ − ∫₀ᵗ (∫ m_x S dx − M S(x_s)) dt at each snapshot.
    pub residual: Vec<f64>,
    /// |r(T)| / max(|∫ m I|₀ᵀ|, |∫₀ᵀ flux dt|).
    pub relative: f64,
    pub endpoint_change: f64,
    pub flux_integral: f64,
}

pub fn conservation_residual(series: &[SnapshotMoments], which: Density) -> ConservationResidual {
    let k = which.index();
    let t: Vec<f64> = series.iter().map(|s| s.t).collect();
    let f: Vec<f64> = series.iter().map(|s| s.flux[k]).collect();
    let cum = time::cumulative_integral(&t, &f);
    let w0 = series.first().map(|s| s.weighted[k]).unwrap_or(0.0);
    let residual: Vec<f64> = series.iter().zip(&cum).map(|(s, c)| s.weighted[k] - w0 - c).collect();
    let endpoint_change = series.last().map(|s| s.weighted[k] - w0).unwrap_or(0.0);
    let flux_integral = cum.last().copied().unwrap_or(0.0);
    let scale = endpoint_change.abs().max(flux_integral.abs());
    let last = residual.last().copied().unwrap_or(0.0);
    let relative = if scale > 0.0 { last.abs() / scale } else { last.abs() };
    ConservationResidual { which, times: t, residual, relative, endpoint_change, flux_integral }
}

/// 𝓘ₘ^σ = σ∫mI₂ + (1−σ)∫mI₃ with its flux form and the finite-difference check.
#[derive(Debug, Clone, Serialize)]
pub struct MorawetzFunctional {
    pub sigma: f64,
    pub times: Vec<f64>,
    pub value: Vec<f64>,
    /// σ(∫m_xS₂ − M S₂(x_s)) + (1−σ)(∫m_xS₃ − M S₃(x_s)).
    pub flux: Vec<f64>,
    /// max |d𝓘/dt (finite differences) − flux| / max |flux|; NaN when the
    /// snapshots are not uniform.
    pub fd_mismatch: f64,
}

pub fn morawetz_functional(series: &[SnapshotMoments], sigma: f64) -> MorawetzFunctional {
    let times: Vec<f64> = series.iter().map(|s| s.t).collect();
    let value: Vec<f64> = series.iter().map(|s| sigma * s.weighted[1] + (1.0 - sigma) * s.weighted[2]).collect();
    let flux: Vec<f64> = series.iter().map(|s| sigma * s.flux[1] + (1.0 - sigma) * s.flux[2]).collect();
    let fd_mismatch = match time::derivative(&times, &value) {
        Some(d) => {
            let scale = flux.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            let err = d.iter().zip(&flux).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            if scale > 0.0 {
                err / scale
            } else {
                err
            }
        }
        None => f64::NAN,
    };
    MorawetzFunctional { sigma, times, value, flux, fd_mismatch }
}

impl MorawetzFunctional {
    /// max over snapshots of |𝓘ₘ^σ| / ‖(η,ψ)‖²_{E^{1/4}}, given the norm per snapshot.
    pub fn bound_ratio(&self, e14: &[f64]) -> f64 {
        self.value.iter().zip(e14).filter(|(_, e)| **e > 0.0).map(|(v, e)| v.abs() / (e * e)).fold(0.0, f64::max)
    }
}

/// Frame of the sample positions of a [`DensityFluxSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// Columns at the Eulerian grid x_m = mL/N.
    Eulerian,
    /// Columns at the surface markers X(α_m).
    Holomorphic,
}

/// Pointwise densities and fluxes along Eulerian columns.
#[derive(Debug, Clone, Serialize)]
pub struct DensityFluxSeries {
    pub which: Density,
    pub frame: Frame,
    pub times: Vec<f64>,
    /// Column positions per snapshot.
    pub x: Vec<Vec<f64>>,
    pub density: Vec<Vec<f64>>,
    pub flux: Vec<Vec<f64>>,
    /// Columns where the pull-back failed; stored as NaN.
    pub masked: usize,
}

impl DensityFluxSeries {
    /// ∫ I dx per snapshot; trapezoid over the columns in the Eulerian frame,
    /// ∫ I X_α dα in the holomorphic frame.
    pub fn totals(&self, states: &[HoloState]) -> Vec<f64> {
        self.density
            .iter()
            .zip(states)
            .map(|(row, s)| {
                let da = s.grid().spacing();
                match self.frame {
                    Frame::Eulerian => row.iter().sum::<f64>() * da,
                    Frame::Holomorphic => {
                        let xa = surface_terms(s).x_alpha;
                        row.iter().zip(&xa).map(|(v, w)| v * w).sum::<f64>() * da
                    }
                }
            })
            .collect()
    }
}

pub fn density_flux(traj: &Trajectory, which: Density, frame: Frame) -> Result<DensityFluxSeries> {
    let mut out = DensityFluxSeries {
        which,
        frame,
        times: Vec::new(),
        x: Vec::new(),
        density: Vec::new(),
        flux: Vec::new(),
        masked: 0,
    };
    for s in &traj.states {
        let sampler = PointSampler::new(s);
        let xs = match frame {
            Frame::Eulerian => s.grid().nodes(),
            Frame::Holomorphic => surface_terms(s).x,
        };
        let mut dens = Vec::with_capacity(xs.len());
        let mut flux = Vec::with_capacity(xs.len());
        for &x in &xs {
            match column(&sampler, s, x) {
                Ok(c) => {
                    dens.push(c.density(which));
                    flux.push(c.flux(which));
                }
                Err(_) => {
                    out.masked += 1;
                    dens.push(f64::NAN);
                    flux.push(f64::NAN);
                }
            }
        }
        out.times.push(s.t);
        out.x.push(xs);
        out.density.push(dens);
        out.flux.push(flux);
    }
    Ok(out)
}

/// Column at x for external callers.
pub fn column_at(state: &HoloState, x: f64) -> Result<Column> {
    column(&PointSampler::new(state), state, x)
}
