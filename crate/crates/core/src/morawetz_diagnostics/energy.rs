//! Local energy, the E^{1/4} energy norm and the X norm.

use super::time;
use super::weight::{make_weight, Weight, WeightKind};
use crate::conformal_map::eulerian_coefficients;
use crate::error::Result;
use crate::spectral_ops::{derivative, lp_blocks, sobolev_norm_h, Depth, FrequencyEnvelope, LpBand, NormSpace, SpectralField};
use crate::strip_harmonics::{extend_neumann, extend_neumann_dbeta, DepthGrid};
use crate::ww_solver::{bulk_fields, surface_terms, HoloState, LinearState, LinearTrajectory, Trajectory};
use num_complex::Complex64;
use serde::Serialize;

/// Eulerian Fourier coefficients of gη² and of ∫|∇φ|² dy at one time.
#[derive(Debug, Clone)]
pub struct EnergyDensity {
    pub t: f64,
    pub potential: SpectralField,
    pub kinetic: SpectralField,
}

impl EnergyDensity {
    pub fn total(&self) -> SpectralField {
        self.potential.add(&self.kinetic)
    }
}

/// Energy density of a nonlinear state: nonuniform transforms over the strip
/// nodes, with |∇φ|² dx dy = |Q'|² dα dβ.
pub fn energy_density(state: &HoloState) -> EnergyDensity {
    let grid = state.grid();
    let dg = DepthGrid::for_grid(state.conformal_depth(), &grid);
    let bulk = bulk_fields(state, &dg);
    let top = surface_terms(state);
    let mut kinetic = SpectralField::zeros(grid);
    for (j, &wb) in dg.weights().iter().enumerate() {
        let xs: Vec<f64> = bulk.z[j].iter().map(|z| z.re).collect();
        let v: Vec<f64> = bulk.r[j].iter().map(|r| wb * r.norm_sqr()).collect();
        kinetic = kinetic.add(&eulerian_coefficients(grid, &xs, &bulk.jac[j], &v));
    }
    let pot: Vec<f64> = top.eta.iter().map(|e| state.g * e * e).collect();
    EnergyDensity { t: state.t, potential: eulerian_coefficients(grid, &top.x, &top.x_alpha, &pot), kinetic }
}

/// Energy density of the linearized problem on the flat strip.
pub fn energy_density_flat(s: &LinearState) -> EnergyDensity {
    let grid = s.eta.grid();
    let dg = DepthGrid::for_grid(s.depth, &grid);
    let px = extend_neumann(&derivative(&s.psi), &dg);
    let py = extend_neumann_dbeta(&s.psi, &dg);
    let mut acc = vec![0.0; grid.n()];
    for (j, &w) in dg.weights().iter().enumerate() {
        let (a, b) = (px.layer(j).real_samples(), py.layer(j).real_samples());
        for m in 0..grid.n() {
            acc[m] += w * (a[m] * a[m] + b[m] * b[m]);
        }
    }
    let eta = s.eta.real_samples();
    let pot: Vec<f64> = eta.iter().map(|e| s.g * e * e).collect();
    EnergyDensity {
        t: s.t,
        potential: SpectralField::from_real(grid, &pot).expect("grid sized"),
        kinetic: SpectralField::from_real(grid, &acc).expect("grid sized"),
    }
}

/// ‖(η,ψ)‖²_{LE_{x₀}} on the grid of window centers, with its potential part.
#[derive(Debug, Clone, Serialize)]
pub struct LocalEnergyReport {
    pub x0: Vec<f64>,
    /// g∫∫χ(x−x₀)η² + ∫∬χ(x−x₀)|∇φ|².
    pub values: Vec<f64>,
    /// g∫∫χ(x−x₀)η² alone.
    pub potential: Vec<f64>,
    pub sup: f64,
    pub sup_at: f64,
    pub window: WeightKind,
    pub t_final: f64,
    pub e14_initial: f64,
    pub e14_final: f64,
    /// sup LE / (‖·(0)‖²_{E^{1/4}} + ‖·(T)‖²_{E^{1/4}}).
    pub ratio: f64,
}

/// Time integrals of the density coefficients.
fn time_integrated(series: &[EnergyDensity]) -> (SpectralField, SpectralField) {
    let grid = series[0].potential.grid();
    let t: Vec<f64> = series.iter().map(|e| e.t).collect();
    let integrate = |pick: &dyn Fn(&EnergyDensity) -> &SpectralField| {
        let coeffs: Vec<Complex64> = (0..grid.n())
            .map(|k| {
                let re: Vec<f64> = series.iter().map(|e| pick(e).coeffs()[k].re).collect();
                let im: Vec<f64> = series.iter().map(|e| pick(e).coeffs()[k].im).collect();
                Complex64::new(time::integral(&t, &re), time::integral(&t, &im))
            })
            .collect();
        SpectralField::from_coeffs(grid, coeffs, true)
    };
    (integrate(&|e| &e.potential), integrate(&|e| &e.kinetic))
}

/// ∫ χ(x − x₀) f dx at every grid node x₀.
pub(crate) fn windowed(f: &SpectralField, window: &Weight) -> Vec<f64> {
    let grid = f.grid();
    let c = window.recentered(0.0).mx_coefficients(&grid);
    let ny = grid.nyquist_slot();
    let coeffs: Vec<Complex64> = f
        .coeffs()
        .iter()
        .zip(&c)
        .enumerate()
        .map(|(j, (a, b))| grid.period() * if j == ny { a * b.re } else { a * b.conj() })
        .collect();
    SpectralField::from_coeffs(grid, coeffs, true).real_samples()
}

fn report(series: &[EnergyDensity], window: WeightKind, e14: (f64, f64)) -> Result<LocalEnergyReport> {
    let grid = series[0].potential.grid();
    let w = make_weight(window, &grid, 0.0)?;
    let (pot, kin) = time_integrated(series);
    let potential = windowed(&pot, &w);
    let kinetic = windowed(&kin, &w);
    let values: Vec<f64> = potential.iter().zip(&kinetic).map(|(a, b)| a + b).collect();
    let x0 = grid.nodes();
    let (i, sup) = values.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let denom = e14.0 * e14.0 + e14.1 * e14.1;
    Ok(LocalEnergyReport {
        sup_at: x0[i],
        x0,
        values,
        potential,
        sup,
        window,
        t_final: series.last().map(|e| e.t).unwrap_or(0.0),
        e14_initial: e14.0,
        e14_final: e14.1,
        ratio: if denom > 0.0 { sup / denom } else { 0.0 },
    })
}

/// Default window: raised cosine of width 2 with unit mass.
pub const DEFAULT_WINDOW: WeightKind = WeightKind::Bump { width: 2.0 };

pub fn local_energy(traj: &Trajectory, window: WeightKind) -> Result<LocalEnergyReport> {
    let series: Vec<EnergyDensity> = traj.states.iter().map(energy_density).collect();
    let first = traj.states.first().expect("nonempty trajectory");
    let last = traj.states.last().expect("nonempty trajectory");
    report(&series, window, (e14_state(first)?, e14_state(last)?))
}

pub fn local_energy_linear(traj: &LinearTrajectory, window: WeightKind) -> Result<LocalEnergyReport> {
    let series: Vec<EnergyDensity> = traj.states.iter().map(energy_density_flat).collect();
    let e = |s: &LinearState| e14_norm(&s.eta, &s.psi, s.g, s.depth);
    let first = traj.states.first().expect("nonempty trajectory");
    let last = traj.states.last().expect("nonempty trajectory");
    report(&series, window, (e(first)?, e(last)?))
}

/// ∫ m_x e dx for one density, the m_x-window local energy at one time.
pub fn weighted_energy(density: &EnergyDensity, weight: &Weight) -> (f64, f64) {
    (weight.integrate_mx(&density.potential).re, weight.integrate_mx(&density.kinetic).re)
}

/// ‖(η,ψ)‖_{E^{1/4}} with E^{1/4} = g^{−1/4}H^{1/4}_h × g^{1/4}H^{3/4}_h.
pub fn e14_norm(eta: &SpectralField, psi: &SpectralField, g: f64, depth: Depth) -> Result<f64> {
    let h = depth.value().unwrap_or(f64::INFINITY);
    let a = sobolev_norm_h(eta, NormSpace::QuarterCap, h)?;
    let b = sobolev_norm_h(psi, NormSpace::ThreeQuarterSum, h)?;
    Ok((g.sqrt() * a * a + b * b / g.sqrt()).sqrt())
}

/// Eulerian surface traces (η, ψ) of a holomorphic state.
pub fn eulerian_surface(state: &HoloState) -> (SpectralField, SpectralField) {
    let grid = state.grid();
    let top = surface_terms(state);
    (
        eulerian_coefficients(grid, &top.x, &top.x_alpha, &top.eta),
        eulerian_coefficients(grid, &top.x, &top.x_alpha, &top.psi),
    )
}

pub fn e14_state(state: &HoloState) -> Result<f64> {
    let (eta, psi) = eulerian_surface(state);
    e14_norm(&eta, &psi, state.g, state.depth)
}

/// One snapshot of X-norm input: η and the surface velocity (φ_x, φ_y)
/// as Eulerian fields.
#[derive(Debug, Clone)]
pub struct XSnapshot {
    pub eta: SpectralField,
    pub phi_x: SpectralField,
    pub phi_y: SpectralField,
}

impl XSnapshot {
    pub fn from_state(state: &HoloState) -> Self {
        let grid = state.grid();
        let top = surface_terms(state);
        let e = |v: &[f64]| eulerian_coefficients(grid, &top.x, &top.x_alpha, v);
        Self { eta: e(&top.eta), phi_x: e(&top.phi_x), phi_y: e(&top.phi_y) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct XNormReport {
    pub value: f64,
    /// Low block followed by the dyadic blocks, each max over snapshots.
    pub bands: Vec<LpBand>,
    pub block_norms: Vec<f64>,
    pub envelope: FrequencyEnvelope,
    /// sup|η| / (h X); NaN at infinite depth.
    pub eta_ratio: f64,
    /// sup|η_x| / X.
    pub slope_ratio: f64,
}

/// ‖(η, ∇φ|_top)‖_X = ‖P_low(·)‖_{X₀} + Σ_λ ‖P_λ(·)‖_{X₀} with
/// X₀ = L^∞_t H^{3/2}_h × g^{−1/2} L^∞_t H¹_h; L^∞_t is the max over snapshots.
pub fn x_norm(snaps: &[XSnapshot], g: f64, depth: Depth, delta: f64) -> Result<XNormReport> {
    let h = depth.value().unwrap_or(f64::INFINITY);
    let mut bands = Vec::new();
    let mut norms: Vec<f64> = Vec::new();
    let mut base = 0.0;
    for s in snaps {
        let de = lp_blocks(&s.eta, depth);
        let dx = lp_blocks(&s.phi_x, depth);
        let dy = lp_blocks(&s.phi_y, depth);
        base = de.base;
        if norms.is_empty() {
            bands = de.bands.clone();
            norms = vec![0.0; bands.len()];
        }
        for i in 0..bands.len() {
            let a = sobolev_norm_h(&de.blocks[i], NormSpace::ThreeHalves, h)?;
            let bx = sobolev_norm_h(&dx.blocks[i], NormSpace::H1, h)?;
            let by = sobolev_norm_h(&dy.blocks[i], NormSpace::H1, h)?;
            norms[i] = norms[i].max(a + g.sqrt() * (bx * bx + by * by).sqrt());
        }
    }
    let value: f64 = norms.iter().sum();
    let lambdas = bands
        .iter()
        .map(|b| match b {
            LpBand::Low => base,
            LpBand::Dyadic(l) => *l,
        })
        .collect();
    let envelope = FrequencyEnvelope::from_block_norms(base, lambdas, norms.clone(), delta);
    let eta_sup = snaps.iter().map(|s| s.eta.sup_norm()).fold(0.0, f64::max);
    let slope_sup = snaps.iter().map(|s| derivative(&s.eta).sup_norm()).fold(0.0, f64::max);
    let ratio = |v: f64, d: f64| if value > 0.0 { v / (d * value) } else { 0.0 };
    Ok(XNormReport {
        value,
        bands,
        block_norms: norms,
        envelope,
        eta_ratio: if h.is_finite() { ratio(eta_sup, h) } else { f64::NAN },
        slope_ratio: ratio(slope_sup, 1.0),
    })
}

pub fn x_norm_trajectory(traj: &Trajectory, delta: f64) -> Result<XNormReport> {
    let snaps: Vec<XSnapshot> = traj.states.iter().map(XSnapshot::from_state).collect();
    let s0 = &traj.states[0];
    x_norm(&snaps, s0.g, s0.depth, delta)
}
