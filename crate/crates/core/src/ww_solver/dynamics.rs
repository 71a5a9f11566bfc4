use super::state::HoloState;
use crate::error::{Error, Result};
use crate::spectral_ops::{dealias, derivative, exp_filter, holomorphic_from_real, project_parts, tilbert_inv_unchecked, Depth, SpectralField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Auxiliary fields on the top.
#[derive(Debug, Clone)]
pub struct AuxFields {
    /// J = |1 + W_α|² on the grid.
    pub j: Vec<f64>,
    /// R = Q_α/(1 + W_α).
    pub r: SpectralField,
    /// Y = W_α/(1 + W_α).
    pub y: SpectralField,
    /// F = P_h[(Q_α − Q̄_α)/J] with Re F mean zero; Im F keeps its mean, which
    /// drives the conformal depth.
    pub f: SpectralField,
    /// Advection velocity Re F.
    pub b: SpectralField,
}

fn samples_to_field(s: &HoloState, v: Vec<Complex64>) -> SpectralField {
    SpectralField::from_complex(s.grid(), &v).expect("grid sized samples")
}

fn product(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

pub fn aux_fields(s: &HoloState) -> Result<AuxFields> {
    let h = s.conformal_depth();
    let wa = derivative(&s.w).samples();
    let qa = derivative(&s.q).samples();
    let j: Vec<f64> = wa.iter().map(|d| (Complex64::new(1.0, 0.0) + d).norm_sqr()).collect();
    let j_min = j.iter().cloned().fold(f64::INFINITY, f64::min);
    if j_min < 1e-6 {
        return Err(Error::NearDegenerate { j_min });
    }
    let r = dealias(&samples_to_field(s, qa.iter().zip(&wa).map(|(q, w)| q / (1.0 + w)).collect()));
    let y = dealias(&samples_to_field(s, wa.iter().map(|w| w / (1.0 + w)).collect()));
    let f = f_from_samples(s.grid(), &qa, &j, h);
    let b = f.re();
    Ok(AuxFields { j, r, y, f, b })
}

fn f_from_samples(grid: crate::spectral_ops::Grid, qa: &[Complex64], j: &[f64], h: Depth) -> SpectralField {
    let v: Vec<f64> = qa.iter().zip(j).map(|(q, jj)| q.im / jj).collect();
    let v = dealias(&SpectralField::from_real(grid, &v).expect("grid sized samples"));
    let re = tilbert_inv_unchecked(&v, h).scale(-1.0);
    SpectralField::complex_from_parts(&re, &v)
}

/// Adds the real constant that makes Re W_t(α₀) = 0, i.e.
/// Re F(α₀) = Im F · Im W_α / (1 + Re W_α) at α₀.
pub fn gauge_fix(f: &SpectralField, s: &HoloState, alpha0: f64) -> SpectralField {
    let fv = f.eval(alpha0);
    let wa = derivative(&s.w).eval(alpha0);
    let target = fv.im * wa.im / (1.0 + wa.re);
    f.add_constant(target - fv.re)
}

/// Time derivative of the state.
#[derive(Debug, Clone)]
pub struct StateDerivative {
    pub w: SpectralField,
    pub q: SpectralField,
    pub shift: f64,
}

/// W_t = −F(1 + W_α), Q_t = −F Q_α + G with G holomorphic, real on the
/// bottom, Re G = −g Im W − ½|Q_α|²/J. The mean of Im W_t moves the shift.
pub fn rhs(s: &HoloState) -> Result<StateDerivative> {
    let grid = s.grid();
    let h = s.conformal_depth();
    let wa = derivative(&s.w).samples();
    let qa = derivative(&s.q).samples();
    let j: Vec<f64> = wa.iter().map(|d| (Complex64::new(1.0, 0.0) + d).norm_sqr()).collect();
    let j_min = j.iter().cloned().fold(f64::INFINITY, f64::min);
    if j_min < 1e-6 {
        return Err(Error::NearDegenerate { j_min });
    }
    let f = f_from_samples(grid, &qa, &j, h).samples();
    let one_wa: Vec<Complex64> = wa.iter().map(|w| 1.0 + w).collect();
    let wt = dealias(&samples_to_field(s, product(&f, &one_wa))).scale(-1.0);
    let shift_t = wt.mean().im;
    let wt = wt.add_imag_constant(-shift_t);
    let eta = s.eta_alpha();
    let re_g: Vec<f64> = eta.iter().zip(&qa).zip(&j).map(|((e, q), jj)| -s.g * e - 0.5 * q.norm_sqr() / jj).collect();
    let re_g = dealias(&SpectralField::from_real(grid, &re_g)?);
    let g_field = holomorphic_from_real(&re_g, h);
    let qt = g_field.sub(&dealias(&samples_to_field(s, product(&f, &qa))));
    Ok(StateDerivative { w: wt, q: qt, shift: shift_t })
}

fn advance(s: &HoloState, d: &StateDerivative, dt: f64) -> HoloState {
    HoloState {
        w: s.w.add(&d.w.scale(dt)),
        q: s.q.add(&d.q.scale(dt)),
        shift: s.shift + dt * d.shift,
        depth: s.depth,
        g: s.g,
        t: s.t + dt,
    }
}

/// Re-imposes holomorphy with respect to the current conformal depth.
fn reproject(mut s: HoloState) -> HoloState {
    let h = s.conformal_depth();
    s.w = project_parts(&s.w.re(), &s.w.im(), h);
    s.q = project_parts(&s.q.re(), &s.q.im(), h);
    s
}

/// Classical four-stage Runge–Kutta step followed by reprojection.
pub fn step_rk4(s: &HoloState, dt: f64) -> Result<HoloState> {
    let k1 = rhs(s)?;
    let k2 = rhs(&advance(s, &k1, 0.5 * dt))?;
    let k3 = rhs(&advance(s, &k2, 0.5 * dt))?;
    let k4 = rhs(&advance(s, &k3, dt))?;
    let combo = StateDerivative {
        w: k1.w.add(&k2.w.scale(2.0)).add(&k3.w.scale(2.0)).add(&k4.w).scale(1.0 / 6.0),
        q: k1.q.add(&k2.q.scale(2.0)).add(&k3.q.scale(2.0)).add(&k4.q).scale(1.0 / 6.0),
        shift: (k1.shift + 2.0 * k2.shift + 2.0 * k3.shift + k4.shift) / 6.0,
    };
    Ok(reproject(advance(s, &combo, dt)))
}

/// Time-step selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtPolicy {
    Fixed(f64),
    /// dt = c·Δα / (max linear phase speed + max |b|).
    Cfl(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: DtPolicy,
    pub t_end: f64,
    /// Keep every `cadence`-th step (the initial state is always kept).
    pub cadence: usize,
    /// Order of the exponential filter applied after each step, if any.
    pub filter_order: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { dt: DtPolicy::Cfl(0.5), t_end: 1.0, cadence: 1, filter_order: None }
    }
}

impl SolverConfig {
    /// Step size for the state, before adjustment to land on t_end.
    pub fn step_size(&self, s: &HoloState) -> Result<f64> {
        let dt = match self.dt {
            DtPolicy::Fixed(dt) => dt,
            DtPolicy::Cfl(c) => {
                let grid = s.grid();
                let h = s.conformal_depth();
                let cg = match h {
                    Depth::Finite(hh) => (s.g * hh).sqrt(),
                    Depth::Infinite => h.omega(s.g, grid.k0()) / grid.k0(),
                };
                let b = aux_fields(s)?.b.sup_norm();
                c * grid.spacing() / (cg + b)
            }
        };
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!("time step {dt} must be positive")));
        }
        Ok(dt)
    }
}

/// Snapshots of a run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<HoloState>,
    pub dt: f64,
    pub steps: usize,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }
}

pub fn run(s0: &HoloState, cfg: &SolverConfig) -> Result<Trajectory> {
    let dt0 = cfg.step_size(s0)?;
    let steps = ((cfg.t_end - s0.t) / dt0).ceil().max(1.0) as usize;
    let dt = (cfg.t_end - s0.t) / steps as f64;
    let cadence = cfg.cadence.max(1);
    let mut states = vec![s0.clone()];
    let mut s = s0.clone();
    for i in 1..=steps {
        s = step_rk4(&s, dt)?;
        if let Some(order) = cfg.filter_order {
            s.w = exp_filter(&s.w, order);
            s.q = exp_filter(&s.q, order);
        }
        s.check(1e-6)?;
        if i % cadence == 0 || i == steps {
            states.push(s.clone());
        }
    }
    Ok(Trajectory { states, dt, steps })
}
