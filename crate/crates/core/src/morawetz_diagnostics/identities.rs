//! Identity verifiers, the virial inequality and the linear Morawetz
//! identities.

use super::energy::{energy_density_flat, local_energy_linear, weighted_energy, DEFAULT_WINDOW};
use super::moments::SnapshotMoments;
use super::qm::qm_symbol;
use super::time;
use super::weight::Weight;
use crate::conformal_map::{surface_from_map, to_holomorphic};
use crate::error::Result;
use crate::spectral_ops::{derivative, Depth, SpectralField};
use crate::strip_harmonics::{extend_dirichlet, extend_holomorphic, extend_neumann, extend_neumann_dbeta, DepthGrid};
use crate::ww_solver::{bulk_fields, dtn_nonlinear, HoloState, LinearTrajectory, PointSampler};
use serde::Serialize;

/// Test function w in an identity: a constant, or the density m_x of a
/// weight truncated to the grid band.
#[derive(Debug, Clone, Copy)]
pub enum TestWeight<'a> {
    Constant(f64),
    WeightDensity(&'a Weight),
}

impl TestWeight<'_> {
    /// Values and slopes at the points `xs`.
    fn sample(&self, grid: crate::spectral_ops::Grid, xs: &[f64]) -> (Vec<f64>, Vec<f64>) {
        match self {
            TestWeight::Constant(c) => (vec![*c; xs.len()], vec![0.0; xs.len()]),
            TestWeight::WeightDensity(w) => {
                let f = w.mx_field(&grid);
                let v = f.eval_many(xs).into_iter().map(|c| c.re).collect();
                let d = derivative(&f).eval_many(xs).into_iter().map(|c| c.re).collect();
                (v, d)
            }
        }
    }
}

/// Both sides of an integral identity and its individual terms.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub terms: Vec<f64>,
    pub residual: f64,
    /// Size of the integrand, ∬|w||∇φ|² or its analogue.
    pub scale: f64,
    /// |lhs − rhs| / max(|lhs|, Σ|terms|, scale).
    pub relative: f64,
}

impl IdentityCheck {
    fn new(lhs: f64, terms: Vec<f64>, rhs: f64, scale: f64) -> Self {
        let s = lhs.abs().max(terms.iter().map(|t| t.abs()).sum()).max(scale);
        let residual = lhs - rhs;
        let relative = if s > 0.0 { residual.abs() / s } else { residual.abs() };
        Self { lhs, rhs, terms, residual, scale, relative }
    }
}

fn eval_re(f: &SpectralField, xs: &[f64]) -> Vec<f64> {
    f.eval_many(xs).into_iter().map(|c| c.re).collect()
}

/// ∬ w(φ_x² − φ_y²) = ∫ w(h+η)φ_x²|_{y=−h} − 2∬ wη_xφ_xφ_y + 2∬ w_x(y−η)φ_xφ_y
/// over the fluid domain of a holomorphic state; terms are the three
/// right-hand integrals.
pub fn verify_l33_state(state: &HoloState, w: TestWeight) -> IdentityCheck {
    let grid = state.grid();
    let hc = state.conformal_depth();
    let dg = DepthGrid::for_grid(hc, &grid);
    let bulk = bulk_fields(state, &dg);
    let eta = surface_from_map(&state.map());
    let eta_x = derivative(&eta);
    let da = grid.spacing();
    let (mut lhs, mut t2, mut t3, mut size) = (0.0, 0.0, 0.0, 0.0);
    for (j, &wb) in dg.weights().iter().enumerate() {
        let xs: Vec<f64> = bulk.z[j].iter().map(|z| z.re).collect();
        let (wv, wx) = w.sample(grid, &xs);
        let (e, ex) = (eval_re(&eta, &xs), eval_re(&eta_x, &xs));
        for m in 0..grid.n() {
            let dv = wb * da * bulk.jac[j][m];
            let r2 = bulk.r[j][m] * bulk.r[j][m];
            let pxy = -0.5 * r2.im;
            lhs += dv * wv[m] * r2.re;
            size += dv * wv[m].abs() * bulk.r[j][m].norm_sqr();
            t2 += dv * wv[m] * ex[m] * pxy;
            t3 += dv * wx[m] * (bulk.z[j][m].im - e[m]) * pxy;
        }
    }
    let t1 = match (hc, state.depth) {
        (Depth::Finite(h), Depth::Finite(big_h)) => {
            let sampler = PointSampler::new(state);
            let pts: Vec<_> = grid.nodes().iter().map(|&a| sampler.at_strip(a, -h)).collect();
            let xs: Vec<f64> = pts.iter().map(|p| p.z.re).collect();
            let (wv, _) = w.sample(grid, &xs);
            let e = eval_re(&eta, &xs);
            pts.iter().enumerate().map(|(m, p)| da * p.zp.re * wv[m] * (big_h + e[m]) * p.r.re * p.r.re).sum()
        }
        _ => 0.0,
    };
    let terms = vec![t1, -2.0 * t2, 2.0 * t3];
    let rhs = terms.iter().sum();
    IdentityCheck::new(lhs, terms, rhs, size)
}

/// [`verify_l33_state`] for Eulerian data (η, ψ).
pub fn verify_l33(eta: &SpectralField, psi: &SpectralField, depth: Depth, w: TestWeight) -> Result<IdentityCheck> {
    Ok(verify_l33_state(&to_holomorphic(eta, psi, depth, 1.0, 1e-14)?, w))
}

/// ∫ μ N(η)ψ dx = −∬ μ_x φ_xφ_y + ½∫ μ φ_x²|_{y=−h} with
/// N(η)ψ = ½ψ_x² − ½(G(η)ψ + η_xψ_x)²/(1+η_x²). The left side is computed on
/// the Eulerian grid, the right side in the fluid domain.
pub fn verify_c6(mu: TestWeight, eta: &SpectralField, psi: &SpectralField, depth: Depth) -> Result<IdentityCheck> {
    let grid = eta.grid();
    let gpsi = dtn_nonlinear(eta, psi, depth, 1e-14)?.real_samples();
    let ex = derivative(eta).real_samples();
    let px = derivative(psi).real_samples();
    let (mv, _) = mu.sample(grid, &grid.nodes());
    let dx = grid.spacing();
    let lhs: f64 = (0..grid.n())
        .map(|m| {
            let a = gpsi[m] + ex[m] * px[m];
            dx * mv[m] * (0.5 * px[m] * px[m] - 0.5 * a * a / (1.0 + ex[m] * ex[m]))
        })
        .sum();

    let state = to_holomorphic(eta, psi, depth, 1.0, 1e-14)?;
    let hc = state.conformal_depth();
    let dg = DepthGrid::for_grid(hc, &grid);
    let bulk = bulk_fields(&state, &dg);
    let da = grid.spacing();
    let (mut shear, mut size) = (0.0, 0.0);
    for (j, &wb) in dg.weights().iter().enumerate() {
        let xs: Vec<f64> = bulk.z[j].iter().map(|z| z.re).collect();
        let (_, mx) = mu.sample(grid, &xs);
        for m in 0..grid.n() {
            let r2 = bulk.r[j][m] * bulk.r[j][m];
            shear += wb * da * bulk.jac[j][m] * mx[m] * (-0.5 * r2.im);
            size += wb * da * bulk.jac[j][m] * mx[m].abs() * bulk.r[j][m].norm_sqr();
        }
    }
    let bottom = match hc {
        Depth::Finite(h) => {
            let sampler = PointSampler::new(&state);
            let pts: Vec<_> = grid.nodes().iter().map(|&a| sampler.at_strip(a, -h)).collect();
            let xs: Vec<f64> = pts.iter().map(|p| p.z.re).collect();
            let (mv, _) = mu.sample(grid, &xs);
            pts.iter().enumerate().map(|(m, p)| da * p.zp.re * mv[m] * p.r.re * p.r.re).sum::<f64>()
        }
        Depth::Infinite => 0.0,
    };
    let terms = vec![-shear, 0.5 * bottom];
    let rhs = terms.iter().sum();
    let surf: f64 = (0..grid.n()).map(|m| dx * mv[m].abs() * px[m] * px[m]).sum();
    Ok(IdentityCheck::new(lhs, terms, rhs, size + surf))
}

/// Convergence verdict for a pair of errors at grid sizes N and 2N.
pub fn refines(err_coarse: f64, err_fine: f64) -> bool {
    err_fine <= err_coarse / 4.0 || err_fine < 1e-12
}

/// Cubic endpoint correction ∬ m_x(α − α₀ + x₀) Im R · H_D(Im W · Re W_α) dα dβ
/// on the conformal strip, and its size relative to ‖·‖²_{E^{1/4}}.
#[derive(Debug, Clone, Serialize)]
pub struct NormalFormReport {
    pub value: f64,
    pub e14: f64,
    pub ratio: f64,
}

pub fn normal_form_density(state: &HoloState, weight: &Weight, alpha0: f64) -> Result<NormalFormReport> {
    let grid = state.grid();
    let h = state.conformal_depth();
    let dg = DepthGrid::for_grid(h, &grid);
    let prod: Vec<f64> = state.w.imag_samples().iter().zip(derivative(&state.w).real_samples()).map(|(a, b)| a * b).collect();
    let hd = extend_dirichlet(&SpectralField::from_real(grid, &prod)?, &dg);
    let wp = extend_holomorphic(&derivative(&state.w), &dg);
    let qp = extend_holomorphic(&derivative(&state.q), &dg);
    let shifted: Vec<f64> = grid.nodes().iter().map(|a| a - alpha0 + weight.center()).collect();
    let mx = eval_re(&weight.mx_field(&grid), &shifted);
    let da = grid.spacing();
    let mut value = 0.0;
    for (j, &wb) in dg.weights().iter().enumerate() {
        let (w, q, d) = (wp.values(j), qp.values(j), hd.layer(j).real_samples());
        for m in 0..grid.n() {
            let r = q[m] / (1.0 + w[m]);
            value += wb * da * mx[m] * r.im * d[m];
        }
    }
    let e14 = super::energy::e14_state(state)?;
    Ok(NormalFormReport { value, e14, ratio: if e14 > 0.0 { value.abs() / (e14 * e14) } else { 0.0 } })
}

/// Hypotheses (i)–(iii) of the virial inequality over all snapshots.
#[derive(Debug, Clone, Serialize)]
pub struct VirialHypotheses {
    /// min η + H/2 ≥ 0.
    pub depth_margin: f64,
    /// max |η_x|, at most 1/3.
    pub slope: f64,
    /// εr(H + max|η|), at most 1/42.
    pub weight_scale: f64,
    pub hold: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VirialReport {
    pub hypotheses: VirialHypotheses,
    /// ∫₀ᵀ (g∫m_xη² + ∬m_x|∇φ|²) dt.
    pub lhs: f64,
    /// ∫₀ᵀ ∬ m_x |∇φ|² dt.
    pub kinetic: f64,
    /// ∫mI_k|₀ᵀ on the cell.
    pub delta_raw: [f64; 2],
    /// ∫mI_k|₀ᵀ + M∫₀ᵀ S_k(x_s) dt, the value the line would give.
    pub delta: [f64; 2],
    /// 14Δ₁ + 2Δ₂.
    pub rhs: f64,
    pub rhs_raw: f64,
    /// 7Δ₁.
    pub kinetic_rhs: f64,
    pub min_pressure: f64,
    /// None when a hypothesis fails.
    pub inequality_holds: Option<bool>,
    pub kinetic_holds: Option<bool>,
    pub pressure_ok: bool,
}

/// Evaluates both sides of the virial inequality from a moment series of a
/// rational weight.
pub fn virial_check(series: &[SnapshotMoments], weight: &Weight, g: f64, depth: Depth) -> VirialReport {
    let t: Vec<f64> = series.iter().map(|s| s.t).collect();
    let big_h = depth.value().unwrap_or(f64::INFINITY);
    let eta_min = series.iter().map(|s| s.eta_min).fold(f64::INFINITY, f64::min);
    let eta_sup = series.iter().map(|s| s.eta_max.max(-s.eta_min)).fold(0.0, f64::max);
    let slope = series.iter().map(|s| s.slope_max).fold(0.0, f64::max);
    let weight_scale = weight.eps_r() * (big_h + eta_sup);
    let depth_margin = eta_min + 0.5 * big_h;
    let hypotheses = VirialHypotheses {
        depth_margin,
        slope,
        weight_scale,
        hold: depth_margin >= 0.0 && slope <= 1.0 / 3.0 && weight_scale <= 1.0 / 42.0,
    };
    let pot: Vec<f64> = series.iter().map(|s| g * s.potential + s.kinetic).collect();
    let kin: Vec<f64> = series.iter().map(|s| s.kinetic).collect();
    let lhs = time::integral(&t, &pot);
    let kinetic = time::integral(&t, &kin);
    let mm = weight.total();
    let mut delta_raw = [0.0; 2];
    let mut delta = [0.0; 2];
    for k in 0..2 {
        let first = series.first().map(|s| s.weighted[k]).unwrap_or(0.0);
        let last = series.last().map(|s| s.weighted[k]).unwrap_or(0.0);
        let seam: Vec<f64> = series.iter().map(|s| s.seam_flux[k]).collect();
        delta_raw[k] = last - first;
        delta[k] = delta_raw[k] + mm * time::integral(&t, &seam);
    }
    let rhs = 14.0 * delta[0] + 2.0 * delta[1];
    let kinetic_rhs = 7.0 * delta[0];
    let min_pressure = series.iter().map(|s| s.min_pressure).fold(f64::INFINITY, f64::min);
    let ok = hypotheses.hold;
    let slack = |a: f64, b: f64| a <= b * (1.0 + 1e-6) + 1e-15;
    VirialReport {
        hypotheses,
        lhs,
        kinetic,
        delta_raw,
        delta,
        rhs,
        rhs_raw: 14.0 * delta_raw[0] + 2.0 * delta_raw[1],
        kinetic_rhs,
        min_pressure,
        inequality_holds: ok.then(|| slack(lhs, rhs)),
        kinetic_holds: ok.then(|| slack(kinetic, kinetic_rhs)),
        pressure_ok: min_pressure >= -1e-8,
    }
}

/// Weighted momenta and their predicted rates along a linear run.
#[derive(Debug, Clone, Serialize)]
pub struct LinearIdentityReport {
    pub sigma: f64,
    pub times: Vec<f64>,
    /// ∫ m I₂ dx and ∫ m I₃ dx.
    pub w2: Vec<f64>,
    pub w3: Vec<f64>,
    /// (g/2)∫μη² + ½∬μ(φ_x² − φ_y²), μ = m_x − Mδ_{x_s}.
    pub rate2: Vec<f64>,
    /// ½∬μ|∇φ|² + gQₘ(η).
    pub rate3: Vec<f64>,
    /// |ΔW − ∫rate dt| / max(|ΔW|, |∫rate dt|).
    pub residual2: f64,
    pub residual3: f64,
    /// σ-combination 𝓘(T) − 𝓘(0).
    pub delta_functional: f64,
    /// ∫₀ᵀ ((1−σ)/2 ∬μ|∇φ|² + σ/2 ∬μ(φ_x²−φ_y²)) dt.
    pub le_psi: f64,
    /// ∫₀ᵀ (σg/2 ∫μη² + (1−σ)gQₘ(η)) dt.
    pub le_eta: f64,
    /// ∫₀ᵀ (g∫m_xη² + ∬m_x|∇φ|²) dt.
    pub le_weight: f64,
    /// sup over window centers of the default local energy.
    pub le_sup: f64,
    /// (le_weight − Δ𝓘)/le_sup.
    pub measured_c: f64,
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s > 0.0 {
        (a - b).abs() / s
    } else {
        0.0
    }
}

/// ∫μ f = ∫ m_x f − M f(x_s).
fn mu_integral(weight: &Weight, f: &SpectralField) -> f64 {
    weight.integrate_mx(f).re - weight.total() * f.eval(weight.seam()).re
}

pub fn linear_identities(traj: &LinearTrajectory, weight: &Weight, sigma: f64) -> Result<LinearIdentityReport> {
    let times = traj.times();
    let (mut w2, mut w3, mut rate2, mut rate3) = (vec![], vec![], vec![], vec![]);
    let (mut psi_part, mut eta_part, mut win) = (vec![], vec![], vec![]);
    for s in &traj.states {
        let eta = s.eta.resample(2 * s.eta.grid().n())?;
        let psi = s.psi.resample(2 * s.psi.grid().n())?;
        let grid = eta.grid();
        let dg = DepthGrid::for_grid(s.depth, &grid);
        let px = extend_neumann(&derivative(&psi), &dg);
        let py = extend_neumann_dbeta(&psi, &dg);
        let th = extend_dirichlet(&eta, &dg);
        let n = grid.n();
        let (mut a3, mut shear, mut grad) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for (j, &w) in dg.weights().iter().enumerate() {
            let (x, y, t) = (px.layer(j).real_samples(), py.layer(j).real_samples(), th.layer(j).real_samples());
            for m in 0..n {
                a3[m] -= w * t[m] * y[m];
                shear[m] += w * (x[m] * x[m] - y[m] * y[m]);
                grad[m] += w * (x[m] * x[m] + y[m] * y[m]);
            }
        }
        let field = |v: &[f64]| SpectralField::from_real(grid, v);
        let i2 = eta.mul(&derivative(&psi));
        let v2 = weight.integrate_m(&i2).re;
        let v3 = v2 - mu_integral(weight, &field(&a3)?);
        let eta2 = eta.mul(&eta);
        let pot = mu_integral(weight, &eta2);
        let sh = mu_integral(weight, &field(&shear)?);
        let gr = mu_integral(weight, &field(&grad)?);
        let qm = qm_symbol(&s.eta, weight, s.depth)?;
        w2.push(v2);
        w3.push(v3);
        rate2.push(0.5 * s.g * pot + 0.5 * sh);
        rate3.push(0.5 * gr + s.g * qm);
        psi_part.push(0.5 * (1.0 - sigma) * gr + 0.5 * sigma * sh);
        eta_part.push(0.5 * sigma * s.g * pot + (1.0 - sigma) * s.g * qm);
        let (p, k) = weighted_energy(&energy_density_flat(s), weight);
        win.push(p + k);
    }
    let int = |v: &[f64]| time::integral(&times, v);
    let d2 = w2.last().unwrap() - w2[0];
    let d3 = w3.last().unwrap() - w3[0];
    let delta_functional = sigma * d2 + (1.0 - sigma) * d3;
    let le_sup = local_energy_linear(traj, DEFAULT_WINDOW)?.sup;
    let le_weight = int(&win);
    Ok(LinearIdentityReport {
        sigma,
        residual2: relative_gap(d2, int(&rate2)),
        residual3: relative_gap(d3, int(&rate3)),
        times: times.clone(),
        w2,
        w3,
        rate2,
        rate3,
        delta_functional,
        le_psi: int(&psi_part),
        le_eta: int(&eta_part),
        le_weight,
        le_sup,
        measured_c: if le_sup > 0.0 { (le_weight - delta_functional) / le_sup } else { 0.0 },
    })
}
