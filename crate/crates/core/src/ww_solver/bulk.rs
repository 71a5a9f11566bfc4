use super::state::HoloState;
use crate::conformal_map::{eulerian_coefficients, locate_with, to_holomorphic};
use crate::error::Result;
use crate::spectral_ops::{dealias, derivative, holomorphic_from_real, tilbert_inv_unchecked, Depth, SpectralField};
use crate::strip_harmonics::{extend_dirichlet, extend_holomorphic, DepthGrid, HoloEvaluator};
use num_complex::Complex64;

/// Top trace of G = Q_t + F Q_α: holomorphic, real on the bottom, with
/// Re G = −g Im W − ½|Q_α|²/J.
pub fn g_trace(s: &HoloState) -> SpectralField {
    let grid = s.grid();
    let wa = derivative(&s.w).samples();
    let qa = derivative(&s.q).samples();
    let eta = s.eta_alpha();
    let re_g: Vec<f64> = eta
        .iter()
        .zip(&qa)
        .zip(&wa)
        .map(|((e, q), w)| -s.g * e - 0.5 * q.norm_sqr() / (1.0 + w).norm_sqr())
        .collect();
    holomorphic_from_real(&dealias(&SpectralField::from_real(grid, &re_g).expect("grid sized")), s.conformal_depth())
}

/// Surface quantities on the α grid, Eulerian derivatives by the chain rule.
#[derive(Debug, Clone)]
pub struct SurfaceTerms {
    /// X(α).
    pub x: Vec<f64>,
    /// X_α = 1 + Re W_α.
    pub x_alpha: Vec<f64>,
    /// η∘X.
    pub eta: Vec<f64>,
    /// η_x∘X = Im W_α / (1 + Re W_α).
    pub eta_x: Vec<f64>,
    /// ψ∘X = Re Q.
    pub psi: Vec<f64>,
    /// ψ_x∘X = Re Q_α / X_α.
    pub psi_x: Vec<f64>,
    /// φ_x, φ_y on the surface: Re R, −Im R.
    pub phi_x: Vec<f64>,
    pub phi_y: Vec<f64>,
    /// ψ_t = −gη − (½φ_x² − ½φ_y² + η_x φ_x φ_y).
    pub psi_t: Vec<f64>,
    /// η_t = G(η)ψ per unit x: −Im Q_α / X_α.
    pub eta_t: Vec<f64>,
    /// ∇θ·∇φ on the surface: Im(Yθ R̄).
    pub grad_theta_phi: Vec<f64>,
}

pub fn surface_terms(s: &HoloState) -> SurfaceTerms {
    let h = s.conformal_depth();
    let x: Vec<f64> = s.grid().nodes().iter().zip(s.w.real_samples()).map(|(a, r)| a + r).collect();
    let wa = derivative(&s.w).samples();
    let qa = derivative(&s.q).samples();
    let eta = s.eta_alpha();
    let psi = s.q.real_samples();
    let theta_shift = match h {
        Depth::Finite(hh) => s.shift / hh,
        Depth::Infinite => 0.0,
    };
    let n = wa.len();
    let mut out = SurfaceTerms {
        x,
        x_alpha: Vec::with_capacity(n),
        eta: eta.clone(),
        eta_x: Vec::with_capacity(n),
        psi,
        psi_x: Vec::with_capacity(n),
        phi_x: Vec::with_capacity(n),
        phi_y: Vec::with_capacity(n),
        psi_t: Vec::with_capacity(n),
        eta_t: Vec::with_capacity(n),
        grad_theta_phi: Vec::with_capacity(n),
    };
    for m in 0..n {
        let zp = 1.0 + wa[m];
        let r = qa[m] / zp;
        let yt = (wa[m] + theta_shift) / zp;
        let xa = zp.re;
        let ex = wa[m].im / xa;
        let (px, py) = (r.re, -r.im);
        out.x_alpha.push(xa);
        out.eta_x.push(ex);
        out.psi_x.push(qa[m].re / xa);
        out.phi_x.push(px);
        out.phi_y.push(py);
        out.psi_t.push(-s.g * eta[m] - (0.5 * px * px - 0.5 * py * py + ex * px * py));
        out.eta_t.push(-qa[m].im / xa);
        out.grad_theta_phi.push((yt * r.conj()).im);
    }
    out
}

/// Bulk fields sampled on the strip tensor grid (α_m, β_j), rows by β.
#[derive(Debug, Clone)]
pub struct BulkFields {
    pub depth_grid: DepthGrid,
    /// Z(α + iβ) = x + iy.
    pub z: Vec<Vec<Complex64>>,
    /// |Z'|², the Jacobian of the map.
    pub jac: Vec<Vec<f64>>,
    /// R = φ_x − iφ_y.
    pub r: Vec<Vec<Complex64>>,
    /// Yθ = θ_y + iθ_x.
    pub y_theta: Vec<Vec<Complex64>>,
    pub phi: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
    pub phi_t: Vec<Vec<f64>>,
    pub theta_t: Vec<Vec<f64>>,
    pub pressure: Vec<Vec<f64>>,
}

/// Evaluates φ, q, θ, φ_t, θ_t and the pressure on the depth grid of the
/// conformal strip.
pub fn bulk_fields(s: &HoloState, dg: &DepthGrid) -> BulkFields {
    let grid = s.grid();
    let h = s.conformal_depth();
    let alpha = grid.nodes();
    let w = extend_holomorphic(&s.w, dg).sample_matrix();
    let wp = extend_holomorphic(&derivative(&s.w), dg).sample_matrix();
    let q = extend_holomorphic(&s.q, dg).sample_matrix();
    let qp = extend_holomorphic(&derivative(&s.q), dg).sample_matrix();
    let gt = extend_holomorphic(&g_trace(s), dg).sample_matrix();
    let top = surface_terms(s);
    let correction = extend_dirichlet(&SpectralField::from_real(grid, &top.grad_theta_phi).expect("grid sized"), dg).sample_matrix();
    let (theta_slope, hh) = match h {
        Depth::Finite(hh) => (s.shift / hh, hh),
        Depth::Infinite => (0.0, f64::INFINITY),
    };
    let nb = dg.len();
    let mut out = BulkFields {
        depth_grid: dg.clone(),
        z: Vec::with_capacity(nb),
        jac: Vec::with_capacity(nb),
        r: Vec::with_capacity(nb),
        y_theta: Vec::with_capacity(nb),
        phi: Vec::with_capacity(nb),
        q: Vec::with_capacity(nb),
        theta: Vec::with_capacity(nb),
        phi_t: Vec::with_capacity(nb),
        theta_t: Vec::with_capacity(nb),
        pressure: Vec::with_capacity(nb),
    };
    for (j, &b) in dg.nodes().iter().enumerate() {
        let mut zr = Vec::with_capacity(alpha.len());
        let mut jr = Vec::with_capacity(alpha.len());
        let mut rr = Vec::with_capacity(alpha.len());
        let mut yr = Vec::with_capacity(alpha.len());
        let mut phir = Vec::with_capacity(alpha.len());
        let mut qr = Vec::with_capacity(alpha.len());
        let mut thr = Vec::with_capacity(alpha.len());
        let mut ptr = Vec::with_capacity(alpha.len());
        let mut ttr = Vec::with_capacity(alpha.len());
        let mut pr = Vec::with_capacity(alpha.len());
        for (m, &a) in alpha.iter().enumerate() {
            let zeta = Complex64::new(a, b);
            let z = zeta + w[j][m] + Complex64::new(0.0, s.shift);
            let zp = 1.0 + wp[j][m];
            let r = qp[j][m] / zp;
            let yt = (wp[j][m] + theta_slope) / zp;
            let theta = if hh.is_finite() { w[j][m].im + s.shift * (b + hh) / hh } else { w[j][m].im + s.shift };
            let phi_t = gt[j][m].re;
            zr.push(z);
            jr.push(zp.norm_sqr());
            rr.push(r);
            yr.push(yt);
            phir.push(q[j][m].re);
            qr.push(q[j][m].im);
            thr.push(theta);
            ptr.push(phi_t);
            ttr.push(-r.im - correction[j][m].re);
            pr.push(-(phi_t + 0.5 * r.norm_sqr() + s.g * z.im));
        }
        out.z.push(zr);
        out.jac.push(jr);
        out.r.push(rr);
        out.y_theta.push(yr);
        out.phi.push(phir);
        out.q.push(qr);
        out.theta.push(thr);
        out.phi_t.push(ptr);
        out.theta_t.push(ttr);
        out.pressure.push(pr);
    }
    out
}

/// Fields at a single Eulerian point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointFields {
    pub alpha: f64,
    pub beta: f64,
    /// Z and Z' at the point.
    pub z: Complex64,
    pub zp: Complex64,
    /// φ_x − iφ_y.
    pub r: Complex64,
    /// θ_y + iθ_x.
    pub y_theta: Complex64,
    pub phi: f64,
    pub theta: f64,
    pub phi_t: f64,
    pub theta_t: f64,
    pub pressure: f64,
}

/// Pointwise evaluation at Eulerian points through [`locate_with`].
pub struct PointSampler<'a> {
    state: &'a HoloState,
    map: crate::conformal_map::ConformalMap,
    w: HoloEvaluator,
    q: HoloEvaluator,
    g: HoloEvaluator,
    /// Dirichlet extension of the mean-free part of ∇θ·∇φ on the top, as
    /// the imaginary part of a holomorphic function, and its mean.
    corr: HoloEvaluator,
    corr_mean: f64,
}

impl<'a> PointSampler<'a> {
    pub fn new(state: &'a HoloState) -> Self {
        let h = state.conformal_depth();
        let map = state.map();
        let top = SpectralField::from_real(state.grid(), &surface_terms(state).grad_theta_phi).expect("grid sized");
        let corr_mean = top.mean().re;
        let im = top.without_mean();
        let corr = SpectralField::complex_from_parts(&tilbert_inv_unchecked(&im, h).scale(-1.0), &im);
        Self {
            state,
            w: map.evaluator(),
            q: HoloEvaluator::new(&state.q, h),
            g: HoloEvaluator::new(&g_trace(state), h),
            corr: HoloEvaluator::new(&corr, h),
            corr_mean,
            map,
        }
    }

    pub fn map(&self) -> &crate::conformal_map::ConformalMap {
        &self.map
    }

    pub fn at(&self, x: f64, y: f64, guess: Option<(f64, f64)>) -> Result<PointFields> {
        let (a, b) = locate_with(&self.w, &self.map, x, y, guess)?;
        Ok(self.at_strip(a, b))
    }

    pub fn at_strip(&self, a: f64, b: f64) -> PointFields {
        let s = self.state;
        let (w, wp) = self.w.eval(a, b);
        let (q, qp) = self.q.eval(a, b);
        let (gv, _) = self.g.eval(a, b);
        let (cv, _) = self.corr.eval(a, b);
        let zp = 1.0 + wp;
        let r = qp / zp;
        let (slope, level) = match s.conformal_depth() {
            Depth::Finite(hh) => (s.shift / hh, (b + hh) / hh),
            Depth::Infinite => (0.0, 1.0),
        };
        let y = b + s.shift + w.im;
        PointFields {
            alpha: a,
            beta: b,
            z: Complex64::new(a + w.re, y),
            zp,
            r,
            y_theta: (wp + slope) / zp,
            phi: q.re,
            theta: w.im + s.shift * level,
            phi_t: gv.re,
            theta_t: -r.im - (cv.im + self.corr_mean * level),
            pressure: -(gv.re + 0.5 * r.norm_sqr() + s.g * y),
        }
    }
}

/// Pressure at an Eulerian point of the fluid.
pub fn pressure_at(s: &HoloState, x: f64, y: f64) -> Result<f64> {
    Ok(PointSampler::new(s).at(x, y, None)?.pressure)
}

/// Dirichlet-to-Neumann operator of the fluid domain, G(η)ψ = √(1+η_x²)∂_nφ,
/// on the Eulerian grid of η.
pub fn dtn_nonlinear(eta: &SpectralField, psi: &SpectralField, depth: Depth, tol: f64) -> Result<SpectralField> {
    let s = to_holomorphic(eta, psi, depth, 1.0, tol)?;
    let grid = s.grid();
    let x: Vec<f64> = grid.nodes().iter().zip(s.w.real_samples()).map(|(a, r)| a + r).collect();
    let flux: Vec<f64> = derivative(&s.q).imag_samples().iter().map(|v| -v).collect();
    let ones = vec![1.0; grid.n()];
    Ok(eulerian_coefficients(grid, &x, &ones, &flux))
}
