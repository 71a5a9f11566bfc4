use crate::error::Result;
use crate::spectral_ops::{Depth, Grid, SpectralField};
use crate::strip_harmonics::dtn_neumann;
use num_complex::Complex64;

/// Linearized Eulerian state (η, ψ).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearState {
    pub eta: SpectralField,
    pub psi: SpectralField,
    pub t: f64,
    pub g: f64,
    pub depth: Depth,
}

impl LinearState {
    /// Right-moving eigenmode η = a cos(kx), ψ = (aω/(ξ tanh hξ)) sin(kx).
    pub fn traveling_mode(grid: Grid, k: i64, a: f64, g: f64, depth: Depth) -> Self {
        let xi = grid.k0() * k as f64;
        let omega = depth.omega(g, xi);
        let c = a * omega / depth.dtn_symbol(xi);
        Self {
            eta: SpectralField::mode(grid, k, a, 0.0),
            psi: SpectralField::mode(grid, k, 0.0, c),
            t: 0.0,
            g,
            depth,
        }
    }
}

/// η_t = 𝒯_h∂_x ψ, ψ_t = −gη.
pub fn linear_rhs(s: &LinearState) -> (SpectralField, SpectralField) {
    (dtn_neumann(&s.psi, s.depth), s.eta.scale(-s.g))
}

pub fn linear_step_rk4(s: &LinearState, dt: f64) -> LinearState {
    let at = |base: &LinearState, d: &(SpectralField, SpectralField), c: f64| LinearState {
        eta: base.eta.add(&d.0.scale(c)),
        psi: base.psi.add(&d.1.scale(c)),
        t: base.t + c,
        ..base.clone()
    };
    let k1 = linear_rhs(s);
    let k2 = linear_rhs(&at(s, &k1, 0.5 * dt));
    let k3 = linear_rhs(&at(s, &k2, 0.5 * dt));
    let k4 = linear_rhs(&at(s, &k3, dt));
    let comb = |a: &SpectralField, b: &SpectralField, c: &SpectralField, d: &SpectralField| {
        a.add(&b.scale(2.0)).add(&c.scale(2.0)).add(d).scale(dt / 6.0)
    };
    LinearState {
        eta: s.eta.add(&comb(&k1.0, &k2.0, &k3.0, &k4.0)),
        psi: s.psi.add(&comb(&k1.1, &k2.1, &k3.1, &k4.1)),
        t: s.t + dt,
        ..s.clone()
    }
}

/// Exact propagator of the linear system, mode by mode.
pub fn linear_exact(s: &LinearState, t: f64) -> LinearState {
    let d = s.depth;
    let g = s.g;
    let tau = t - s.t;
    let eta = SpectralField::from_coeffs(
        s.eta.grid(),
        s.eta
            .coeffs()
            .iter()
            .zip(s.psi.coeffs())
            .enumerate()
            .map(|(j, (e, p))| {
                let xi = s.eta.grid().wavenumber(j);
                let w = d.omega(g, xi);
                if w == 0.0 {
                    *e
                } else {
                    e * (w * tau).cos() + p * (d.dtn_symbol(xi) * (w * tau).sin() / w)
                }
            })
            .collect(),
        true,
    );
    let psi = SpectralField::from_coeffs(
        s.psi.grid(),
        s.eta
            .coeffs()
            .iter()
            .zip(s.psi.coeffs())
            .enumerate()
            .map(|(j, (e, p))| {
                let xi = s.eta.grid().wavenumber(j);
                let w = d.omega(g, xi);
                if w == 0.0 {
                    p - e * (g * tau)
                } else {
                    p * (w * tau).cos() - e * (g * (w * tau).sin() / w)
                }
            })
            .collect(),
        true,
    );
    LinearState { eta, psi, t, g, depth: d }
}

/// (g/2)‖η‖² + ½⟨𝒯_h∂ψ, ψ⟩.
pub fn linear_energy(s: &LinearState) -> f64 {
    0.5 * s.g * s.eta.inner(&s.eta) + 0.5 * dtn_neumann(&s.psi, s.depth).inner(&s.psi)
}

/// Snapshots of a linear run.
#[derive(Debug, Clone)]
pub struct LinearTrajectory {
    pub states: Vec<LinearState>,
    pub dt: f64,
}

impl LinearTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }
}

/// RK4 run to `t_end` with about `dt`, keeping every `cadence`-th step.
pub fn linear_run(s0: &LinearState, dt: f64, t_end: f64, cadence: usize) -> LinearTrajectory {
    let steps = ((t_end - s0.t) / dt).ceil().max(1.0) as usize;
    let dt = (t_end - s0.t) / steps as f64;
    let mut states = vec![s0.clone()];
    let mut s = s0.clone();
    for i in 1..=steps {
        s = linear_step_rk4(&s, dt);
        if i % cadence.max(1) == 0 || i == steps {
            states.push(s.clone());
        }
    }
    LinearTrajectory { states, dt }
}

/// Frequency of mode k measured from an RK4 run of a traveling eigenmode by
/// unwrapping the phase of its η coefficient. Returns (measured, exact).
pub fn measure_dispersion(grid: Grid, k: i64, g: f64, depth: Depth, dt: f64, t_end: f64) -> Result<(f64, f64)> {
    let xi = grid.k0() * k as f64;
    let exact = depth.omega(g, xi);
    let s0 = LinearState::traveling_mode(grid, k, 1.0, g, depth);
    let slot = grid.slot(k).expect("mode on grid");
    let steps = (t_end / dt).ceil().max(1.0) as usize;
    let dt = t_end / steps as f64;
    let mut s = s0.clone();
    let mut phase = 0.0;
    let mut prev: Complex64 = s.eta.coeffs()[slot];
    for _ in 0..steps {
        s = linear_step_rk4(&s, dt);
        let c = s.eta.coeffs()[slot];
        phase += (c / prev).arg();
        prev = c;
    }
    Ok((-phase / t_end, exact))
}
