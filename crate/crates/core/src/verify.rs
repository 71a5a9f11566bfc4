//! Acceptance suites, shared by the `acceptance` test target and the `verify`
//! subcommand. Each suite returns one verdict per checked quantity.

use crate::conformal_map::to_holomorphic;
use crate::error::{Error, Result};
use crate::kernel_analysis::{
    diagonal_pv_asymptotic, diagonal_pv_integral, directional_signs, kernel_mass, kernel_table, positivity_scan, split_mass,
    symbol_b, KernelTable, KernelTableParams,
};
use crate::morawetz_diagnostics::{
    conservation_residual, linear_identities, local_energy_linear, make_weight, moment_series, qm_direct, qm_symbol, refines,
    verify_c6, verify_l33, virial_check, Density, TestWeight, WeightKind, DEFAULT_WINDOW,
};
use crate::spectral_ops::{holomorphic_project, lp_blocks, tilbert, Depth, Grid, SpectralField};
use crate::strip_harmonics::{
    extend_dirichlet, extend_dirichlet_dbeta, extend_neumann, extend_neumann_dbeta, harmonic_conjugate, DepthGrid,
};
use crate::ww_solver::{energy, linear_run, measure_dispersion, momentum, run, DtPolicy, LinearState, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

/// One checked quantity against its tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    /// Passes when `value < tolerance`; NaN fails.
    pub fn below(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value < tolerance, detail: String::new() }
    }

    /// Passes when `value` lies in [lo, hi]; `tolerance` records the half width.
    pub fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance: 0.5 * (hi - lo),
            pass: value >= lo && value <= hi,
            detail: format!("in [{lo}, {hi}]"),
        }
    }

    pub fn flag(name: &str, pass: bool, value: f64) -> Self {
        Self { name: name.into(), value, tolerance: 0.0, pass, detail: String::new() }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        let d = detail.into();
        self.detail = if self.detail.is_empty() { d } else { format!("{}; {d}", self.detail) };
        self
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: value {:.6e}, tolerance {:.3e}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.value, self.tolerance)?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Dispersion,
    Conservation,
    Qm,
    Kernel,
    Virial,
    Identities,
    LinearMorawetz,
    Operators,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Dispersion,
        Suite::Conservation,
        Suite::Qm,
        Suite::Kernel,
        Suite::Virial,
        Suite::Identities,
        Suite::LinearMorawetz,
        Suite::Operators,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Suite::Dispersion => "dispersion",
            Suite::Conservation => "conservation",
            Suite::Qm => "qm",
            Suite::Kernel => "kernel",
            Suite::Virial => "virial",
            Suite::Identities => "identities",
            Suite::LinearMorawetz => "linear-morawetz",
            Suite::Operators => "operators",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.tag() == s).ok_or_else(|| Error::UnknownTag(s.into()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub verdicts: Vec<Verdict>,
    /// Observations reported alongside the verdicts; they do not gate `pass`.
    pub notes: Vec<String>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut verdicts = match suite {
        Suite::Dispersion => dispersion()?,
        Suite::Conservation => conservation()?,
        Suite::Qm => qm(seed)?,
        Suite::Kernel => kernel(&mut notes)?,
        Suite::Virial => virial(&mut notes)?,
        Suite::Identities => identities()?,
        Suite::LinearMorawetz => linear_morawetz(&mut notes)?,
        Suite::Operators => operators(seed)?,
    };
    let seconds = start.elapsed().as_secs_f64();
    let budget = match suite {
        Suite::Dispersion => Some(10.0),
        Suite::Conservation => Some(60.0),
        Suite::Qm => Some(30.0),
        Suite::Kernel => Some(300.0),
        _ => None,
    };
    if let Some(b) = budget {
        verdicts.push(Verdict::below("runtime seconds", seconds, b));
    }
    Ok(SuiteReport { suite, verdicts, notes, seconds })
}

fn random_field(g: Grid, rng: &mut ChaCha8Rng, kmax: i64, mean: bool) -> SpectralField {
    let c = if mean { rng.random_range(-1.0..1.0) } else { 0.0 };
    let mut acc = SpectralField::constant(g, c);
    for k in 1..=kmax {
        let a: f64 = rng.random_range(-1.0..1.0);
        let b: f64 = rng.random_range(-1.0..1.0);
        let d = (k * k) as f64;
        acc = acc.add(&SpectralField::mode(g, k, a / d, b / d));
    }
    acc
}

fn dispersion() -> Result<Vec<Verdict>> {
    let grid = Grid::new(256, 2.0 * PI)?;
    let mut worst: f64 = 0.0;
    for k in 1..=8 {
        let (w, exact) = measure_dispersion(grid, k, 1.0, Depth::Finite(1.0), 0.005, 2.0 * PI)?;
        worst = worst.max(((w - exact) / exact).abs());
    }
    Ok(vec![Verdict::below("max relative frequency error, k = 1..8", worst, 1e-6)])
}

fn conservation() -> Result<Vec<Verdict>> {
    let depth = Depth::Finite(1.0);
    let grid = Grid::new(256, 2.0 * PI)?;
    let lin = LinearState::traveling_mode(grid, 1, 0.01, 1.0, depth);
    let s0 = to_holomorphic(&lin.eta, &lin.psi, depth, 1.0, 1e-15)?;
    let weight = make_weight(WeightKind::Rational { eps: 0.5, r: 1.0 }, &grid, PI)?;
    let t_end = 10.0;
    let dt = 0.02;
    let cadence = 4;
    let coarse = run(&s0, &SolverConfig { dt: DtPolicy::Fixed(dt), t_end, cadence, filter_order: None })?;
    let last = coarse.states.last().expect("nonempty");
    let (e0, m0) = (energy(&s0), momentum(&s0));
    let mut out = vec![
        Verdict::below("energy relative drift", ((energy(last) - e0) / e0).abs(), 1e-8),
        Verdict::below("momentum relative drift", ((momentum(last) - m0) / m0).abs(), 1e-8),
    ];
    let series = moment_series(&coarse, &weight)?;
    let spread = series
        .iter()
        .map(|s| (1..3).map(|k| ((s.total[k] - s.total[0]) / s.total[0]).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    out.push(Verdict::below("max |∫I_k − ∫I_1| / |∫I_1| over snapshots", spread, 1e-8));
    let r_coarse = conservation_residual(&series, Density::I2).relative;
    let fine = run(&s0, &SolverConfig { dt: DtPolicy::Fixed(0.5 * dt), t_end, cadence, filter_order: None })?;
    let r_fine = conservation_residual(&moment_series(&fine, &weight)?, Density::I2).relative;
    out.push(Verdict::below("weighted I_2 balance relative residual", r_coarse, 1e-5).with_detail(format!("dt = {dt}")));
    let order = (r_coarse / r_fine).log2();
    out.push(
        Verdict::flag("weighted I_2 balance order under dt halving", refines(r_coarse, r_fine), order)
            .with_detail(format!("{r_coarse:.3e} -> {r_fine:.3e}, need order >= 2")),
    );
    Ok(out)
}

fn qm(seed: u64) -> Result<Vec<Verdict>> {
    let grid = Grid::new(128, 20.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for depth in [Depth::Finite(1.0), Depth::Finite(4.0), Depth::Infinite] {
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let eta = random_field(grid, &mut rng, 12, true);
            let center = rng.random_range(0.0..20.0);
            let w = make_weight(WeightKind::Rational { eps: 0.5, r: 1.0 }, &grid, center)?;
            let a = qm_direct(&eta, &w, depth)?;
            let b = qm_symbol(&eta, &w, depth)?;
            let scale = match depth {
                Depth::Finite(_) => a.abs().max(b.abs()),
                // Both paths vanish here; compare against the size of ∫m_xη².
                Depth::Infinite => w.integrate_mx(&eta.mul(&eta)).re,
            };
            worst = worst.max((a - b).abs() / scale);
        }
        let name = match depth {
            Depth::Finite(h) => format!("Qm direct vs symbol, h = {h}, 20 samples"),
            Depth::Infinite => "Qm direct vs symbol, infinite depth (relative to ∫m_xη²), 20 samples".into(),
        };
        out.push(Verdict::below(&name, worst, 1e-6));
    }
    Ok(out)
}

fn kernel(notes: &mut Vec<String>) -> Result<Vec<Verdict>> {
    let table = kernel_table(&KernelTableParams::default())?;
    Ok(kernel_checks(&table, 12.0, 0.05, notes))
}

/// Kernel verdicts over a table of the reference kernel: b(0,0), the mass
/// (quadrature on [−X, X]²), positivity, the three regimes of the diagonal
/// integral and the split constant.
pub fn kernel_checks(table: &KernelTable, mass_extent: f64, split_margin: f64, notes: &mut Vec<String>) -> Vec<Verdict> {
    let mut out = vec![Verdict::flag("b(0,0) = 1/2", symbol_b(0.0, 0.0) == 0.5, symbol_b(0.0, 0.0))];
    let mass = kernel_mass(mass_extent);
    out.push(Verdict::within("kernel mass", mass.mass, 0.5 - 1e-3, 0.5 + 1e-3));
    let pos = positivity_scan(table);
    out.push(
        Verdict::flag(&format!("min K on [{}, {}]^2", table.delta_ax, table.x_max), pos.positive && table.all_finite(), pos.min)
            .with_detail(format!("at ({:.3}, {:.3})", pos.argmin.0, pos.argmin.1)),
    );
    let far: f64 = (0..=8)
        .map(|i| 6.0 + 0.25 * i as f64)
        .map(|x| (diagonal_pv_integral(x) / diagonal_pv_asymptotic(x) - 1.0).abs())
        .fold(0.0, f64::max);
    out.push(Verdict::below("max |I(x)/(-64e^{-6x}) - 1| on [6, 8]", far, 0.05));
    let near: f64 = (0..=18)
        .map(|i| 0.01 + 0.005 * i as f64)
        .map(|x| (diagonal_pv_integral(x) + 2.0 / x.tanh()).abs())
        .fold(0.0, f64::max);
    out.push(Verdict::below("sup |I(x) + 2coth x| on [0.01, 0.1]", near, 1.0));
    let mid = (0..=98).map(|i| 0.1 + 0.05 * i as f64).map(diagonal_pv_integral).fold(f64::NEG_INFINITY, f64::max);
    out.push(Verdict::below("max I(x) on [0.1, 5]", mid, 0.0));
    match split_mass(table, split_margin) {
        Ok(s) => out.push(Verdict::below("split constant c", s.c, 0.5).with_detail(format!("Gaussian width {:.3}", s.width))),
        Err(e) => out.push(Verdict::flag("split constant c", false, 0.5).with_detail(format!("{e}; the bound falls back to c = 1/2"))),
    }
    let dir = directional_signs(table);
    notes.push(format!(
        "directional derivative signs: {} antidiagonal and {} diagonal violations",
        dir.antidiagonal_violations.len(),
        dir.diagonal_violations.len()
    ));
    notes.push(format!("diagonal decay rate of ln K(x,x): {:.4} (3π/2 = {:.4})", pos.diagonal_decay_rate, 1.5 * PI));
    out
}

fn virial(notes: &mut Vec<String>) -> Result<Vec<Verdict>> {
    let depth = Depth::Finite(1.0);
    let grid = Grid::new(256, 40.0)?;
    let eta = SpectralField::from_fn(grid, |x| 0.005 * (-(x - 20.0).powi(2) / 8.0).exp() * (3.0 * x).cos());
    let s0 = to_holomorphic(&eta, &SpectralField::zeros(grid), depth, 1.0, 1e-15)?;
    let tr = run(&s0, &SolverConfig { dt: DtPolicy::Cfl(0.4), t_end: 10.0, cadence: 2, filter_order: None })?;
    let w = make_weight(WeightKind::Rational { eps: 1.0 / 84.0, r: 1.0 }, &grid, 20.0)?;
    let series = moment_series(&tr, &w)?;
    let v = virial_check(&series, &w, 1.0, depth);
    let mut out = vec![
        Verdict::flag("hypotheses (i)-(iii)", v.hypotheses.hold, v.hypotheses.weight_scale)
            .with_detail(format!("depth margin {:.3e}, slope {:.3e}", v.hypotheses.depth_margin, v.hypotheses.slope)),
        Verdict::flag("lhs <= 14 D1 + 2 D2", v.inequality_holds == Some(true), v.lhs - v.rhs)
            .with_detail(format!("lhs {:.4e}, rhs {:.4e}", v.lhs, v.rhs)),
        Verdict::flag("kinetic <= 7 D1", v.kinetic_holds == Some(true), v.kinetic - v.kinetic_rhs)
            .with_detail(format!("kinetic {:.4e}, 7 D1 {:.4e}", v.kinetic, v.kinetic_rhs)),
    ];
    let mut p = Verdict::within("min pressure", v.min_pressure, -1e-8, f64::INFINITY);
    p.tolerance = 1e-8;
    out.push(p);
    for t_cut in [1.0, 2.0, 5.0] {
        let k = series.iter().position(|s| s.t >= t_cut - 1e-12).unwrap_or(series.len() - 1);
        let short = virial_check(&series[..=k], &w, 1.0, depth);
        notes.push(format!(
            "window T = {:.2}: lhs {:.4e}, 14 D1 + 2 D2 {:.4e}, inequality {}, kinetic bound {}",
            series[k].t,
            short.lhs,
            short.rhs,
            verdict_word(short.inequality_holds),
            verdict_word(short.kinetic_holds)
        ));
    }
    Ok(out)
}

fn verdict_word(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "holds",
        Some(false) => "fails",
        None => "not applicable",
    }
}

fn identities() -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    let g = Grid::new(64, 2.0 * PI)?;
    let zero = SpectralField::zeros(g);
    let cosine = SpectralField::from_fn(g, |x| x.cos());
    let w = make_weight(WeightKind::Rational { eps: 0.5, r: 1.0 }, &g, 1.0)?;
    let mut flat: f64 = 0.0;
    for d in [Depth::Finite(1.0), Depth::Infinite] {
        for tw in [TestWeight::Constant(1.0), TestWeight::WeightDensity(&w)] {
            flat = flat.max(verify_l33(&zero, &cosine, d, tw)?.relative);
            flat = flat.max(verify_c6(tw, &zero, &cosine, d)?.relative);
        }
    }
    out.push(Verdict::below("flat strip identity residuals", flat, 1e-10));
    let errs = |n: usize| -> Result<Vec<f64>> {
        let g = Grid::new(n, 2.0 * PI)?;
        let w = make_weight(WeightKind::Rational { eps: 0.5, r: 1.0 }, &g, 1.0)?;
        let eta = SpectralField::from_fn(g, |x| 0.05 * x.cos() + 0.02 * (2.0 * x).sin());
        let psi = SpectralField::from_fn(g, |x| 0.1 * x.sin() - 0.03 * (3.0 * x).cos());
        let mut v = Vec::new();
        for d in [Depth::Finite(1.0), Depth::Infinite] {
            v.push(verify_l33(&eta, &psi, d, TestWeight::WeightDensity(&w))?.relative);
            v.push(verify_c6(TestWeight::WeightDensity(&w), &eta, &psi, d)?.relative);
        }
        Ok(v)
    };
    let (a, b) = (errs(32)?, errs(64)?);
    let worst = b.iter().cloned().fold(0.0, f64::max);
    out.push(Verdict::below("small-amplitude identity residuals, N = 64", worst, 1e-6));
    let ok = a.iter().zip(&b).all(|(c, f)| refines(*c, *f));
    out.push(Verdict::flag("identity residuals refine at order >= 2, N = 32 -> 64", ok, a.iter().cloned().fold(0.0, f64::max)));
    Ok(out)
}

fn linear_morawetz(notes: &mut Vec<String>) -> Result<Vec<Verdict>> {
    let depth = Depth::Finite(1.0);
    let g = Grid::new(128, 40.0)?;
    let w = make_weight(WeightKind::Rational { eps: 0.1, r: 1.0 }, &g, 10.0)?;
    let eta = SpectralField::from_fn(g, |x| 0.1 * (-(x - 20.0).powi(2) / 4.0).exp() * (3.0 * (x - 20.0)).cos());
    let s0 = LinearState { eta, psi: SpectralField::zeros(g), t: 0.0, g: 1.0, depth };
    let r = linear_identities(&linear_run(&s0, 0.01, 5.0, 1), &w, 0.49)?;
    let mut out = vec![
        Verdict::below("first linear identity residual", r.residual2, 1e-6),
        Verdict::below("second linear identity residual", r.residual3, 1e-6),
    ];
    let g = Grid::new(512, 200.0)?;
    let eta = SpectralField::from_fn(g, |x| 0.1 * (-(x - 100.0).powi(2) / 50.0).exp() * (x - 100.0).cos());
    let s0 = LinearState { eta, psi: SpectralField::zeros(g), t: 0.0, g: 1.0, depth };
    let ratio = |t: f64| -> Result<f64> { Ok(local_energy_linear(&linear_run(&s0, 0.05, t, 4), DEFAULT_WINDOW)?.ratio) };
    let (c40, c80) = (ratio(40.0)?, ratio(80.0)?);
    out.push(
        Verdict::below("local energy ratio change, T = 40 -> 80", (c80 / c40 - 1.0).abs(), 0.25)
            .with_detail(format!("C(40) = {c40:.4e}, C(80) = {c80:.4e}")),
    );
    notes.push(
        "the periodic cell of length 200 stands in for the line; the ratio is compared across one doubling of T inside the recurrence window, not uniformly in T"
            .into(),
    );
    Ok(out)
}

fn operators(seed: u64) -> Result<Vec<Verdict>> {
    let g = Grid::new(64, 2.0 * PI)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut skew, mut idem, mut lp, mut cr): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for depth in [Depth::Finite(0.7), Depth::Finite(2.0), Depth::Infinite] {
        let f = random_field(g, &mut rng, 25, true);
        let h = random_field(g, &mut rng, 25, true);
        let s = (tilbert(&f, depth).inner(&h) + f.inner(&tilbert(&h, depth))).abs() / (f.l2_norm() * h.l2_norm());
        skew = skew.max(s);
        let u = SpectralField::complex_from_parts(&f, &h.without_mean());
        let p = holomorphic_project(&u, depth)?;
        let pp = holomorphic_project(&p, depth)?;
        idem = idem.max(pp.sub(&p).sup_norm() / p.sup_norm());
        let dec = lp_blocks(&f, depth);
        lp = lp.max(dec.sum().sub(&f).sup_norm() / f.sup_norm());
        if depth.is_infinite() {
            continue;
        }
        let dg = DepthGrid::gauss(depth, 24)?;
        let v_top = harmonic_conjugate(&f, depth);
        let (ua, vb) = (extend_neumann(&f, &dg).d_alpha(), extend_dirichlet_dbeta(&v_top, &dg));
        let (ub, va) = (extend_neumann_dbeta(&f, &dg), extend_dirichlet(&v_top, &dg).d_alpha());
        let scale = (0..dg.len()).map(|j| ua.layer(j).sup_norm().max(ub.layer(j).sup_norm())).fold(0.0, f64::max);
        for j in 0..dg.len() {
            cr = cr.max(ua.layer(j).sub(vb.layer(j)).sup_norm() / scale);
            cr = cr.max(ub.layer(j).add(va.layer(j)).sup_norm() / scale);
        }
    }
    Ok(vec![
        Verdict::below("Tilbert skew-symmetry", skew, 1e-9),
        Verdict::below("holomorphic projection idempotence", idem, 1e-9),
        Verdict::below("Littlewood-Paley partition of unity", lp, 1e-9),
        Verdict::below("Cauchy-Riemann residual of the conjugate pair", cr, 1e-9),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.tag().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("bogus".parse::<Suite>(), Err(Error::UnknownTag(_))));
    }

    #[test]
    fn verdict_bounds() {
        assert!(Verdict::below("a", 0.5, 1.0).pass);
        assert!(!Verdict::below("a", f64::NAN, 1.0).pass);
        assert!(!Verdict::within("b", 2.0, 0.0, 1.0).pass);
        assert!(Verdict::within("b", 1.0, 0.0, 1.0).pass);
        assert!(format!("{}", Verdict::flag("c", false, 1.0)).starts_with("FAIL c"));
    }

    #[test]
    fn operator_suite_passes() {
        let r = run_suite(Suite::Operators, 7).unwrap();
        assert!(r.pass(), "{:#?}", r.verdicts);
    }
}
