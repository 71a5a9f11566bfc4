use crate::config::{Initial, Model, Numerics, Physics, RunConfig};
use crate::failure::Failure;
use crate::output::Out;
use holoww::conformal_map::to_holomorphic;
use holoww::kernel_analysis::{diagonal_pv_asymptotic, diagonal_pv_integral, kernel_table};
use holoww::morawetz_diagnostics::{
    conservation_residual, e14_norm, eulerian_surface, linear_identities, local_energy, local_energy_linear, make_weight,
    moment_series, qm_direct, qm_symbol, virial_check, x_norm, Density, LocalEnergyReport, Weight, XSnapshot, DEFAULT_WINDOW,
};
use holoww::spectral_ops::{min_envelope, sobolev_norm_h, NormSpace};
use holoww::verify::{kernel_checks, run_suite, Suite, SuiteReport, Verdict};
use holoww::ww_solver::{
    energy, linear_energy, linear_run, mass, measure_dispersion, momentum, run, DtPolicy, LinearState, SolverConfig, Trajectory,
};
use holoww::{Depth, Grid, SpectralField};
use serde::Serialize;
use std::path::Path;

/// Tolerances applied by the simulate verdicts.
const DRIFT_TOL: f64 = 1e-8;
const MASS_TOL: f64 = 1e-10;
const EQUIVALENCE_TOL: f64 = 1e-8;
const BALANCE_TOL: f64 = 1e-5;
const QM_TOL: f64 = 1e-6;
const DISPERSION_TOL: f64 = 1e-6;
const LINEAR_IDENTITY_TOL: f64 = 1e-6;

#[derive(Serialize)]
struct VerdictFile<'a> {
    config: &'a RunConfig,
    verdicts: &'a [Verdict],
    notes: &'a [String],
}

fn read_initial_file(path: &Path, grid: Grid) -> Result<(SpectralField, SpectralField), Failure> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Failure::Config(format!("physics.initial.path: {}: {e}", path.display())))?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Failure::Config(format!("physics.initial.path: column `{name}` missing in {}", path.display())))
    };
    let (ie, ip) = (col("eta")?, col("psi")?);
    let (mut eta, mut psi) = (Vec::new(), Vec::new());
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| {
            rec.get(i)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| Failure::Config(format!("physics.initial.path: row {} is not numeric", line + 1)))
        };
        eta.push(num(ie)?);
        psi.push(num(ip)?);
    }
    if eta.len() != grid.n() {
        return Err(Failure::Config(format!("physics.initial.path: {} rows, numerics.n = {}", eta.len(), grid.n())));
    }
    Ok((SpectralField::from_real(grid, &eta)?, SpectralField::from_real(grid, &psi)?))
}

fn initial_data(p: &Physics, grid: Grid, depth: Depth) -> Result<(SpectralField, SpectralField), Failure> {
    Ok(match &p.initial {
        Initial::Rest => (SpectralField::zeros(grid), SpectralField::zeros(grid)),
        Initial::Mode { k, amplitude } => {
            let s = LinearState::traveling_mode(grid, *k, *amplitude, p.g, depth);
            (s.eta, s.psi)
        }
        Initial::Packet { amplitude, center, width, carrier } => {
            let (a, c, w, kc) = (*amplitude, *center, *width, *carrier);
            let eta = SpectralField::from_fn(grid, |x| a * (-(x - c).powi(2) / (2.0 * w * w)).exp() * (kc * (x - c)).cos());
            (eta, SpectralField::zeros(grid))
        }
        Initial::File { path } => read_initial_file(path, grid)?,
    })
}

struct Setup<'a> {
    physics: &'a Physics,
    numerics: &'a Numerics,
    depth: Depth,
    grid: Grid,
    eta: SpectralField,
    psi: SpectralField,
}

fn setup(cfg: &RunConfig) -> Result<Setup<'_>, Failure> {
    let physics = cfg.physics()?;
    let numerics = cfg.numerics()?;
    let depth = physics.depth.to_depth().map_err(Failure::Config)?;
    let grid = Grid::new(numerics.n, numerics.length).map_err(|e| Failure::Config(format!("numerics: {e}")))?;
    let (eta, psi) = initial_data(physics, grid, depth)?;
    Ok(Setup { physics, numerics, depth, grid, eta, psi })
}

fn weight(cfg: &RunConfig, grid: &Grid) -> Result<Weight, Failure> {
    let center = cfg.weight.center.unwrap_or(0.5 * grid.period());
    make_weight(cfg.weight.kind(), grid, center).map_err(|e| Failure::Config(format!("weight: {e}")))
}

fn relative_drift(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        (b - a).abs()
    } else {
        ((b - a) / a).abs()
    }
}

/// |direct − symbol| relative to |Qₘ|, or to ∫m_xη² where both vanish.
fn qm_gap(eta: &SpectralField, w: &Weight, depth: Depth) -> Result<f64, Failure> {
    let a = qm_direct(eta, w, depth)?;
    let b = qm_symbol(eta, w, depth)?;
    let scale = match depth {
        Depth::Finite(_) => a.abs().max(b.abs()),
        Depth::Infinite => w.integrate_mx(&eta.mul(eta)).re,
    };
    Ok(if scale > 0.0 { (a - b).abs() / scale } else { (a - b).abs() })
}

fn write_local_energy(out: &mut Out, le: &LocalEnergyReport, notes: &mut Vec<String>) -> Result<(), Failure> {
    let rows = (0..le.x0.len()).map(|i| vec![le.x0[i], le.values[i], le.potential[i]]);
    out.csv("local_energy.csv", &["x0", "value", "potential"], rows)?;
    notes.push(format!("local energy: sup {:.6e} at x0 = {:.4}, ratio to E^1/4 norms {:.6e}", le.sup, le.sup_at, le.ratio));
    Ok(())
}

fn finish(out: &mut Out, cfg: &RunConfig, verdicts: &[Verdict], notes: &[String], strict: bool) -> Result<(), Failure> {
    out.json("verdicts.json", &VerdictFile { config: cfg, verdicts, notes })?;
    for v in verdicts {
        println!("{v}");
    }
    for n in notes {
        println!("note: {n}");
    }
    let failed: Vec<&str> = verdicts.iter().filter(|v| !v.pass).map(|v| v.name.as_str()).collect();
    if strict && !failed.is_empty() {
        return Err(Failure::Verdict(failed.join(", ")));
    }
    Ok(())
}

pub fn simulate(cfg: &RunConfig, dir: &Path, strict: bool) -> Result<(), Failure> {
    let s = setup(cfg)?;
    let mut out = Out::new(dir, "simulate", cfg)?;
    let mut verdicts = Vec::new();
    let mut notes = Vec::new();
    match s.numerics.model {
        Model::Nonlinear => simulate_nonlinear(cfg, &s, &mut out, &mut verdicts, &mut notes)?,
        Model::Linear => simulate_linear(cfg, &s, &mut out, &mut verdicts, &mut notes)?,
    }
    if cfg.diagnostics.kernel_suite {
        let r = run_suite(Suite::Kernel, cfg.seed)?;
        verdicts.extend(r.verdicts.into_iter().filter(|v| v.name != "runtime seconds"));
        notes.extend(r.notes);
    }
    finish(&mut out, cfg, &verdicts, &notes, strict)
}

fn simulate_nonlinear(cfg: &RunConfig, s: &Setup, out: &mut Out, verdicts: &mut Vec<Verdict>, notes: &mut Vec<String>) -> Result<(), Failure> {
    let n = s.numerics;
    let g = s.physics.g;
    let s0 = to_holomorphic(&s.eta, &s.psi, s.depth, g, n.map_tol)?;
    let solver = SolverConfig { dt: n.dt, t_end: n.t_end, cadence: n.cadence, filter_order: n.filter_order };
    let tr: Trajectory = run(&s0, &solver)?;
    notes.push(format!("solver: {} steps of dt = {:.6e}, {} snapshots", tr.steps, tr.dt, tr.states.len()));
    let nodes = s.grid.nodes();
    let rows = tr.states.iter().flat_map(|st| {
        let (w, q) = (st.w.samples(), st.q.samples());
        let nodes = &nodes;
        (0..nodes.len()).map(move |j| vec![st.t, nodes[j], w[j].re, w[j].im + st.shift, q[j].re, q[j].im])
    });
    out.csv("snapshots.csv", &["t", "alpha", "re_w", "im_w", "re_q", "im_q"], rows)?;
    if cfg.diagnostics.invariants {
        let inv: Vec<[f64; 4]> = tr.states.iter().map(|st| [st.t, energy(st), momentum(st), mass(st)]).collect();
        out.csv("invariants.csv", &["t", "energy", "momentum", "mass"], inv.iter().map(|r| r.to_vec()))?;
        let (first, last) = (inv[0], inv[inv.len() - 1]);
        out.tolerance("drift", DRIFT_TOL);
        out.tolerance("mass", MASS_TOL);
        verdicts.push(Verdict::below("energy relative drift", relative_drift(first[1], last[1]), DRIFT_TOL));
        verdicts.push(Verdict::below("momentum relative drift", relative_drift(first[2], last[2]), DRIFT_TOL));
        verdicts.push(Verdict::below("mass drift", (last[3] - first[3]).abs(), MASS_TOL));
    }
    let w = weight(cfg, &s.grid)?;
    if cfg.diagnostics.densities || cfg.diagnostics.virial {
        let series = moment_series(&tr, &w)?;
        if cfg.diagnostics.densities {
            let rows = series.iter().flat_map(|m| (0..3).map(move |k| vec![m.t, (k + 1) as f64, m.total[k], m.weighted[k], m.flux[k]]));
            out.csv("moments.csv", &["t", "density", "total", "weighted", "flux"], rows)?;
            let spread = series
                .iter()
                .map(|m| {
                    let scale = m.total.iter().fold(0.0f64, |a, b| a.max(b.abs()));
                    let gap = (1..3).map(|k| (m.total[k] - m.total[0]).abs()).fold(0.0, f64::max);
                    if scale > 0.0 { gap / scale } else { gap }
                })
                .fold(0.0, f64::max);
            out.tolerance("density_equivalence", EQUIVALENCE_TOL);
            out.tolerance("local_balance", BALANCE_TOL);
            verdicts.push(Verdict::below("density equivalence", spread, EQUIVALENCE_TOL));
            for d in Density::ALL {
                let r = conservation_residual(&series, d);
                verdicts.push(Verdict::below(&format!("local balance {d:?}"), r.relative, BALANCE_TOL));
            }
        }
        if cfg.diagnostics.virial {
            let v = virial_check(&series, &w, g, s.depth);
            let hyp = &v.hypotheses;
            verdicts.push(
                Verdict::flag("virial hypotheses", hyp.hold, hyp.weight_scale)
                    .with_detail(format!("depth margin {:.3e}, slope {:.3e}", hyp.depth_margin, hyp.slope)),
            );
            if hyp.hold {
                verdicts.push(
                    Verdict::flag("virial inequality", v.inequality_holds == Some(true), v.lhs - v.rhs)
                        .with_detail(format!("lhs {:.4e}, rhs {:.4e}", v.lhs, v.rhs)),
                );
                verdicts.push(
                    Verdict::flag("virial kinetic bound", v.kinetic_holds == Some(true), v.kinetic - v.kinetic_rhs)
                        .with_detail(format!("kinetic {:.4e}, 7 D1 {:.4e}", v.kinetic, v.kinetic_rhs)),
                );
            }
            verdicts.push(Verdict::flag("pressure nonnegative", v.pressure_ok, v.min_pressure));
            out.json("virial.json", &v)?;
        }
    }
    if cfg.diagnostics.qm_check {
        let mut worst: f64 = 0.0;
        for st in &tr.states {
            worst = worst.max(qm_gap(&eulerian_surface(st).0, &w, s.depth)?);
        }
        out.tolerance("qm", QM_TOL);
        verdicts.push(Verdict::below("Qm direct vs symbol", worst, QM_TOL));
    }
    if cfg.diagnostics.local_energy {
        write_local_energy(out, &local_energy(&tr, DEFAULT_WINDOW)?, notes)?;
    }
    if cfg.diagnostics.linear_identities {
        notes.push("linear identities need numerics.model = \"linear\"; skipped".into());
    }
    Ok(())
}

fn linear_dt(n: &Numerics, g: f64, depth: Depth, grid: &Grid) -> f64 {
    match n.dt {
        DtPolicy::Fixed(dt) => dt,
        DtPolicy::Cfl(c) => {
            let speed = match depth {
                Depth::Finite(h) => (g * h).sqrt(),
                Depth::Infinite => depth.omega(g, grid.k0()) / grid.k0(),
            };
            c * grid.spacing() / speed
        }
    }
}

fn simulate_linear(cfg: &RunConfig, s: &Setup, out: &mut Out, verdicts: &mut Vec<Verdict>, notes: &mut Vec<String>) -> Result<(), Failure> {
    let n = s.numerics;
    let g = s.physics.g;
    let dt = linear_dt(n, g, s.depth, &s.grid);
    let s0 = LinearState { eta: s.eta.clone(), psi: s.psi.clone(), t: 0.0, g, depth: s.depth };
    let tr = linear_run(&s0, dt, n.t_end, n.cadence);
    notes.push(format!("linear solver: dt = {:.6e}, {} snapshots", tr.dt, tr.states.len()));
    let nodes = s.grid.nodes();
    let rows = tr.states.iter().flat_map(|st| {
        let (e, p) = (st.eta.real_samples(), st.psi.real_samples());
        let nodes = &nodes;
        (0..nodes.len()).map(move |j| vec![st.t, nodes[j], e[j], p[j]])
    });
    out.csv("linear_snapshots.csv", &["t", "x", "eta", "psi"], rows)?;
    if cfg.diagnostics.invariants {
        let en: Vec<f64> = tr.states.iter().map(linear_energy).collect();
        out.csv("invariants.csv", &["t", "energy"], tr.states.iter().zip(&en).map(|(st, e)| vec![st.t, *e]))?;
        out.tolerance("drift", DRIFT_TOL);
        verdicts.push(Verdict::below("energy relative drift", relative_drift(en[0], en[en.len() - 1]), DRIFT_TOL));
    }
    if let Initial::Mode { k, .. } = s.physics.initial {
        let (measured, exact) = measure_dispersion(s.grid, k, g, s.depth, tr.dt, n.t_end)?;
        out.tolerance("dispersion", DISPERSION_TOL);
        out.json("dispersion.json", &serde_json::json!({ "k": k, "omega_measured": measured, "omega_exact": exact }))?;
        verdicts.push(
            Verdict::below("dispersion relative phase error", relative_drift(exact, measured), DISPERSION_TOL)
                .with_detail(format!("omega {measured:.12} vs {exact:.12}")),
        );
    }
    let w = weight(cfg, &s.grid)?;
    if cfg.diagnostics.linear_identities {
        let r = linear_identities(&tr, &w, cfg.weight.sigma)?;
        out.tolerance("linear_identity", LINEAR_IDENTITY_TOL);
        verdicts.push(Verdict::below("first linear identity residual", r.residual2, LINEAR_IDENTITY_TOL));
        verdicts.push(Verdict::below("second linear identity residual", r.residual3, LINEAR_IDENTITY_TOL));
        notes.push(format!("measured Morawetz constant at sigma = {}: {:.6e}", r.sigma, r.measured_c));
        let rows = (0..r.times.len()).map(|i| vec![r.times[i], r.w2[i], r.rate2[i], r.w3[i], r.rate3[i]]);
        out.csv("linear_identities.csv", &["t", "w2", "rate2", "w3", "rate3"], rows)?;
    }
    if cfg.diagnostics.qm_check {
        let mut worst: f64 = 0.0;
        for st in &tr.states {
            worst = worst.max(qm_gap(&st.eta, &w, s.depth)?);
        }
        out.tolerance("qm", QM_TOL);
        verdicts.push(Verdict::below("Qm direct vs symbol", worst, QM_TOL));
    }
    if cfg.diagnostics.local_energy {
        write_local_energy(out, &local_energy_linear(&tr, DEFAULT_WINDOW)?, notes)?;
    }
    if cfg.diagnostics.densities || cfg.diagnostics.virial {
        notes.push("densities and virial need numerics.model = \"nonlinear\"; skipped".into());
    }
    Ok(())
}

pub fn kernel(cfg: &RunConfig, dir: &Path, strict: bool) -> Result<(), Failure> {
    let kc = &cfg.kernel;
    let mut out = Out::new(dir, "kernel", cfg)?;
    let table = kernel_table(&kc.table_params())?;
    let h = kc.h;
    let rows = (0..table.xs.len()).flat_map(|i| {
        let t = &table;
        (0..t.xs.len()).map(move |j| vec![h * t.xs[i], h * t.xs[j], t.get(i, j) / (h * h)])
    });
    out.csv("kernel_table.csv", &["x1", "x2", "k"], rows)?;
    let mut notes = vec![format!("table of K_h at h = {h}: {} x {} points, method {:?}", table.xs.len(), table.xs.len(), table.method)];
    if let Some(tb) = table.tail_bound {
        notes.push(format!("Fourier truncation bound {tb:.3e}"));
    }
    let verdicts = kernel_checks(&table, kc.mass_extent, kc.split_margin, &mut notes);
    if let Some((a, b, c)) = kc.x0_grid {
        let xs: Vec<f64> = (0..c).map(|i| if c == 1 { a } else { a + (b - a) * i as f64 / (c - 1) as f64 }).collect();
        let rows = xs.into_iter().map(|x| {
            let i = diagonal_pv_integral(x);
            vec![x, i, diagonal_pv_asymptotic(x), i + 2.0 / x.tanh()]
        });
        out.csv("diagonal_integral.csv", &["x0", "integral", "far_asymptotic", "plus_2coth"], rows)?;
    }
    finish(&mut out, cfg, &verdicts, &notes, strict)
}

pub fn verify(cfg: &RunConfig, dir: &Path, tag: &str) -> Result<(), Failure> {
    let suites: Vec<Suite> = if tag == "all" { Suite::ALL.to_vec() } else { vec![tag.parse::<Suite>()?] };
    let mut out = Out::new(dir, "verify", cfg)?;
    let mut failed = Vec::new();
    let mut reports: Vec<SuiteReport> = Vec::new();
    for suite in suites {
        let r = run_suite(suite, cfg.seed)?;
        println!("[{}]", suite.tag());
        for v in &r.verdicts {
            println!("  {v}");
            if !v.pass {
                failed.push(format!("{}: {}", suite.tag(), v.name));
            }
        }
        for n in &r.notes {
            println!("  note: {n}");
        }
        reports.push(r);
    }
    // Runtimes vary from run to run; they stay on stdout.
    let stable: Vec<serde_json::Value> = reports
        .iter()
        .map(|r| {
            let verdicts: Vec<&Verdict> = r.verdicts.iter().filter(|v| v.name != "runtime seconds").collect();
            serde_json::json!({ "suite": r.suite, "pass": r.pass(), "verdicts": verdicts, "notes": r.notes })
        })
        .collect();
    out.json(&format!("verify_{tag}.json"), &stable)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verdict(failed.join(", ")))
    }
}

#[derive(Serialize)]
struct NormsReport {
    e14: f64,
    eta: Vec<(String, f64)>,
    psi: Vec<(String, f64)>,
    x_norm: f64,
    x_eta_ratio: f64,
    x_slope_ratio: f64,
    envelope_delta: f64,
}

pub fn norms(cfg: &RunConfig, dir: &Path) -> Result<(), Failure> {
    let s = setup(cfg)?;
    let g = s.physics.g;
    let h = s.depth.value().unwrap_or(f64::INFINITY);
    let mut out = Out::new(dir, "norms", cfg)?;
    let named = |f: &SpectralField, spaces: &[(&str, NormSpace)]| -> Result<Vec<(String, f64)>, Failure> {
        spaces.iter().map(|(n, sp)| Ok((n.to_string(), sobolev_norm_h(f, *sp, h)?))).collect()
    };
    let eta = named(&s.eta, &[("H1/4_h-cap", NormSpace::QuarterCap), ("H1_h", NormSpace::H1), ("H3/2_h", NormSpace::ThreeHalves)])?;
    let psi = named(&s.psi, &[("H1/2_h-sum", NormSpace::HalfSum), ("H3/4_h-sum", NormSpace::ThreeQuarterSum)])?;
    let e14 = e14_norm(&s.eta, &s.psi, g, s.depth)?;
    let delta = 0.25;
    let state = to_holomorphic(&s.eta, &s.psi, s.depth, g, s.numerics.map_tol)?;
    let xr = x_norm(&[XSnapshot::from_state(&state)], g, s.depth, delta)?;
    let env = min_envelope(&s.eta, delta, s.depth, NormSpace::ThreeHalves)?;
    out.csv(
        "envelope.csv",
        &["lambda", "block_norm", "envelope"],
        (0..env.lambdas.len()).map(|i| vec![env.lambdas[i], env.block_norms[i], env.values[i]]),
    )?;
    let report = NormsReport { e14, eta, psi, x_norm: xr.value, x_eta_ratio: xr.eta_ratio, x_slope_ratio: xr.slope_ratio, envelope_delta: delta };
    println!("E^1/4 norm: {e14:.6e}");
    println!("X norm: {:.6e} (sup|eta|/(hX) {:.3e}, sup|eta_x|/X {:.3e})", xr.value, xr.eta_ratio, xr.slope_ratio);
    for (n, v) in report.eta.iter() {
        println!("eta {n}: {v:.6e}");
    }
    for (n, v) in report.psi.iter() {
        println!("psi {n}: {v:.6e}");
    }
    out.json("norms.json", &report)?;
    Ok(())
}
