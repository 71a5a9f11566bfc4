use super::*;
use crate::spectral_ops::holomorphic_from_real;
use proptest::prelude::*;
use std::f64::consts::PI;

fn grid() -> Grid {
    Grid::new(64, 2.0 * PI).unwrap()
}

fn random_field(g: Grid, seed: u64, kmax: i64) -> SpectralField {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut acc = SpectralField::constant(g, rng.random_range(-1.0..1.0));
    for k in 1..=kmax {
        let a: f64 = rng.random_range(-1.0..1.0);
        let b: f64 = rng.random_range(-1.0..1.0);
        acc = acc.add(&SpectralField::mode(g, k, a / (k * k) as f64, b / (k * k) as f64));
    }
    acc
}

#[test]
fn depth_grid_weights_sum_to_depth() {
    let dg = DepthGrid::gauss(Depth::Finite(1.7), 64).unwrap();
    assert!((dg.weights().iter().sum::<f64>() - 1.7).abs() < 1e-12);
    assert!(dg.nodes().iter().all(|&b| b > -1.7 && b < 0.0));
    let band = DepthGrid::for_band(Depth::Finite(3.0), 1.0, 128.0);
    assert!((band.weights().iter().sum::<f64>() - 3.0).abs() < 1e-12);
    assert!(band.nodes().windows(2).all(|w| w[0] < w[1]));
    let inf = DepthGrid::for_band(Depth::Infinite, 0.5, 10.0);
    assert!((inf.extent() - 80.0).abs() < 1e-12);
    assert!(DepthGrid::gauss(Depth::Infinite, 8).is_err());
}

#[test]
fn neumann_examples() {
    let g = grid();
    let h = 1.3;
    let dg = DepthGrid::gauss(Depth::Finite(h), 32).unwrap();
    let c = extend_neumann(&SpectralField::constant(g, 2.5), &dg);
    for j in 0..dg.len() {
        assert!(c.values(j).iter().all(|v| (v.re - 2.5).abs() < 1e-14));
    }
    let k = 3.0;
    let f = SpectralField::mode(g, 3, 1.0, 0.0);
    let u = extend_neumann(&f, &dg);
    for (j, &b) in dg.nodes().iter().enumerate() {
        let expect = ((b + h) * k).cosh() / (h * k).cosh();
        for (m, v) in u.values(j).iter().enumerate() {
            let a = g.nodes()[m];
            assert!((v.re - expect * (k * a).cos()).abs() < 1e-13);
        }
    }
}

#[test]
fn neumann_bottom_slope_by_finite_difference() {
    let g = grid();
    let h = 0.9;
    let depth = Depth::Finite(h);
    let f = random_field(g, 5, 20);
    let step = 1e-4;
    let near = DepthGrid { depth, extent: h, rule: Rule { nodes: vec![-h, -h + step, -h + 2.0 * step], weights: vec![0.0; 3] } };
    let u = extend_neumann(&f, &near);
    // one-sided second-order difference at β = −h
    let v0 = u.layer(0).real_samples();
    let v1 = u.layer(1).real_samples();
    let v2 = u.layer(2).real_samples();
    for m in 0..g.n() {
        let d = (-3.0 * v0[m] + 4.0 * v1[m] - v2[m]) / (2.0 * step);
        assert!(d.abs() < 1e-6);
    }
    let exact = extend_neumann_dbeta(&f, &near);
    assert!(exact.layer(0).sup_norm() < 1e-10);
}

#[test]
fn dirichlet_examples() {
    let g = grid();
    let h = 2.0;
    let depth = Depth::Finite(h);
    let dg = DepthGrid { depth, extent: h, rule: Rule { nodes: vec![-h, -h / 2.0, 0.0], weights: vec![0.0; 3] } };
    let c = extend_dirichlet(&SpectralField::constant(g, 3.0), &dg);
    assert!((c.values(1)[0].re - 1.5).abs() < 1e-14);
    let f = random_field(g, 8, 25);
    let v = extend_dirichlet(&f, &dg);
    assert!(v.layer(0).sup_norm() < 1e-10);
    assert!(v.layer(2).sub(&f).sup_norm() < 1e-14);
    let m = extend_dirichlet(&SpectralField::mode(g, 2, 1.0, 0.0), &dg);
    let expect = (h * 2.0 / 2.0).sinh() / (2.0 * h).sinh();
    assert!((m.values(1)[0].re - expect).abs() < 1e-14);
}

#[test]
fn dtn_symbols_and_finite_differences() {
    let g = grid();
    let h = 0.6;
    let depth = Depth::Finite(h);
    for k in 1..6 {
        let f = SpectralField::mode(g, k, 1.0, 0.0);
        let kk = k as f64;
        let d = dtn_neumann(&f, depth);
        assert!(d.sub(&f.scale(kk * (h * kk).tanh())).sup_norm() < 1e-13);
    }
    assert!(dtn_neumann(&SpectralField::constant(g, 1.0), depth).sup_norm() == 0.0);
    // Dirichlet DtN against a centered difference in β across the top
    let f = random_field(g, 12, 12);
    let mut prev = f64::INFINITY;
    for &step in &[1e-2, 5e-3] {
        let dg = DepthGrid { depth, extent: h, rule: Rule { nodes: vec![-step, 0.0, step], weights: vec![0.0; 3] } };
        let v = extend_dirichlet(&f, &dg);
        let fd = v.layer(2).sub(v.layer(0)).scale(0.5 / step);
        let err = fd.sub(&dtn_dirichlet(&f, depth)).sup_norm();
        assert!(err < prev / 3.5);
        prev = err;
    }
    // constant data: slope c/h
    let c = dtn_dirichlet(&SpectralField::constant(g, 2.0), depth);
    assert!((c.mean().re - 2.0 / h).abs() < 1e-14);
}

#[test]
fn conjugate_examples_and_cauchy_riemann() {
    let g = grid();
    let h = 1.1;
    let depth = Depth::Finite(h);
    assert!(harmonic_conjugate(&SpectralField::constant(g, 1.0), depth).sup_norm() == 0.0);
    let c = harmonic_conjugate(&SpectralField::mode(g, 2, 1.0, 0.0), depth);
    assert!(c.sub(&SpectralField::mode(g, 2, 0.0, -(2.2f64).tanh())).sup_norm() < 1e-14);
    let f = random_field(g, 2, 25);
    let dg = DepthGrid::gauss(depth, 24).unwrap();
    let u = extend_neumann(&f, &dg);
    let v_top = harmonic_conjugate(&f, depth);
    let v = extend_dirichlet(&v_top, &dg);
    let ua = u.d_alpha();
    let va = v.d_alpha();
    let ub = extend_neumann_dbeta(&f, &dg);
    let vb = extend_dirichlet_dbeta(&v_top, &dg);
    for j in 0..dg.len() {
        assert!(ua.layer(j).sub(vb.layer(j)).sup_norm() < 1e-9);
        assert!(ub.layer(j).add(va.layer(j)).sup_norm() < 1e-9);
    }
}

#[test]
fn holomorphic_extension_matches_parts() {
    let g = grid();
    let depth = Depth::Finite(0.7);
    let dg = DepthGrid::gauss(depth, 16).unwrap();
    let u = random_field(g, 21, 20);
    let w = holomorphic_from_real(&u, depth);
    let ext = extend_holomorphic(&w, &dg);
    let re = extend_neumann(&u, &dg);
    let im = extend_dirichlet(&harmonic_conjugate(&u, depth), &dg);
    let ev = HoloEvaluator::new(&w, depth);
    let nodes = g.nodes();
    for j in 0..dg.len() {
        let combined = SpectralField::complex_from_parts(re.layer(j), im.layer(j));
        assert!(ext.layer(j).sub(&combined).sup_norm() < 1e-12);
        let b = dg.nodes()[j];
        let vals = ext.values(j);
        for m in (0..g.n()).step_by(7) {
            let (p, _) = ev.eval(nodes[m], b);
            assert!((p - vals[m]).norm() < 1e-12);
        }
    }
    // derivative: complex difference along α
    let (_, d) = ev.eval(0.3, -0.2);
    let e = 1e-5;
    let fd = (ev.eval(0.3 + e, -0.2).0 - ev.eval(0.3 - e, -0.2).0) / (2.0 * e);
    assert!((d - fd).norm() < 1e-8);
    let fd_b = (ev.eval(0.3, -0.2 + e).0 - ev.eval(0.3, -0.2 - e).0) / (2.0 * e);
    assert!((Complex64::new(0.0, 1.0) * d - fd_b).norm() < 1e-8);
}

#[test]
fn depth_integrals() {
    let g = grid();
    let h = 1.4;
    let depth = Depth::Finite(h);
    let dg = DepthGrid::gauss(depth, 64).unwrap();
    let one = extend_neumann(&SpectralField::constant(g, 1.0), &dg);
    let unit = vec![1.0 / g.period(); g.n()];
    assert!((depth_integral(&one, &unit).re - h).abs() < 1e-12);
    let v = extend_dirichlet(&SpectralField::mode(g, 1, 1.0, 0.0), &dg);
    let sq = StripField { depth_grid: dg.clone(), layers: v.layers().iter().map(|l| l.mul(l)).collect(), bottom: Bottom::Free };
    // ∫cos² dα / L = 1/2; ∫ sinh²(β+h) dβ = sinh(2h)/4 − h/2
    let expect = 0.5 * ((2.0 * h).sinh() / 4.0 - h / 2.0) / h.sinh().powi(2);
    assert!((depth_integral(&sq, &unit).re - expect).abs() < 1e-10);
    let zero = extend_neumann(&SpectralField::zeros(g), &dg);
    assert_eq!(depth_integral(&zero, &unit).norm(), 0.0);
    // ∫ β dβ over [−h, 0]
    assert!((moment_integral(&one, &unit, 0.0).re + h * h / 2.0).abs() < 1e-12);
}

#[test]
fn parabolic_ratio_examples() {
    let g = grid();
    let h = 1.0;
    let dg = DepthGrid::gauss(Depth::Finite(h), 64).unwrap();
    assert_eq!(parabolic_ratio(&SpectralField::zeros(g), 0.25, &dg).unwrap(), 0.0);
    let k = 2.0;
    let f = SpectralField::mode(g, 2, 1.0, 0.0);
    let num = (((2.0 * h * k).sinh() / (4.0 * k) - h / 2.0) / (h * k).sinh().powi(2)).sqrt();
    let expect = num / (g.period() / 2.0).sqrt();
    assert!((parabolic_ratio(&f, 0.0, &dg).unwrap() - expect).abs() < 1e-12);
    assert!(parabolic_ratio(&f, 0.5, &dg).is_err());
    // stable under refinement of α and β resolution
    let r = random_field(g, 3, 20);
    let a = parabolic_ratio(&r, 0.25, &dg).unwrap();
    let fine = r.resample(128).unwrap();
    let b = parabolic_ratio(&fine, 0.25, &DepthGrid::gauss(Depth::Finite(h), 128).unwrap()).unwrap();
    assert!((a / b - 1.0).abs() < 0.1);
}

#[test]
fn large_depth_symbols_approach_half_space() {
    let depth = Depth::Finite(1e3);
    for k in 1..20 {
        let xi = k as f64;
        for &b in &[-0.01, -0.5, -3.0] {
            let e = (b * xi).exp();
            assert!((p_dirichlet(depth, xi, b) - e).abs() < 1e-10);
            assert!((p_neumann(depth, xi, b) - e).abs() < 1e-10);
        }
    }
    // huge arguments stay finite
    assert!(p_neumann(Depth::Finite(50.0), 400.0, -1.0).is_finite());
    assert!(holo_factor(Depth::Finite(50.0), -400.0, -49.0).is_finite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn layers_bounded_by_coefficient_sum(seed in 0u64..500, h in 0.2f64..5.0) {
        let g = grid();
        let f = random_field(g, seed, 30);
        let dg = DepthGrid::gauss(Depth::Finite(h), 16).unwrap();
        let bound = f.coeff_l1() * (1.0 + 1e-12);
        let u = extend_neumann(&f, &dg);
        let v = extend_dirichlet(&f, &dg);
        for j in 0..dg.len() {
            prop_assert!(u.layer(j).sup_norm() <= bound);
            prop_assert!(v.layer(j).sup_norm() <= bound);
        }
    }

    #[test]
    fn conjugacy_of_dtn(seed in 0u64..500, h in 0.2f64..5.0) {
        let g = grid();
        let depth = Depth::Finite(h);
        let f = random_field(g, seed, 30);
        let top = DepthGrid { depth, extent: h, rule: Rule { nodes: vec![0.0], weights: vec![h] } };
        let ub = extend_neumann_dbeta(&f, &top);
        let va = extend_dirichlet(&harmonic_conjugate(&f, depth), &top).d_alpha();
        let d = dtn_neumann(&f, depth);
        prop_assert!(ub.layer(0).sub(&d).sup_norm() < 1e-9);
        prop_assert!(va.layer(0).add(&d).sup_norm() < 1e-9);
    }
}
