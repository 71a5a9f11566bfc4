use super::*;
use proptest::prelude::*;

fn grid(n: usize) -> Grid {
    Grid::new(n, 2.0 * PI).unwrap()
}

fn random_field(g: Grid, seed: u64, kmax: i64) -> SpectralField {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut acc = SpectralField::zeros(g);
    for k in 1..=kmax {
        let a: f64 = rng.random_range(-1.0..1.0);
        let b: f64 = rng.random_range(-1.0..1.0);
        acc = acc.add(&SpectralField::mode(g, k, a / k as f64, b / k as f64));
    }
    acc
}

/// Direct O(N²) discrete Fourier sum applying a real even symbol.
fn brute_force_multiplier(samples: &[f64], period: f64, symbol: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = samples.len();
    let k0 = 2.0 * PI / period;
    let mut out = vec![0.0; n];
    for k in -(n as i64) / 2..(n as i64) / 2 {
        let (mut re, mut im) = (0.0, 0.0);
        for (m, v) in samples.iter().enumerate() {
            let ph = -2.0 * PI * (k * m as i64) as f64 / n as f64;
            re += v * ph.cos() / n as f64;
            im += v * ph.sin() / n as f64;
        }
        let s = symbol(k0 * k as f64);
        for (m, o) in out.iter_mut().enumerate() {
            let ph = 2.0 * PI * (k * m as i64) as f64 / n as f64;
            *o += s * (re * ph.cos() - im * ph.sin());
        }
    }
    out
}

#[test]
fn identity_symbol() {
    let g = grid(32);
    let f = random_field(g, 1, 10);
    let out = apply_multiplier(&f, |_| Complex64::new(1.0, 0.0)).unwrap();
    assert_eq!(out, f);
}

#[test]
fn derivative_of_sine() {
    let g = grid(32);
    let f = SpectralField::mode(g, 3, 0.0, 1.0);
    let d = apply_multiplier(&f, |xi| Complex64::new(0.0, xi)).unwrap();
    let expect = SpectralField::mode(g, 3, 3.0, 0.0);
    assert!(d.rel_diff(&expect) < 1e-13);
    assert!(d.is_real());
}

#[test]
fn abs_symbol_matches_direct_sum() {
    let g = grid(16);
    let f = SpectralField::from_fn(g, |x| (2.0 * x).cos());
    let out = apply_multiplier(&f, |xi| Complex64::new(xi.abs(), 0.0)).unwrap();
    let oracle = brute_force_multiplier(&f.real_samples(), g.period(), f64::abs);
    for (a, b) in out.real_samples().iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-12);
    }
    let expect = SpectralField::from_fn(g, |x| 2.0 * (2.0 * x).cos());
    assert!(out.rel_diff(&expect) < 1e-13);
}

#[test]
fn singular_symbol_names_wavenumber() {
    let g = grid(16);
    let f = SpectralField::constant(g, 1.0);
    let err = apply_multiplier(&f, |xi| Complex64::new(1.0 / xi, 0.0)).unwrap_err();
    assert_eq!(err, Error::SingularSymbol { xi: 0.0 });
}

#[test]
fn tilbert_single_modes() {
    let g = grid(32);
    let h = Depth::Finite(0.7);
    for k in 1..8 {
        let f = SpectralField::mode(g, k, 1.0, 0.0);
        let t = tilbert(&f, h);
        let expect = SpectralField::mode(g, k, 0.0, (0.7 * k as f64).tanh());
        assert!(t.sub(&expect).sup_norm() < 1e-14);
        let hilbert = tilbert(&f, Depth::Infinite);
        assert!(hilbert.sub(&SpectralField::mode(g, k, 0.0, 1.0)).sup_norm() < 1e-14);
    }
    assert_eq!(tilbert(&SpectralField::constant(g, 2.0), h).sup_norm(), 0.0);
}

#[test]
fn tilbert_inverse_round_trip_and_mean_error() {
    let g = grid(64);
    let h = Depth::Finite(1.3);
    let f = random_field(g, 7, 20);
    let back = tilbert_inv(&tilbert(&f, h), h).unwrap();
    assert!(back.sub(&f).l2_norm() < 1e-10);
    let s = SpectralField::mode(g, 2, 0.0, 1.0);
    let inv = tilbert_inv(&s, h).unwrap();
    // consistent with 𝒯 cos = tanh·sin
    let expect = SpectralField::mode(g, 2, 1.0 / (2.6f64).tanh(), 0.0);
    assert!(inv.sub(&expect).sup_norm() < 1e-14);
    assert!(matches!(tilbert_inv(&SpectralField::constant(g, 1.0), h), Err(Error::MeanMode { .. })));
}

#[test]
fn projection_fixes_holomorphic_and_kills_antiholomorphic() {
    let g = grid(64);
    let h = Depth::Finite(0.8);
    let u = random_field(g, 3, 15).add_constant(0.4);
    let w = holomorphic_from_real(&u, h);
    assert!(holomorphic_project(&w, h).unwrap().sub(&w).sup_norm() < 1e-13);
    let v = tilbert(&u, h);
    let anti = SpectralField::complex_from_parts(&u.without_mean(), &v);
    assert!(holomorphic_project(&anti, h).unwrap().sup_norm() < 1e-13);
}

#[test]
fn projection_rejects_imaginary_mean() {
    let g = grid(16);
    let u = SpectralField::zeros(g).add_imag_constant(1.0);
    assert!(matches!(holomorphic_project(&u, Depth::Finite(1.0)), Err(Error::MeanMode { .. })));
}

#[test]
fn dealias_behaviour() {
    let g = grid(24);
    let nyq = SpectralField::from_fn(g, |x| (12.0 * x).cos());
    assert!(dealias(&nyq).sup_norm() < 1e-14);
    let f = random_field(g, 2, 7);
    assert!(dealias(&f).sub(&f).sup_norm() < 1e-15);
    // product of band-limited fields against a 2x grid
    let a = random_field(g, 4, 7);
    let b = random_field(g, 5, 7);
    let prod = dealias(&dealias(&a).mul(&dealias(&b)));
    let fine = dealias(&a.resample(48).unwrap().mul(&b.resample(48).unwrap()).resample(24).unwrap());
    assert!(prod.sub(&fine).sup_norm() < 1e-13);
}

#[test]
fn lp_single_mode_and_partition() {
    let g = Grid::new(256, 2.0 * PI).unwrap();
    let depth = Depth::Finite(1.0);
    let dec = lp_blocks(&SpectralField::mode(g, 14, 1.0, 0.0), depth);
    for (band, block) in dec.bands.iter().zip(&dec.blocks) {
        if let LpBand::Dyadic(l) = band {
            let norm = block.sup_norm();
            if *l == 16.0 {
                assert!((norm - 1.0).abs() < 1e-13, "own block changed the mode");
            }
            if *l >= 64.0 || *l <= 4.0 {
                assert!(norm < 1e-13);
            }
        }
    }
    let f = random_field(g, 9, 100);
    let sum = lp_blocks(&f, depth).sum();
    assert!(sum.sub(&f).sup_norm() < 1e-12);
    let zero = lp_blocks(&SpectralField::zeros(g), depth);
    assert!(zero.blocks.iter().all(|b| b.sup_norm() == 0.0));
}

#[test]
fn sobolev_norm_examples() {
    let g = grid(64);
    let zero = SpectralField::zeros(g);
    assert_eq!(sobolev_norm_h(&zero, NormSpace::HalfSum, 1.0).unwrap(), 0.0);
    let f = SpectralField::mode(g, 3, 1.0, 0.0);
    let v = sobolev_norm_h(&f, NormSpace::Hdot(1.5), 1.0).unwrap();
    assert!((v - (PI).sqrt() * 3f64.powf(1.5)).abs() < 1e-12);
    let c = SpectralField::constant(g, 2.0);
    let cap = sobolev_norm_h(&c, NormSpace::QuarterCap, 4.0).unwrap();
    assert!((cap - 4f64.powf(-0.25) * 2.0 * (2.0 * PI).sqrt()).abs() < 1e-12);
    assert!(matches!("H7_weird".parse::<NormSpace>(), Err(Error::UnknownTag(_))));
    assert_eq!("H1/2_h-sum".parse::<NormSpace>().unwrap(), NormSpace::HalfSum);
    assert_eq!("Hdot0.25".parse::<NormSpace>().unwrap(), NormSpace::Hdot(0.25));
}

#[test]
fn envelope_examples() {
    let env = FrequencyEnvelope::from_block_norms(1.0, vec![1.0, 2.0, 4.0, 8.0], vec![0.0, 0.0, 1.0, 0.0], 0.1);
    for (l, c) in env.lambdas.iter().zip(&env.values) {
        let e = (l / 4.0f64).powf(0.1).min((4.0 / l).powf(0.1));
        assert!((c - e).abs() < 1e-15);
    }
    let two = FrequencyEnvelope::from_block_norms(1.0, vec![1.0, 2.0, 4.0, 8.0], vec![0.5, 0.0, 1.0, 0.0], 0.1);
    let one = FrequencyEnvelope::from_block_norms(1.0, vec![1.0, 2.0, 4.0, 8.0], vec![0.5, 0.0, 0.0, 0.0], 0.1);
    for i in 0..4 {
        assert_eq!(two.values[i], env.values[i].max(one.values[i]));
    }
    let g = grid(64);
    let z = min_envelope(&SpectralField::zeros(g), 0.1, Depth::Finite(1.0), NormSpace::H1).unwrap();
    assert!(z.values.iter().all(|v| *v == 0.0));
}

#[test]
fn envelope_is_minimal() {
    let g = Grid::new(256, 2.0 * PI).unwrap();
    let f = random_field(g, 11, 100);
    let env = min_envelope(&f, 0.1, Depth::Finite(1.0), NormSpace::HalfSum).unwrap();
    assert!(env.is_admissible(1e-12));
    for i in 0..env.values.len() {
        let mut shrunk = env.clone();
        shrunk.values[i] *= 1.0 - 1e-6;
        assert!(!shrunk.is_admissible(0.0), "envelope entry {i} could shrink");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval(seed in 0u64..1000, n in prop::sample::select(vec![16usize, 32, 64])) {
        let f = random_field(grid(n), seed, (n / 2 - 1) as i64);
        let a = f.l2_norm();
        let b = f.l2_norm_samples();
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn tilbert_skew(seed in 0u64..1000, h in 0.05f64..20.0) {
        let g = grid(64);
        let f = random_field(g, seed, 31);
        let q = random_field(g, seed + 7919, 31);
        let d = Depth::Finite(h);
        let lhs = tilbert(&f, d).inner(&q);
        let rhs = -f.inner(&tilbert(&q, d));
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn projection_range_and_idempotence(seed in 0u64..1000, h in 0.1f64..10.0) {
        let g = grid(64);
        let re = random_field(g, seed, 31).add_constant(0.3);
        let im = random_field(g, seed + 1, 31);
        let d = Depth::Finite(h);
        let u = SpectralField::complex_from_parts(&re, &im);
        let p = holomorphic_project(&u, d).unwrap();
        prop_assert!(holomorphy_residual(&p, d) < 1e-10);
        let pp = holomorphic_project(&p, d).unwrap();
        prop_assert!(pp.sub(&p).sup_norm() < 1e-10);
    }

    #[test]
    fn large_depth_symbols_stay_finite(h in 1.0f64..1e4) {
        let g = Grid::new(512, 2.0 * PI).unwrap();
        let f = random_field(g, 3, 255);
        let t = tilbert(&f, Depth::Finite(h));
        let inv = tilbert_inv(&t, Depth::Finite(h)).unwrap();
        prop_assert!(inv.sub(&f).sup_norm() < 1e-10);
    }
}
