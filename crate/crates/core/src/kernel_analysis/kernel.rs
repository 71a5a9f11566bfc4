//! Point values of the kernel K, the inverse Fourier transform of b.
//!
//! With c = π/4, F = coth(c·), G = tanh(c·) the kernel is a line integral of
//! F and G along y = y₀ + |x − x₀|. Differentiating that representation gives
//! closed one-dimensional integrals for the two directional derivatives:
//!
//! * (∂_y − ∂_x)K(x, y) = 4c² ∫_x^∞ uv(u−v)(1−uv)/((1−u²)²(1−v²)²) ds with
//!   u = e^{−2cs}, v = e^{−2c(s+y−x)}, positive for 0 < x < y;
//! * K(m, m) = −(1/16) ∫_{cm}^∞ I(u) du, with I the diagonal finite-part integral.
//!
//! The transport form K(x, y) = K(m, m) + ∫_x^m (∂_y − ∂_x)K(s, 2m − s) ds,
//! m = (x + y)/2, involves only positive integrands and keeps full relative
//! accuracy far from the axes, where K is exponentially small.

use super::pv::{csch2, diagonal_pv_integral, sech2};
use super::symbol::symbol_b;
use crate::quadrature::Rule;
use crate::spectral_ops::Depth;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

const C: f64 = PI / 4.0;
/// Beyond this diagonal argument I(u) = −64e^{−6u} to 1e−12 relative.
const DIAG_ASYMPTOTIC: f64 = 7.0;

fn fold(x1: f64, x2: f64) -> (f64, f64) {
    let (a, b) = (x1.abs(), x2.abs());
    if a <= b { (a, b) } else { (b, a) }
}

/// (∂_y − ∂_x)K(x, y) for 0 < x ≤ y.
pub fn kernel_antidiagonal_slope(x: f64, y: f64) -> f64 {
    let d = y - x;
    let e = -(-2.0 * C * d).exp_m1();
    let rule = Rule::graded(x, x + 13.0, x.min(0.5), 2.0, 12);
    let body = |s: f64| {
        let u = (-2.0 * C * s).exp();
        let v = (-2.0 * C * (s + d)).exp();
        let one_u2 = -(-4.0 * C * s).exp_m1();
        let one_v2 = -(-4.0 * C * (s + d)).exp_m1();
        u * v * (u * e) * (1.0 - u * v) / (one_u2 * one_u2 * one_v2 * one_v2)
    };
    4.0 * C * C * rule.integrate(body)
}

/// (∂_x + ∂_y)K on the diagonal at (x, x); negative.
pub fn kernel_diagonal_slope(x: f64) -> f64 {
    PI / 64.0 * diagonal_pv_integral(C * x)
}

fn diag_tail(u: f64) -> f64 {
    // ∫_u^∞ −64e^{−6s}(1 − (7/3)e^{−4s}) ds
    -64.0 / 6.0 * (-6.0 * u).exp() + 64.0 * 7.0 / 30.0 * (-10.0 * u).exp()
}

fn diag_segment(a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let rule = if b > 2.0 * a { Rule::graded(a, b, a, 2.0, 12) } else { Rule::gauss(a, b, 12) };
    rule.integrate(diagonal_pv_integral)
}

/// K(m, m) for many m at once; the diagonal integral is accumulated once
/// across the sorted distinct arguments.
pub fn kernel_diagonal_many(ms: &[f64]) -> Vec<f64> {
    let mut us: Vec<f64> = ms.iter().map(|m| C * m.abs()).collect();
    us.sort_by(f64::total_cmp);
    us.dedup();
    let mut tail: BTreeMap<u64, f64> = BTreeMap::new();
    let mut acc = diag_tail(DIAG_ASYMPTOTIC);
    let mut upper = DIAG_ASYMPTOTIC;
    for &u in us.iter().rev() {
        if u >= DIAG_ASYMPTOTIC {
            tail.insert(u.to_bits(), diag_tail(u));
            continue;
        }
        acc += diag_segment(u, upper);
        upper = u;
        tail.insert(u.to_bits(), acc);
    }
    ms.iter().map(|m| -tail[&(C * m.abs()).to_bits()] / 16.0).collect()
}

/// K(m, m).
pub fn kernel_diagonal(m: f64) -> f64 {
    kernel_diagonal_many(&[m])[0]
}

fn transport_part(x: f64, y: f64) -> f64 {
    let m = 0.5 * (x + y);
    if m - x <= 0.0 {
        return 0.0;
    }
    let rule = Rule::graded(x, m, x.min(m - x).min(0.5), 2.0, 12);
    rule.integrate(|s| kernel_antidiagonal_slope(s, 2.0 * m - s))
}

/// K at many points by transport from the diagonal. Points on an axis give +∞.
pub fn kernel_transport_many(points: &[(f64, f64)]) -> Vec<f64> {
    let folded: Vec<(f64, f64)> = points.iter().map(|&(a, b)| fold(a, b)).collect();
    let ms: Vec<f64> = folded.iter().map(|&(a, b)| 0.5 * (a + b)).collect();
    let diag = kernel_diagonal_many(&ms);
    let rest = par_map(&folded, |&(a, b)| if a == 0.0 { f64::INFINITY } else { transport_part(a, b) });
    diag.iter().zip(rest).map(|(d, r)| d + r).collect()
}

/// K(x₁, x₂) by transport from the diagonal.
pub fn kernel_transport(x1: f64, x2: f64) -> f64 {
    kernel_transport_many(&[(x1, x2)])[0]
}

/// K(x₁, x₂) from the line-integral representation evaluated directly. Its
/// terms cancel to the size of K, so the absolute error is about 1e−16.
pub fn kernel_line(x1: f64, x2: f64) -> f64 {
    let (x0, y0) = fold(x1, x2);
    if x0 == 0.0 {
        return f64::INFINITY;
    }
    let y = |x: f64| y0 + (x - x0).abs();
    let f = |x: f64| 1.0 / (C * x).tanh();
    let gp = |x: f64| C * sech2(C * x);
    let fp = |x: f64| -C * csch2(C * x);
    let f_minus_1 = |y: f64| 2.0 / (2.0 * C * y).exp_m1();
    let g_minus_1 = |y: f64| -2.0 / ((2.0 * C * y).exp() + 1.0);
    let far = 40.0;
    let near = |a: f64, b: f64| Rule::graded(a, b, (b - a).min(0.5), 1.5, 16);
    // G'(x)(F(y) − 1) over the whole line
    let t1 = Rule::graded(0.0, far, 0.5, 1.5, 16).integrate(|s| gp(-s) * f_minus_1(y(-s)))
        + near(0.0, x0).integrate(|x| gp(x) * f_minus_1(y(x)))
        + Rule::graded(x0, x0 + far, 0.5, 1.5, 16).integrate(|x| gp(x) * f_minus_1(y(x)));
    // −F'(x)(G(y) − 1) on the right branch
    let t2r = Rule::graded(x0, x0 + far, x0.min(0.5), 1.5, 16).integrate(|x| -fp(x) * g_minus_1(y(x)));
    // left branch integrated by parts; F(x)G'(y) pairs ±s across the pole
    let a = x0.min(1.0);
    let mut pv = Rule::gauss(0.0, a, 32).integrate(|s| f(s) * gp(y(s)) + f(-s) * gp(y(-s)))
        + Rule::graded(a, a + far, 0.5, 1.5, 16).integrate(|s| f(-s) * gp(y(-s)));
    if x0 > a {
        pv += Rule::graded(a, x0, 0.5, 1.5, 16).integrate(|x| f(x) * gp(y(x)));
    }
    let t2l = -f(x0) * g_minus_1(y0) - pv;
    (t1 + t2r + t2l) / 32.0
}

/// Parts of K that carry the logarithmic axis singularity:
/// Â(x₁)T̂(x₂) + Â(x₂)T̂(x₁) with Â(x) = (π/16)sech²(πx/4), T̂(x) = ln coth(π|x|/4)/π.
pub fn kernel_axis_part(x1: f64, x2: f64) -> f64 {
    axis_a(x1) * axis_t(x2) + axis_a(x2) * axis_t(x1)
}

pub(crate) fn axis_a(x: f64) -> f64 {
    PI / 16.0 * sech2(C * x)
}

pub(crate) fn axis_t(x: f64) -> f64 {
    let a = (2.0 * C * x.abs()).exp();
    // coth(c|x|) = (a + 1)/(a − 1)
    (2.0 / (a - 1.0)).ln_1p() / PI
}

fn sym_a(xi: f64) -> f64 {
    // ξ / sinh 2ξ
    let t = 2.0 * xi.abs();
    if t < 1e-8 { 0.5 } else if t > 700.0 { 0.0 } else { 0.5 * t / t.sinh() }
}

fn sym_t(z: f64) -> f64 {
    if z.abs() < 1e-8 { 1.0 } else { z.tanh() / z }
}

/// b minus the symbols of the two axis parts; decays in every direction.
pub fn symbol_remainder(xi: f64, zeta: f64) -> f64 {
    symbol_b(xi, zeta) - sym_a(xi) * sym_t(zeta) - sym_a(zeta) * sym_t(xi)
}

/// Parameters of the Fourier inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierParams {
    /// Frequency cutoff Ξ.
    pub cutoff: f64,
    /// Gauss panels per unit frequency.
    pub panels_per_unit: f64,
    /// Nodes per panel.
    pub nodes: usize,
}

impl Default for FourierParams {
    fn default() -> Self {
        Self { cutoff: 40.0, panels_per_unit: 2.5, nodes: 8 }
    }
}

/// K on a tensor grid xs × ys from the Fourier integral of the symbol remainder
/// plus the analytic axis parts. Returns rows indexed by xs.
pub fn kernel_fourier_grid(xs: &[f64], ys: &[f64], p: FourierParams) -> Vec<Vec<f64>> {
    let panels = (p.cutoff * p.panels_per_unit).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=panels).map(|i| p.cutoff * i as f64 / panels as f64).collect();
    let rule = Rule::panels(&breaks, p.nodes);
    let n = rule.len();
    let cx: Vec<Vec<f64>> = xs.iter().map(|&x| rule.nodes.iter().zip(&rule.weights).map(|(k, w)| w * (x * k).cos()).collect()).collect();
    let cy: Vec<Vec<f64>> = ys.iter().map(|&y| rule.nodes.iter().zip(&rule.weights).map(|(k, w)| w * (y * k).cos()).collect()).collect();
    // M[i][q] = Σ_j r(ξ_i, ζ_j) cy[q][j]
    let idx: Vec<usize> = (0..n).collect();
    let m: Vec<Vec<f64>> = par_map(&idx, |&i| {
        let xi = rule.nodes[i];
        let row: Vec<f64> = rule.nodes.iter().map(|&z| symbol_remainder(xi, z)).collect();
        cy.iter().map(|c| row.iter().zip(c).map(|(r, w)| r * w).sum()).collect()
    });
    xs.iter()
        .zip(&cx)
        .map(|(&x, cxr)| {
            ys.iter()
                .enumerate()
                .map(|(q, &y)| {
                    let rem: f64 = (0..n).map(|i| cxr[i] * m[i][q]).sum::<f64>() / (PI * PI);
                    rem + kernel_axis_part(x, y)
                })
                .collect()
        })
        .collect()
}

/// Size of the remainder symbol along the cutoff edge times the cutoff, a
/// bound on the truncated part of the Fourier integral.
pub fn fourier_tail_bound(p: FourierParams) -> f64 {
    let x = p.cutoff;
    let edge = (0..=200).map(|i| symbol_remainder(x, x * i as f64 / 200.0).abs()).fold(0.0, f64::max);
    2.0 * edge * x / (PI * PI)
}

/// K_h(x₁, x₂) = h^{−2} K(x₁/h, x₂/h).
pub fn kernel_h(x1: f64, x2: f64, depth: Depth) -> f64 {
    match depth {
        Depth::Finite(h) => kernel_transport(x1 / h, x2 / h) / (h * h),
        Depth::Infinite => 0.0,
    }
}

/// Maps items in parallel across the available cores, keeping order.
pub(crate) fn par_map<T: Sync, R: Send, F: Fn(&T) -> R + Sync>(items: &[T], f: F) -> Vec<R> {
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(items.len().max(1));
    if threads <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| scope.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // 30-digit quadrature of the line-integral representation
    const REFERENCE: [(f64, f64, f64); 7] = [
        (0.3, 0.5, 0.0761482949362),
        (1.0, 1.0, 0.00564898748102),
        (0.1, 2.0, 0.0164629577439),
        (2.0, 3.0, 6.75387418211e-6),
        (10.0, 10.0, 2.281725696e-21),
        (5.0, 5.0, 3.900192075e-11),
        (0.05, 10.0, 8.468689527e-8),
    ];

    #[test]
    fn transport_matches_reference() {
        let pts: Vec<(f64, f64)> = REFERENCE.iter().map(|r| (r.0, r.1)).collect();
        let got = kernel_transport_many(&pts);
        for (r, g) in REFERENCE.iter().zip(got) {
            assert!(((g - r.2) / r.2).abs() < 1e-8, "K({}, {}) = {g:e}, expected {:e}", r.0, r.1, r.2);
        }
    }

    #[test]
    fn line_matches_reference_in_absolute_terms() {
        for r in REFERENCE {
            let g = kernel_line(r.0, r.1);
            assert!((g - r.2).abs() < 1e-12, "K({}, {}) = {g:e}, expected {:e}", r.0, r.1, r.2);
        }
    }

    #[test]
    fn fourier_matches_transport() {
        let xs = [0.3, 1.0, 2.0];
        let ys = [0.5, 1.0, 3.0];
        let f = kernel_fourier_grid(&xs, &ys, FourierParams::default());
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let t = kernel_transport(x, y);
                assert!((f[i][j] - t).abs() < 1e-5, "({x},{y}) {} vs {t}", f[i][j]);
            }
        }
    }

    #[test]
    fn symmetric_and_even() {
        let k = kernel_transport(0.4, 1.3);
        assert_eq!(k, kernel_transport(1.3, 0.4));
        assert_eq!(k, kernel_transport(-0.4, 1.3));
        assert_eq!(k, kernel_transport(0.4, -1.3));
    }

    #[test]
    fn slopes_match_finite_differences() {
        let h = 1e-4;
        let (x, y) = (0.7, 1.9);
        let fd = (kernel_transport(x - h, y + h) - kernel_transport(x + h, y - h)) / (2.0 * h);
        // d/dt K(x − t, y + t) = (∂_y − ∂_x)K
        assert!((fd - kernel_antidiagonal_slope(x, y)).abs() < 1e-7);
        let fd = (kernel_transport(x + h, x + h) - kernel_transport(x - h, x - h)) / (2.0 * h);
        assert!((fd - kernel_diagonal_slope(x)).abs() < 1e-7);
    }

    #[test]
    fn depth_scaling() {
        let k = kernel_h(0.6, 1.2, Depth::Finite(2.0));
        assert!((k - kernel_transport(0.3, 0.6) / 4.0).abs() < 1e-15);
    }
}
