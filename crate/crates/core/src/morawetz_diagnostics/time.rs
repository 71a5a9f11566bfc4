//! Quadrature and differentiation over snapshot times.

/// Running integrals ∫_{t₀}^{t_i} f dt: trapezoid with the Euler–Maclaurin
/// end correction −Δt²/12 (f'(t_i) − f'(t₀)), slopes from one-sided
/// four-point differences. Fourth order on uniform snapshots.
pub fn cumulative_integral(t: &[f64], f: &[f64]) -> Vec<f64> {
    let n = t.len();
    let mut out = vec![0.0; n];
    for i in 1..n {
        out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    }
    if n < 4 || !uniform(t) {
        return out;
    }
    let dt = t[1] - t[0];
    let d0 = (-11.0 * f[0] + 18.0 * f[1] - 9.0 * f[2] + 2.0 * f[3]) / (6.0 * dt);
    for i in 2..n {
        let di = if i >= 3 {
            (11.0 * f[i] - 18.0 * f[i - 1] + 9.0 * f[i - 2] - 2.0 * f[i - 3]) / (6.0 * dt)
        } else {
            (3.0 * f[i] - 4.0 * f[i - 1] + f[i - 2]) / (2.0 * dt)
        };
        out[i] -= dt * dt / 12.0 * (di - d0);
    }
    out
}

pub fn integral(t: &[f64], f: &[f64]) -> f64 {
    cumulative_integral(t, f).last().copied().unwrap_or(0.0)
}

pub(crate) fn uniform(t: &[f64]) -> bool {
    if t.len() < 2 {
        return true;
    }
    let dt = t[1] - t[0];
    t.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs())
}

/// Time derivative at each snapshot: five-point differences, centered in the
/// interior and one-sided at the ends (fourth order throughout when n ≥ 5).
/// Uniform snapshots only; `None` otherwise.
pub fn derivative(t: &[f64], f: &[f64]) -> Option<Vec<f64>> {
    let n = t.len();
    if n < 3 || !uniform(t) {
        return None;
    }
    let dt = t[1] - t[0];
    if n < 5 {
        let mut out = vec![0.0; n];
        for i in 0..n {
            out[i] = if i == 0 {
                (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt)
            } else if i == n - 1 {
                (3.0 * f[i] - 4.0 * f[i - 1] + f[i - 2]) / (2.0 * dt)
            } else {
                (f[i + 1] - f[i - 1]) / (2.0 * dt)
            };
        }
        return Some(out);
    }
    let edge = |g: &dyn Fn(usize) -> f64| (-25.0 * g(0) + 48.0 * g(1) - 36.0 * g(2) + 16.0 * g(3) - 3.0 * g(4)) / (12.0 * dt);
    let near = |g: &dyn Fn(usize) -> f64| (-3.0 * g(0) - 10.0 * g(1) + 18.0 * g(2) - 6.0 * g(3) + g(4)) / (12.0 * dt);
    let fwd = |k: usize| f[k];
    let bwd = |k: usize| f[n - 1 - k];
    let mut out = vec![0.0; n];
    for i in 2..n - 2 {
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * dt);
    }
    out[0] = edge(&fwd);
    out[1] = near(&fwd);
    out[n - 1] = -edge(&bwd);
    out[n - 2] = -near(&bwd);
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_integral_is_fourth_order() {
        let err = |n: usize| {
            let t: Vec<f64> = (0..=n).map(|i| 2.0 * i as f64 / n as f64).collect();
            let f: Vec<f64> = t.iter().map(|x| x.sin()).collect();
            (integral(&t, &f) - (1.0 - 2f64.cos())).abs()
        };
        let (a, b) = (err(40), err(80));
        assert!(a / b > 8.0, "{a} {b}");
        assert!(b < 1e-9);
    }

    #[test]
    fn derivative_of_polynomial() {
        let t: Vec<f64> = (0..11).map(|i| 0.1 * i as f64).collect();
        let f: Vec<f64> = t.iter().map(|x| x.powi(4)).collect();
        let d = derivative(&t, &f).unwrap();
        for (x, v) in t.iter().zip(&d) {
            assert!((v - 4.0 * x.powi(3)).abs() < 1e-11);
        }
    }
}
