//! Checks run over a kernel table: positivity, directional derivative signs,
//! the split K = K₁ + L⊗L and the resulting lower bound on Qₘ.

use super::kernel::{kernel_antidiagonal_slope, kernel_diagonal_slope, kernel_transport_many};
use super::table::KernelTable;
use crate::error::{Error, Result};
use crate::morawetz_diagnostics::{bh_form, windowed, Weight};
use crate::morawetz_diagnostics::time::integral;
use crate::spectral_ops::{Depth, SpectralField};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub min: f64,
    pub argmin: (f64, f64),
    pub positive: bool,
    /// K(x₁, 1) as x₁ halves toward the axis.
    pub near_axis: Vec<(f64, f64)>,
    pub near_axis_increasing: bool,
    /// K(x, x) on the table grid.
    pub diagonal: Vec<(f64, f64)>,
    pub diagonal_positive: bool,
    /// Least-squares decay rate of ln K(x, x) over x ≥ 2.
    pub diagonal_decay_rate: f64,
}

pub fn positivity_scan(table: &KernelTable) -> PositivityReport {
    let (min, argmin) = table.min();
    let xs: Vec<f64> = (0..7).map(|k| 0.4 * 0.5f64.powi(k)).collect();
    let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, 1.0)).collect();
    let near: Vec<(f64, f64)> = xs.iter().cloned().zip(kernel_transport_many(&pts)).collect();
    let near_axis_increasing = near.windows(2).all(|w| w[1].1 > w[0].1);
    let diagonal: Vec<(f64, f64)> = table.xs.iter().enumerate().map(|(i, &x)| (x, table.get(i, i))).collect();
    let diagonal_positive = diagonal.iter().all(|d| d.1 > 0.0);
    let fit: Vec<(f64, f64)> = diagonal.iter().filter(|d| d.0 >= 2.0 && d.1 > 0.0).map(|d| (d.0, d.1.ln())).collect();
    let diagonal_decay_rate = if fit.len() >= 2 {
        let n = fit.len() as f64;
        let mx = fit.iter().map(|p| p.0).sum::<f64>() / n;
        let my = fit.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = fit.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = fit.iter().map(|p| (p.0 - mx).powi(2)).sum();
        -sxy / sxx
    } else {
        f64::NAN
    };
    PositivityReport {
        min,
        argmin,
        positive: min > 0.0 && table.all_finite(),
        near_axis: near,
        near_axis_increasing,
        diagonal,
        diagonal_positive,
        diagonal_decay_rate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignViolation {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalReport {
    /// Centered differences of (∂_y − ∂_x)K checked for x < y.
    pub antidiagonal_checked: usize,
    pub antidiagonal_violations: Vec<SignViolation>,
    /// Centered differences of (∂_x + ∂_y)K checked on the diagonal.
    pub diagonal_checked: usize,
    pub diagonal_violations: Vec<SignViolation>,
    /// Largest |(∂_y − ∂_x)K| on the diagonal by differences; zero by symmetry.
    pub diagonal_antislope: f64,
    /// (∂_y − ∂_x)K(1, 2) from its integral form.
    pub antidiagonal_at_1_2: f64,
    /// (∂_x + ∂_y)K(1, 1) from its integral form.
    pub diagonal_at_1: f64,
}

impl DirectionalReport {
    pub fn clean(&self) -> bool {
        self.antidiagonal_violations.is_empty() && self.diagonal_violations.is_empty()
    }
}

/// Relative accuracy of table entries used for the noise margin.
const TABLE_RELATIVE_ACCURACY: f64 = 1e-9;

pub fn directional_signs(table: &KernelTable) -> DirectionalReport {
    let n = table.xs.len();
    let h = table.spacing();
    let k = |i: usize, j: usize| table.get(i, j);
    let noise_of = |vals: &[f64]| TABLE_RELATIVE_ACCURACY * vals.iter().map(|v| v.abs()).sum::<f64>() / (2.0 * h) + 1e-300;
    let mut anti = Vec::new();
    let mut anti_checked = 0;
    let mut antislope: f64 = 0.0;
    for i in 1..n.saturating_sub(1) {
        for j in i..n - 1 {
            let vals = [k(i, j + 1), k(i, j - 1), k(i + 1, j), k(i - 1, j)];
            let d = (vals[0] - vals[1] - vals[2] + vals[3]) / (2.0 * h);
            if j == i {
                antislope = antislope.max(d.abs());
                continue;
            }
            anti_checked += 1;
            let noise = noise_of(&vals);
            if d < -noise {
                anti.push(SignViolation { x: table.xs[i], y: table.xs[j], value: d, noise });
            }
        }
    }
    let mut diag = Vec::new();
    let mut diag_checked = 0;
    for i in 1..n.saturating_sub(1) {
        let vals = [k(i + 1, i), k(i - 1, i), k(i, i + 1), k(i, i - 1)];
        let d = (vals[0] - vals[1] + vals[2] - vals[3]) / (2.0 * h);
        diag_checked += 1;
        let noise = noise_of(&vals);
        if d >= noise {
            diag.push(SignViolation { x: table.xs[i], y: table.xs[i], value: d, noise });
        }
    }
    DirectionalReport {
        antidiagonal_checked: anti_checked,
        antidiagonal_violations: anti,
        diagonal_checked: diag_checked,
        diagonal_violations: diag,
        diagonal_antislope: antislope,
        antidiagonal_at_1_2: kernel_antidiagonal_slope(1.0, 2.0),
        diagonal_at_1: kernel_diagonal_slope(1.0),
    }
}

/// K = K₁ + L⊗L with L(x) = A e^{−x²/(2s²)} and K₁ ≥ 0 on the table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub amplitude: f64,
    pub width: f64,
    /// ∬ L⊗L over the plane.
    pub split_mass: f64,
    /// ∬ K₁ = ½ − ∬ L⊗L.
    pub c: f64,
    /// min (K − L⊗L) over the table.
    pub min_remainder: f64,
    pub margin: f64,
}

impl SplitReport {
    /// The trivial split L = 0.
    pub fn trivial() -> Self {
        Self { amplitude: 0.0, width: 0.0, split_mass: 0.0, c: 0.5, min_remainder: f64::NAN, margin: 0.0 }
    }
}

/// Searches the Gaussian width; for each width the amplitude is the largest
/// that keeps K − L⊗L ≥ margin·K on the table.
pub fn split_mass(table: &KernelTable, margin: f64) -> Result<SplitReport> {
    if !(0.0..1.0).contains(&margin) {
        return Err(Error::InvalidInput(format!("split margin {margin} must lie in [0, 1)")));
    }
    if table.min().0 <= 0.0 {
        return Err(Error::SplitFailure("kernel is not positive on the table".into()));
    }
    let amp2 = |s: f64| {
        let mut a2 = f64::INFINITY;
        for (i, &x) in table.xs.iter().enumerate() {
            for (j, &y) in table.xs.iter().enumerate().skip(i) {
                let bound = (1.0 - margin) * table.get(i, j) * ((x * x + y * y) / (2.0 * s * s)).exp();
                a2 = a2.min(bound);
            }
        }
        a2
    };
    let mut best: Option<(f64, f64, f64)> = None;
    for k in 0..=60 {
        let s = 0.05 * 1.06f64.powi(k);
        let a2 = amp2(s);
        let mass = 2.0 * PI * a2 * s * s;
        if a2.is_finite() && a2 > 0.0 && best.is_none_or(|b| mass > b.2) {
            best = Some((s, a2, mass));
        }
    }
    let (s, a2, mass) = best.ok_or_else(|| Error::SplitFailure(format!("no Gaussian fits under K at margin {margin}")))?;
    let a = a2.sqrt();
    let mut min_remainder = f64::INFINITY;
    for (i, &x) in table.xs.iter().enumerate() {
        for (j, &y) in table.xs.iter().enumerate() {
            let l = a2 * (-(x * x + y * y) / (2.0 * s * s)).exp();
            min_remainder = min_remainder.min(table.get(i, j) - l);
        }
    }
    if min_remainder < 0.0 {
        return Err(Error::SplitFailure(format!("remainder {min_remainder:e} negative")));
    }
    Ok(SplitReport { amplitude: a, width: s, split_mass: mass, c: 0.5 - mass, min_remainder, margin })
}

/// Both sides of ∫∫ m_x B^h(η,η) dx dt ≥ −c sup_{x₀} ∫∫ m_x(x − x₀) η² dx dt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QmBoundReport {
    pub lhs: f64,
    /// sup over x₀ of the translated weighted η² integral.
    pub sup: f64,
    pub sup_at: f64,
    pub c: f64,
    pub rhs: f64,
    pub holds: bool,
    /// lhs − rhs.
    pub slack: f64,
}

/// `series` holds (t, η(t)) on a common grid; the weight supplies m_x.
pub fn qm_lower_bound_check(series: &[(f64, SpectralField)], weight: &Weight, depth: Depth, c: f64) -> Result<QmBoundReport> {
    if series.is_empty() {
        return Err(Error::InvalidInput("empty η series".into()));
    }
    let times: Vec<f64> = series.iter().map(|s| s.0).collect();
    let mut lhs_t = Vec::with_capacity(series.len());
    let mut sq_t = Vec::with_capacity(series.len());
    for (_, eta) in series {
        let b = bh_form(eta, depth)?;
        lhs_t.push(weight.integrate_mx(&b).re);
        let fine = eta.resample(2 * eta.grid().n())?;
        sq_t.push(windowed(&fine.mul(&fine), weight));
    }
    let grid = series[0].1.grid();
    let fine_nodes = crate::spectral_ops::Grid::new(2 * grid.n(), grid.period())?.nodes();
    let (lhs, per_x0): (f64, Vec<f64>) = if series.len() == 1 {
        (lhs_t[0], sq_t[0].clone())
    } else {
        let per = (0..sq_t[0].len()).map(|m| integral(&times, &sq_t.iter().map(|v| v[m]).collect::<Vec<_>>())).collect();
        (integral(&times, &lhs_t), per)
    };
    let (mut sup, mut at) = (f64::NEG_INFINITY, 0.0);
    for (v, x) in per_x0.iter().zip(&fine_nodes) {
        if *v > sup {
            sup = *v;
            at = *x;
        }
    }
    let rhs = -c * sup;
    Ok(QmBoundReport { lhs, sup, sup_at: at, c, rhs, holds: lhs >= rhs, slack: lhs - rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_analysis::{kernel_table, KernelTableParams};
    use crate::morawetz_diagnostics::{make_weight, WeightKind};
    use crate::spectral_ops::Grid;

    fn table(n: usize) -> KernelTable {
        kernel_table(&KernelTableParams { n, ..Default::default() }).unwrap()
    }

    #[test]
    fn positivity_and_asymptotics() {
        let r = positivity_scan(&table(40));
        assert!(r.positive && r.min > 0.0);
        assert!(r.near_axis_increasing);
        assert!(r.diagonal_positive);
        // K(m, m) ~ (2/3)e^{−3πm/2}
        assert!((r.diagonal_decay_rate - 1.5 * PI).abs() < 0.05, "{}", r.diagonal_decay_rate);
    }

    #[test]
    fn directional_signs_hold() {
        let r = directional_signs(&table(60));
        assert!(r.clean(), "{:?} {:?}", r.antidiagonal_violations.first(), r.diagonal_violations.first());
        assert!(r.antidiagonal_at_1_2 > 0.0 && r.diagonal_at_1 < 0.0);
        assert!(r.diagonal_antislope < 1e-12);
    }

    #[test]
    fn split_gains_mass() {
        let t = table(50);
        let s = split_mass(&t, 0.05).unwrap();
        assert!(s.c < 0.5 && s.min_remainder >= 0.0);
        assert!((s.c + s.split_mass - 0.5).abs() < 1e-15);
        assert_eq!(SplitReport::trivial().c, 0.5);
    }

    fn series(f: impl Fn(f64, f64) -> f64) -> (Vec<(f64, SpectralField)>, Weight) {
        let grid = Grid::new(256, 40.0).unwrap();
        let w = make_weight(WeightKind::Bump { width: 2.0 }, &grid, 20.0).unwrap();
        let s = (0..=20)
            .map(|i| {
                let t = 0.1 * i as f64;
                (t, SpectralField::from_fn(grid, |x| f(t, x)))
            })
            .collect();
        (s, w)
    }

    #[test]
    fn zero_eta_gives_zero() {
        let (s, w) = series(|_, _| 0.0);
        let r = qm_lower_bound_check(&s, &w, Depth::Finite(1.0), 0.4).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.holds);
    }

    #[test]
    fn low_mode_and_resonant_packet_satisfy_bound() {
        let k0 = 2.0 * PI / 40.0;
        let (s, w) = series(|t, x| (k0 * x - 0.3 * t).cos());
        let r = qm_lower_bound_check(&s, &w, Depth::Finite(1.0), 0.45).unwrap();
        assert!(r.holds && r.slack > 0.0, "{r:?}");
        let (s, w) = series(|t, x| (-(x - 20.0).powi(2) / 2.0).exp() * (x - 0.5 * t).cos());
        let r = qm_lower_bound_check(&s, &w, Depth::Finite(1.0), 0.45).unwrap();
        assert!(r.holds, "{r:?}");
    }
}
