//! Sampled kernel tables and the mass of K.

use super::kernel::{axis_a, axis_t, fourier_tail_bound, kernel_axis_part, kernel_fourier_grid, kernel_transport_many, FourierParams};
use crate::error::{Error, Result};
use crate::quadrature::Rule;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelMethod {
    /// Fourier integral of the symbol with the logarithmic axis parts removed.
    FourierInversion,
    /// Line-integral representation, evaluated by transport from the diagonal.
    LineIntegral,
}

impl FromStr for KernelMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fourier-inversion" | "fourier" => Ok(Self::FourierInversion),
            "line-integral" | "line" => Ok(Self::LineIntegral),
            other => Err(Error::UnknownTag(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelTableParams {
    pub delta_ax: f64,
    pub x_max: f64,
    /// Samples per axis.
    pub n: usize,
    pub method: KernelMethod,
    pub fourier: FourierParams,
}

impl Default for KernelTableParams {
    fn default() -> Self {
        Self { delta_ax: 0.05, x_max: 10.0, n: 200, method: KernelMethod::LineIntegral, fourier: FourierParams::default() }
    }
}

/// K on [δ_ax, X_max]². The other quadrants follow from evenness in each
/// variable; the table itself is symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelTable {
    pub xs: Vec<f64>,
    /// values[i][j] = K(xs[i], xs[j]).
    pub values: Vec<Vec<f64>>,
    pub delta_ax: f64,
    pub x_max: f64,
    pub method: KernelMethod,
    pub even: bool,
    pub symmetric: bool,
    /// Truncation bound of the Fourier integral, for that method.
    pub tail_bound: Option<f64>,
}

impl KernelTable {
    pub fn spacing(&self) -> f64 {
        if self.xs.len() < 2 { 0.0 } else { self.xs[1] - self.xs[0] }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// Smallest entry and its location.
    pub fn min(&self) -> (f64, (f64, f64)) {
        let mut best = (f64::INFINITY, (f64::NAN, f64::NAN));
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v < best.0 {
                    best = (v, (self.xs[i], self.xs[j]));
                }
            }
        }
        best
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().flatten().all(|v| v.is_finite())
    }
}

pub fn kernel_table(p: &KernelTableParams) -> Result<KernelTable> {
    if !(p.delta_ax > 0.0 && p.x_max > p.delta_ax && p.n >= 2) {
        return Err(Error::InvalidInput(format!("kernel table needs 0 < delta_ax < x_max and n >= 2, got {p:?}")));
    }
    let xs: Vec<f64> = (0..p.n).map(|i| p.delta_ax + (p.x_max - p.delta_ax) * i as f64 / (p.n - 1) as f64).collect();
    let (values, tail_bound) = match p.method {
        KernelMethod::LineIntegral => {
            let mut pts = Vec::with_capacity(p.n * (p.n + 1) / 2);
            for i in 0..p.n {
                for j in i..p.n {
                    pts.push((xs[i], xs[j]));
                }
            }
            let v = kernel_transport_many(&pts);
            let mut values = vec![vec![0.0; p.n]; p.n];
            let mut it = v.into_iter();
            for i in 0..p.n {
                for j in i..p.n {
                    let k = it.next().expect("one value per pair");
                    values[i][j] = k;
                    values[j][i] = k;
                }
            }
            (values, None)
        }
        KernelMethod::FourierInversion => (kernel_fourier_grid(&xs, &xs, p.fourier), Some(fourier_tail_bound(p.fourier))),
    };
    Ok(KernelTable { xs, values, delta_ax: p.delta_ax, x_max: p.x_max, method: p.method, even: true, symmetric: true, tail_bound })
}

/// ∬K over ℝ² split into the axis parts, integrated in closed form up to the
/// truncation, and the bounded remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub mass: f64,
    pub axis_mass: f64,
    pub remainder_mass: f64,
    pub x_max: f64,
}

fn mass_breaks(x_max: f64) -> Vec<f64> {
    let mut b = vec![0.0, 0.025, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0];
    let mut x = 1.0;
    while x + 0.5 < x_max + 1e-12 {
        x += 0.5;
        b.push(x);
    }
    if *b.last().expect("nonempty") < x_max {
        b.push(x_max);
    }
    b
}

/// Mass of K over [−X, X]².
pub fn kernel_mass(x_max: f64) -> MassReport {
    let rule = Rule::panels(&mass_breaks(x_max), 8);
    let n = rule.len();
    let mut pts = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            pts.push((rule.nodes[i], rule.nodes[j]));
        }
    }
    let k = kernel_transport_many(&pts);
    let mut rem = 0.0;
    let mut it = pts.iter().zip(k);
    for i in 0..n {
        for j in i..n {
            let (&(a, b), v) = it.next().expect("one value per pair");
            let w = rule.weights[i] * rule.weights[j] * if i == j { 1.0 } else { 2.0 };
            rem += w * (v - kernel_axis_part(a, b));
        }
    }
    let log_rule = Rule::graded(0.0, x_max, 1e-6, 2.0, 12);
    let ia = Rule::panels(&mass_breaks(x_max), 12).integrate(axis_a);
    // T̂ has a logarithmic singularity at 0; geometric panels resolve it
    let it_ = log_rule.integrate(axis_t);
    let axis = 4.0 * 2.0 * ia * it_;
    MassReport { mass: axis + 4.0 * rem, axis_mass: axis, remainder_mass: 4.0 * rem, x_max }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_is_one_half() {
        let m = kernel_mass(12.0);
        assert!((m.mass - 0.5).abs() < 1e-6, "{m:?}");
    }

    #[test]
    fn methods_agree_on_small_table() {
        let mut p = KernelTableParams { n: 6, x_max: 4.0, ..Default::default() };
        let a = kernel_table(&p).unwrap();
        p.method = KernelMethod::FourierInversion;
        let b = kernel_table(&p).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert!((a.get(i, j) - b.get(i, j)).abs() < 1e-4);
            }
        }
        assert!(b.tail_bound.unwrap() < 1e-4);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(kernel_table(&KernelTableParams { delta_ax: 0.0, ..Default::default() }).is_err());
    }
}
