//! Composite Gauss–Legendre rules built on `gauss-quad` nodes.

use gauss_quad::GaussLegendre;
use std::num::NonZeroUsize;

/// Nodes and weights of an n-point rule on [−1, 1], ascending in the node.
pub fn reference_rule(n: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n.max(1)).expect("nonzero");
    let rule = GaussLegendre::new(n);
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

/// Quadrature rule as parallel node / weight vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// n-point Gauss–Legendre on [a, b].
    pub fn gauss(a: f64, b: f64, n: usize) -> Self {
        Self::panels(&[a, b], n)
    }

    /// Composite rule with `n` nodes on each interval between consecutive breakpoints.
    pub fn panels(breaks: &[f64], n: usize) -> Self {
        let base = reference_rule(n);
        let mut nodes = Vec::with_capacity(n * breaks.len());
        let mut weights = Vec::with_capacity(n * breaks.len());
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let c = 0.5 * (a + b);
            let r = 0.5 * (b - a);
            for &(x, wt) in &base {
                nodes.push(c + r * x);
                weights.push(r * wt);
            }
        }
        Self { nodes, weights }
    }

    /// Panels on [a, b] whose widths grow geometrically by `ratio` starting at `w0`.
    pub fn graded(a: f64, b: f64, w0: f64, ratio: f64, n: usize) -> Self {
        let mut breaks = vec![a];
        let mut w = w0;
        let mut x = a;
        while x + w < b - 0.25 * w {
            x += w;
            breaks.push(x);
            w *= ratio;
        }
        breaks.push(b);
        Self::panels(&breaks, n)
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        let r = Rule::gauss(-1.0, 2.0, 5);
        let v = r.integrate(|x| x.powi(9));
        assert!((v - (2f64.powi(10) - 1.0) / 10.0).abs() < 1e-11);
    }

    #[test]
    fn graded_panels_cover_interval() {
        let r = Rule::graded(0.0, 7.3, 0.1, 2.0, 12);
        assert!((r.weights.iter().sum::<f64>() - 7.3).abs() < 1e-13);
        let v = r.integrate(|x| (-x).exp());
        assert!((v - (1.0 - (-7.3f64).exp())).abs() < 1e-13);
    }
}
