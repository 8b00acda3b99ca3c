//! One-dimensional quadrature meshes on the unit interval.
//!
//! Every integral and operator discretization in this crate runs over a
//! `Grid`: a set of interior nodes with positive weights summing to one.
//! The composite midpoint rule is the default because several densities
//! of interest have kinks (absolute values, region indicators) and the
//! midpoint rule keeps nodes off the boundary, where Archimedean
//! densities can blow up. Gauss-Legendre is available for smooth
//! integrands.

use crate::error::{Error, Result};

/// Quadrature scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Scheme {
    /// Composite midpoint rule: node i at (i+1/2)/N, weight 1/N.
    Midpoint,
    /// Gauss-Legendre nodes and weights mapped from [-1,1] to [0,1].
    GaussLegendre,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Midpoint => write!(f, "midpoint"),
            Scheme::GaussLegendre => write!(f, "gauss-legendre"),
        }
    }
}

/// Quadrature mesh on (0,1): strictly increasing interior nodes with
/// positive weights summing to 1.
#[derive(Debug, Clone)]
pub struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scheme: Scheme,
}

impl Grid {
    /// Composite midpoint mesh with `n` nodes.
    pub fn midpoint(n: usize) -> Grid {
        assert!(n >= 2, "grid needs at least 2 nodes");
        let nodes = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let weights = vec![1.0 / n as f64; n];
        Grid { nodes, weights, scheme: Scheme::Midpoint }
    }

    /// Gauss-Legendre mesh with `n` nodes on [0,1].
    pub fn gauss_legendre(n: usize) -> Grid {
        assert!(n >= 2, "grid needs at least 2 nodes");
        let (xs, ws) = gauss_legendre_unit(n);
        Grid { nodes: xs, weights: ws, scheme: Scheme::GaussLegendre }
    }

    pub fn new(scheme: Scheme, n: usize) -> Grid {
        match scheme {
            Scheme::Midpoint => Grid::midpoint(n),
            Scheme::GaussLegendre => Grid::gauss_legendre(n),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Index of the node at 1 - nodes[i]. Both schemes are symmetric
    /// about 1/2, so this is exact.
    pub fn flip_index(&self, i: usize) -> usize {
        self.len() - 1 - i
    }

    /// Index of the node nearest to `x`.
    pub fn nearest_index(&self, x: f64) -> usize {
        match self.scheme {
            Scheme::Midpoint => {
                let n = self.len() as f64;
                ((x * n - 0.5).round().max(0.0) as usize).min(self.len() - 1)
            }
            Scheme::GaussLegendre => {
                match self.nodes.binary_search_by(|a| a.total_cmp(&x)) {
                    Ok(i) => i,
                    Err(i) => {
                        if i == 0 {
                            0
                        } else if i >= self.len() {
                            self.len() - 1
                        } else if x - self.nodes[i - 1] <= self.nodes[i] - x {
                            i - 1
                        } else {
                            i
                        }
                    }
                }
            }
        }
    }

    /// Default tolerance for quadrature-derived quantities: 5/N.
    pub fn tolerance(&self) -> f64 {
        5.0 / self.len() as f64
    }

    /// Quadrature of `f` over (0,1).
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Quadrature of a node-sampled function.
    pub fn integrate_samples(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// L2 inner product of two node-sampled functions.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter()
            .zip(g)
            .zip(&self.weights)
            .map(|((a, b), w)| a * b * w)
            .sum()
    }

    /// L2 norm of a node-sampled function.
    pub fn norm(&self, f: &[f64]) -> f64 {
        self.inner(f, f).sqrt()
    }

    /// Checks the mesh invariants: weights positive and summing to 1,
    /// nodes strictly increasing inside (0,1).
    pub fn check(&self) -> Result<()> {
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Numeric {
                location: "grid weights".into(),
                message: format!("weights sum to {sum}, expected 1"),
            });
        }
        for (i, &x) in self.nodes.iter().enumerate() {
            if !(0.0 < x && x < 1.0) {
                return Err(Error::Numeric {
                    location: format!("grid node {i}"),
                    message: format!("node {x} outside (0,1)"),
                });
            }
            if i > 0 && x <= self.nodes[i - 1] {
                return Err(Error::Numeric {
                    location: format!("grid node {i}"),
                    message: "nodes not strictly increasing".into(),
                });
            }
        }
        if self.weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::Numeric {
                location: "grid weights".into(),
                message: "non-positive weight".into(),
            });
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on the
/// Legendre polynomial (standard, no lookup tables).
fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let m = n.div_ceil(2);
    for k in 0..m {
        // Initial guess (Abramowitz-Stegun) for the k-th root in (0,1).
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map from [-1,1] to [0,1]: node (1-x)/2 pairs with (1+x)/2.
        xs[k] = (1.0 - x) / 2.0;
        xs[n - 1 - k] = (1.0 + x) / 2.0;
        ws[k] = w / 2.0;
        ws[n - 1 - k] = w / 2.0;
    }
    (xs, ws)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let j = j as f64;
        let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn midpoint_nodes_and_weights() {
        let g = Grid::midpoint(8);
        g.check().unwrap();
        assert_abs_diff_eq!(g.nodes()[0], 0.0625);
        assert_abs_diff_eq!(g.nodes()[7], 0.9375);
        assert!(g.weights().iter().all(|&w| (w - 0.125).abs() < 1e-15));
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let g = Grid::gauss_legendre(16);
        g.check().unwrap();
        // Exact up to degree 31.
        for k in [1usize, 2, 7, 20, 31] {
            let exact = 1.0 / (k as f64 + 1.0);
            assert_abs_diff_eq!(g.integrate(|x| x.powi(k as i32)), exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn midpoint_quadrature_linear_exact() {
        let g = Grid::midpoint(32);
        assert_abs_diff_eq!(g.integrate(|x| 3.0 * x - 1.0), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn flip_index_is_exact() {
        for g in [Grid::midpoint(64), Grid::gauss_legendre(64)] {
            for i in 0..g.len() {
                let j = g.flip_index(i);
                assert!((g.nodes()[i] + g.nodes()[j] - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn nearest_index_roundtrip() {
        for g in [Grid::midpoint(33), Grid::gauss_legendre(17)] {
            for (i, &x) in g.nodes().iter().enumerate() {
                assert_eq!(g.nearest_index(x), i);
            }
        }
    }
}
