//! Tensor-product Gauss–Legendre quadrature on `[0, π]` and `[0, π]²`.
//!
//! Integrand values are evaluated in parallel but always summed with the same
//! pairwise tree over node index, so results do not depend on the number of
//! worker threads.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{domain, Result};

/// Default number of nodes per axis.
pub const DEFAULT_NODES: usize = 256;
/// Smallest accepted number of nodes per axis.
pub const MIN_NODES: usize = 16;

/// A Gauss–Legendre rule mapped onto `[0, π]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    pub fn new(nodes_per_axis: usize) -> Result<Self> {
        if nodes_per_axis < MIN_NODES {
            return Err(domain(format!(
                "quadrature needs at least {MIN_NODES} nodes per axis, got {nodes_per_axis}"
            )));
        }
        let (xs, ws) = gauss_legendre(nodes_per_axis);
        let half = PI / 2.0;
        Ok(Self {
            nodes: xs.iter().map(|x| half * (x + 1.0)).collect(),
            weights: ws.iter().map(|w| half * w).collect(),
        })
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The same rule with twice as many nodes per axis.
    pub fn doubled(&self) -> Self {
        Self::new(2 * self.nodes_per_axis()).expect("doubling keeps the node count valid")
    }

    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let terms: Vec<f64> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(&x, &w)| w * f(x))
            .collect();
        pairwise_sum(&terms)
    }

    pub fn integrate_2d<F>(&self, f: F) -> f64
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        pairwise_sum(&self.weighted_grid(f))
    }

    /// `w_i w_k f(x_i, x_k)` over the full grid, row-major in `(i, k)`.
    pub(crate) fn weighted_grid<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let n = self.nodes.len();
        (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (i, k) = (idx / n, idx % n);
                self.weights[i] * self.weights[k] * f(self.nodes[i], self.nodes[k])
            })
            .collect()
    }
}

impl Default for Quadrature {
    fn default() -> Self {
        Self::new(DEFAULT_NODES).expect("default node count is valid")
    }
}

/// Recursive halving sum; deterministic for a given slice.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let (left, right) = values.split_at(values.len() / 2);
    pairwise_sum(left) + pairwise_sum(right)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// ascending in `x`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's approximation of the i-th largest root, refined by Newton.
        let k = i as f64 + 1.0;
        let mut x =
            (PI * (k - 0.25) / (nf + 0.5)).cos() * (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf));
        let mut derivative = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            derivative = dp;
            let step = p / dp;
            x -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        if dp.is_finite() {
            derivative = dp;
        }
        let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
        xs[n - 1 - i] = x;
        xs[i] = -x;
        ws[n - 1 - i] = w;
        ws[i] = w;
    }
    (xs, ws)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (1.0, x);
    for m in 2..=n {
        let mf = m as f64;
        let next = ((2.0 * mf - 1.0) * x * p - (mf - 1.0) * p_prev) / mf;
        p_prev = p;
        p = next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_coarse_rules() {
        assert!(Quadrature::new(15).is_err());
        assert!(Quadrature::new(16).is_ok());
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [16, 17, 64, 256, 512] {
            let q = Quadrature::new(n).unwrap();
            assert_abs_diff_eq!(pairwise_sum(q.weights()), PI, epsilon = 1e-13);
            assert!(q.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(q.nodes()[0] > 0.0 && q.nodes()[n - 1] < PI);
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let q = Quadrature::new(16).unwrap();
        // ∫_0^π x^31 dx = π^32 / 32, compared relatively.
        let exact = PI.powi(32) / 32.0;
        let approx = q.integrate(|x| x.powi(31));
        assert!(((approx - exact) / exact).abs() < 1e-13);
    }

    #[test]
    fn smooth_integrals() {
        let q = Quadrature::default();
        assert_abs_diff_eq!(q.integrate(f64::sin), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            q.integrate_2d(|x, y| x.sin() * y.sin()),
            4.0,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(
            q.integrate(|x| (x / 2.0).cos().powi(2) * x.sin()),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn pairwise_sum_matches_naive_for_exact_values() {
        let values: Vec<f64> = (0..1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&values), 499_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn result_independent_of_thread_count() {
        let q = Quadrature::new(128).unwrap();
        let f = |x: f64, y: f64| (x * y).sin().abs().sqrt() + x.cos();
        let reference = q.integrate_2d(f);
        for threads in [1, 3] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            assert_eq!(
                pool.install(|| q.integrate_2d(f)).to_bits(),
                reference.to_bits()
            );
        }
    }
}
