use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Diagonalizes periodic constant-coefficient difference operators on `n` nodes.
///
/// `mu[k] = (4/h²) sin²(πk/n)` is the symbol of `-D2`, the negated
/// three-point Laplacian.
pub struct PeriodicSolver {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    mu: Vec<f64>,
}

impl PeriodicSolver {
    pub fn new(n: usize, h: f64) -> Self {
        let mut planner = FftPlanner::new();
        let mu = (0..n)
            .map(|k| {
                let s = (std::f64::consts::PI * k as f64 / n as f64).sin();
                4.0 * s * s / (h * h)
            })
            .collect();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            mu,
        }
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// Applies the operator with symbol `multiplier(mu_k)` to `r`.
    pub fn apply<F: Fn(f64) -> f64>(&self, r: &[f64], multiplier: F) -> Vec<f64> {
        let n = self.mu.len();
        let mut buf: Vec<Complex<f64>> = r.iter().map(|&x| Complex::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        for (c, &m) in buf.iter_mut().zip(&self.mu) {
            *c *= multiplier(m);
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }
}

/// `-D2 x` with the periodic three-point stencil.
pub fn neg_laplacian(x: &[f64], h: f64) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| (2.0 * x[i] - x[(i + n - 1) % n] - x[(i + 1) % n]) / (h * h))
        .collect()
}
