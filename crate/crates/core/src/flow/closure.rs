use crate::error::{Error, Result};
use crate::model::{closure_defect, geometry::norm, FieldState};

/// Largest Gram-matrix condition number accepted by the closure projection.
pub const GRAM_CONDITION_LIMIT: f64 = 1e10;

/// Gradients of the closure functionals `h Σ cos u` and `h Σ sin u` (per unit `h`):
/// `(−sin u, cos u)`.
pub fn constraint_gradients(u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    u.iter().map(|a| (-a.sin(), a.cos())).unzip()
}

pub(crate) fn dot(h: f64, a: &[f64], b: &[f64]) -> f64 {
    h * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

/// Condition number of a symmetric-or-not 2×2 matrix in the spectral norm.
pub(crate) fn condition_2x2(m: [[f64; 2]; 2]) -> f64 {
    let [[a, b], [c, d]] = m;
    let fro2 = a * a + b * b + c * c + d * d;
    let det = (a * d - b * c).abs();
    if det == 0.0 {
        return f64::INFINITY;
    }
    // σ_max/σ_min from σ1² + σ2² = ‖M‖_F² and σ1 σ2 = |det|
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    let s_max2 = 0.5 * (fro2 + disc);
    let s_min2 = det * det / s_max2;
    (s_max2 / s_min2).sqrt()
}

pub(crate) fn solve_2x2(m: [[f64; 2]; 2], rhs: [f64; 2]) -> [f64; 2] {
    let [[a, b], [c, d]] = m;
    let det = a * d - b * c;
    [(d * rhs[0] - b * rhs[1]) / det, (a * rhs[1] - c * rhs[0]) / det]
}

/// Removes from `raw` its components along the closure-constraint gradients,
/// returning the projected vector and the multipliers `(λ1, λ2)` with
/// `projected = raw + λ1 (−sin u) + λ2 cos u`.
pub fn project_closure(state: &FieldState, raw: &[f64]) -> Result<(Vec<f64>, [f64; 2])> {
    if raw.len() != state.u.len() {
        return Err(Error::LengthMismatch {
            expected: state.u.len(),
            found: raw.len(),
        });
    }
    let h = state.grid.spacing();
    let (b1, b2) = constraint_gradients(&state.u);
    let gram = [
        [dot(h, &b1, &b1), dot(h, &b1, &b2)],
        [dot(h, &b2, &b1), dot(h, &b2, &b2)],
    ];
    let cond = condition_2x2(gram);
    if !(cond <= GRAM_CONDITION_LIMIT) {
        return Err(Error::SingularGram(cond));
    }
    let lambda = solve_2x2(gram, [-dot(h, &b1, raw), -dot(h, &b2, raw)]);
    let projected = raw
        .iter()
        .zip(b1.iter().zip(&b2))
        .map(|(r, (p, q))| r + lambda[0] * p + lambda[1] * q)
        .collect();
    Ok((projected, lambda))
}

/// Newton iteration on the two closure equations along the constraint
/// gradients until the defect norm is at most `tol`. Returns the number of
/// corrections applied.
pub fn reproject_closure(state: &mut FieldState, tol: f64) -> Result<usize> {
    const MAX_ITERATIONS: usize = 30;
    let h = state.grid.spacing();
    for it in 0..=MAX_ITERATIONS {
        let defect = closure_defect(state);
        if norm(defect) <= tol {
            return Ok(it);
        }
        if it == MAX_ITERATIONS {
            return Err(Error::NewtonDiverged {
                iterations: it,
                residual: norm(defect),
            });
        }
        let (b1, b2) = constraint_gradients(&state.u);
        let gram = [
            [dot(h, &b1, &b1), dot(h, &b1, &b2)],
            [dot(h, &b2, &b1), dot(h, &b2, &b2)],
        ];
        let cond = condition_2x2(gram);
        if !(cond <= GRAM_CONDITION_LIMIT) {
            return Err(Error::SingularGram(cond));
        }
        let mu = solve_2x2(gram, [-defect[0], -defect[1]]);
        for ((u, p), q) in state.u.iter_mut().zip(&b1).zip(&b2) {
            *u += mu[0] * p + mu[1] * q;
        }
    }
    unreachable!()
}
