use super::spectral::neg_laplacian;
use crate::model::{FieldState, ModelParams};

/// Discrete L² gradient of `energy_eps` with respect to the angle samples.
///
/// With the edge flux `F_i = 2 v_i² (κ_i − C(v_i)) + 2 ε κ_i` the exact
/// derivative of the discrete energy is `(F_{j−1} − F_j)`, divided here by `h`.
pub fn grad_u(state: &FieldState, params: &ModelParams) -> Vec<f64> {
    let n = state.v.len();
    let h = state.grid.spacing();
    let eps = params.eps;
    let flux: Vec<f64> = (0..n)
        .map(|i| {
            let v = state.v[i];
            let kappa = state.curvature(i);
            2.0 * v * v * (kappa - params.curvature.value(v)) + 2.0 * eps * kappa
        })
        .collect();
    (0..n).map(|j| (flux[(j + n - 1) % n] - flux[j]) / h).collect()
}

/// Discrete L² gradient of `energy_eps` with respect to the phase samples:
/// `2v(κ−C)² − 2v²(κ−C)C′ + Φ′/ε − 2ε D2 v`.
pub fn grad_v(state: &FieldState, params: &ModelParams) -> Vec<f64> {
    let h = state.grid.spacing();
    let eps = params.eps;
    let lap = neg_laplacian(&state.v, h);
    state
        .v
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let (c, dc) = params.curvature.eval(v);
            let bend = state.curvature(i) - c;
            2.0 * v * bend * bend - 2.0 * v * v * bend * dc + params.potential.derivative(v) / eps + 2.0 * eps * lap[i]
        })
        .collect()
}

/// Upper bound on the diagonal of the Jacobian of the explicit (local) part
/// of `grad_v`, used to size the linear stabilization of the phase step.
pub(crate) fn phase_stiffness(state: &FieldState, params: &ModelParams) -> f64 {
    let eps = params.eps;
    state
        .v
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let (c, dc) = params.curvature.eval(v);
            let ddc = params.curvature.second_derivative(v);
            let bend = state.curvature(i) - c;
            (2.0 * bend * bend
                + 8.0 * (v * bend * dc).abs()
                + 2.0 * v * v * dc * dc
                + 2.0 * (v * v * bend * ddc).abs()
                + params.potential.second_derivative(v).abs() / eps)
                .abs()
        })
        .fold(0.0, f64::max)
}
