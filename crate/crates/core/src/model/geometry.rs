use std::f64::consts::{PI, TAU};

use super::FieldState;

pub type Point = [f64; 2];

/// Polyline through the curve: `q_0 = base`, `q_{i+1} = q_i + h (cos u_i, sin u_i)`.
///
/// Returns `n + 1` points; the last equals the first for a closed curve.
pub fn reconstruct_curve(state: &FieldState, base: Point) -> Vec<Point> {
    let h = state.grid.spacing();
    let mut out = Vec::with_capacity(state.u.len() + 1);
    let mut q = base;
    out.push(q);
    for &a in &state.u {
        let (s, c) = a.sin_cos();
        q = [q[0] + h * c, q[1] + h * s];
        out.push(q);
    }
    out
}

/// `(h Σ cos u_i, h Σ sin u_i)`, the gap between the last and first point.
pub fn closure_defect(state: &FieldState) -> Point {
    let h = state.grid.spacing();
    let (mut cx, mut cy) = (0.0, 0.0);
    for &a in &state.u {
        let (s, c) = a.sin_cos();
        cx += c;
        cy += s;
    }
    [h * cx, h * cy]
}

pub fn norm(p: Point) -> f64 {
    p[0].hypot(p[1])
}

/// Reduces an angle difference to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(TAU) - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// Angle enclosed by the unit tangents with angles `before` and `after`, in `[0, π]`.
pub fn jump_magnitude(before: f64, after: f64) -> f64 {
    wrap_angle(after - before).abs()
}
