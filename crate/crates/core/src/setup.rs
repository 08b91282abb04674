//! Initial data for flow experiments.

use crate::error::{Error, Result};
use crate::model::{FieldState, Grid};

/// Phase field that is `+1` on the arc `(start, end)` and `−1` elsewhere,
/// joined by `tanh` transitions of width `width`, then shifted by a constant
/// so that its discrete mean is exactly `mean`.
pub fn two_interface_phase(grid: &Grid, mean: f64, positions: [f64; 2], width: f64) -> Result<Vec<f64>> {
    if !(width > 0.0) {
        return Err(Error::InvalidParameter("interface width must be positive".into()));
    }
    if !(mean > -1.0 && mean < 1.0) {
        return Err(Error::InvalidParameter(format!("phase mean {mean} outside (-1, 1)")));
    }
    let l = grid.length();
    let start = grid.wrap(positions[0]);
    let arc = grid.wrap(positions[1] - start);
    if arc == 0.0 {
        return Err(Error::InvalidParameter("interface positions coincide".into()));
    }
    let mut v: Vec<f64> = (0..grid.n_points())
        .map(|i| {
            let s = grid.wrap(grid.position(i) - start);
            let inside = s < arc;
            let dist = if inside { s.min(arc - s) } else { (s - arc).min(l - s) };
            let sign = if inside { 1.0 } else { -1.0 };
            sign * (dist / width).tanh()
        })
        .collect();
    let shift = mean - v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x += shift);
    Ok(v)
}

/// The two-interface start: a circle of the grid's length with the `+1`
/// phase on the arc `(L/4, 3L/4)` and mean `mean`.
pub fn two_interface_initial(grid: Grid, mean: f64, width: f64) -> Result<FieldState> {
    let l = grid.length();
    let v = two_interface_phase(&grid, mean, [0.25 * l, 0.75 * l], width)?;
    FieldState::circle(grid, v)
}
