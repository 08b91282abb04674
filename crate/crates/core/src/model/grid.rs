use crate::error::{Error, Result};

/// Smallest grid accepted by [`Grid::new`].
pub const MIN_POINTS: usize = 16;

/// Uniform periodic arclength grid on `[0, length)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n_points: usize,
    length: f64,
    spacing: f64,
}

impl Grid {
    pub fn new(n_points: usize, length: f64) -> Result<Self> {
        if n_points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points} is below the minimum of {MIN_POINTS}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length = {length} must be positive")));
        }
        Ok(Self {
            n_points,
            length,
            spacing: length / n_points as f64,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Arclength of node `i`.
    pub fn position(&self, i: usize) -> f64 {
        i as f64 * self.spacing
    }

    /// Signed periodic offset `t - s` reduced to `[-L/2, L/2)`.
    pub fn offset(&self, t: f64, s: f64) -> f64 {
        let l = self.length;
        let d = (t - s).rem_euclid(l);
        if d >= 0.5 * l {
            d - l
        } else {
            d
        }
    }

    /// Reduces an arclength to `[0, L)`.
    pub fn wrap(&self, t: f64) -> f64 {
        t.rem_euclid(self.length)
    }
}
