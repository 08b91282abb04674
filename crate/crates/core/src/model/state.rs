use std::f64::consts::TAU;

use super::{CurvatureSpec, Grid, PotentialSpec};
use crate::error::{Error, Result};

/// Parameters of the phase-field energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub eps: f64,
    /// Prescribed mean phase `m`; `None` disables the volume constraint.
    pub volume: Option<f64>,
    pub potential: PotentialSpec,
    pub curvature: CurvatureSpec,
}

impl ModelParams {
    pub fn new(eps: f64, potential: PotentialSpec, curvature: CurvatureSpec) -> Self {
        Self {
            eps,
            volume: None,
            potential,
            curvature,
        }
    }

    pub fn with_volume(mut self, m: f64) -> Self {
        self.volume = Some(m);
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn volume_constraint_active(&self) -> bool {
        self.volume.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if let Some(m) = self.volume {
            if !(m > -1.0 && m < 1.0) {
                return Err(Error::InvalidParameter(format!("m must lie in (-1, 1), got {m}")));
            }
        }
        self.potential.validate()
    }
}

/// Tangent angle and phase field sampled on a periodic arclength grid.
///
/// The angle is stored unwrapped: `u[i + n] = u[i] + 2π·winding`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub grid: Grid,
    pub u: Vec<f64>,
    pub winding: i64,
    pub v: Vec<f64>,
}

impl FieldState {
    pub fn new(grid: Grid, u: Vec<f64>, winding: i64, v: Vec<f64>) -> Result<Self> {
        let state = Self { grid, u, winding, v };
        state.check_lengths()?;
        Ok(state)
    }

    /// Positively oriented circle of the grid's length with angle `u_i = t_i / R`.
    pub fn circle(grid: Grid, v: Vec<f64>) -> Result<Self> {
        let radius = grid.length() / TAU;
        let u = (0..grid.n_points()).map(|i| grid.position(i) / radius).collect();
        Self::new(grid, u, 1, v)
    }

    pub fn check_lengths(&self) -> Result<()> {
        let n = self.grid.n_points();
        for len in [self.u.len(), self.v.len()] {
            if len != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        self.grid.n_points()
    }

    /// Angle at node `i + 1`, lifted across the seam.
    #[inline]
    pub fn next_angle(&self, i: usize) -> f64 {
        let n = self.u.len();
        if i + 1 == n {
            self.u[0] + TAU * self.winding as f64
        } else {
            self.u[i + 1]
        }
    }

    /// Angle increment on edge `i` (from node `i` to node `i + 1`).
    #[inline]
    pub fn angle_increment(&self, i: usize) -> f64 {
        self.next_angle(i) - self.u[i]
    }

    /// Forward-difference curvature on edge `i`.
    #[inline]
    pub fn curvature(&self, i: usize) -> f64 {
        self.angle_increment(i) / self.grid.spacing()
    }

    pub fn curvatures(&self) -> Vec<f64> {
        (0..self.u.len()).map(|i| self.curvature(i)).collect()
    }

    /// `h Σ v_i`.
    pub fn mass(&self) -> f64 {
        self.grid.spacing() * self.v.iter().sum::<f64>()
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(self.v.iter()).all(|x| x.is_finite())
    }

    /// Adds `c` to every angle sample (a rigid rotation of the curve).
    pub fn rotated(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.u.iter_mut().for_each(|x| *x += c);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_curvature_is_constant() {
        let grid = Grid::new(64, TAU * 2.0).unwrap();
        let s = FieldState::circle(grid, vec![1.0; 64]).unwrap();
        for k in s.curvatures() {
            assert!((k - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let grid = Grid::new(32, 1.0).unwrap();
        assert!(matches!(
            FieldState::new(grid, vec![0.0; 32], 0, vec![0.0; 31]),
            Err(Error::LengthMismatch {
                expected: 32,
                found: 31
            })
        ));
    }

    #[test]
    fn params_validation() {
        let p = ModelParams::new(0.05, PotentialSpec::quartic(1.0), CurvatureSpec::new(1.0, 2.0));
        assert!(p.validate().is_ok());
        assert!(p.with_volume(1.0).validate().is_err());
        assert!(p.with_eps(0.0).validate().is_err());
    }
}
