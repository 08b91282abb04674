use crate::error::{Error, Result};
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialFamily {
    /// `a (1 - v^2)^2`, wells at `v = ±1`.
    QuarticDoubleWell,
    /// `a (1 - v)^2`, a single well at `v = 1`.
    SingleWell,
}

/// A nonnegative potential `Φ` for the phase field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    pub family: PotentialFamily,
    pub scale: f64,
}

impl PotentialSpec {
    pub fn quartic(scale: f64) -> Self {
        Self {
            family: PotentialFamily::QuarticDoubleWell,
            scale,
        }
    }

    pub fn single_well(scale: f64) -> Self {
        Self {
            family: PotentialFamily::SingleWell,
            scale,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scale.is_finite() && self.scale > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "potential scale must be positive, got {}",
                self.scale
            )))
        }
    }

    pub fn value(&self, v: f64) -> f64 {
        let a = self.scale;
        match self.family {
            PotentialFamily::QuarticDoubleWell => {
                let w = 1.0 - v * v;
                a * w * w
            }
            PotentialFamily::SingleWell => {
                let w = 1.0 - v;
                a * w * w
            }
        }
    }

    pub fn derivative(&self, v: f64) -> f64 {
        let a = self.scale;
        match self.family {
            PotentialFamily::QuarticDoubleWell => -4.0 * a * v * (1.0 - v * v),
            PotentialFamily::SingleWell => -2.0 * a * (1.0 - v),
        }
    }

    pub fn second_derivative(&self, v: f64) -> f64 {
        let a = self.scale;
        match self.family {
            PotentialFamily::QuarticDoubleWell => a * (12.0 * v * v - 4.0),
            PotentialFamily::SingleWell => 2.0 * a,
        }
    }

    pub fn sqrt_value(&self, v: f64) -> f64 {
        let r = self.scale.sqrt();
        match self.family {
            PotentialFamily::QuarticDoubleWell => r * (1.0 - v * v).abs(),
            PotentialFamily::SingleWell => r * (1.0 - v).abs(),
        }
    }

    /// `(Φ(v), Φ'(v), √Φ(v))`.
    pub fn eval(&self, v: f64) -> (f64, f64, f64) {
        (self.value(v), self.derivative(v), self.sqrt_value(v))
    }

    /// Interface cost `2 ∫_{-1}^{1} √Φ`.
    pub fn sigma(&self) -> Result<f64> {
        match self.family {
            PotentialFamily::QuarticDoubleWell => {
                Ok(2.0 * quadrature::integrate(|v| self.sqrt_value(v), -1.0, 1.0, 1e-13))
            }
            PotentialFamily::SingleWell => Err(Error::SigmaUndefined),
        }
    }

    /// Kink cost per unit turning angle, `2 √Φ(0)`.
    pub fn sigma_hat(&self) -> f64 {
        2.0 * self.value(0.0).sqrt()
    }
}
