/// Phase-dependent spontaneous curvature `C(v)`.
///
/// Cubic Hermite interpolation between `C(-1) = c_minus` and `C(+1) = c_plus`
/// with zero end slopes, held constant outside `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSpec {
    pub c_minus: f64,
    pub c_plus: f64,
}

impl CurvatureSpec {
    pub fn new(c_minus: f64, c_plus: f64) -> Self {
        Self { c_minus, c_plus }
    }

    /// Constant spontaneous curvature in both phases.
    pub fn uniform(c: f64) -> Self {
        Self::new(c, c)
    }

    /// `(C(v), C'(v))`.
    pub fn eval(&self, v: f64) -> (f64, f64) {
        if v <= -1.0 {
            return (self.c_minus, 0.0);
        }
        if v >= 1.0 {
            return (self.c_plus, 0.0);
        }
        let s = 0.5 * (v + 1.0);
        let diff = self.c_plus - self.c_minus;
        let value = self.c_minus + diff * s * s * (3.0 - 2.0 * s);
        let slope = diff * 3.0 * s * (1.0 - s);
        (value, slope)
    }

    pub fn value(&self, v: f64) -> f64 {
        self.eval(v).0
    }

    pub fn second_derivative(&self, v: f64) -> f64 {
        if v.abs() >= 1.0 {
            return 0.0;
        }
        let s = 0.5 * (v + 1.0);
        (self.c_plus - self.c_minus) * 1.5 * (1.0 - 2.0 * s)
    }

    /// Preferred curvature of a pure phase (`phase` is ±1).
    pub fn of_phase(&self, phase: f64) -> f64 {
        if phase > 0.0 {
            self.c_plus
        } else {
            self.c_minus
        }
    }
}
