use crate::error::{Error, Result};
use crate::model::PotentialSpec;

const MAX_STEP: f64 = 1e-3;

/// Largest double below one; profile values never reach the well.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// Tabulated solution of `p' = √Φ(p)`, `p(0) = 0`, with monotone cubic
/// Hermite interpolation between the nodes.
#[derive(Debug, Clone)]
pub struct ProfileTable {
    abscissae: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl ProfileTable {
    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn t_max(&self) -> f64 {
        *self.abscissae.last().expect("table is nonempty")
    }

    /// Profile value at `t ≥ 0`; saturates at the last tabulated value past `t_max`.
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_with_slope(t).0
    }

    pub fn slope(&self, t: f64) -> f64 {
        self.eval_with_slope(t).1
    }

    fn eval_with_slope(&self, t: f64) -> (f64, f64) {
        let n = self.abscissae.len();
        if t <= 0.0 {
            return (0.0, if t == 0.0 { self.slopes[0] } else { 0.0 });
        }
        if t >= self.t_max() {
            return (self.values[n - 1], 0.0);
        }
        let k = self.abscissae.partition_point(|&x| x <= t) - 1;
        let (x0, x1) = (self.abscissae[k], self.abscissae[k + 1]);
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let dx = x1 - x0;
        let secant = (y1 - y0) / dx;
        let (mut d0, mut d1) = (self.slopes[k], self.slopes[k + 1]);
        // Fritsch–Carlson limiter
        if secant == 0.0 {
            d0 = 0.0;
            d1 = 0.0;
        } else {
            let (a, b) = (d0 / secant, d1 / secant);
            let r = a * a + b * b;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                d0 = tau * a * secant;
                d1 = tau * b * secant;
            }
        }
        let s = (t - x0) / dx;
        let (s2, s3) = (s * s, s * s * s);
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * dx * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * dx * d1;
        let slope = (6.0 * s2 - 6.0 * s) * (y0 - y1) / dx + (3.0 * s2 - 4.0 * s + 1.0) * d0 + (3.0 * s2 - 2.0 * s) * d1;
        (value, slope)
    }
}

fn rk4(pot: &PotentialSpec, y: f64, h: f64) -> f64 {
    let f = |p: f64| pot.sqrt_value(p);
    let k1 = f(y);
    let k2 = f(y + 0.5 * h * k1);
    let k3 = f(y + 0.5 * h * k2);
    let k4 = f(y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates the optimal transition profile `p' = √Φ(p)`, `p(0) = 0` on
/// `[0, t_max]` with classical Runge–Kutta, steps of at most `1e-3` and
/// step-doubling control of the local error against `tol`.
pub fn optimal_profile(pot: &PotentialSpec, t_max: f64, tol: f64) -> Result<ProfileTable> {
    pot.validate()?;
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter("profile t_max must be positive".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("profile tolerance must be positive".into()));
    }
    if pot.value(0.0) == 0.0 {
        return Err(Error::DegeneratePotential);
    }
    let cap = (t_max / MAX_STEP).ceil() as usize + 1;
    let mut abscissae = Vec::with_capacity(cap);
    let mut values = Vec::with_capacity(cap);
    abscissae.push(0.0);
    values.push(0.0);
    let (mut t, mut y) = (0.0f64, 0.0f64);
    while t < t_max {
        let mut h = MAX_STEP.min(t_max - t);
        let next = loop {
            let full = rk4(pot, y, h);
            let half = rk4(pot, rk4(pot, y, 0.5 * h), 0.5 * h);
            if (full - half).abs() / 15.0 <= tol || h < 1e-12 {
                break half;
            }
            h *= 0.5;
        };
        t = if t_max - (t + h) < 1e-12 { t_max } else { t + h };
        y = next.clamp(-BELOW_ONE, BELOW_ONE);
        abscissae.push(t);
        values.push(y);
    }
    let slopes = values.iter().map(|&p| pot.sqrt_value(p)).collect();
    Ok(ProfileTable {
        abscissae,
        values,
        slopes,
    })
}

/// Table long enough for the `p_ε` construction at `eps`.
pub fn profile_for_eps(pot: &PotentialSpec, eps: f64) -> Result<ProfileTable> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    optimal_profile(pot, 1.0 / eps.sqrt() + 1.0, 1e-13)
}

/// Half-width `|[q']| ε / (2√Φ(0))` of the smoothed kink region.
pub fn delta_eps(jump: f64, pot: &PotentialSpec, eps: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::PI + 1e-12).contains(&jump) {
        return Err(Error::InvalidParameter(format!("jump {jump} outside [0, pi]")));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    let root = pot.sqrt_value(0.0);
    if root == 0.0 {
        return Err(Error::DegeneratePotential);
    }
    Ok(jump * eps / (2.0 * root))
}

/// One-sided recovery profile: zero on `[0, δ]`, the rescaled optimal profile
/// on `(δ, δ + √ε]`, then a line of slope `1/ε` up to one.
#[derive(Debug, Clone, Copy)]
pub struct PEps<'a> {
    eps: f64,
    delta: f64,
    sqrt_eps: f64,
    p_end: f64,
    profile: &'a ProfileTable,
}

pub fn build_p_eps(eps: f64, delta: f64, profile: &ProfileTable) -> Result<PEps<'_>> {
    if !(eps > 0.0) || !(delta >= 0.0) {
        return Err(Error::InvalidParameter("p_eps needs eps > 0 and delta >= 0".into()));
    }
    let sqrt_eps = eps.sqrt();
    if profile.t_max() < 1.0 / sqrt_eps {
        return Err(Error::InvalidParameter(format!(
            "profile table ends at {} < 1/sqrt(eps) = {}",
            profile.t_max(),
            1.0 / sqrt_eps
        )));
    }
    Ok(PEps {
        eps,
        delta,
        sqrt_eps,
        p_end: profile.eval(1.0 / sqrt_eps),
        profile,
    })
}

impl PEps<'_> {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `p(1/√ε)`, the value where the profile hands over to the line.
    pub fn p_end(&self) -> f64 {
        self.p_end
    }

    /// `√ε + ε (1 − p(1/√ε))`.
    pub fn transition_width(&self) -> f64 {
        self.sqrt_eps + self.eps * (1.0 - self.p_end)
    }

    /// First point from which `p_ε ≡ 1`.
    pub fn support_end(&self) -> f64 {
        self.delta + self.transition_width()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let r = t - self.delta;
        if r <= 0.0 {
            0.0
        } else if r <= self.sqrt_eps {
            self.profile.eval(r / self.eps)
        } else {
            (self.p_end + (r - self.sqrt_eps) / self.eps).min(1.0)
        }
    }

    /// Interface energy `∫_δ^∞ ε p_ε'² + Φ(p_ε)/ε` of the nonzero part.
    pub fn interface_energy(&self, pot: &PotentialSpec) -> f64 {
        // profile part in the stretched variable r = (t − δ)/ε
        let r_end = 1.0 / self.sqrt_eps;
        let xs = self.profile.abscissae();
        let density = |r: f64| {
            let (p, dp) = self.profile.eval_with_slope(r);
            dp * dp + pot.value(p)
        };
        let mut profile_part = 0.0;
        let mut a = 0.0;
        for &b in xs.iter().skip(1) {
            let b = b.min(r_end);
            if b > a {
                profile_part += (b - a) / 6.0 * (density(a) + 4.0 * density(0.5 * (a + b)) + density(b));
            }
            if b >= r_end {
                break;
            }
            a = b;
        }
        // linear part: dt = ε dp
        let linear_part = (1.0 - self.p_end) + crate::quadrature::integrate(|p| pot.value(p), self.p_end, 1.0, 1e-14);
        profile_part + linear_part
    }
}
