use crate::error::{Error, Result};

const JACOBIAN_CONDITION_LIMIT: f64 = 1e8;
const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX: usize = 50;
const DEGENERATE_TC: f64 = 1e-10;

/// Smooth bump `exp(1 − 1/(1 − x²))` on `(−1, 1)` with peak value one.
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

/// Correction directions `f`, `g` sampled on a patch.
///
/// In the regular case `T_s f = 1`, `T_c f = 0` and `T_c g = 1`. In the
/// degenerate case (`T_c ≡ 0` on the bumps) `f` is identically zero and `g`
/// is antisymmetric with `T_s g = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosureBasis {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub degenerate: bool,
}

fn t_s(h: f64, phi: &[f64], u: &[f64]) -> f64 {
    h * phi.iter().zip(u).map(|(p, a)| p * a.sin()).sum::<f64>()
}

fn t_c(h: f64, phi: &[f64], u: &[f64]) -> f64 {
    h * phi.iter().zip(u).map(|(p, a)| p * a.cos()).sum::<f64>()
}

/// Builds the correction basis from two bumps centred at `∓center` with
/// half-width `width`, given patch-local coordinates `d` (kink at 0) and the
/// reference angle `u` in the kink's frame.
pub fn closure_basis(d: &[f64], u: &[f64], h: f64, center: f64, width: f64) -> Result<ClosureBasis> {
    if d.len() != u.len() {
        return Err(Error::LengthMismatch {
            expected: d.len(),
            found: u.len(),
        });
    }
    if !(width > 0.0 && center > width) {
        return Err(Error::InvalidParameter(
            "bumps must lie on either side of the kink".into(),
        ));
    }
    let left: Vec<f64> = d.iter().map(|&x| bump((x + center) / width)).collect();
    let right: Vec<f64> = d.iter().map(|&x| bump((x - center) / width)).collect();
    let mass = h * right.iter().sum::<f64>();
    let (tc_l, tc_r) = (t_c(h, &left, u), t_c(h, &right, u));

    if tc_l.abs().max(tc_r.abs()) < DEGENERATE_TC * mass {
        let mut g: Vec<f64> = right.iter().zip(&left).map(|(r, l)| r - l).collect();
        let ts = t_s(h, &g, u);
        if ts.abs() < DEGENERATE_TC * mass {
            return Err(Error::IllConditionedJacobian(f64::INFINITY));
        }
        g.iter_mut().for_each(|x| *x /= ts);
        return Ok(ClosureBasis {
            f: vec![0.0; d.len()],
            g,
            degenerate: true,
        });
    }

    let (g_bump, f_bump, tc_g) = if tc_r.abs() >= tc_l.abs() {
        (&right, &left, tc_r)
    } else {
        (&left, &right, tc_l)
    };
    let g: Vec<f64> = g_bump.iter().map(|x| x / tc_g).collect();
    let tc_f = t_c(h, f_bump, u);
    let mut f: Vec<f64> = f_bump.iter().zip(&g).map(|(a, b)| a - tc_f * b).collect();
    let ts_f = t_s(h, &f, u);
    if ts_f.abs() < DEGENERATE_TC * mass {
        return Err(Error::IllConditionedJacobian(f64::INFINITY));
    }
    f.iter_mut().for_each(|x| *x /= ts_f);
    Ok(ClosureBasis {
        f,
        g,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureCorrection {
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
}

fn residual(u: &[f64], h: f64, target: [f64; 2], basis: &ClosureBasis, a: f64, b: f64) -> [f64; 2] {
    let (mut c, mut s) = (0.0, 0.0);
    for i in 0..u.len() {
        let w = u[i] + a * basis.f[i] + b * basis.g[i];
        c += w.cos();
        s += w.sin();
    }
    [target[0] - h * c, -target[1] + h * s]
}

fn condition(m: [[f64; 2]; 2]) -> f64 {
    let [[a, b], [c, d]] = m;
    let det = (a * d - b * c).abs();
    if det == 0.0 {
        return f64::INFINITY;
    }
    let fro2 = a * a + b * b + c * c + d * d;
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    let s_max2 = 0.5 * (fro2 + disc);
    (s_max2 * s_max2 / (det * det)).sqrt()
}

/// Newton iteration on `P(α, β) = (C₀ − h Σ cos w, −S₀ + h Σ sin w)` with
/// `w = u + α f + β g`, applied in place to the patch samples `u`.
/// `target = (C₀, S₀)`. In the degenerate case only the first component is solved.
pub fn correct_closure(u: &mut [f64], h: f64, target: [f64; 2], basis: &ClosureBasis) -> Result<ClosureCorrection> {
    if basis.f.len() != u.len() || basis.g.len() != u.len() {
        return Err(Error::LengthMismatch {
            expected: u.len(),
            found: basis.f.len().min(basis.g.len()),
        });
    }
    let (mut a, mut b) = (0.0, 0.0);
    for it in 0..=NEWTON_MAX {
        let p = residual(u, h, target, basis, a, b);
        let size = if basis.degenerate { p[0].abs() } else { p[0].hypot(p[1]) };
        if size <= NEWTON_TOL {
            for i in 0..u.len() {
                u[i] += a * basis.f[i] + b * basis.g[i];
            }
            return Ok(ClosureCorrection {
                alpha: a,
                beta: b,
                iterations: it,
            });
        }
        if it == NEWTON_MAX {
            break;
        }
        let w: Vec<f64> = (0..u.len()).map(|i| u[i] + a * basis.f[i] + b * basis.g[i]).collect();
        if basis.degenerate {
            let slope = t_s(h, &basis.g, &w);
            if slope.abs() < 1.0 / JACOBIAN_CONDITION_LIMIT {
                return Err(Error::IllConditionedJacobian(1.0 / slope.abs()));
            }
            b -= p[0] / slope;
        } else {
            let j = [
                [t_s(h, &basis.f, &w), t_s(h, &basis.g, &w)],
                [t_c(h, &basis.f, &w), t_c(h, &basis.g, &w)],
            ];
            let cond = condition(j);
            if !(cond <= JACOBIAN_CONDITION_LIMIT) {
                return Err(Error::IllConditionedJacobian(cond));
            }
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            a -= (j[1][1] * p[0] - j[0][1] * p[1]) / det;
            b -= (j[0][0] * p[1] - j[1][0] * p[0]) / det;
        }
    }
    let p = residual(u, h, target, basis, a, b);
    Err(Error::NewtonDiverged {
        iterations: NEWTON_MAX,
        residual: p[0].hypot(p[1]),
    })
}

/// Discrete energy `Σ h (ε κ² + Φ(0)/ε)` over the edges inside `[−δ, δ]` of
/// two straight lines with angles `∓ū` joined by the linear angle
/// interpolation of half-width `delta`, on a grid of spacing `h`.
pub fn straight_kink_patch_energy(u_bar: f64, delta: f64, eps: f64, phi0: f64, h: f64) -> f64 {
    let angle = |t: f64| {
        if t <= -delta {
            -u_bar
        } else if t >= delta {
            u_bar
        } else {
            u_bar * t / delta
        }
    };
    let n = (delta / h).ceil() as i64 + 2;
    (-n..n)
        .filter_map(|i| {
            let (t0, t1) = (i as f64 * h, (i + 1) as f64 * h);
            let mid = 0.5 * (t0 + t1);
            (mid.abs() <= delta).then(|| {
                let kappa = (angle(t1) - angle(t0)) / h;
                h * (eps * kappa * kappa + phi0 / eps)
            })
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    /// Samples of an arc-shaped kink in its own frame: angle `−ū + κ t` left
    /// of the kink and `ū + κ t` right of it.
    fn kink_patch(n: usize, radius: f64, u_bar: f64, kappa: f64) -> (Vec<f64>, Vec<f64>, f64) {
        let h = 2.0 * radius / n as f64;
        let d: Vec<f64> = (0..n).map(|i| -radius + (i as f64 + 0.5) * h).collect();
        let u = d
            .iter()
            .map(|&t| if t < 0.0 { -u_bar } else { u_bar } + kappa * t)
            .collect();
        (d, u, h)
    }

    fn integrals(u: &[f64], h: f64) -> [f64; 2] {
        [
            h * u.iter().map(|a| a.cos()).sum::<f64>(),
            h * u.iter().map(|a| a.sin()).sum::<f64>(),
        ]
    }

    #[test]
    fn basis_normalization() {
        let (d, u, h) = kink_patch(400, 1.0, 0.6, 0.3);
        let b = closure_basis(&d, &u, h, 0.6, 0.3).unwrap();
        assert!(!b.degenerate);
        assert!((t_s(h, &b.f, &u) - 1.0).abs() < 1e-12);
        assert!(t_c(h, &b.f, &u).abs() < 1e-12);
        assert!((t_c(h, &b.g, &u) - 1.0).abs() < 1e-12);
        // supports stay clear of the kink
        for (i, &x) in d.iter().enumerate() {
            if x.abs() <= 0.3 {
                assert_eq!(b.f[i], 0.0);
                assert_eq!(b.g[i], 0.0);
            }
        }
    }

    #[test]
    fn satisfied_targets_need_no_correction() {
        let (d, mut u, h) = kink_patch(200, 1.0, 0.4, 0.0);
        let basis = closure_basis(&d, &u, h, 0.6, 0.3).unwrap();
        let target = integrals(&u, h);
        let before = u.clone();
        let c = correct_closure(&mut u, h, target, &basis).unwrap();
        assert_eq!((c.alpha, c.beta, c.iterations), (0.0, 0.0, 0));
        assert_eq!(u, before);
    }

    #[test]
    fn newton_undoes_a_perturbation_along_f() {
        let (d, u0, h) = kink_patch(400, 1.0, 0.7, 0.2);
        let basis = closure_basis(&d, &u0, h, 0.6, 0.3).unwrap();
        let target = integrals(&u0, h);
        let mut u: Vec<f64> = u0.iter().zip(&basis.f).map(|(a, f)| a + 1e-3 * f).collect();
        let c = correct_closure(&mut u, h, target, &basis).unwrap();
        assert!((c.alpha + 1e-3).abs() < 1e-9, "{}", c.alpha);
        assert!(c.beta.abs() < 1e-9);
        let got = integrals(&u, h);
        assert!((got[0] - target[0]).abs() <= 1e-12 && (got[1] - target[1]).abs() <= 1e-12);
    }

    #[test]
    fn smoothing_a_kink_is_corrected() {
        let (d, u_sharp, h) = kink_patch(2000, 1.0, PI / 4.0, 0.5);
        let target = integrals(&u_sharp, h);
        let delta = 0.05;
        let mut u: Vec<f64> = d
            .iter()
            .zip(&u_sharp)
            .map(|(&t, &a)| {
                if t.abs() < delta {
                    PI / 4.0 * t / delta + 0.5 * t
                } else {
                    a
                }
            })
            .collect();
        let basis = closure_basis(&d, &u, h, 0.6, 0.3).unwrap();
        let c = correct_closure(&mut u, h, target, &basis).unwrap();
        assert!(c.iterations > 0 && c.iterations < 10);
        let got = integrals(&u, h);
        assert!((got[0] - target[0]).hypot(got[1] - target[1]) <= 1e-12);
    }

    #[test]
    fn jump_pi_is_degenerate_and_keeps_the_sine_integral() {
        let (d, u_sharp, h) = kink_patch(2000, 1.0, PI / 2.0, 0.0);
        let target = integrals(&u_sharp, h);
        let delta = 0.05;
        let mut u: Vec<f64> = d
            .iter()
            .zip(&u_sharp)
            .map(|(&t, &a)| if t.abs() < delta { PI / 2.0 * t / delta } else { a })
            .collect();
        let basis = closure_basis(&d, &u, h, 0.6, 0.3).unwrap();
        assert!(basis.degenerate);
        assert!(basis.f.iter().all(|&x| x == 0.0));
        for i in 0..d.len() {
            assert!((basis.g[i] + basis.g[d.len() - 1 - i]).abs() < 1e-12);
        }
        let c = correct_closure(&mut u, h, target, &basis).unwrap();
        assert_eq!(c.alpha, 0.0);
        let got = integrals(&u, h);
        assert!((got[0] - target[0]).abs() <= 1e-12);
        assert!((got[1] - target[1]).abs() <= 1e-12);
    }

    #[test]
    fn straight_kink_identity() {
        let (eps, u_bar) = (0.025, PI / 4.0);
        let phi0: f64 = 1.0;
        let delta = u_bar / phi0.sqrt() * eps;
        let target = 4.0 * u_bar * phi0.sqrt();
        let mut errs = Vec::new();
        for n in [16.0, 32.0, 64.0] {
            let e = straight_kink_patch_energy(u_bar, delta, eps, phi0, 2.0 * delta / n);
            errs.push((e - target).abs());
            for factor in [0.6, 0.8, 0.95, 1.05, 1.25, 1.6] {
                let other = straight_kink_patch_energy(u_bar, factor * delta, eps, phi0, 2.0 * factor * delta / n);
                assert!(other > e, "factor {factor}");
            }
        }
        assert!(errs.iter().all(|&e| e < 1e-10), "{errs:?}");
    }
}
