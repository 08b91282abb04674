//! Constrained gradient flow for the phase-field energy.
//!
//! The tangent angle follows an L² flow kept tangent to the closure
//! constraints by Lagrange multipliers; the phase field follows an H⁻¹
//! (Cahn–Hilliard type) flow, which conserves its mean exactly. Each step is
//! an IMEX scheme: the stiff linear operators (the `ε u''` and `ε v''''`
//! terms plus a linear stabilization sized by the local stiffness) are
//! implicit and diagonalized by FFT, everything nonlinear is explicit.

mod closure;
mod gradient;
mod spectral;

pub use closure::{constraint_gradients, project_closure, reproject_closure, GRAM_CONDITION_LIMIT};
pub use gradient::{grad_u, grad_v};
pub use spectral::{neg_laplacian, PeriodicSolver};

use closure::{condition_2x2, dot, solve_2x2};

use crate::error::{Error, Result};
use crate::model::{closure_defect, energy_eps, geometry::norm, EnergyBreakdown, FieldState, ModelParams};

/// Consecutive sub-threshold energy decreases required to declare convergence.
pub const CALM_CHECKS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    pub dt: f64,
    pub max_steps: usize,
    /// Converged once the per-step energy decrease stays below `energy_tol · dt`.
    pub energy_tol: f64,
    /// Closure defect norm that triggers a Newton re-projection at half its value.
    pub closure_tol: f64,
    /// Implicit fraction of the `ε`-weighted linear terms.
    pub implicit_theta: f64,
    /// Unconditional re-projection every this many steps (0 disables).
    pub projection_interval: usize,
    /// Multiplier on the linear stabilization of both equations (0 disables).
    pub stabilization: f64,
    /// Steps between energy-log entries.
    pub log_every: usize,
    /// Steps between snapshot-hook calls (0 disables).
    pub snapshot_every: usize,
    /// Retries with a halved step after an energy increase (0 disables).
    pub max_halvings: usize,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            max_steps: 100_000,
            energy_tol: 1e-6,
            closure_tol: 1e-8,
            implicit_theta: 1.0,
            projection_interval: 1,
            stabilization: 1.0,
            log_every: 100,
            snapshot_every: 0,
            max_halvings: 0,
        }
    }
}

impl FlowParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("flow.dt must be positive");
        }
        if !(self.energy_tol >= 0.0) {
            return bad("flow.energy_tol must be nonnegative");
        }
        if !(self.closure_tol > 0.0) {
            return bad("flow.closure_tol must be positive");
        }
        if !(0.0..=1.0).contains(&self.implicit_theta) {
            return bad("flow.implicit_theta must lie in [0, 1]");
        }
        if !(self.stabilization >= 0.0) {
            return bad("flow.stabilization must be nonnegative");
        }
        if self.log_every == 0 {
            return bad("flow.log_every must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxSteps,
    BlowUp,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::Converged => "converged",
            StopReason::MaxSteps => "max_steps",
            StopReason::BlowUp => "blow_up",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEntry {
    pub step: usize,
    pub time: f64,
    pub energy: EnergyBreakdown,
    /// `h Σ v − m L` (or minus the initial mass without a volume constraint).
    pub mass_defect: f64,
    pub closure: [f64; 2],
}

impl LogEntry {
    pub fn closure_defect_norm(&self) -> f64 {
        norm(self.closure)
    }
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub final_state: FieldState,
    pub energy_log: Vec<LogEntry>,
    pub stop_reason: StopReason,
    pub steps: usize,
    pub time: f64,
    /// Accepted steps whose energy rose by more than `1e-12 (1 + |E|)`.
    pub energy_increases: usize,
    pub max_mass_defect: f64,
    pub max_closure_defect: f64,
    pub halvings: usize,
    pub diagnostic: Option<String>,
}

/// Read-only view handed to the snapshot hook.
pub struct Snapshot<'a> {
    pub step: usize,
    pub time: f64,
    pub state: &'a FieldState,
    pub energy: &'a EnergyBreakdown,
}

/// Result of one unconstrained-in-closure IMEX update.
struct StepOutcome {
    state: FieldState,
    /// Predicted energy dissipation rate `−dE/dt` of the step direction.
    rate: f64,
}

/// Reusable stepper for one grid.
pub struct FlowSolver {
    params: ModelParams,
    flow: FlowParams,
    solver: PeriodicSolver,
}

impl FlowSolver {
    pub fn new(state: &FieldState, params: ModelParams, flow: FlowParams) -> Result<Self> {
        params.validate()?;
        flow.validate()?;
        state.check_lengths()?;
        Ok(Self {
            params,
            flow,
            solver: PeriodicSolver::new(state.n_points(), state.grid.spacing()),
        })
    }

    fn step(&self, state: &FieldState, dt: f64) -> Result<StepOutcome> {
        let h = state.grid.spacing();
        let eps = self.params.eps;
        let theta = self.flow.implicit_theta;
        let g_u = grad_u(state, &self.params);
        let g_v = grad_v(state, &self.params);

        let max_v2 = state.v.iter().map(|v| v * v).fold(0.0, f64::max);
        let stab_u = self.flow.stabilization * 2.0 * max_v2;
        let stab_v = self.flow.stabilization * gradient::phase_stiffness(state, &self.params);

        // angle: (I + dt (2θε + S_u)(−D2)) δ = −dt (g + λ1 b1 + λ2 b2), δ ⟂ b1, b2
        let cu = dt * (2.0 * theta * eps + stab_u);
        let precond = |m: f64| 1.0 / (1.0 + cu * m);
        let (b1, b2) = constraint_gradients(&state.u);
        let a = self.solver.apply(&g_u, precond);
        let c1 = self.solver.apply(&b1, precond);
        let c2 = self.solver.apply(&b2, precond);
        let gram = [
            [dot(h, &b1, &c1), dot(h, &b1, &c2)],
            [dot(h, &b2, &c1), dot(h, &b2, &c2)],
        ];
        let cond = condition_2x2(gram);
        if !(cond <= GRAM_CONDITION_LIMIT) {
            return Err(Error::SingularGram(cond));
        }
        let lambda = solve_2x2(gram, [-dot(h, &b1, &a), -dot(h, &b2, &a)]);
        let dir: Vec<f64> = (0..a.len())
            .map(|i| a[i] + lambda[0] * c1[i] + lambda[1] * c2[i])
            .collect();

        // phase: δ̂ = −dt μ ĝ / (1 + dt μ S_v + 2 dt θ ε μ²)
        let mut dv = self.solver.apply(&g_v, |m| {
            -dt * m / (1.0 + dt * m * stab_v + 2.0 * dt * theta * eps * m * m)
        });
        let mean = dv.iter().sum::<f64>() / dv.len() as f64;
        dv.iter_mut().for_each(|x| *x -= mean);

        let rate = dot(h, &g_u, &dir) - dot(h, &g_v, &dv) / dt;
        let mut next = state.clone();
        for (u, d) in next.u.iter_mut().zip(&dir) {
            *u -= dt * d;
        }
        for (v, d) in next.v.iter_mut().zip(&dv) {
            *v += d;
        }
        Ok(StepOutcome { state: next, rate })
    }
}

/// One IMEX step followed by a closure re-projection when the defect exceeds
/// half of `closure_tol`.
pub fn step_flow(state: &FieldState, params: &ModelParams, flow: &FlowParams) -> Result<FieldState> {
    let solver = FlowSolver::new(state, *params, *flow)?;
    let mut next = solver.step(state, flow.dt)?.state;
    if !next.is_finite() {
        return Err(Error::InvalidParameter("non-finite state after step (blow-up)".into()));
    }
    if norm(closure_defect(&next)) > 0.5 * flow.closure_tol {
        let tol = reprojection_target(&next);
        reproject_closure(&mut next, tol)?;
    }
    Ok(next)
}

fn reprojection_target(state: &FieldState) -> f64 {
    1e-13 * state.grid.length()
}

/// Runs the flow until convergence, `max_steps`, or a numerical blow-up.
///
/// Invalid inputs are errors; numerical failure is reported through
/// [`StopReason::BlowUp`] with the last finite state.
pub fn run_flow<H>(initial: &FieldState, params: &ModelParams, flow: &FlowParams, mut hook: H) -> Result<FlowResult>
where
    H: FnMut(&Snapshot<'_>),
{
    let solver = FlowSolver::new(initial, *params, *flow)?;
    let reference_mass = match params.volume {
        Some(m) => m * initial.grid.length(),
        None => initial.mass(),
    };
    let increase_tol = |e: f64| 1e-12 * (1.0 + e.abs());

    let mut state = initial.clone();
    let mut energy = energy_eps(&state, params)?;
    let entry = |step: usize, time: f64, s: &FieldState, e: EnergyBreakdown| LogEntry {
        step,
        time,
        energy: e,
        mass_defect: s.mass() - reference_mass,
        closure: closure_defect(s),
    };

    let mut log = vec![entry(0, 0.0, &state, energy)];
    let mut result = FlowResult {
        final_state: initial.clone(),
        energy_log: Vec::new(),
        stop_reason: StopReason::MaxSteps,
        steps: 0,
        time: 0.0,
        energy_increases: 0,
        max_mass_defect: log[0].mass_defect.abs(),
        max_closure_defect: log[0].closure_defect_norm(),
        halvings: 0,
        diagnostic: None,
    };
    if !energy.is_finite() || !state.is_finite() {
        result.stop_reason = StopReason::BlowUp;
        result.diagnostic = Some("initial state has non-finite energy".into());
        result.energy_log = log;
        return Ok(result);
    }
    if flow.snapshot_every > 0 {
        hook(&Snapshot {
            step: 0,
            time: 0.0,
            state: &state,
            energy: &energy,
        });
    }

    let mut dt = flow.dt;
    let mut time = 0.0;
    let mut calm = 0;
    let mut accepted_since_halving = 0;
    let mut step = 0;
    let mut last_logged = 0;

    'outer: while step < flow.max_steps {
        let mut halvings = 0;
        let (next, next_energy) = loop {
            let outcome = match solver.step(&state, dt) {
                Ok(o) => o,
                Err(e) => {
                    result.stop_reason = StopReason::BlowUp;
                    result.diagnostic = Some(format!("step {}: {e}", step + 1));
                    break 'outer;
                }
            };
            if outcome.rate.abs() <= f64::EPSILON * (1.0 + energy.total.abs()) {
                result.stop_reason = StopReason::Converged;
                result.diagnostic = Some("stationary to round-off".into());
                break 'outer;
            }
            let mut next = outcome.state;
            let needs_projection = (flow.projection_interval > 0 && (step + 1) % flow.projection_interval == 0)
                || norm(closure_defect(&next)) > 0.5 * flow.closure_tol;
            if next.is_finite() && needs_projection {
                let tol = reprojection_target(&next);
                if let Err(e) = reproject_closure(&mut next, tol) {
                    result.stop_reason = StopReason::BlowUp;
                    result.diagnostic = Some(format!("step {}: {e}", step + 1));
                    break 'outer;
                }
            }
            let e = energy_eps(&next, params)?;
            if !next.is_finite() || !e.is_finite() {
                result.stop_reason = StopReason::BlowUp;
                result.diagnostic = Some(format!(
                    "non-finite state at step {} (dt = {dt:e}); reduce flow.dt",
                    step + 1
                ));
                break 'outer;
            }
            if e.total > energy.total + increase_tol(energy.total) && halvings < flow.max_halvings {
                halvings += 1;
                result.halvings += 1;
                dt *= 0.5;
                accepted_since_halving = 0;
                continue;
            }
            break (next, e);
        };

        step += 1;
        time += dt;
        let decrease = energy.total - next_energy.total;
        if -decrease > increase_tol(energy.total) {
            result.energy_increases += 1;
        }
        if decrease.abs() < flow.energy_tol * dt {
            calm += 1;
        } else {
            calm = 0;
        }
        state = next;
        energy = next_energy;

        let current = entry(step, time, &state, energy);
        result.max_mass_defect = result.max_mass_defect.max(current.mass_defect.abs());
        result.max_closure_defect = result.max_closure_defect.max(current.closure_defect_norm());
        if step % flow.log_every == 0 {
            log.push(current);
            last_logged = step;
        }
        if flow.snapshot_every > 0 && step % flow.snapshot_every == 0 {
            hook(&Snapshot {
                step,
                time,
                state: &state,
                energy: &energy,
            });
        }

        accepted_since_halving += 1;
        if dt < flow.dt && accepted_since_halving >= CALM_CHECKS {
            dt = (2.0 * dt).min(flow.dt);
            accepted_since_halving = 0;
        }
        if calm >= CALM_CHECKS {
            result.stop_reason = StopReason::Converged;
            break;
        }
    }

    if last_logged != step {
        log.push(entry(step, time, &state, energy));
    }
    if flow.snapshot_every > 0 && step % flow.snapshot_every != 0 {
        hook(&Snapshot {
            step,
            time,
            state: &state,
            energy: &energy,
        });
    }
    result.final_state = state;
    result.energy_log = log;
    result.steps = step;
    result.time = time;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{PI, TAU};

    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    use super::*;
    use crate::model::{CurvatureSpec, Grid, PotentialSpec};
    use crate::setup::two_interface_initial;

    fn fig1_params(a: f64) -> ModelParams {
        ModelParams::new(0.05, PotentialSpec::quartic(a), CurvatureSpec::new(1.0, 2.0)).with_volume(0.0)
    }

    fn random_state(rng: &mut StdRng, n: usize) -> FieldState {
        let grid = Grid::new(n, rng.gen_range(2.0..8.0)).unwrap();
        let mut s = FieldState::circle(grid, vec![0.0; n]).unwrap();
        let modes: Vec<(f64, f64)> = (0..4)
            .map(|_| (rng.gen_range(-0.3..0.3), rng.gen_range(0.0..TAU)))
            .collect();
        for i in 0..n {
            let x = TAU * i as f64 / n as f64;
            for (k, (amp, ph)) in modes.iter().enumerate() {
                s.u[i] += amp * ((k + 1) as f64 * x + ph).sin();
            }
            s.v[i] = rng.gen_range(-1.2..1.2);
        }
        s
    }

    /// Fourth-order central difference of the energy along one coordinate.
    fn fd(state: &FieldState, p: &ModelParams, i: usize, angle: bool) -> f64 {
        let eta = 1e-4;
        let e = |d: f64| {
            let mut s = state.clone();
            if angle {
                s.u[i] += d;
            } else {
                s.v[i] += d;
            }
            energy_eps(&s, p).unwrap().total
        };
        (-e(2.0 * eta) + 8.0 * e(eta) - 8.0 * e(-eta) + e(-2.0 * eta)) / (12.0 * eta)
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..5 {
            let s = random_state(&mut rng, 64);
            let p = ModelParams::new(
                rng.gen_range(0.05..0.5),
                PotentialSpec::quartic(rng.gen_range(0.5..1.5)),
                CurvatureSpec::new(rng.gen_range(-1.0..1.0), rng.gen_range(1.0..3.0)),
            );
            let h = s.grid.spacing();
            let gu = grad_u(&s, &p);
            let gv = grad_v(&s, &p);
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..64 {
                for (g, angle) in [(gu[i], true), (gv[i], false)] {
                    let f = fd(&s, &p, i, angle) / h;
                    num += (g - f).powi(2);
                    den += f * f;
                }
            }
            assert!((num / den).sqrt() < 1e-6, "relative error {}", (num / den).sqrt());
        }
    }

    #[test]
    fn stationary_circle_converges_immediately() {
        let r = 2.0;
        let grid = Grid::new(128, TAU * r).unwrap();
        let s = FieldState::circle(grid, vec![1.0; 128]).unwrap();
        let p = ModelParams::new(0.05, PotentialSpec::quartic(1.0), CurvatureSpec::uniform(1.0 / r));
        let res = run_flow(&s, &p, &FlowParams::default(), |_| {}).unwrap();
        assert_eq!(res.stop_reason, StopReason::Converged);
        assert!(res.steps <= 2);
        for (a, b) in res.final_state.u.iter().zip(&s.u) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(res.final_state.v, s.v);
    }

    #[test]
    fn step_conserves_mass_and_winding() {
        let mut rng = StdRng::seed_from_u64(3);
        let mut s = random_state(&mut rng, 128);
        reproject_closure(&mut s, 1e-13).unwrap();
        let p = fig1_params(1.0);
        let fp = FlowParams {
            dt: 1e-3,
            ..Default::default()
        };
        let mut cur = s.clone();
        for _ in 0..20 {
            let next = step_flow(&cur, &p, &fp).unwrap();
            let scale = cur.grid.length();
            assert!((next.mass() - cur.mass()).abs() <= 1e-12 * scale);
            assert_eq!(next.winding, 1);
            assert!(norm(closure_defect(&next)) <= fp.closure_tol);
            cur = next;
        }
    }

    #[test]
    fn short_two_interface_run_is_monotone() {
        let grid = Grid::new(256, 4.0 * PI).unwrap();
        let s = two_interface_initial(grid, 0.0, 0.05).unwrap();
        let fp = FlowParams {
            dt: 1e-2,
            max_steps: 300,
            log_every: 10,
            ..Default::default()
        };
        let res = run_flow(&s, &fig1_params(0.75), &fp, |_| {}).unwrap();
        assert_eq!(res.energy_increases, 0);
        assert!(res.max_mass_defect <= 1e-10 * grid.length());
        assert!(res.max_closure_defect <= fp.closure_tol);
        assert!(res.energy_log.windows(2).all(|w| w[1].time > w[0].time));
        assert!(res.energy_log.last().unwrap().energy.total < res.energy_log[0].energy.total);
    }

    #[test]
    fn snapshot_hook_cadence() {
        let grid = Grid::new(64, 4.0 * PI).unwrap();
        let s = two_interface_initial(grid, 0.0, 0.3).unwrap();
        let fp = FlowParams {
            dt: 1e-2,
            max_steps: 25,
            energy_tol: 0.0,
            snapshot_every: 10,
            ..Default::default()
        };
        let mut steps = Vec::new();
        run_flow(&s, &fig1_params(1.0), &fp, |snap| steps.push(snap.step)).unwrap();
        assert_eq!(steps, vec![0, 10, 20, 25]);
    }

    #[test]
    fn unstabilized_large_step_blows_up() {
        let grid = Grid::new(256, 4.0 * PI).unwrap();
        let s = two_interface_initial(grid, 0.0, 0.05).unwrap();
        let fp = FlowParams {
            dt: 1.0,
            stabilization: 0.0,
            max_steps: 1000,
            ..Default::default()
        };
        let res = run_flow(&s, &fig1_params(1.0), &fp, |_| {}).unwrap();
        assert_eq!(res.stop_reason, StopReason::BlowUp);
        assert!(res.diagnostic.is_some());
    }

    #[test]
    fn invalid_flow_params() {
        let grid = Grid::new(64, 4.0).unwrap();
        let s = FieldState::circle(grid, vec![1.0; 64]).unwrap();
        let bad = FlowParams {
            dt: 0.0,
            ..Default::default()
        };
        assert!(run_flow(&s, &fig1_params(1.0), &bad, |_| {}).is_err());
    }
}
