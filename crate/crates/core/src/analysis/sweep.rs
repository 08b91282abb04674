use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flow::{run_flow, FlowParams, StopReason};
use crate::model::{energy_eps, energy_sharp, EnergyBreakdown, Grid, ModelParams, SharpState, MIN_POINTS};
use crate::recovery::{build_recovery_with, delta_eps, RecoveryOptions};

/// How the grid is refined along a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPolicy {
    /// Grid points per unit `L/ε`: `n ≥ points_per_eps · L/ε`.
    pub points_per_eps: f64,
    /// Grid cells across the narrowest kink interval `2δ_ε`.
    pub min_points_per_width: f64,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self {
            points_per_eps: 8.0,
            min_points_per_width: 8.0,
        }
    }
}

impl GridPolicy {
    pub fn n_points(&self, sharp: &SharpState, params: &ModelParams, eps: f64) -> Result<usize> {
        let l = sharp.length();
        let mut n = (self.points_per_eps * l / eps).ceil();
        for j in sharp.junctions.iter().filter(|j| j.jump() > 0.0) {
            let width = 2.0 * delta_eps(j.jump(), &params.potential, eps)?;
            // a hair above the bound so rounding in h cannot fail the recovery's check
            n = n.max((self.min_points_per_width * l / width * (1.0 + 1e-9)).ceil());
        }
        Ok((n as usize).max(MIN_POINTS))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    pub n_points: usize,
    pub e_recovery: EnergyBreakdown,
    /// Energy after relaxing the recovery by the flow, when requested.
    pub e_relaxed: Option<EnergyBreakdown>,
    pub e_sharp: EnergyBreakdown,
    /// `e_recovery.total − e_sharp.total`.
    pub gap: f64,
}

impl SweepRow {
    pub fn relative_gap(&self) -> f64 {
        self.gap / self.e_sharp.total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Whether `|gap|` strictly decreases down the table.
    pub fn gap_strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].gap.abs() < w[0].gap.abs())
    }
}

fn sweep_row(
    sharp: &SharpState,
    eps: f64,
    params: &ModelParams,
    policy: &GridPolicy,
    relax: Option<&FlowParams>,
) -> Result<SweepRow> {
    let p = params.with_eps(eps);
    let n = policy.n_points(sharp, &p, eps)?;
    let grid = Grid::new(n, sharp.length())?;
    let opts = RecoveryOptions {
        min_points_per_width: policy.min_points_per_width,
        ..RecoveryOptions::default()
    };
    let rec = build_recovery_with(sharp, grid, &p, &opts)?;
    let e_recovery = energy_eps(&rec.state, &p)?;
    let e_relaxed = match relax {
        Some(flow) => {
            let res = run_flow(&rec.state, &p, flow, |_| {})?;
            if res.stop_reason == StopReason::BlowUp {
                return Err(Error::InvalidParameter(format!(
                    "relaxation at eps {eps} blew up: {}",
                    res.diagnostic.unwrap_or_default()
                )));
            }
            Some(energy_eps(&res.final_state, &p)?)
        }
        None => None,
    };
    let e_sharp = energy_sharp(sharp, &p)?;
    Ok(SweepRow {
        eps,
        n_points: n,
        e_recovery,
        e_relaxed,
        gap: e_recovery.total - e_sharp.total,
        e_sharp,
    })
}

/// Recovery energies of `sharp` along a strictly decreasing list of `ε`,
/// optionally relaxed by the flow. Rows run in parallel on the current rayon
/// pool and come back in input order.
pub fn gamma_sweep(
    sharp: &SharpState,
    eps_list: &[f64],
    params: &ModelParams,
    policy: &GridPolicy,
    relax: Option<&FlowParams>,
) -> Result<SweepTable> {
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("empty eps list".into()));
    }
    if eps_list.iter().any(|e| !(e.is_finite() && *e > 0.0)) || eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "eps list must be positive and strictly decreasing".into(),
        ));
    }
    if let Some(flow) = relax {
        flow.validate()?;
    }
    let rows = eps_list
        .par_iter()
        .map(|&eps| sweep_row(sharp, eps, params, policy, relax))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { rows })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::model::{CurvatureSpec, Phase, PotentialSpec};

    fn params() -> ModelParams {
        ModelParams::new(0.1, PotentialSpec::quartic(1.0), CurvatureSpec::new(1.0, 2.0))
    }

    #[test]
    fn smooth_circle_gap_is_the_regularization() {
        let r = 2.0;
        let sharp = SharpState::circle(r, Phase::Plus);
        let table = gamma_sweep(&sharp, &[0.1, 0.05], &params(), &GridPolicy::default(), None).unwrap();
        let l = 2.0 * PI * r;
        for row in &table.rows {
            let expected = row.eps * l / (r * r);
            // the discrete curvature of a sampled circle is 2 sin(h/2r)/h, not 1/r
            assert!(
                (row.gap - expected).abs() < 1e-3 * expected,
                "gap {} vs {expected}",
                row.gap
            );
            assert!(row.e_recovery.total >= row.e_sharp.total - 1e-8);
        }
        assert!(table.gap_strictly_decreasing());
    }

    #[test]
    fn rejects_bad_eps_lists() {
        let sharp = SharpState::circle(1.0, Phase::Plus);
        let p = params();
        let g = GridPolicy::default();
        assert!(gamma_sweep(&sharp, &[], &p, &g, None).is_err());
        assert!(gamma_sweep(&sharp, &[0.1, 0.1], &p, &g, None).is_err());
        assert!(gamma_sweep(&sharp, &[0.05, 0.1], &p, &g, None).is_err());
    }

    #[test]
    fn relaxed_energy_is_below_recovery() {
        let sharp = SharpState::two_phase_circle(2.0);
        let flow = FlowParams {
            dt: 1e-3,
            max_steps: 200,
            ..FlowParams::default()
        };
        let p = params().with_volume(0.0);
        let table = gamma_sweep(&sharp, &[0.2, 0.1], &p, &GridPolicy::default(), Some(&flow)).unwrap();
        for row in &table.rows {
            let relaxed = row.e_relaxed.unwrap();
            assert!(
                relaxed.total <= row.e_recovery.total,
                "{} > {}",
                relaxed.total,
                row.e_recovery.total
            );
        }
    }

    #[test]
    fn grid_policy_resolves_kinks() {
        let sharp = SharpState::lens(4.0 * PI, Phase::Plus);
        let p = params();
        let g = GridPolicy {
            points_per_eps: 1.0,
            ..GridPolicy::default()
        };
        let eps = 0.05;
        let n = g.n_points(&sharp, &p, eps).unwrap();
        let h = 4.0 * PI / n as f64;
        let width = 2.0 * delta_eps(PI / 2.0, &p.potential, eps).unwrap();
        assert!(width / h >= 8.0);
    }
}
