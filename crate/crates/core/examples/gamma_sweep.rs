//! Recovery energies of the two-phase circle approach the sharp energy
//! 5π + 16/3 as ε decreases.

use std::f64::consts::PI;

use kinkflow::analysis::{gamma_sweep, GridPolicy};
use kinkflow::model::{CurvatureSpec, ModelParams, PotentialSpec, SharpState};

fn main() -> kinkflow::Result<()> {
    let sharp = SharpState::two_phase_circle(2.0);
    let params = ModelParams::new(0.2, PotentialSpec::quartic(1.0), CurvatureSpec::new(1.0, 2.0)).with_volume(0.0);
    let eps = [0.2, 0.1, 0.05, 0.025, 0.0125];
    let table = gamma_sweep(&sharp, &eps, &params, &GridPolicy::default(), None)?;
    println!(
        "sharp energy {:.9} (5π + 16/3 = {:.9})",
        table.rows[0].e_sharp.total,
        5.0 * PI + 16.0 / 3.0
    );
    println!(
        "{:>8} {:>8} {:>14} {:>12} {:>10}",
        "eps", "n", "E_eps", "gap", "rel gap"
    );
    for r in &table.rows {
        println!(
            "{:>8} {:>8} {:>14.9} {:>12.6} {:>9.3}%",
            r.eps,
            r.n_points,
            r.e_recovery.total,
            r.gap,
            100.0 * r.relative_gap()
        );
    }
    println!("|gap| strictly decreasing: {}", table.gap_strictly_decreasing());
    Ok(())
}
