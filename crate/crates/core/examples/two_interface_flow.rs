//! Relaxes the two-interface start (circle of radius 2, two interfaces, mean zero)
//! for both potentials and reports the detected structure.

use std::f64::consts::PI;

use kinkflow::analysis::{detect_interfaces, detect_kinks, segment_stats, stats_collar, DetectionThresholds};
use kinkflow::flow::{run_flow, FlowParams};
use kinkflow::model::{CurvatureSpec, Grid, ModelParams, PotentialSpec};
use kinkflow::setup::two_interface_initial;

fn main() -> kinkflow::Result<()> {
    let eps = 0.05;
    for a in [1.0, 0.75] {
        let params = ModelParams::new(eps, PotentialSpec::quartic(a), CurvatureSpec::new(1.0, 2.0)).with_volume(0.0);
        let grid = Grid::new(1024, 4.0 * PI)?;
        let start = two_interface_initial(grid, 0.0, 0.2)?;
        let flow = FlowParams {
            dt: 1e-2,
            max_steps: 200_000,
            ..FlowParams::default()
        };
        let res = run_flow(&start, &params, &flow, |_| {})?;
        let e = res.energy_log.last().unwrap().energy;
        println!(
            "a = {a}: {} after {} steps, t = {:.3}, E = {:.6}",
            res.stop_reason.name(),
            res.steps,
            res.time,
            e.total
        );

        let state = &res.final_state;
        let th = DetectionThresholds::for_eps(eps);
        let interfaces = detect_interfaces(state, &th);
        println!("  interfaces at {interfaces:.4?}");
        for k in detect_kinks(state, &th) {
            println!(
                "  dip at {:.4}: width {:.4}, turn {:.4}, crosses sign: {}",
                k.position, k.width, k.turn, k.crosses_sign
            );
        }
        for s in segment_stats(state, &interfaces, stats_collar(eps)) {
            println!(
                "  segment from {:.4}, length {:.4}: curvature {:.4} ± {:.4} ({:.1}%)",
                s.start,
                s.length,
                s.mean,
                s.std,
                100.0 * s.std / s.mean.abs()
            );
        }
    }
    Ok(())
}
