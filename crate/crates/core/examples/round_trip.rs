//! Sharp state → recovery → detected sharp state, plus the file formats.

use std::f64::consts::PI;

use kinkflow::analysis::{extract_sharp, DetectionThresholds};
use kinkflow::io::{read_sharp, write_sharp};
use kinkflow::model::{CurvatureSpec, Grid, ModelParams, Phase, PotentialSpec, SharpState};
use kinkflow::recovery::build_recovery;

fn main() -> kinkflow::Result<()> {
    let eps = 0.01;
    let l = 4.0 * PI;
    let cases = [
        ("two-phase circle", SharpState::two_phase_circle(2.0)),
        ("lens", SharpState::lens(l, Phase::Plus)),
        (
            "square of alternating phases",
            SharpState::symmetric_arcs(l, &[Phase::Plus, Phase::Minus, Phase::Plus, Phase::Minus], PI / 4.0)?,
        ),
    ];
    for (name, sharp) in cases {
        let params = ModelParams::new(eps, PotentialSpec::quartic(1.0), CurvatureSpec::new(1.0, 2.0));
        let params = if sharp.mass() == 0.0 {
            params.with_volume(0.0)
        } else {
            params
        };
        let grid = Grid::new((16.0 * l / eps).ceil() as usize, l)?;
        let rec = build_recovery(&sharp, grid, &params)?;
        let back = extract_sharp(&rec.state, &DetectionThresholds::for_eps(eps), &params)?;
        println!("{name}:");
        for (i, (a, b)) in sharp.segments.iter().zip(&back.segments).enumerate() {
            println!(
                "  segment {i}: length {:.4} -> {:.4}, phase {:?} -> {:?}",
                a.length, b.length, a.phase, b.phase
            );
        }
        for (i, (a, b)) in sharp.junctions.iter().zip(&back.junctions).enumerate() {
            println!(
                "  junction {i}: {} turn {:.4} -> {} turn {:.4}",
                a.kind.name(),
                a.turn,
                b.kind.name(),
                b.turn
            );
        }
        assert_eq!(read_sharp(&write_sharp(&back))?, back);
    }
    print!(
        "lens as a sharp file:\n{}",
        write_sharp(&SharpState::lens(l, Phase::Plus))
    );
    Ok(())
}
