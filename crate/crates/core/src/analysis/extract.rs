use std::f64::consts::TAU;

use super::detect::{detect_interfaces, detect_kinks, DetectionThresholds, KinkDetection};
use crate::error::{Error, Result};
use crate::model::{FieldState, Junction, JunctionKind, ModelParams, Phase, Segment, SharpState};

/// Jumps below this are treated as smooth.
pub const MIN_JUMP: f64 = 0.05;

/// Curvature statistics of one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentStats {
    /// Arclength of the cut that opens the segment.
    pub start: f64,
    pub length: f64,
    pub mean: f64,
    pub std: f64,
    /// Number of curvature samples used.
    pub samples: usize,
}

/// Collar excluded around each cut by [`segment_stats`].
pub fn stats_collar(eps: f64) -> f64 {
    2.0 * (eps.sqrt() + eps)
}

/// Edge indices whose midpoints lie strictly inside `(a + collar, b − collar)`,
/// where `b` may exceed `L` to wrap around.
fn edges_between(state: &FieldState, a: f64, b: f64, collar: f64) -> Vec<usize> {
    let h = state.grid.spacing();
    let n = state.n_points();
    let (lo, hi) = (a + collar, b - collar);
    if hi <= lo {
        return Vec::new();
    }
    // midpoint of edge j is (j + 1/2)h; unwrap indices past n
    let first = ((lo / h - 0.5).floor() as i64 + 1).max(0);
    let mut out = Vec::new();
    let mut j = first;
    while (j as f64 + 0.5) * h < hi {
        if (j as f64 + 0.5) * h > lo {
            out.push(j.rem_euclid(n as i64) as usize);
        }
        j += 1;
    }
    out
}

/// Mean and population standard deviation of `κ` on each segment between
/// consecutive `cuts` (cyclically), skipping `collar` on both sides of every
/// cut. With no cuts the whole curve is one segment starting at 0.
pub fn segment_stats(state: &FieldState, cuts: &[f64], collar: f64) -> Vec<SegmentStats> {
    let l = state.grid.length();
    let bounds: Vec<(f64, f64)> = if cuts.is_empty() {
        vec![(0.0, l)]
    } else {
        let mut c: Vec<f64> = cuts.iter().map(|&t| state.grid.wrap(t)).collect();
        c.sort_by(f64::total_cmp);
        (0..c.len())
            .map(|i| {
                let end = if i + 1 < c.len() { c[i + 1] } else { c[0] + l };
                (c[i], end)
            })
            .collect()
    };
    let skip = if cuts.is_empty() { 0.0 } else { collar };
    bounds
        .into_iter()
        .map(|(a, b)| {
            let k: Vec<f64> = edges_between(state, a, b, skip)
                .into_iter()
                .map(|j| state.curvature(j))
                .collect();
            let m = k.len() as f64;
            let mean = if k.is_empty() {
                f64::NAN
            } else {
                k.iter().sum::<f64>() / m
            };
            let var = k.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m;
            SegmentStats {
                start: a,
                length: b - a,
                mean,
                std: var.sqrt(),
                samples: k.len(),
            }
        })
        .collect()
}

struct Detected {
    position: f64,
    turn: f64,
    interface: bool,
}

fn kink_at(kinks: &[KinkDetection], grid_h: f64, l: f64, p: f64) -> Option<&KinkDetection> {
    kinks.iter().find(|k| {
        let d = (k.position - p).rem_euclid(l);
        d.min(l - d) <= 0.5 * k.width + 2.0 * grid_h
    })
}

/// Reads a sharp-interface description off a phase-field state.
///
/// Junctions are the detected interfaces (with the turning of the kink region
/// containing them, if any) and the kinks inside one phase. The sharp state's
/// arclength origin is the junction closest to `t = 0` of the field state.
/// Segment curvature samples skip the transition collar `√ε + ε`; a uniform
/// offset then makes the total turning exactly `2π·winding`.
pub fn extract_sharp(state: &FieldState, th: &DetectionThresholds, params: &ModelParams) -> Result<SharpState> {
    state.check_lengths()?;
    let l = state.grid.length();
    let h = state.grid.spacing();
    let interfaces = detect_interfaces(state, th);
    let kinks = detect_kinks(state, th);
    let mut found: Vec<Detected> = interfaces
        .iter()
        .map(|&p| Detected {
            position: p,
            turn: kink_at(&kinks, h, l, p).map_or(0.0, |k| k.turn),
            interface: true,
        })
        .collect();
    for k in &kinks {
        let claimed = interfaces.iter().any(|&p| {
            let d = (k.position - p).rem_euclid(l);
            d.min(l - d) <= 0.5 * k.width + 2.0 * h
        });
        if !claimed && !k.crosses_sign && k.jump_estimate >= MIN_JUMP {
            found.push(Detected {
                position: k.position,
                turn: k.turn,
                interface: false,
            });
        }
    }
    let target_turning = TAU * state.winding as f64;
    if found.is_empty() {
        let curvature = state.curvatures();
        let mean_v = state.v.iter().sum::<f64>();
        let mut seg = Segment {
            length: l,
            phase: Phase::from_sign(mean_v),
            curvature,
        };
        let offset = (target_turning - seg.turning()) / l;
        seg.curvature.iter_mut().for_each(|k| *k += offset);
        return Ok(SharpState {
            segments: vec![seg],
            junctions: Vec::new(),
        });
    }
    found.sort_by(|a, b| a.position.total_cmp(&b.position));
    let min_gap = th.min_separation.max(2.0 * h);
    for i in 0..found.len() {
        let next = if i + 1 < found.len() {
            found[i + 1].position
        } else {
            found[0].position + l
        };
        if found.len() > 1 && next - found[i].position < min_gap {
            return Err(Error::OverlappingDetections(found[i].position));
        }
    }
    // origin: the junction nearest t = 0 closes the curve
    let origin_idx = (0..found.len())
        .min_by(|&a, &b| {
            let da = found[a].position.min(l - found[a].position);
            let db = found[b].position.min(l - found[b].position);
            da.total_cmp(&db)
        })
        .unwrap();
    found.rotate_left(origin_idx + 1);
    let collar = params.eps.sqrt() + params.eps;
    let k = found.len();
    let mut segments = Vec::with_capacity(k);
    let mut junctions = Vec::with_capacity(k);
    for i in 0..k {
        // segment i runs from junction i−1 to junction i
        let a = found[(i + k - 1) % k].position;
        let mut b = found[i].position;
        if b <= a {
            b += l;
        }
        let mut edges = edges_between(state, a, b, collar);
        if edges.is_empty() {
            edges = edges_between(state, a, b, 0.0);
        }
        if edges.is_empty() {
            return Err(Error::OverlappingDetections(a));
        }
        let mean_v: f64 = edges.iter().map(|&j| state.v[j]).sum();
        segments.push(Segment {
            length: b - a,
            phase: Phase::from_sign(mean_v),
            curvature: edges.iter().map(|&j| state.curvature(j)).collect(),
        });
    }
    for i in 0..k {
        let left = segments[i].phase;
        let right = segments[(i + 1) % k].phase;
        let d = &found[i];
        let turn = if d.turn.abs() >= MIN_JUMP { d.turn } else { 0.0 };
        let kind = if d.interface && left != right {
            if turn == 0.0 {
                JunctionKind::PlainInterface
            } else {
                JunctionKind::Interface
            }
        } else if !d.interface && left == right {
            JunctionKind::Ghost
        } else {
            return Err(Error::InvalidSharpState(format!(
                "detection at {} disagrees with the neighbouring phases",
                d.position
            )));
        };
        junctions.push(Junction { turn, kind });
    }
    let turning: f64 =
        segments.iter().map(|s| s.turning()).sum::<f64>() + junctions.iter().map(|j| j.turn).sum::<f64>();
    let offset = (target_turning - turning) / l;
    for s in &mut segments {
        s.curvature.iter_mut().for_each(|c| *c += offset);
    }
    let sharp = SharpState { segments, junctions };
    sharp.validate_structure()?;
    Ok(sharp)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::model::{CurvatureSpec, Grid, PotentialSpec};
    use crate::recovery::build_recovery;

    fn params(eps: f64) -> ModelParams {
        ModelParams::new(eps, PotentialSpec::quartic(1.0), CurvatureSpec::new(1.0, 2.0))
    }

    #[test]
    fn circle_stats() {
        let grid = Grid::new(256, TAU * 2.0).unwrap();
        let s = FieldState::circle(grid, vec![1.0; 256]).unwrap();
        let st = segment_stats(&s, &[], 0.1);
        assert_eq!(st.len(), 1);
        assert_eq!(st[0].samples, 256);
        assert!((st[0].mean - 0.5).abs() < 1e-12);
        assert!(st[0].std < 1e-12);
    }

    #[test]
    fn two_arc_stats() {
        // arcs of curvature 1 and π − 1, so the total turning is 2π
        let n = 400;
        let l = 4.0;
        let grid = Grid::new(n, l).unwrap();
        let h = grid.spacing();
        let mut u = vec![0.0; n];
        for i in 1..n {
            let k = if i - 1 < n / 2 { 1.0 } else { PI - 1.0 };
            u[i] = u[i - 1] + k * h;
        }
        let s = FieldState::new(grid, u, 1, vec![1.0; n]).unwrap();
        let st = segment_stats(&s, &[0.0, 2.0], 0.05);
        assert_eq!(st.len(), 2);
        assert!((st[0].mean - 1.0).abs() < 1e-10 && st[0].std < 1e-10);
        assert!((st[1].mean - (PI - 1.0)).abs() < 1e-10 && st[1].std < 1e-10);
    }

    #[test]
    fn constant_phase_gives_one_segment() {
        let grid = Grid::new(128, TAU).unwrap();
        let s = FieldState::circle(grid, vec![1.0; 128]).unwrap();
        let sharp = extract_sharp(&s, &DetectionThresholds::for_eps(0.05), &params(0.05)).unwrap();
        assert_eq!(sharp.segments.len(), 1);
        assert!(sharp.junctions.is_empty());
        assert!((sharp.total_turning() - TAU).abs() < 1e-12);
    }

    #[test]
    fn lens_round_trip() {
        let eps = 0.01;
        let l = 4.0 * PI;
        let sharp = SharpState::lens(l, Phase::Plus);
        let n = (16.0 * l / eps).ceil() as usize;
        let p = params(eps);
        let rec = build_recovery(&sharp, Grid::new(n, l).unwrap(), &p).unwrap();
        let back = extract_sharp(&rec.state, &DetectionThresholds::for_eps(eps), &p).unwrap();
        assert_eq!(back.junctions.len(), 2);
        for j in &back.junctions {
            assert_eq!(j.kind, JunctionKind::Ghost);
            assert!((j.jump() - PI / 2.0).abs() < 0.05 * PI / 2.0, "jump {}", j.jump());
        }
        for s in &back.segments {
            assert!((s.length - l / 2.0).abs() < 2.0 * (eps.sqrt() + eps));
            assert_eq!(s.phase, Phase::Plus);
        }
        assert!((back.total_turning() - TAU).abs() < 1e-9);
    }

    #[test]
    fn overlapping_ghosts_are_rejected() {
        let n = 1000;
        let grid = Grid::new(n, 10.0).unwrap();
        let h = grid.spacing();
        let mut u: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let mut v = vec![1.0; n];
        // two sharp dips with turns, 3 nodes apart
        for (c, turn) in [(500usize, 0.5), (503, 0.5)] {
            v[c] = 0.0;
            for x in u.iter_mut().skip(c + 1) {
                *x += turn;
            }
        }
        let s = FieldState::new(grid, u, 1, v).unwrap();
        let th = DetectionThresholds {
            min_separation: 10.0 * h,
            ..DetectionThresholds::for_eps(0.01)
        };
        assert!(matches!(
            extract_sharp(&s, &th, &params(0.01)),
            Err(Error::OverlappingDetections(_))
        ));
    }
}
