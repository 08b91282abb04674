use crate::model::{geometry::wrap_angle, FieldState, Grid};

/// Detector settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionThresholds {
    /// `|v| ≤ zero_band` marks kink regions.
    pub zero_band: f64,
    /// Hysteresis band: a phase counts as entered once `|v| ≥ interface_band`.
    pub interface_band: f64,
    /// Detections closer than this are merged.
    pub min_separation: f64,
    /// Longest `|v| ≤ zero_band` component still reported as a kink.
    pub max_kink_width: f64,
}

impl Default for DetectionThresholds {
    fn default() -> Self {
        Self {
            zero_band: 0.1,
            interface_band: 0.5,
            min_separation: 0.0,
            max_kink_width: f64::INFINITY,
        }
    }
}

impl DetectionThresholds {
    /// Defaults scaled to the transition collar `√ε + ε`.
    pub fn for_eps(eps: f64) -> Self {
        let collar = eps.sqrt() + eps;
        Self {
            min_separation: collar,
            max_kink_width: 4.0 * collar,
            ..Self::default()
        }
    }
}

/// A connected region of `|v| ≤ zero_band`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinkDetection {
    /// Arclength of the region's centre.
    pub position: f64,
    /// Width of the region (number of nodes times `h`).
    pub width: f64,
    /// Net turning across the region, reduced to `(−π, π]`.
    pub turn: f64,
    /// `|turn|`: the enclosed angle of the one-sided tangents.
    pub jump_estimate: f64,
    /// Whether the phase has opposite signs on the two sides.
    pub crosses_sign: bool,
}

fn circular_mean(grid: &Grid, positions: &[f64]) -> f64 {
    let base = positions[0];
    let mean_offset = positions.iter().map(|&p| grid.offset(p, base)).sum::<f64>() / positions.len() as f64;
    grid.wrap(base + mean_offset)
}

/// Merges sorted periodic positions closer than `min_sep` into their mean.
fn merge(grid: &Grid, mut positions: Vec<f64>, min_sep: f64) -> Vec<f64> {
    positions.sort_by(f64::total_cmp);
    if positions.len() < 2 || min_sep <= 0.0 {
        return positions;
    }
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for p in positions {
        match groups.last_mut() {
            Some(g) if grid.offset(p, *g.last().unwrap()).abs() < min_sep => g.push(p),
            _ => groups.push(vec![p]),
        }
    }
    if groups.len() > 1 {
        let first = groups[0][0];
        let last = *groups.last().unwrap().last().unwrap();
        if grid.offset(first, last).abs() < min_sep {
            let tail = groups.pop().unwrap();
            groups[0].splice(0..0, tail);
        }
    }
    let mut out: Vec<f64> = groups.iter().map(|g| circular_mean(grid, g)).collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Positions where `v` changes sign, with hysteresis: a change only counts once
/// the new phase reaches `interface_band`. Each position is the linearly
/// interpolated zero crossing between the last sample of the old phase and the
/// first of the new one (the mean position when several crossings occur there).
pub fn detect_interfaces(state: &FieldState, th: &DetectionThresholds) -> Vec<f64> {
    let v = &state.v;
    let n = v.len();
    let grid = &state.grid;
    let h = grid.spacing();
    let phase_of = |x: f64| {
        if x >= th.interface_band {
            Some(true)
        } else if x <= -th.interface_band {
            Some(false)
        } else {
            None
        }
    };
    let Some(start) = (0..n).find(|&i| phase_of(v[i]).is_some()) else {
        return Vec::new();
    };
    let mut current = phase_of(v[start]).unwrap();
    let mut last_in_phase = start;
    let mut found = Vec::new();
    for k in 1..=n {
        let i = start + k;
        let Some(p) = phase_of(v[i % n]) else { continue };
        if p != current {
            // zero crossings on the stretch last_in_phase..i
            let mut crossings = Vec::new();
            let mut j = last_in_phase;
            while j < i {
                let (a, b) = (v[j % n], v[(j + 1) % n]);
                if a == 0.0 {
                    let run_start = j;
                    while j < i && v[j % n] == 0.0 {
                        j += 1;
                    }
                    crossings.push(0.5 * (run_start + j - 1) as f64 * h);
                    continue;
                }
                if a * b < 0.0 {
                    crossings.push((j as f64 + a / (a - b)) * h);
                }
                j += 1;
            }
            if !crossings.is_empty() {
                let mean = crossings.iter().sum::<f64>() / crossings.len() as f64;
                found.push(grid.wrap(mean));
            }
            current = p;
        }
        last_in_phase = i;
    }
    merge(grid, found, th.min_separation)
}

/// Connected components of `|v| ≤ zero_band` no wider than `max_kink_width`,
/// with the turning of the tangent across each.
pub fn detect_kinks(state: &FieldState, th: &DetectionThresholds) -> Vec<KinkDetection> {
    let v = &state.v;
    let n = v.len();
    let h = state.grid.spacing();
    let low = |i: usize| v[i % n].abs() <= th.zero_band;
    let Some(start) = (0..n).find(|&i| !low(i)) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut i = start;
    while i < start + n {
        if !low(i) {
            i += 1;
            continue;
        }
        let a = i;
        while low(i) {
            i += 1;
        }
        let b = i - 1;
        let width = (b - a + 1) as f64 * h;
        if width > th.max_kink_width {
            continue;
        }
        // turning over the edges from node a−1 to node b+1
        let raw: f64 = (a - 1..=b).map(|j| state.angle_increment(j % n)).sum();
        let turn = wrap_angle(raw);
        let (before, after) = (v[(a - 1) % n], v[(b + 1) % n]);
        out.push(KinkDetection {
            position: state.grid.wrap(0.5 * (a + b) as f64 * h),
            width,
            turn,
            jump_estimate: turn.abs(),
            crosses_sign: before * after < 0.0,
        });
    }
    out.sort_by(|x, y| x.position.total_cmp(&y.position));
    out
}
