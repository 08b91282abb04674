//! Explicit recovery sequences: phase-field approximations of a sharp state
//! whose energy approaches the sharp-interface energy as `ε → 0`.
//!
//! Around every junction the kink is smoothed by linear interpolation of the
//! angle over `2δ_ε`, the phase field is assembled from the one-sided profile
//! [`PEps`], and two bumps restore the local closure integrals. A final bump
//! in a phase plateau restores the volume.

mod kink;
mod profile;

pub use kink::{bump, closure_basis, correct_closure, straight_kink_patch_energy, ClosureBasis, ClosureCorrection};
pub use profile::{build_p_eps, delta_eps, optimal_profile, profile_for_eps, PEps, ProfileTable};

use crate::error::{Error, Result};
use crate::flow::reproject_closure;
use crate::model::{closure_defect, geometry::norm, FieldState, Grid, JunctionKind, ModelParams, SharpState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryOptions {
    /// Patch radius as a multiple of the transition collar (clamped to half the junction gap).
    pub patch_factor: f64,
    /// Minimum number of grid cells across a kink's inner interval `2δ_ε`.
    pub min_points_per_width: f64,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self {
            patch_factor: 10.0,
            min_points_per_width: 8.0,
        }
    }
}

/// Recovery data attached to one junction.
#[derive(Debug, Clone, PartialEq)]
pub struct KinkPatch {
    pub center: f64,
    pub half_width: f64,
    pub jump: f64,
    pub kind: JunctionKind,
    /// `δ + √ε + ε(1 − p(1/√ε)) + h`: the extent of the phase transition.
    pub collar: f64,
    pub radius: f64,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    /// Grid nodes of the patch, in order of increasing offset from the centre.
    pub nodes: Vec<usize>,
    /// Correction directions on `nodes`; absent for junctions without a kink.
    pub basis: Option<ClosureBasis>,
}

#[derive(Debug, Clone)]
pub struct Recovery {
    pub state: FieldState,
    pub patches: Vec<KinkPatch>,
    /// Volume correction amplitude (zero without a volume constraint).
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeCorrection {
    pub gamma: f64,
    /// First node and length of the plateau that carries the bump.
    pub plateau: (usize, usize),
}

/// Adds `γ·bump` to `v`, with `γ = target_mass − h Σ v` and a smooth bump of
/// unit discrete integral placed in the longest run where `|v| = 1` exactly.
pub fn correct_volume(v: &mut [f64], h: f64, target_mass: f64) -> Result<VolumeCorrection> {
    const MIN_PLATEAU: usize = 8;
    let gamma = target_mass - h * v.iter().sum::<f64>();
    if gamma == 0.0 {
        return Ok(VolumeCorrection { gamma, plateau: (0, 0) });
    }
    let n = v.len();
    let well = |i: usize| v[i % n].abs() == 1.0;
    let (mut best_start, mut best_len) = (0, 0);
    if (0..n).all(|i| v[i] == v[0] && well(i)) {
        best_len = n;
    } else {
        // start scanning right after a break so that no run wraps past the scan
        let first_break = (0..n)
            .find(|&i| !well(i) || v[i] != v[(i + n - 1) % n])
            .expect("some node starts a run");
        let mut i = first_break;
        while i < first_break + n {
            if well(i) {
                let start = i;
                while i < first_break + n && well(i) && v[i % n] == v[start % n] {
                    i += 1;
                }
                if i - start > best_len {
                    best_start = start % n;
                    best_len = i - start;
                }
            } else {
                i += 1;
            }
        }
    }
    if best_len < MIN_PLATEAU {
        return Err(Error::NoPlateau);
    }
    let profile: Vec<f64> = (0..best_len)
        .map(|k| bump(0.9 * (2.0 * (k as f64 + 0.5) / best_len as f64 - 1.0)))
        .collect();
    let total = h * profile.iter().sum::<f64>();
    for (k, b) in profile.iter().enumerate() {
        v[(best_start + k) % n] += gamma * b / total;
    }
    Ok(VolumeCorrection {
        gamma,
        plateau: (best_start, best_len),
    })
}

struct Layout {
    centers: Vec<f64>,
    deltas: Vec<f64>,
    collars: Vec<f64>,
    radii: Vec<f64>,
}

fn layout(
    sharp: &SharpState,
    eps: f64,
    h: f64,
    params: &ModelParams,
    table: &ProfileTable,
    factor: f64,
) -> Result<Layout> {
    let centers = sharp.junction_positions();
    let m = centers.len();
    let l = sharp.length();
    let mut deltas = Vec::with_capacity(m);
    let mut collars = Vec::with_capacity(m);
    for j in &sharp.junctions {
        let delta = delta_eps(j.jump(), &params.potential, eps)?;
        let p_end = table.eval(1.0 / eps.sqrt());
        deltas.push(delta);
        collars.push(delta + eps.sqrt() + eps * (1.0 - p_end) + h);
    }
    let gap = |a: usize, b: usize| {
        let d = centers[b] - centers[a];
        if m == 1 {
            l
        } else {
            d.rem_euclid(l)
        }
    };
    let radii = (0..m)
        .map(|j| {
            let prev = gap((j + m - 1) % m, j);
            let next = gap(j, (j + 1) % m);
            (factor * collars[j]).min(0.5 * prev.min(next))
        })
        .collect();
    Ok(Layout {
        centers,
        deltas,
        collars,
        radii,
    })
}

fn layout_fits(lay: &Layout) -> bool {
    lay.radii.iter().zip(&lay.collars).all(|(r, c)| *r >= 2.0 * c)
}

/// Builds the recovery state of `sharp` on `grid` at `params.eps`.
pub fn build_recovery(sharp: &SharpState, grid: Grid, params: &ModelParams) -> Result<Recovery> {
    build_recovery_with(sharp, grid, params, &RecoveryOptions::default())
}

pub fn build_recovery_with(
    sharp: &SharpState,
    grid: Grid,
    params: &ModelParams,
    opts: &RecoveryOptions,
) -> Result<Recovery> {
    params.validate()?;
    sharp.validate_structure()?;
    let l = grid.length();
    if (sharp.length() - l).abs() > 1e-12 * l {
        return Err(Error::InvalidSharpState(format!(
            "sharp length {} differs from grid length {l}",
            sharp.length()
        )));
    }
    let eps = params.eps;
    let h = grid.spacing();
    let n = grid.n_points();
    let table = profile_for_eps(&params.potential, eps)?;
    let lay = layout(sharp, eps, h, params, &table, opts.patch_factor)?;

    if !layout_fits(&lay) {
        let (mut lo, mut hi) = (0.0, eps);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            match layout(sharp, mid, h, params, &table, opts.patch_factor) {
                Ok(t) if layout_fits(&t) => lo = mid,
                _ => hi = mid,
            }
        }
        return Err(Error::PatchOverlap { eps, max_eps: lo });
    }
    for (j, &delta) in lay.deltas.iter().enumerate() {
        if sharp.junctions[j].jump() > 0.0 && 2.0 * delta / h < opts.min_points_per_width {
            return Err(Error::GridTooCoarse {
                width: 2.0 * delta,
                required: (opts.min_points_per_width * l / (2.0 * delta)).ceil() as usize,
            });
        }
    }

    let w = sharp.winding();
    let two_pi_w = std::f64::consts::TAU * w as f64;
    let mut u: Vec<f64> = (0..n).map(|i| sharp.angle_at(grid.position(i))).collect();
    let mut v: Vec<f64> = (0..n).map(|i| sharp.phase_at(grid.position(i)).sign()).collect();
    let mut patches = Vec::with_capacity(sharp.junctions.len());

    for (j, junction) in sharp.junctions.iter().enumerate() {
        let s = lay.centers[j];
        let delta = lay.deltas[j];
        let radius = lay.radii[j];
        let collar = lay.collars[j];
        let left = sharp.segments[j].phase;
        let right = sharp.segments[(j + 1) % sharp.segments.len()].phase;
        let p = build_p_eps(eps, delta, &table)?;

        let mut nodes: Vec<(usize, f64)> = (0..n)
            .filter_map(|i| {
                let d = grid.offset(grid.position(i), s);
                (d.abs() < radius).then_some((i, d))
            })
            .collect();
        nodes.sort_by(|a, b| a.1.total_cmp(&b.1));

        for &(i, d) in &nodes {
            let profile = p.eval(d.abs());
            v[i] = match junction.kind {
                JunctionKind::Ghost => left.sign() * profile,
                _ => (if d < 0.0 { left } else { right }).sign() * profile,
            };
        }

        let mut patch = KinkPatch {
            center: grid.wrap(s),
            half_width: delta,
            jump: junction.jump(),
            kind: junction.kind,
            collar,
            radius,
            alpha: 0.0,
            beta: 0.0,
            iterations: 0,
            nodes: nodes.iter().map(|x| x.0).collect(),
            basis: None,
        };
        if delta > 0.0 {
            // work in the kink's own frame, lifted continuously through the patch
            let u_left = sharp.angle_at(s - delta);
            let u_right = sharp.angle_at(s + delta);
            let psi = 0.5 * (u_left + u_right);
            let shifts: Vec<f64> = nodes
                .iter()
                .map(|&(i, d)| ((s + d - grid.position(i)) / l).round() * two_pi_w)
                .collect();
            let d: Vec<f64> = nodes.iter().map(|x| x.1).collect();
            let reference: Vec<f64> = d.iter().map(|&x| sharp.angle_at(s + x) - psi).collect();
            let mut local: Vec<f64> = d
                .iter()
                .zip(&reference)
                .map(|(&x, &r)| {
                    if x.abs() < delta {
                        (u_left - psi) + (x + delta) / (2.0 * delta) * (u_right - u_left)
                    } else {
                        r
                    }
                })
                .collect();
            let target = [
                h * reference.iter().map(|a| a.cos()).sum::<f64>(),
                h * reference.iter().map(|a| a.sin()).sum::<f64>(),
            ];
            let basis = closure_basis(&d, &reference, h, 0.5 * (collar + radius), 0.475 * (radius - collar))?;
            let c = correct_closure(&mut local, h, target, &basis)?;
            for (k, &(i, _)) in nodes.iter().enumerate() {
                u[i] = local[k] + psi - shifts[k];
            }
            patch.alpha = c.alpha;
            patch.beta = c.beta;
            patch.iterations = c.iterations;
            patch.basis = Some(basis);
        }
        patches.push(patch);
    }

    let gamma = match params.volume {
        Some(m) => correct_volume(&mut v, h, m * l)?.gamma,
        None => 0.0,
    };

    let mut state = FieldState::new(grid, u, w, v)?;
    let tol = 1e-13 * l;
    if norm(closure_defect(&state)) > tol {
        reproject_closure(&mut state, tol)?;
    }
    Ok(Recovery { state, patches, gamma })
}
