//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use kinkflow::analysis::{
    detect_interfaces, detect_kinks, extract_sharp, gamma_sweep, segment_stats, stats_collar, DetectionThresholds,
    GridPolicy,
};
use kinkflow::flow::{grad_u, grad_v, run_flow, FlowParams, StopReason};
use kinkflow::model::{
    energy_eps, energy_sharp, local_energy, CurvatureSpec, FieldState, Grid, ModelParams, Phase, PotentialSpec,
    SharpState,
};
use kinkflow::recovery::{build_recovery, delta_eps, optimal_profile, straight_kink_patch_energy};
use kinkflow::setup::two_interface_initial;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn two_interface_params(a: f64) -> ModelParams {
    ModelParams::new(0.05, PotentialSpec::quartic(a), CurvatureSpec::new(1.0, 2.0)).with_volume(0.0)
}

fn c1_constants() -> Outcome {
    let one = PotentialSpec::quartic(1.0);
    let three_quarters = PotentialSpec::quartic(0.75);
    let s1 = one.sigma().map_err(|e| e.to_string())?;
    let s075 = three_quarters.sigma().map_err(|e| e.to_string())?;
    check((s1 - 8.0 / 3.0).abs() <= 1e-8, format!("sigma(1) = {s1}"))?;
    check(one.sigma_hat() == 2.0, format!("sigma_hat(1) = {}", one.sigma_hat()))?;
    let expected = 8.0 * 0.75f64.sqrt() / 3.0;
    check(
        (s075 - expected).abs() <= 1e-8,
        format!("sigma(0.75) = {s075}, expected {expected}"),
    )?;
    let sh = three_quarters.sigma_hat();
    check((sh - 3f64.sqrt()).abs() <= 1e-12, format!("sigma_hat(0.75) = {sh}"))?;
    Ok(format!(
        "sigma errors {:.1e} / {:.1e}, sigma_hat(0.75) error {:.1e}",
        (s1 - 8.0 / 3.0).abs(),
        (s075 - expected).abs(),
        (sh - 3f64.sqrt()).abs()
    ))
}

fn c2_profile() -> Outcome {
    let table = optimal_profile(&PotentialSpec::quartic(1.0), 5.0, 1e-13).map_err(|e| e.to_string())?;
    let sup = (0..=50_000)
        .map(|i| {
            let t = 5.0 * i as f64 / 50_000.0;
            (table.eval(t) - t.tanh()).abs()
        })
        .fold(0.0, f64::max);
    check(sup < 1e-6, format!("sup |p - tanh| = {sup:e}"))?;
    Ok(format!("sup |p - tanh| on [0, 5] = {sup:.2e}"))
}

fn random_state(rng: &mut StdRng, n: usize) -> FieldState {
    let grid = Grid::new(n, rng.gen_range(2.0..10.0)).unwrap();
    let mut u = vec![0.0; n];
    let modes: Vec<(f64, f64)> = (0..5)
        .map(|_| (rng.gen_range(-0.4..0.4), rng.gen_range(0.0..TAU)))
        .collect();
    for (i, x) in u.iter_mut().enumerate() {
        let t = TAU * i as f64 / n as f64;
        *x = t + modes
            .iter()
            .enumerate()
            .map(|(k, (a, p))| a * ((k + 1) as f64 * t + p).sin())
            .sum::<f64>();
    }
    let v = (0..n).map(|_| rng.gen_range(-1.3..1.3)).collect();
    FieldState::new(grid, u, 1, v).unwrap()
}

fn c3_gradient_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(20240501);
    let n = 256;
    let eta = 1e-5;
    let mut worst: f64 = 0.0;
    for trial in 0..50 {
        let state = random_state(&mut rng, n);
        let params = ModelParams::new(
            rng.gen_range(0.02..0.5),
            PotentialSpec::quartic(rng.gen_range(0.5..1.5)),
            CurvatureSpec::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..3.0)),
        );
        let h = state.grid.spacing();
        let energy = |s: &FieldState| energy_eps(s, &params).unwrap().total;
        for angle in [true, false] {
            let g = if angle {
                grad_u(&state, &params)
            } else {
                grad_v(&state, &params)
            };
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..n {
                let mut plus = state.clone();
                let mut minus = state.clone();
                if angle {
                    plus.u[i] += eta;
                    minus.u[i] -= eta;
                } else {
                    plus.v[i] += eta;
                    minus.v[i] -= eta;
                }
                // L² gradient: derivative of the energy divided by the cell length
                let fd = (energy(&plus) - energy(&minus)) / (2.0 * eta * h);
                num += (g[i] - fd).powi(2);
                den += fd * fd;
            }
            let rel = (num / den).sqrt();
            worst = worst.max(rel);
            check(
                rel < 1e-6,
                format!(
                    "state {trial}: {} relative error {rel:e}",
                    if angle { "grad_u" } else { "grad_v" }
                ),
            )?;
        }
    }
    Ok(format!("50 states, worst relative error {worst:.2e}"))
}

fn c4_conservation() -> Outcome {
    let params = two_interface_params(1.0);
    let grid = Grid::new(1024, 4.0 * PI).map_err(|e| e.to_string())?;
    let l = grid.length();
    let start = two_interface_initial(grid, 0.0, 0.2).map_err(|e| e.to_string())?;
    let flow = FlowParams {
        dt: 1e-3,
        max_steps: 10_000,
        energy_tol: 0.0,
        log_every: 1,
        ..FlowParams::default()
    };
    let res = run_flow(&start, &params, &flow, |_| {}).map_err(|e| e.to_string())?;
    check(
        res.steps == 10_000,
        format!("run stopped after {} steps ({})", res.steps, res.stop_reason.name()),
    )?;
    let mut max_mass: f64 = 0.0;
    let mut max_closure: f64 = 0.0;
    let mut increases = 0;
    for w in res.energy_log.windows(2) {
        let (a, b) = (w[0].energy.total, w[1].energy.total);
        if b - a > 1e-12 * (1.0 + a.abs()) {
            increases += 1;
        }
    }
    for entry in &res.energy_log {
        max_mass = max_mass.max(entry.mass_defect.abs());
        max_closure = max_closure.max(entry.closure[0].hypot(entry.closure[1]));
    }
    check(max_mass <= 1e-10 * l, format!("mass defect {max_mass:e}"))?;
    check(max_closure <= 1e-6, format!("closure defect {max_closure:e}"))?;
    check(
        increases == 0 && res.energy_increases == 0,
        format!("{increases} energy-increasing steps"),
    )?;
    Ok(format!(
        "10^4 steps: max |mass defect| {max_mass:.1e}, max closure {max_closure:.1e}, 0 increases"
    ))
}

fn c5_interfaces() -> Outcome {
    let sharp = SharpState::two_phase_circle(2.0);
    let params = ModelParams::new(0.2, PotentialSpec::quartic(1.0), CurvatureSpec::new(1.0, 2.0)).with_volume(0.0);
    let e_sharp = energy_sharp(&sharp, &params).map_err(|e| e.to_string())?.total;
    let target = 5.0 * PI + 16.0 / 3.0;
    check(
        (e_sharp - target).abs() < 1e-9,
        format!("E_sharp = {e_sharp}, expected {target}"),
    )?;
    let eps = [0.2, 0.1, 0.05, 0.025];
    let table = gamma_sweep(&sharp, &eps, &params, &GridPolicy::default(), None).map_err(|e| e.to_string())?;
    let rel: Vec<f64> = table
        .rows
        .iter()
        .map(|r| ((r.e_recovery.total - target) / target).abs())
        .collect();
    check(
        rel.windows(2).all(|w| w[1] < w[0]),
        format!("relative gaps not strictly decreasing: {rel:?}"),
    )?;
    check(rel[3] < 0.1, format!("relative gap {} at eps 0.025", rel[3]))?;
    Ok(format!(
        "relative gaps {}",
        rel.iter()
            .map(|r| format!("{:.3}%", 100.0 * r))
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

fn c6_kinks() -> Outcome {
    let l = 4.0 * PI;
    let sharp = SharpState::lens(l, Phase::Plus);
    let eps = 0.025;
    let pot = PotentialSpec::quartic(1.0);
    let params = ModelParams::new(eps, pot, CurvatureSpec::new(1.0, 2.0));
    let junctions = energy_sharp(&sharp, &params).map_err(|e| e.to_string())?.interface;
    let target = 16.0 / 3.0 + 2.0 * PI;
    check(
        (junctions - target).abs() < 1e-9,
        format!("junction energy {junctions}, expected {target}"),
    )?;

    let grid = Grid::new((16.0 * l / eps).ceil() as usize, l).map_err(|e| e.to_string())?;
    let rec = build_recovery(&sharp, grid, &params).map_err(|e| e.to_string())?;
    let per_kink = 2.0 * FRAC_PI_2;
    let mut patch_energies = Vec::new();
    for patch in &rec.patches {
        let e: f64 = (0..grid.n_points())
            .filter(|&i| grid.offset(grid.position(i) + 0.5 * grid.spacing(), patch.center).abs() <= patch.half_width)
            .map(|i| local_energy(&rec.state, &params, i).total())
            .sum();
        check(
            (e - per_kink).abs() <= 0.1 * per_kink,
            format!("kink patch energy {e} vs {per_kink}"),
        )?;
        patch_energies.push(e);
    }
    check(patch_energies.len() == 2, format!("{} patches", patch_energies.len()))?;

    // straight lines at angles ∓ū: δ_ε minimizes and the optimum is 4ū√Φ(0), both up to O(h)
    let u_bar = FRAC_PI_4;
    let delta = delta_eps(2.0 * u_bar, &pot, 0.01).map_err(|e| e.to_string())?;
    let mut errors = Vec::new();
    for cells in [23.7, 47.3, 94.9] {
        let h = delta / cells;
        let at = |w: f64| straight_kink_patch_energy(u_bar, w, 0.01, 1.0, h);
        let argmin = (0..=1500)
            .map(|k| delta * (0.5 + k as f64 / 1000.0))
            .min_by(|a, b| at(*a).total_cmp(&at(*b)))
            .unwrap();
        check(
            (argmin - delta).abs() <= 2.0 * h,
            format!("minimizing width {argmin} vs delta {delta} at h = delta/{cells}"),
        )?;
        let err = (at(delta) - 4.0 * u_bar).abs();
        // one edge of energy h(εκ² + Φ(0)/ε) = 2h/ε on each side may be misassigned
        check(
            err <= 4.0 * h / 0.01,
            format!("straight kink error {err} at h = delta/{cells}"),
        )?;
        errors.push(err);
    }
    Ok(format!(
        "kink patches {:.4} / {:.4} vs pi; straight-kink errors {}",
        patch_energies[0],
        patch_energies[1],
        errors.iter().map(|e| format!("{e:.1e}")).collect::<Vec<_>>().join(", ")
    ))
}

fn c7_two_interface_relaxation() -> Outcome {
    let eps = 0.05;
    let mut report = Vec::new();
    let mut failures = Vec::new();
    for a in [1.0, 0.75] {
        let params = two_interface_params(a);
        let grid = Grid::new(1024, 4.0 * PI).map_err(|e| e.to_string())?;
        let start = two_interface_initial(grid, 0.0, 0.2).map_err(|e| e.to_string())?;
        let flow = FlowParams {
            dt: 1e-2,
            max_steps: 200_000,
            ..FlowParams::default()
        };
        let res = run_flow(&start, &params, &flow, |_| {}).map_err(|e| e.to_string())?;
        if res.stop_reason != StopReason::Converged {
            failures.push(format!("a = {a}: stopped with {}", res.stop_reason.name()));
        }
        let state = &res.final_state;
        let th = DetectionThresholds::for_eps(eps);
        let interfaces = detect_interfaces(state, &th);
        if interfaces.len() != 2 {
            failures.push(format!("a = {a}: {} interfaces", interfaces.len()));
        }
        let dips: Vec<_> = detect_kinks(state, &th)
            .into_iter()
            .filter(|k| !k.crosses_sign)
            .collect();
        // extracted segments run between interfaces and the dips inside one phase
        let mut cuts = interfaces.clone();
        cuts.extend(dips.iter().map(|k| k.position));
        let stats = segment_stats(state, &cuts, stats_collar(eps));
        let worst = stats.iter().map(|s| s.std / s.mean.abs()).fold(0.0, f64::max);
        if worst > 0.05 {
            failures.push(format!(
                "a = {a}: curvature std/|mean| per segment {}",
                stats
                    .iter()
                    .map(|s| format!("{:.3}/{:.3}", s.std, s.mean))
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
        let h = state.grid.spacing();
        let n = state.n_points() as i64;
        let wrong_phase = dips
            .iter()
            .filter(|k| {
                let outside = ((k.position - 0.5 * k.width) / h).round() as i64 - 2;
                state.v[outside.rem_euclid(n) as usize] < 0.0
            })
            .count();
        if wrong_phase > 0 {
            failures.push(format!(
                "a = {a}: {wrong_phase} dips in the phase with spontaneous curvature 1"
            ));
        }
        report.push(format!(
            "a = {a}: {} in {} steps, {} interfaces, {} extra dips, worst std/|mean| {:.1}%",
            res.stop_reason.name(),
            res.steps,
            interfaces.len(),
            dips.len(),
            100.0 * worst
        ));
    }
    let report = report.join("; ");
    if failures.is_empty() {
        Ok(report)
    } else {
        Err(format!("{}; {report}", failures.join("; ")))
    }
}

fn c8_round_trip() -> Outcome {
    let eps: f64 = 0.01;
    let l = 4.0 * PI;
    let cases = vec![
        ("lens", SharpState::lens(l, Phase::Plus)),
        (
            "ghosts pi/8",
            SharpState::symmetric_arcs(l, &[Phase::Minus; 3], FRAC_PI_8).unwrap(),
        ),
        (
            "interfaces pi/4",
            SharpState::symmetric_arcs(l, &[Phase::Plus, Phase::Minus, Phase::Plus, Phase::Minus], FRAC_PI_4).unwrap(),
        ),
        (
            "interfaces 3pi/4",
            SharpState::symmetric_arcs(l, &[Phase::Plus, Phase::Minus], 0.75 * PI).unwrap(),
        ),
        ("plain interfaces", SharpState::two_phase_circle(2.0)),
    ];
    let tol_len = 2.0 * (eps.sqrt() + eps);
    let mut worst_len: f64 = 0.0;
    let mut worst_jump: f64 = 0.0;
    for (name, sharp) in cases {
        let mut params = ModelParams::new(eps, PotentialSpec::quartic(1.0), CurvatureSpec::new(1.0, 2.0));
        let mean = sharp.mass() / l;
        if mean.abs() < 1.0 {
            params = params.with_volume(mean);
        }
        let policy = GridPolicy {
            points_per_eps: 16.0,
            ..GridPolicy::default()
        };
        let n = policy.n_points(&sharp, &params, eps).map_err(|e| e.to_string())?;
        let grid = Grid::new(n, l).map_err(|e| e.to_string())?;
        let rec = build_recovery(&sharp, grid, &params).map_err(|e| format!("{name}: {e}"))?;
        let back = extract_sharp(&rec.state, &DetectionThresholds::for_eps(eps), &params)
            .map_err(|e| format!("{name}: {e}"))?;
        check(
            back.segments.len() == sharp.segments.len(),
            format!("{name}: {} segments recovered", back.segments.len()),
        )?;
        for (a, b) in sharp.segments.iter().zip(&back.segments) {
            check(
                a.phase == b.phase,
                format!("{name}: phase {:?} became {:?}", a.phase, b.phase),
            )?;
            let d = (a.length - b.length).abs();
            worst_len = worst_len.max(d);
            check(d <= tol_len, format!("{name}: length {} became {}", a.length, b.length))?;
        }
        for (a, b) in sharp.junctions.iter().zip(&back.junctions) {
            check(
                a.kind == b.kind,
                format!("{name}: {} became {}", a.kind.name(), b.kind.name()),
            )?;
            if a.jump() >= FRAC_PI_8 {
                let rel = (a.jump() - b.jump()).abs() / a.jump();
                worst_jump = worst_jump.max(rel);
                check(rel <= 0.05, format!("{name}: jump {} became {}", a.jump(), b.jump()))?;
            }
        }
    }
    Ok(format!(
        "5 states, worst length error {worst_len:.2e} (tolerance {tol_len:.3}), worst jump error {:.2}%",
        100.0 * worst_jump
    ))
}

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome, Duration); 8] = [
        (1, "interface constants", c1_constants, Duration::from_secs(1)),
        (2, "optimal profile", c2_profile, Duration::from_secs(1)),
        (3, "gradient oracle", c3_gradient_oracle, Duration::from_secs(30)),
        (4, "conservation", c4_conservation, Duration::from_secs(300)),
        (5, "limsup with interfaces", c5_interfaces, Duration::from_secs(120)),
        (6, "limsup with kinks", c6_kinks, Duration::from_secs(120)),
        (7, "two-interface relaxation", c7_two_interface_relaxation, Duration::from_secs(600)),
        (8, "round trip", c8_round_trip, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}; {msg}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {id} PASS  {name}: {msg} [{elapsed:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id} FAIL  {name}: {msg} [{elapsed:.2?}]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria passed");
}
