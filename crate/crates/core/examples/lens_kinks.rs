//! Recovery of a lens: one phase, two kinks of jump π/2. Prints the energy
//! concentrated on each kink interval against σ̂·π/2 and the straight-kink
//! check that δ_ε is the optimal smoothing width.

use std::f64::consts::{FRAC_PI_2, PI};

use kinkflow::model::{
    energy_eps, energy_sharp, local_energy, CurvatureSpec, Grid, ModelParams, Phase, PotentialSpec, SharpState,
};
use kinkflow::recovery::{build_recovery, delta_eps, straight_kink_patch_energy};

fn main() -> kinkflow::Result<()> {
    let l = 4.0 * PI;
    let sharp = SharpState::lens(l, Phase::Plus);
    let pot = PotentialSpec::quartic(1.0);
    for eps in [0.1, 0.05, 0.025] {
        let params = ModelParams::new(eps, pot, CurvatureSpec::new(1.0, 2.0));
        let grid = Grid::new((16.0 * l / eps).ceil() as usize, l)?;
        let rec = build_recovery(&sharp, grid, &params)?;
        let e = energy_eps(&rec.state, &params)?;
        let target = energy_sharp(&sharp, &params)?;
        println!("eps = {eps}: E_eps = {:.6}, E_sharp = {:.6}", e.total, target.total);
        for patch in &rec.patches {
            let on_kink: f64 = (0..grid.n_points())
                .filter(|&i| {
                    let mid = grid.position(i) + 0.5 * grid.spacing();
                    grid.offset(mid, patch.center).abs() <= patch.half_width
                })
                .map(|i| local_energy(&rec.state, &params, i).total())
                .sum();
            println!(
                "  kink at {:.4}: energy {on_kink:.5} vs sigma_hat*pi/2 = {:.5}",
                patch.center,
                pot.sigma_hat() * FRAC_PI_2
            );
        }
    }

    // two straight lines meeting at angle 2ū, smoothed over [−δ, δ]
    let (eps, u_bar) = (0.01, FRAC_PI_2 / 2.0);
    let delta = delta_eps(2.0 * u_bar, &pot, eps)?;
    let h = delta / 200.0;
    println!(
        "straight kink, delta_eps = {delta:.6}, 4*u_bar*sqrt(phi(0)) = {:.6}",
        4.0 * u_bar
    );
    for f in [0.5, 0.8, 1.0, 1.25, 2.0] {
        let e = straight_kink_patch_energy(u_bar, f * delta, eps, 1.0, h);
        println!("  width {f:>4} * delta: {e:.6}");
    }
    Ok(())
}
