//! Interface and kink costs of the quartic potential, and the optimal
//! transition profile compared with tanh.

use kinkflow::model::PotentialSpec;
use kinkflow::recovery::{delta_eps, optimal_profile};

fn main() -> kinkflow::Result<()> {
    for a in [1.0, 0.75] {
        let pot = PotentialSpec::quartic(a);
        println!(
            "a = {a}: sigma = {:.12}, sigma_hat = {:.12}",
            pot.sigma()?,
            pot.sigma_hat()
        );
        let table = optimal_profile(&pot, 5.0, 1e-13)?;
        let err = (0..=500)
            .map(|i| {
                let t = 0.01 * i as f64;
                (table.eval(t) - (a.sqrt() * t).tanh()).abs()
            })
            .fold(0.0, f64::max);
        println!(
            "  p(1) = {:.9}, sup |p - tanh(sqrt(a) t)| on [0, 5] = {err:.2e}",
            table.eval(1.0)
        );
        for eps in [0.1, 0.01] {
            println!(
                "  kink half-width for jump pi/2 at eps = {eps}: {:.6}",
                delta_eps(std::f64::consts::FRAC_PI_2, &pot, eps)?
            );
        }
    }
    Ok(())
}
