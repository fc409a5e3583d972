//! Population ratio n_b/n_a against fiber loss for equal cavities, full model
//! next to the closed form `(1 + cos Φ)κ² / ((1 − cos Φ)(κ + κ_m)²)`.

use std::f64::consts::PI;

use cavitylink::model::{build_local, make_frame, SystemParams};
use cavitylink::observables::{decoupling_ratio, emission_report};
use cavitylink::solvers::{steady_state, symmetric_steady};

fn main() -> cavitylink::Result<()> {
    let (omega, kappa, cutoff) = (1.0, 1.0, 6);
    for phi in [0.5 * PI, 0.75 * PI, 0.9 * PI] {
        println!("Φ = {:.2}π", phi / PI);
        println!(
            "{:>6} {:>12} {:>12} {:>10}",
            "κ_m", "full", "closed", "diff"
        );
        for kappa_m in [0.0, 1.0, 2.0, 5.0, 10.0, 20.0] {
            let p = SystemParams::symmetric(omega, kappa, kappa_m, phi)?;
            let model = build_local(&p, cutoff)?;
            let rho = steady_state(&model)?;
            let frame = make_frame(&p)?;
            let full = decoupling_ratio(&emission_report(&rho, &model, Some(&frame))?)?.value;
            let closed = symmetric_steady(omega, kappa, kappa_m, phi)?.ratio.value;
            println!(
                "{kappa_m:>6.1} {full:>12.6e} {closed:>12.6e} {:>10.2e}",
                (full - closed).abs()
            );
        }
    }
    Ok(())
}
