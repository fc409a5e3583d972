//! Unequal cavity losses: the moment equations against the full common-mode
//! model, and the emission split between the three channels.

use std::f64::consts::PI;

use cavitylink::fock::{Truncation, C64};
use cavitylink::model::{
    build_common, build_common_in, make_frame, recommended_space, Channel, SystemParams,
};
use cavitylink::observables::emission_report;
use cavitylink::solvers::{rate_steady_state, steady_state};

fn main() -> cavitylink::Result<()> {
    let one = C64::new(1.0, 0.0);
    for kappa2 in [0.5, 1.5] {
        for phi in [0.5 * PI, 0.9 * PI] {
            println!("κ₂ = {kappa2}, Φ = {:.2}π", phi / PI);
            println!(
                "{:>5} {:>11} {:>11} {:>11} {:>9} {:>9} {:>9}",
                "κ_m", "n_b/n_a", "rates", "|diff|", "I_1", "I_2", "I_m"
            );
            for kappa_m in [1.0, 4.0, 12.0] {
                let p = SystemParams::new(
                    1.0,
                    kappa2,
                    kappa_m,
                    one,
                    one,
                    one,
                    C64::from_polar(1.0, phi),
                )?;
                let frame = make_frame(&p)?;
                let space = recommended_space(&build_common(&p, 1)?, Truncation::PerMode, 1e-8)?;
                let model = build_common_in(&p, &space)?;
                let report = emission_report(&steady_state(&model)?, &model, Some(&frame))?;
                let (n_a, n_b) = (report.n_a.unwrap_or(0.0), report.n_b.unwrap_or(0.0));
                let rates = rate_steady_state(&frame)?;
                let diff = (n_a - rates.n_a).abs().max((n_b - rates.n_b).abs());
                println!(
                    "{kappa_m:>5.1} {:>11.4e} {:>11.4e} {diff:>11.2e} {:>9.4} {:>9.4} {:>9.4}",
                    n_b / n_a,
                    rates.n_b / rates.n_a,
                    report.rate(Channel::Cavity1),
                    report.rate(Channel::Cavity2),
                    report.rate(Channel::Fiber),
                );
            }
        }
    }
    Ok(())
}
