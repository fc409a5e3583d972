//! Steady state of one driven cavity, checked against `n = |Ω|²/κ²`.

use cavitylink::fock::{Truncation, C64, DEFAULT_TAIL};
use cavitylink::model::{build_single_cavity, recommended_space};
use cavitylink::observables::emission_report;
use cavitylink::solvers::steady_state_with_info;

fn main() -> cavitylink::Result<()> {
    let kappa = 1.0;
    println!(
        "{:>6} {:>7} {:>14} {:>14} {:>10}",
        "|Ω|", "cutoff", "n (full)", "|Ω|²/κ²", "residual"
    );
    for omega in [0.25, 0.5, 1.0, 1.5, 2.0] {
        let omega = C64::new(omega, 0.0);
        let probe = build_single_cavity(omega, kappa, 1)?;
        let cutoff = recommended_space(&probe, Truncation::PerMode, DEFAULT_TAIL)?.cutoff();
        let model = build_single_cavity(omega, kappa, cutoff)?;
        let sol = steady_state_with_info(&model)?;
        let report = emission_report(&sol.state, &model, None)?;
        let n = report.n_a.unwrap_or(0.0);
        println!(
            "{:>6.2} {:>7} {:>14.10} {:>14.10} {:>10.2e}",
            omega.re,
            cutoff,
            n,
            omega.norm_sqr() / (kappa * kappa),
            sol.residual
        );
    }
    Ok(())
}
