//! Effective single-mode model for strong fiber loss, compared with the full
//! two-mode model as κ_m grows.

use cavitylink::fock::{FockSpace, Truncation, C64};
use cavitylink::model::{build_effective, build_local_in, make_frame, SystemParams};
use cavitylink::observables::emission_report;
use cavitylink::solvers::steady_state;

fn main() -> cavitylink::Result<()> {
    let p0 = SystemParams::new(
        1.0,
        0.6,
        0.0,
        C64::new(0.5, 0.2),
        C64::new(-0.3, 0.4),
        C64::new(1.0, 0.0),
        C64::from_polar(0.8, 2.0),
    )?;
    let cutoff = 8;
    let space = FockSpace::with_truncation(2, cutoff, Truncation::TotalNumber)?;
    println!(
        "{:>7} {:>12} {:>12} {:>10}",
        "κ_m", "n_a full", "n_a eff", "rel err"
    );
    for kappa_m in [10.0, 20.0, 40.0, 80.0, 160.0] {
        let p = p0.with_kappa_m(kappa_m);
        let frame = make_frame(&p)?;
        let full = build_local_in(&p, &space)?;
        let n_full = emission_report(&steady_state(&full)?, &full, Some(&frame))?
            .n_a
            .unwrap_or(0.0);
        let eff = build_effective(&p, cutoff)?;
        let n_eff = emission_report(&steady_state(&eff)?, &eff, Some(&frame))?
            .n_a
            .unwrap_or(0.0);
        println!(
            "{kappa_m:>7.1} {n_full:>12.6e} {n_eff:>12.6e} {:>10.2e}",
            (n_eff - n_full).abs() / n_full
        );
    }
    let (omega_eff, kappa_eff) = make_frame(&p0.with_kappa_m(160.0))?.effective()?;
    println!("at κ_m = 160: Ω_eff = {omega_eff:.4}, κ_eff = {kappa_eff:.4}");
    Ok(())
}
