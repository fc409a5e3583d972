//! Scans the drive ratio Ω₁/Ω₂ and reads off the ratios that minimize and
//! maximize the fiber emission, next to their predicted values.

use std::f64::consts::PI;

use cavitylink::fock::C64;
use cavitylink::model::SystemParams;
use cavitylink::observables::{calibration_scan, CalibrationMethod};

fn main() -> cavitylink::Result<()> {
    let (xi1, xi2) = (C64::new(0.8, 0.3), C64::new(-0.5, 0.9));
    let one = C64::new(1.0, 0.0);
    let template = SystemParams::new(1.0, 1.0, 4.0, one, one, xi1, xi2)?;
    let mut grid = Vec::new();
    for i in 0..=40 {
        for j in 0..48 {
            grid.push(C64::from_polar(
                0.05 * i as f64,
                -PI + 2.0 * PI * j as f64 / 48.0,
            ));
        }
    }
    let scan = calibration_scan(&template, &grid, CalibrationMethod::Coherent)?;
    let (min, max) = (scan.min(), scan.max());
    println!(
        "minimum I_m = {:.3e} at Ω₁/Ω₂ = {:.3}, predicted {:.3}",
        min.i_m,
        min.ratio,
        -xi2.conj() / xi1.conj()
    );
    println!(
        "maximum I_m = {:.3e} at Ω₁/Ω₂ = {:.3}, predicted {:.3}",
        max.i_m,
        max.ratio,
        xi1 / xi2
    );
    Ok(())
}
