//! Scale-separation checks for a few fiber lengths, with rates in units of
//! 10⁶ s⁻¹.

use cavitylink::model::{validate_regime, RegimeOptions, SystemParams};

fn main() -> cavitylink::Result<()> {
    let p = SystemParams::symmetric(1.0, 1.0, 50.0, 0.9 * std::f64::consts::PI)?;
    let options = RegimeOptions::default();
    for length in [1.0, 10.0, 100.0] {
        let report = validate_regime(&p, length, &options)?;
        println!(
            "fiber length {length} m: all passed = {}",
            report.all_passed()
        );
        for c in report.checks() {
            println!(
                "  {:<16} separation {:>10.3e} (margin {})",
                c.name, c.separation, report.margin
            );
        }
    }
    Ok(())
}
