use serde::Serialize;

use crate::error::{argument, Result};
use crate::model::SystemParams;

/// Vacuum speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 2.998e8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeOptions {
    /// Required separation for each "much greater than".
    pub margin: f64,
    /// Physical value of the unit rate `κ₀`, in s⁻¹. Only the fiber-length check needs it.
    pub reference_rate: f64,
}

impl Default for RegimeOptions {
    fn default() -> Self {
        Self {
            margin: 10.0,
            reference_rate: 1e6,
        }
    }
}

/// One scale-separation check. `separation` is the ratio of the slow scale to the
/// fast one; the check passes when it is at least the margin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeCheck {
    pub name: &'static str,
    pub separation: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeReport {
    pub margin: f64,
    /// `κ_m` against `κ₁, κ₂, |Ω₁|, |Ω₂|`.
    pub fiber_dominates: RegimeCheck,
    /// Fiber round trip `R/c` against the fiber decay time `1/κ_m`.
    pub fiber_length: RegimeCheck,
    /// `1/κ_m` against the cavity lifetimes `1/κ₁, 1/κ₂`.
    pub lifetimes: RegimeCheck,
}

impl RegimeReport {
    pub fn all_passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed)
    }

    pub fn checks(&self) -> [&RegimeCheck; 3] {
        [&self.fiber_dominates, &self.fiber_length, &self.lifetimes]
    }
}

fn check(name: &'static str, slow: f64, fast: f64, margin: f64) -> RegimeCheck {
    let separation = if fast == 0.0 {
        if slow == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        slow / fast
    };
    RegimeCheck {
        name,
        separation,
        passed: separation >= margin,
    }
}

/// Checks the separation of scales that the common-mode picture and the Markov
/// treatment of the fiber rely on.
pub fn validate_regime(
    params: &SystemParams,
    fiber_length_m: f64,
    options: &RegimeOptions,
) -> Result<RegimeReport> {
    params.validate()?;
    if !(fiber_length_m >= 0.0 && fiber_length_m.is_finite()) {
        return Err(argument(format!(
            "fiber length must be finite and non-negative, got {fiber_length_m}"
        )));
    }
    if !(options.margin > 0.0 && options.reference_rate > 0.0) {
        return Err(argument(
            "regime margin and reference rate must be positive",
        ));
    }
    let m = options.margin;
    let km = params.kappa_m;
    let fastest_other = [
        params.kappa1,
        params.kappa2,
        params.omega1.norm(),
        params.omega2.norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let fiber_time = 1.0 / (km * options.reference_rate);
    let round_trip = fiber_length_m / SPEED_OF_LIGHT;
    let max_kappa = params.kappa1.max(params.kappa2);

    Ok(RegimeReport {
        margin: m,
        fiber_dominates: check("fiber_dominates", km, fastest_other, m),
        fiber_length: check("fiber_length", fiber_time, round_trip, m),
        lifetimes: check("lifetimes", km, max_kappa, m),
    })
}
