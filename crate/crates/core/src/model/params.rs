use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::fock::C64;

/// Physical inputs of the two-cavity setup.
///
/// Rates and Rabi frequencies are in units of a reference rate `κ₀`, with `ħ = 1`.
/// Everything is written in the frame rotating at the (common) laser frequency,
/// so `omega_cav` is informational only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa_m: f64,
    pub omega1: C64,
    pub omega2: C64,
    pub xi1: C64,
    pub xi2: C64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_cav: Option<f64>,
}

impl SystemParams {
    pub fn new(
        kappa1: f64,
        kappa2: f64,
        kappa_m: f64,
        omega1: C64,
        omega2: C64,
        xi1: C64,
        xi2: C64,
    ) -> Result<Self> {
        let p = Self {
            kappa1,
            kappa2,
            kappa_m,
            omega1,
            omega2,
            xi1,
            xi2,
            omega_cav: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Equal drives `Ω₁ = Ω₂ = Ω`, equal decay `κ₁ = κ₂ = κ`, and `ξ₂ = e^{iΦ} ξ₁` with `ξ₁ = 1`.
    pub fn symmetric(omega: f64, kappa: f64, kappa_m: f64, phi: f64) -> Result<Self> {
        Self::new(
            kappa,
            kappa,
            kappa_m,
            C64::new(omega, 0.0),
            C64::new(omega, 0.0),
            C64::new(1.0, 0.0),
            C64::from_polar(1.0, phi),
        )
    }

    /// Copy with `ξ₂` rotated to `|ξ₂| e^{i(arg ξ₁ + Φ)}`.
    pub fn with_phi(mut self, phi: f64) -> Self {
        self.xi2 = C64::from_polar(self.xi2.norm(), self.xi1.arg() + phi);
        self
    }

    pub fn with_kappa_m(mut self, kappa_m: f64) -> Self {
        self.kappa_m = kappa_m;
        self
    }

    /// Copy with `Ω₁ = ratio · Ω₂`.
    pub fn with_omega_ratio(mut self, ratio: C64) -> Self {
        self.omega1 = ratio * self.omega2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("kappa_m", self.kappa_m),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(argument(format!(
                    "{name} must be a finite non-negative rate, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("xi1", self.xi1),
            ("xi2", self.xi2),
        ] {
            if !v.is_finite() {
                return Err(argument(format!("{name} must be finite, got {v}")));
            }
        }
        if self.xi1.norm_sqr() + self.xi2.norm_sqr() == 0.0 {
            return Err(argument("xi1 and xi2 must not both vanish"));
        }
        if let Some(w) = self.omega_cav {
            if !(w > 0.0 && w.is_finite()) {
                return Err(argument(format!("omega_cav must be positive, got {w}")));
            }
        }
        Ok(())
    }
}
