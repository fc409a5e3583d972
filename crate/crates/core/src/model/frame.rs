use crate::error::{domain, Result};
use crate::fock::C64;
use crate::model::SystemParams;

/// Derived common-mode quantities for a parameter set.
///
/// The common modes are `c_a = (ξ₂* c₁ − ξ₁* c₂)/ξ` (the mode the fiber does not
/// see) and `c_b = (ξ₁ c₁ + ξ₂ c₂)/ξ` (the mode drained by the fiber at `κ_m`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommonModeFrame {
    pub params: SystemParams,
    /// `√(|ξ₁|² + |ξ₂|²)`.
    pub xi: f64,
    /// Relative phase `arg ξ₂ − arg ξ₁`, wrapped to `(−π, π]`.
    pub phi: f64,
    pub omega_a: C64,
    pub omega_b: C64,
    /// `κ₁ − κ₂`.
    pub delta_kappa: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    /// First-order effective drive of `c_a` after eliminating `c_b`; `None` when `κ_m = 0`.
    pub omega_eff: Option<C64>,
    pub kappa_eff: Option<f64>,
}

fn wrap_phase(x: f64) -> f64 {
    use std::f64::consts::PI;
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

pub fn make_frame(params: &SystemParams) -> Result<CommonModeFrame> {
    params.validate()?;
    let SystemParams {
        kappa1: k1,
        kappa2: k2,
        kappa_m: km,
        omega1: o1,
        omega2: o2,
        xi1: x1,
        xi2: x2,
        ..
    } = *params;
    let xi2sq = x1.norm_sqr() + x2.norm_sqr();
    let xi = xi2sq.sqrt();
    let phi = if x1.norm() > 0.0 && x2.norm() > 0.0 {
        wrap_phase(x2.arg() - x1.arg())
    } else {
        0.0
    };
    let omega_a = (o1 * x2 - o2 * x1) / xi;
    let omega_b = (o1 * x1.conj() + o2 * x2.conj()) / xi;
    let delta_kappa = k1 - k2;
    let kappa_a = (k1 * x2.norm_sqr() + k2 * x1.norm_sqr()) / xi2sq;
    let kappa_b = (k1 * x1.norm_sqr() + k2 * x2.norm_sqr()) / xi2sq;

    let (omega_eff, kappa_eff) = if km > 0.0 {
        let coupling = x1 * x2 * delta_kappa / (xi2sq * km);
        let omega_eff = omega_a - coupling * omega_b;
        let kappa_eff = (k1 * x2.norm_sqr() + k2 * x1.norm_sqr()
            - (x1 * x2).norm_sqr() * delta_kappa * delta_kappa / (xi2sq * km))
            / xi2sq;
        (Some(omega_eff), Some(kappa_eff))
    } else {
        (None, None)
    };

    Ok(CommonModeFrame {
        params: *params,
        xi,
        phi,
        omega_a,
        omega_b,
        delta_kappa,
        kappa_a,
        kappa_b,
        omega_eff,
        kappa_eff,
    })
}

impl CommonModeFrame {
    /// `(Ω_eff, κ_eff)`, or a domain error when `κ_m = 0`.
    pub fn effective(&self) -> Result<(C64, f64)> {
        match (self.omega_eff, self.kappa_eff) {
            (Some(o), Some(k)) => Ok((o, k)),
            _ => Err(domain(
                "effective single-mode quantities need kappa_m > 0 (nothing to eliminate)",
            )),
        }
    }

    /// Rows give `(c_a, c_b)` in terms of `(c₁, c₂)`.
    pub fn local_to_common(&self) -> [[C64; 2]; 2] {
        let (x1, x2, xi) = (self.params.xi1, self.params.xi2, self.xi);
        [[x2.conj() / xi, -x1.conj() / xi], [x1 / xi, x2 / xi]]
    }

    /// Rows give `(c₁, c₂)` in terms of `(c_a, c_b)`; the conjugate transpose of
    /// [`local_to_common`](Self::local_to_common).
    pub fn common_to_local(&self) -> [[C64; 2]; 2] {
        let (x1, x2, xi) = (self.params.xi1, self.params.xi2, self.xi);
        [[x2 / xi, x1.conj() / xi], [-x1 / xi, x2.conj() / xi]]
    }

    /// `ξ₁ξ₂Δκ/ξ²`, the amplitude by which `c_a` feeds `c_b` through unequal mirror losses.
    pub fn mixing(&self) -> C64 {
        self.params.xi1 * self.params.xi2 * self.delta_kappa / (self.xi * self.xi)
    }

    /// Steady `⟨c_b⟩` slaved to a given `⟨c_a⟩` when `c_b` is adiabatically eliminated:
    /// `−(iΩ_b* + (ξ₁ξ₂Δκ/ξ²) ⟨c_a⟩)/κ_m`.
    pub fn slaved_b_amplitude(&self, alpha_a: C64) -> Result<C64> {
        if self.params.kappa_m <= 0.0 {
            return Err(domain("adiabatic elimination needs kappa_m > 0"));
        }
        let i = C64::new(0.0, 1.0);
        Ok(-(i * self.omega_b.conj() + self.mixing() * alpha_a) / self.params.kappa_m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identical_cavities_give_omega_a() {
        let p = SystemParams::new(
            0.7,
            0.7,
            5.0,
            c(0.3, 0.2),
            c(-0.1, 0.5),
            c(0.8, 0.1),
            c(0.8, 0.1),
        )
        .unwrap();
        let f = make_frame(&p).unwrap();
        let (oe, ke) = f.effective().unwrap();
        assert_eq!(oe, f.omega_a);
        assert!((ke - 0.7).abs() < 1e-15);
    }

    #[test]
    fn symmetric_drive_magnitudes() {
        for &phi in &[0.3, PI / 2.0, 2.0, 0.9 * PI] {
            let p = SystemParams::symmetric(1.3, 1.0, 8.0, phi).unwrap();
            let f = make_frame(&p).unwrap();
            assert!((f.omega_a.norm() - 1.3 * (1.0 - phi.cos()).sqrt()).abs() < 1e-13);
            assert!((f.omega_b.norm() - 1.3 * (1.0 + phi.cos()).sqrt()).abs() < 1e-13);
            assert!((f.phi - phi).abs() < 1e-13);
        }
    }

    #[test]
    fn alignment_zeroes_omega_b() {
        let (x1, x2) = (c(0.4, -0.9), c(1.1, 0.3));
        let lambda = c(0.7, 0.2);
        let p = SystemParams::new(
            1.0,
            1.0,
            10.0,
            -lambda * x2.conj(),
            lambda * x1.conj(),
            x1,
            x2,
        )
        .unwrap();
        let f = make_frame(&p).unwrap();
        assert!(f.omega_b.norm() < 1e-15);
        assert!(f.omega_a.norm() > 0.1);
    }

    #[test]
    fn zero_xi_rejected_and_zero_kappa_m_has_no_effective_model() {
        assert!(SystemParams::new(
            1.0,
            1.0,
            1.0,
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0)
        )
        .is_err());
        let p = SystemParams::symmetric(1.0, 1.0, 0.0, 1.0).unwrap();
        let f = make_frame(&p).unwrap();
        assert!(matches!(f.effective(), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn transforms_are_inverse() {
        let p = SystemParams::new(
            1.0,
            2.0,
            3.0,
            c(1.0, 0.0),
            c(0.0, 1.0),
            c(0.3, 0.4),
            c(-1.2, 0.5),
        )
        .unwrap();
        let f = make_frame(&p).unwrap();
        let u = f.local_to_common();
        let v = f.common_to_local();
        for i in 0..2 {
            for j in 0..2 {
                let s: C64 = (0..2).map(|k| u[i][k] * v[k][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s - c(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn large_kappa_m_limit() {
        let p = SystemParams::new(
            0.5,
            1.5,
            1e9,
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(0.6, 0.8),
        )
        .unwrap();
        let f = make_frame(&p).unwrap();
        assert!((f.kappa_eff.unwrap() - f.kappa_a).abs() < 1e-9);
    }
}
