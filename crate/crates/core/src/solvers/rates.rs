//! Closed equations for the first and second moments of the common modes.
//!
//! The model is linear (quadratic Hamiltonian, linear reset operators), so
//! the amplitudes `⟨c_a⟩, ⟨c_b⟩` and the moments `⟨c_j†c_k⟩` obey a closed linear
//! system. Two parametrizations are offered: [`RateState`], seven real
//! quantities normalized by `|Ω_a|` and `|Ω_b|`, and [`QuadratureState`], the raw
//! complex moments, which stays defined when either drive vanishes.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::error::{argument, domain, Result};
use crate::fock::{C64, I};
use crate::model::CommonModeFrame;
use crate::observables::{ratio_of, DecouplingRatio};
use crate::solvers::ode::{integrate, OdeOptions};

/// Populations plus the interference quantities that close the population equations:
///
/// * `k_a = (i/|Ω_a|)⟨Ω_a c_a − Ω_a* c_a†⟩`, `k_b` likewise;
/// * `m = ⟨ξ₁ξ₂ c_b†c_a + ξ₁*ξ₂* c_a†c_b⟩/ξ²`;
/// * `l_a = (i/(|Ω_b|ξ²))⟨ξ₁ξ₂Ω_b c_a − ξ₁*ξ₂*Ω_b* c_a†⟩`;
/// * `l_b = (i/(|Ω_a|ξ²))⟨ξ₁*ξ₂*Ω_a c_b − ξ₁ξ₂Ω_a* c_b†⟩`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RateState {
    pub n_a: f64,
    pub n_b: f64,
    pub k_a: f64,
    pub k_b: f64,
    pub m: f64,
    pub l_a: f64,
    pub l_b: f64,
}

impl RateState {
    pub fn to_array(&self) -> [f64; 7] {
        [
            self.n_a, self.n_b, self.k_a, self.k_b, self.m, self.l_a, self.l_b,
        ]
    }

    pub fn from_array(a: [f64; 7]) -> Self {
        Self {
            n_a: a[0],
            n_b: a[1],
            k_a: a[2],
            k_b: a[3],
            m: a[4],
            l_a: a[5],
            l_b: a[6],
        }
    }

    pub fn max_abs_diff(&self, other: &RateState) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `⟨c_a⟩`, `⟨c_b⟩`, `⟨c_a†c_a⟩`, `⟨c_b†c_b⟩` and `⟨c_b†c_a⟩`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QuadratureState {
    pub alpha_a: C64,
    pub alpha_b: C64,
    pub n_a: f64,
    pub n_b: f64,
    pub cross: C64,
}

impl QuadratureState {
    fn to_vector(self) -> DVector<C64> {
        DVector::from_vec(vec![
            self.alpha_a,
            self.alpha_b,
            C64::new(self.n_a, 0.0),
            C64::new(self.n_b, 0.0),
            self.cross,
        ])
    }

    fn from_vector(v: &DVector<C64>) -> Self {
        Self {
            alpha_a: v[0],
            alpha_b: v[1],
            n_a: v[2].re,
            n_b: v[3].re,
            cross: v[4],
        }
    }

    /// Coherent state with the given amplitudes.
    pub fn coherent(alpha_a: C64, alpha_b: C64) -> Self {
        Self {
            alpha_a,
            alpha_b,
            n_a: alpha_a.norm_sqr(),
            n_b: alpha_b.norm_sqr(),
            cross: alpha_b.conj() * alpha_a,
        }
    }

    /// The normalized seven-variable view; `None` when `Ω_a` or `Ω_b` vanishes.
    pub fn to_rate_state(&self, frame: &CommonModeFrame) -> Option<RateState> {
        let (oa, ob) = (frame.omega_a, frame.omega_b);
        if oa.norm() == 0.0 || ob.norm() == 0.0 {
            return None;
        }
        let xi2 = frame.xi * frame.xi;
        let x12 = frame.params.xi1 * frame.params.xi2;
        Some(RateState {
            n_a: self.n_a,
            n_b: self.n_b,
            k_a: -2.0 * (oa * self.alpha_a).im / oa.norm(),
            k_b: -2.0 * (ob * self.alpha_b).im / ob.norm(),
            m: 2.0 * (x12 * self.cross).re / xi2,
            l_a: -2.0 * (x12 * ob * self.alpha_a).im / (ob.norm() * xi2),
            l_b: -2.0 * (x12.conj() * oa * self.alpha_b).im / (oa.norm() * xi2),
        })
    }
}

/// Drive vector `(Ω_a, Ω_b)` and damping matrix `Γ` with
/// `Σ_x R_x†R_x = Σ_jk Γ_jk c_j†c_k` in the common-mode basis.
fn linear_part(frame: &CommonModeFrame) -> (Vector2<C64>, Matrix2<C64>) {
    let xi2 = frame.xi * frame.xi;
    let x12 = frame.params.xi1 * frame.params.xi2;
    let g_ba = x12 * frame.delta_kappa / xi2;
    let gamma = Matrix2::new(
        C64::new(frame.kappa_a, 0.0),
        g_ba.conj(),
        g_ba,
        C64::new(frame.kappa_b + frame.params.kappa_m, 0.0),
    );
    (Vector2::new(frame.omega_a, frame.omega_b), gamma)
}

/// Time derivative of the raw moments.
pub fn quadrature_rhs(q: &QuadratureState, frame: &CommonModeFrame) -> QuadratureState {
    let (omega, g) = linear_part(frame);
    let alpha = Vector2::new(q.alpha_a, q.alpha_b);
    let half = C64::new(0.5, 0.0);
    let d_alpha = omega.map(|o| -I * half * o.conj()) - (g * alpha) * half;
    // m[(j, k)] = ⟨c_j† c_k⟩
    let m = Matrix2::new(
        C64::new(q.n_a, 0.0),
        q.cross.conj(),
        q.cross,
        C64::new(q.n_b, 0.0),
    );
    let drive = Matrix2::from_fn(|j, k| {
        I * half * (omega[j] * alpha[k] - omega[k].conj() * alpha[j].conj())
    });
    let dm = drive - (m * g.transpose() + g.conjugate() * m) * half;
    QuadratureState {
        alpha_a: d_alpha[0],
        alpha_b: d_alpha[1],
        n_a: dm[(0, 0)].re,
        n_b: dm[(1, 1)].re,
        cross: dm[(1, 0)],
    }
}

/// Right-hand side of the seven coupled equations for [`RateState`].
///
/// Needs `|Ω_a| > 0` and `|Ω_b| > 0`; otherwise use [`quadrature_rhs`].
pub fn rate_rhs(s: &RateState, frame: &CommonModeFrame) -> Result<RateState> {
    let (oa, ob) = (frame.omega_a.norm(), frame.omega_b.norm());
    if oa == 0.0 || ob == 0.0 {
        return Err(domain(format!(
            "|omega_a| = {oa}, |omega_b| = {ob}: the normalized rate variables are undefined; use the quadrature form"
        )));
    }
    let p = &frame.params;
    let dk = frame.delta_kappa;
    let (ka, kb, km) = (frame.kappa_a, frame.kappa_b, p.kappa_m);
    let xi2 = frame.xi * frame.xi;
    let x12 = p.xi1 * p.xi2;
    let mix = x12.norm_sqr() / (xi2 * xi2);
    let source = (x12 * frame.omega_b * frame.omega_a.conj()).re / xi2;
    Ok(RateState {
        n_a: 0.5 * oa * s.k_a - 0.5 * dk * s.m - ka * s.n_a,
        n_b: 0.5 * ob * s.k_b - 0.5 * dk * s.m - (kb + km) * s.n_b,
        k_a: oa - 0.5 * dk * s.l_b - 0.5 * ka * s.k_a,
        k_b: ob - 0.5 * dk * s.l_a - 0.5 * (kb + km) * s.k_b,
        m: 0.5 * ob * s.l_a + 0.5 * oa * s.l_b
            - mix * dk * (s.n_a + s.n_b)
            - 0.5 * (p.kappa1 + p.kappa2 + km) * s.m,
        l_a: source / ob - 0.5 * mix * dk * s.k_b - 0.5 * ka * s.l_a,
        l_b: source / oa - 0.5 * mix * dk * s.k_a - 0.5 * (kb + km) * s.l_b,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateRoute {
    /// Solved the seven normalized equations.
    Normalized,
    /// Solved the raw-moment equations (a drive vanishes).
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateSteady {
    pub n_a: f64,
    pub n_b: f64,
    /// Present whenever both drives are nonzero.
    pub rates: Option<RateState>,
    pub quadrature: QuadratureState,
    pub route: RateRoute,
}

fn check_damped(frame: &CommonModeFrame) -> Result<()> {
    if frame.kappa_a <= 0.0 {
        return Err(domain(
            "kappa_a = 0: the c_a mode never decays, no steady state",
        ));
    }
    if frame.kappa_b + frame.params.kappa_m <= 0.0 {
        return Err(domain(
            "kappa_b + kappa_m = 0: the c_b mode never decays, no steady state",
        ));
    }
    Ok(())
}

/// Steady state of the quadrature equations: the coherent state `α = −iΓ⁻¹Ω*`.
pub fn quadrature_steady_state(frame: &CommonModeFrame) -> Result<QuadratureState> {
    check_damped(frame)?;
    let (omega, g) = linear_part(frame);
    let rhs = omega.map(|o| -I * o.conj());
    let alpha = g
        .lu()
        .solve(&rhs)
        .ok_or_else(|| domain("common-mode damping matrix is singular"))?;
    Ok(QuadratureState::coherent(alpha[0], alpha[1]))
}

/// Stationary point of the rate equations, found by solving the linear system.
pub fn rate_steady_state(frame: &CommonModeFrame) -> Result<RateSteady> {
    check_damped(frame)?;
    let quadrature = quadrature_steady_state(frame)?;
    let zero = RateState::default();
    let Ok(b) = rate_rhs(&zero, frame) else {
        return Ok(RateSteady {
            n_a: quadrature.n_a,
            n_b: quadrature.n_b,
            rates: None,
            quadrature,
            route: RateRoute::Quadrature,
        });
    };
    let b = b.to_array();
    let mut a = DMatrix::<f64>::zeros(7, 7);
    for col in 0..7 {
        let mut e = [0.0; 7];
        e[col] = 1.0;
        let f = rate_rhs(&RateState::from_array(e), frame)?.to_array();
        for row in 0..7 {
            a[(row, col)] = f[row] - b[row];
        }
    }
    let rhs = DVector::from_iterator(7, b.iter().map(|x| -x));
    let x = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| domain("rate-equation matrix is singular"))?;
    let rates = RateState::from_array([x[0], x[1], x[2], x[3], x[4], x[5], x[6]]);
    Ok(RateSteady {
        n_a: rates.n_a,
        n_b: rates.n_b,
        rates: Some(rates),
        quadrature,
        route: RateRoute::Normalized,
    })
}

/// Integrates the quadrature equations and returns the moments at `times`.
pub fn evolve_rates(
    frame: &CommonModeFrame,
    initial: QuadratureState,
    times: &[f64],
) -> Result<Vec<QuadratureState>> {
    let mut out = Vec::with_capacity(times.len());
    let rate = frame.kappa_a
        + frame.kappa_b
        + frame.params.kappa_m
        + frame.omega_a.norm()
        + frame.omega_b.norm();
    integrate(
        |_, y, dy| {
            dy.copy_from(&quadrature_rhs(&QuadratureState::from_vector(y), frame).to_vector())
        },
        |_| {},
        |_, _, y| {
            out.push(QuadratureState::from_vector(y));
            Ok(())
        },
        initial.to_vector(),
        times,
        &OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_max: if rate > 0.0 {
                0.05 / rate
            } else {
                f64::INFINITY
            },
            h_init: None,
        },
    )?;
    Ok(out)
}

/// Steady populations for equal drives `Ω`, equal losses `κ` and `ξ₂ = e^{iΦ}ξ₁`:
///
/// `n_a = (1 − cos Φ)Ω²/κ²`, `n_b = (1 + cos Φ)Ω²/(κ + κ_m)²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricSteady {
    pub n_a: f64,
    pub n_b: f64,
    pub ratio: DecouplingRatio,
}

pub fn symmetric_steady(omega: f64, kappa: f64, kappa_m: f64, phi: f64) -> Result<SymmetricSteady> {
    if !(kappa > 0.0) {
        return Err(argument(format!("kappa must be positive, got {kappa}")));
    }
    if !(kappa_m >= 0.0) {
        return Err(argument(format!(
            "kappa_m must be non-negative, got {kappa_m}"
        )));
    }
    let c = phi.cos();
    let w2 = omega * omega;
    let n_a = (1.0 - c) * w2 / (kappa * kappa);
    let n_b = (1.0 + c) * w2 / ((kappa + kappa_m) * (kappa + kappa_m));
    // written in closed form so that Φ = π gives exactly zero
    let ratio = if c == 1.0 || w2 == 0.0 {
        ratio_of(n_a, n_b)
    } else {
        DecouplingRatio::finite(
            (1.0 + c) / (1.0 - c) * kappa * kappa / ((kappa + kappa_m) * (kappa + kappa_m)),
        )
    };
    Ok(SymmetricSteady { n_a, n_b, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_frame, SystemParams};
    use crate::observables::RatioFlag;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn generic_frame() -> CommonModeFrame {
        let p = SystemParams::new(
            0.8,
            1.3,
            6.0,
            c(0.5, -0.2),
            c(0.1, 0.7),
            c(0.9, 0.3),
            c(-0.4, 1.1),
        )
        .unwrap();
        make_frame(&p).unwrap()
    }

    #[test]
    fn normalized_equations_close_on_the_moments() {
        let f = generic_frame();
        let q = QuadratureState {
            alpha_a: c(0.3, -0.7),
            alpha_b: c(-0.2, 0.4),
            n_a: 0.9,
            n_b: 0.35,
            cross: c(0.1, 0.25),
        };
        let lhs = rate_rhs(&q.to_rate_state(&f).unwrap(), &f).unwrap();
        let rhs = quadrature_rhs(&q, &f).to_rate_state(&f).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-13, "{lhs:?} vs {rhs:?}");
    }

    #[test]
    fn steady_states_of_both_forms_agree() {
        let f = generic_frame();
        let s = rate_steady_state(&f).unwrap();
        assert_eq!(s.route, RateRoute::Normalized);
        let from_q = s.quadrature.to_rate_state(&f).unwrap();
        assert!(s.rates.unwrap().max_abs_diff(&from_q) < 1e-12);
        assert!(rate_rhs(&s.rates.unwrap(), &f)
            .unwrap()
            .to_array()
            .iter()
            .all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn symmetric_case_matches_closed_form() {
        for &phi in &[PI / 2.0, 0.75 * PI, 0.9 * PI, 2.0] {
            for &km in &[0.0, 3.0, 8.0, 20.0] {
                let p = SystemParams::symmetric(1.0, 1.0, km, phi).unwrap();
                let f = make_frame(&p).unwrap();
                let s = rate_steady_state(&f).unwrap();
                let cf = symmetric_steady(1.0, 1.0, km, phi).unwrap();
                assert!((s.n_a - cf.n_a).abs() < 1e-12);
                assert!((s.n_b - cf.n_b).abs() < 1e-12);
                let d = rate_rhs(&s.rates.unwrap(), &f).unwrap();
                assert!(d.n_a.abs() < 1e-12 && d.n_b.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn equal_losses_decouple_the_pairs() {
        let p = SystemParams::symmetric(1.0, 1.0, 5.0, 1.0).unwrap();
        let f = make_frame(&p).unwrap();
        let base = rate_rhs(&RateState::default(), &f).unwrap();
        let bumped = rate_rhs(
            &RateState {
                n_b: 1.0,
                k_b: 1.0,
                ..Default::default()
            },
            &f,
        )
        .unwrap();
        assert_eq!(base.n_a, bumped.n_a);
        assert_eq!(base.k_a, bumped.k_a);
    }

    #[test]
    fn vanishing_drive_falls_back_to_quadratures() {
        // Φ = π with an exactly real ξ₂, so Ω_b is exactly zero
        let p = SystemParams::new(
            1.0,
            1.0,
            5.0,
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(-1.0, 0.0),
        )
        .unwrap();
        let f = make_frame(&p).unwrap();
        assert!(matches!(
            rate_rhs(&RateState::default(), &f),
            Err(crate::Error::Domain(_))
        ));
        let s = rate_steady_state(&f).unwrap();
        assert_eq!(s.route, RateRoute::Quadrature);
        assert_eq!(s.n_b, 0.0);
        assert!((s.n_a - 2.0).abs() < 1e-12);
    }

    #[test]
    fn undriven_rates_vanish() {
        let p = SystemParams::symmetric(0.0, 1.0, 5.0, 1.0).unwrap();
        let f = make_frame(&p).unwrap();
        let s = rate_steady_state(&f).unwrap();
        assert_eq!((s.n_a, s.n_b), (0.0, 0.0));
    }

    #[test]
    fn closed_form_spot_values() {
        let s = symmetric_steady(1.0, 1.0, 8.0, PI / 2.0).unwrap();
        assert!((s.ratio.value - 1.0 / 81.0).abs() < 1e-15);
        let s = symmetric_steady(1.0, 1.0, 9.0, PI / 2.0).unwrap();
        assert!((s.ratio.value - 0.01).abs() < 1e-15);
        let s = symmetric_steady(1.0, 1.0, 8.0, 0.9 * PI).unwrap();
        assert!((s.ratio.value - 3.097e-4).abs() < 1e-6);
        let s = symmetric_steady(1.0, 1.0, 8.0, PI).unwrap();
        assert_eq!(s.n_b, 0.0);
        assert_eq!(s.ratio.value, 0.0);
        let s = symmetric_steady(1.0, 1.0, 8.0, 0.0).unwrap();
        assert_eq!(s.n_a, 0.0);
        assert_eq!(s.ratio.value, f64::INFINITY);
        assert_eq!(s.ratio.flag, Some(RatioFlag::SoleDrivingB));
    }

    #[test]
    fn relaxation_reaches_the_steady_state() {
        let f = generic_frame();
        let traj = evolve_rates(&f, QuadratureState::default(), &[0.0, 60.0]).unwrap();
        let s = quadrature_steady_state(&f).unwrap();
        let end = traj[1];
        assert!((end.n_a - s.n_a).abs() < 1e-9);
        assert!((end.cross - s.cross).norm() < 1e-9);
    }
}
