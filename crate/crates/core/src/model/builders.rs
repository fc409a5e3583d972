use crate::error::{argument, domain, Result};
use crate::fock::{annihilation, recommend_cutoff, FockSpace, Operator, Truncation, C64, I, ONE};
use crate::model::{make_frame, Channel, Jump, OpenSystemModel, Representation, SystemParams};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `(Ω/2) c + (Ω*/2) c†` for one mode.
fn drive_term(c: &Operator, omega: C64) -> Result<Operator> {
    Operator::linear_combination(
        c.space(),
        &[(omega * 0.5, c), (omega.conj() * 0.5, &c.adjoint())],
    )
}

/// Laser-driven cavity with mirror leakage `κ`:
/// `H_cond = (Ω/2)c + (Ω*/2)c† − (i/2)κ c†c`, reset `√κ c`.
pub fn build_single_cavity(omega: C64, kappa: f64, cutoff: usize) -> Result<OpenSystemModel> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(argument(format!(
            "kappa must be a finite non-negative rate, got {kappa}"
        )));
    }
    let space = FockSpace::single(cutoff)?;
    let c = annihilation(&space, 0)?;
    let n = c.adjoint().compose(&c)?;
    let h_cond = drive_term(&c, omega)?.add(&n.scale(-I * 0.5 * kappa))?;
    Ok(OpenSystemModel {
        representation: Representation::Single,
        space,
        h_cond,
        jumps: vec![Jump {
            channel: Channel::Cavity,
            op: c.scale(re(kappa.sqrt())),
        }],
        params: None,
    })
}

fn two_mode_space(space: &FockSpace) -> Result<()> {
    if space.n_modes() != 2 {
        return Err(argument("two-cavity models need a two-mode Fock space"));
    }
    Ok(())
}

pub fn build_local(params: &SystemParams, cutoff: usize) -> Result<OpenSystemModel> {
    build_local_in(params, &FockSpace::new(2, cutoff)?)
}

/// Two cavities in their own modes `c₁, c₂`. The fiber drains
/// `(ξ₁c₁ + ξ₂c₂)/ξ` at rate `κ_m`.
pub fn build_local_in(params: &SystemParams, space: &FockSpace) -> Result<OpenSystemModel> {
    params.validate()?;
    two_mode_space(space)?;
    let xi = (params.xi1.norm_sqr() + params.xi2.norm_sqr()).sqrt();
    let c1 = annihilation(space, 0)?;
    let c2 = annihilation(space, 1)?;
    let n1 = c1.adjoint().compose(&c1)?;
    let n2 = c2.adjoint().compose(&c2)?;
    let fiber_mode =
        Operator::linear_combination(space, &[(params.xi1 / xi, &c1), (params.xi2 / xi, &c2)])?;
    // (ξ₁*c₁† + ξ₂*c₂†)(ξ₁c₁ + ξ₂c₂)/ξ²
    let fiber_number = fiber_mode.adjoint().compose(&fiber_mode)?;

    let h_cond = Operator::linear_combination(
        space,
        &[
            (ONE, &drive_term(&c1, params.omega1)?),
            (ONE, &drive_term(&c2, params.omega2)?),
            (-I * 0.5 * params.kappa1, &n1),
            (-I * 0.5 * params.kappa2, &n2),
            (-I * 0.5 * params.kappa_m, &fiber_number),
        ],
    )?;
    let jumps = vec![
        Jump {
            channel: Channel::Cavity1,
            op: c1.scale(re(params.kappa1.sqrt())),
        },
        Jump {
            channel: Channel::Cavity2,
            op: c2.scale(re(params.kappa2.sqrt())),
        },
        Jump {
            channel: Channel::Fiber,
            op: fiber_mode.scale(re(params.kappa_m.sqrt())),
        },
    ];
    Ok(OpenSystemModel {
        representation: Representation::Local,
        space: space.clone(),
        h_cond,
        jumps,
        params: Some(*params),
    })
}

pub fn build_common(params: &SystemParams, cutoff: usize) -> Result<OpenSystemModel> {
    build_common_in(params, &FockSpace::new(2, cutoff)?)
}

/// Two cavities in the common modes; mode 0 is `c_a`, mode 1 is `c_b`.
pub fn build_common_in(params: &SystemParams, space: &FockSpace) -> Result<OpenSystemModel> {
    two_mode_space(space)?;
    let f = make_frame(params)?;
    let (x1, x2) = (params.xi1, params.xi2);
    let xi2sq = f.xi * f.xi;
    let ca = annihilation(space, 0)?;
    let cb = annihilation(space, 1)?;
    let na = ca.adjoint().compose(&ca)?;
    let nb = cb.adjoint().compose(&cb)?;
    let b_dag_a = cb.adjoint().compose(&ca)?;
    let a_dag_b = ca.adjoint().compose(&cb)?;
    let half_i = -I * 0.5;

    let h_cond = Operator::linear_combination(
        space,
        &[
            (ONE, &drive_term(&ca, f.omega_a)?),
            (ONE, &drive_term(&cb, f.omega_b)?),
            (half_i * params.kappa_m, &nb),
            (half_i * f.kappa_a, &na),
            (half_i * f.kappa_b, &nb),
            (half_i * f.delta_kappa * x1 * x2 / xi2sq, &b_dag_a),
            (
                half_i * f.delta_kappa * x1.conj() * x2.conj() / xi2sq,
                &a_dag_b,
            ),
        ],
    )?;

    let s1 = params.kappa1.sqrt() / f.xi;
    let s2 = params.kappa2.sqrt() / f.xi;
    let jumps = vec![
        Jump {
            channel: Channel::Cavity1,
            op: Operator::linear_combination(space, &[(x2 * s1, &ca), (x1.conj() * s1, &cb)])?,
        },
        Jump {
            channel: Channel::Cavity2,
            op: Operator::linear_combination(space, &[(-x1 * s2, &ca), (x2.conj() * s2, &cb)])?,
        },
        Jump {
            channel: Channel::Fiber,
            op: cb.scale(re(params.kappa_m.sqrt())),
        },
    ];
    Ok(OpenSystemModel {
        representation: Representation::Common,
        space: space.clone(),
        h_cond,
        jumps,
        params: Some(*params),
    })
}

/// Single-mode model on `c_a` after adiabatically eliminating `c_b` to first order
/// in `1/κ_m`.
///
/// The three reset operators are all proportional to `c_a`. Their first-order
/// prefactors are rescaled by a common factor `1 + O(1/κ_m²)` so the total rate
/// equals `κ_eff` and the master equation stays trace preserving.
pub fn build_effective(params: &SystemParams, cutoff: usize) -> Result<OpenSystemModel> {
    let f = make_frame(params)?;
    let (omega_eff, kappa_eff) = f.effective()?;
    if kappa_eff < 0.0 {
        return Err(domain(format!(
            "effective decay rate {kappa_eff} is negative; kappa_m = {} is too small for elimination",
            params.kappa_m
        )));
    }
    let space = FockSpace::single(cutoff)?;
    let ca = annihilation(&space, 0)?;
    let na = ca.adjoint().compose(&ca)?;
    let h_cond = drive_term(&ca, omega_eff)?.add(&na.scale(-I * 0.5 * kappa_eff))?;

    let (x1, x2) = (params.xi1, params.xi2);
    let xi2sq = f.xi * f.xi;
    let eps = f.delta_kappa / (xi2sq * params.kappa_m);
    let prefactors = [
        (
            Channel::Cavity1,
            x2 / f.xi * params.kappa1.sqrt() * (1.0 - x1.norm_sqr() * eps),
        ),
        (
            Channel::Cavity2,
            -x1 / f.xi * params.kappa2.sqrt() * (1.0 + x2.norm_sqr() * eps),
        ),
        (Channel::Fiber, -x1 * x2 * params.kappa_m.sqrt() * eps),
    ];
    let total: f64 = prefactors.iter().map(|(_, p)| p.norm_sqr()).sum();
    let norm = if total > 0.0 {
        (kappa_eff / total).sqrt()
    } else {
        0.0
    };
    let jumps = prefactors
        .iter()
        .map(|&(channel, p)| Jump {
            channel,
            op: ca.scale(p * norm),
        })
        .collect();
    Ok(OpenSystemModel {
        representation: Representation::Effective,
        space,
        h_cond,
        jumps,
        params: Some(*params),
    })
}

/// Fock space large enough for the model's steady state: the smallest cutoff
/// whose Poisson tail at the mean-field photon number is below `tail`. Box
/// truncation gets one cutoff per mode; total-number truncation uses the total
/// photon number.
///
/// `model` may be built at any cutoff; only one-photon matrix elements are read.
pub fn recommended_space(
    model: &OpenSystemModel,
    truncation: Truncation,
    tail: f64,
) -> Result<FockSpace> {
    let mf = model.mean_field();
    let means: Vec<f64> = if mf.drive.iter().all(|o| o.norm() == 0.0) {
        vec![0.0; mf.drive.len()]
    } else {
        let alpha = mf.steady_amplitudes().ok_or_else(|| {
            domain("driven model without damping has no steady state; pick a cutoff explicitly")
        })?;
        alpha.iter().map(|a| a.norm_sqr()).collect()
    };
    if means.iter().any(|m| !m.is_finite()) {
        return Err(domain("mean-field photon number is not finite"));
    }
    match (model.space.n_modes(), truncation) {
        (1, _) => FockSpace::single(recommend_cutoff(means[0], tail)),
        (_, Truncation::PerMode) => FockSpace::with_cutoffs([
            recommend_cutoff(means[0], tail),
            recommend_cutoff(means[1], tail),
        ]),
        (n, Truncation::TotalNumber) => {
            FockSpace::with_truncation(n, recommend_cutoff(means.iter().sum(), tail), truncation)
        }
    }
}
