use crate::error::Result;
use crate::fock::{
    annihilation, expectation, total_number, FockSpace, Operator, QuantumState, Truncation, C64,
};
use crate::model::{
    build_common_in, build_local_in, build_single_cavity, make_frame, recommended_space,
    validate_regime, OpenSystemModel, RegimeOptions,
};
use crate::observables::emission_report;
use crate::runner::config::{Basis, RunConfig};
use crate::runner::full_model;
use crate::solvers::{evolve_master, rate_steady_state, steady_state, EvolveOptions};

/// Cutoff of the small spaces used for the algebraic checks.
const CHECK_CUTOFF: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }

    fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value >= tolerance,
        }
    }
}

/// Largest deviation of `op` from `target·1` on basis states with fewer than
/// `cutoff` photons in total, where truncation does not interfere.
fn deviation_below_edge(op: &Operator, target: f64, space: &FockSpace, cutoff: usize) -> f64 {
    let inner: Vec<usize> = (0..space.dim())
        .filter(|&i| space.total_photons(i) < cutoff)
        .collect();
    let mut worst = 0.0f64;
    for &i in &inner {
        for &j in &inner {
            let expect = if i == j { target } else { 0.0 };
            worst = worst.max((op.get(i, j) - C64::new(expect, 0.0)).norm());
        }
    }
    worst
}

/// Invariant and cross-solver checks for the configured system.
pub fn validation_checks(config: &RunConfig) -> Result<Vec<Check>> {
    let p = &config.system.params;
    let n = &config.numerics;
    let frame = make_frame(p)?;
    let mut checks = Vec::new();

    let space = FockSpace::new(2, CHECK_CUTOFF)?;
    let c1 = annihilation(&space, 0)?;
    let c2 = annihilation(&space, 1)?;
    let u = frame.local_to_common();
    let ca = Operator::linear_combination(&space, &[(u[0][0], &c1), (u[0][1], &c2)])?;
    let cb = Operator::linear_combination(&space, &[(u[1][0], &c1), (u[1][1], &c2)])?;
    let comm = |x: &Operator, y: &Operator| x.commutator(&y.adjoint());
    checks.push(Check::at_most(
        "commutator_ca_ca_dag",
        deviation_below_edge(&comm(&ca, &ca)?, 1.0, &space, CHECK_CUTOFF),
        1e-12,
    ));
    checks.push(Check::at_most(
        "commutator_cb_cb_dag",
        deviation_below_edge(&comm(&cb, &cb)?, 1.0, &space, CHECK_CUTOFF),
        1e-12,
    ));
    checks.push(Check::at_most(
        "commutator_ca_cb_dag",
        deviation_below_edge(&comm(&ca, &cb)?, 0.0, &space, CHECK_CUTOFF),
        1e-12,
    ));

    let drive_local = p.omega1.norm_sqr() + p.omega2.norm_sqr();
    let drive_common = frame.omega_a.norm_sqr() + frame.omega_b.norm_sqr();
    checks.push(Check::at_most(
        "drive_norm_preserved",
        (drive_local - drive_common).abs() / drive_local.max(1e-300),
        1e-12,
    ));
    checks.push(Check::at_most(
        "kappa_a_plus_kappa_b",
        (frame.kappa_a + frame.kappa_b - p.kappa1 - p.kappa2).abs()
            / (p.kappa1 + p.kappa2).max(1e-300),
        1e-12,
    ));

    let local = build_local_in(p, &space)?;
    let common = build_common_in(p, &space)?;
    checks.push(Check::at_most(
        "lindblad_form_local",
        local.lindblad_defect(),
        1e-12,
    ));
    checks.push(Check::at_most(
        "lindblad_form_common",
        common.lindblad_defect(),
        1e-12,
    ));

    let evo = evolve_master(
        &local,
        &QuantumState::fock(&space, [1, 0])?,
        2.0,
        5,
        &EvolveOptions {
            rtol: n.rtol,
            atol: n.atol,
            dt_max: n.dt_max,
        },
    )?;
    checks.push(Check::at_most(
        "trace_preservation",
        evo.max_trace_error,
        1e-8,
    ));
    let min_eig = evo
        .states
        .iter()
        .map(|s| s.min_eigenvalue())
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::at_least("positivity", min_eig, -1e-8));

    // total photon number is basis independent when the truncation is
    let total = FockSpace::with_truncation(2, CHECK_CUTOFF, Truncation::TotalNumber)?;
    let n_of = |m: &OpenSystemModel| -> Result<f64> {
        let rho = steady_state(m)?;
        Ok(expectation(&total_number(&m.space), &rho)?.re)
    };
    let n_local = n_of(&build_local_in(p, &total)?)?;
    let n_common = n_of(&build_common_in(p, &total)?)?;
    checks.push(Check::at_most(
        "total_number_local_vs_common",
        (n_local - n_common).abs(),
        1e-8,
    ));

    if p.kappa1 > 0.0 {
        let probe = build_single_cavity(p.omega1, p.kappa1, 1)?;
        let cutoff = recommended_space(&probe, Truncation::PerMode, n.tail)?.cutoff();
        let m = build_single_cavity(p.omega1, p.kappa1, cutoff)?;
        let state = steady_state(&m)?;
        let got = emission_report(&state, &m, None)?.n_a.unwrap_or(0.0);
        let expect = p.omega1.norm_sqr() / (p.kappa1 * p.kappa1);
        let err = if expect > 0.0 {
            (got - expect).abs() / expect
        } else {
            got.abs()
        };
        checks.push(Check::at_most("single_cavity_closed_form", err, 1e-6));
    }

    let rates = rate_steady_state(&frame)?;
    let model = full_model(p, n, Basis::Common)?;
    let state = steady_state(&model)?;
    let report = emission_report(&state, &model, Some(&frame))?;
    let diff = (report.n_a.unwrap_or(0.0) - rates.n_a)
        .abs()
        .max((report.n_b.unwrap_or(0.0) - rates.n_b).abs());
    checks.push(Check::at_most("rates_vs_full_model", diff, 1e-5));

    if let Some(len) = config.system.fiber_length {
        let regime = validate_regime(p, len, &RegimeOptions::default())?;
        for c in regime.checks() {
            checks.push(Check::at_least(
                format!("regime_{}", c.name),
                c.separation,
                regime.margin,
            ));
        }
    }
    Ok(checks)
}
