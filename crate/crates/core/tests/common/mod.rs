#![allow(dead_code)]

use cavitylink::fock::{
    annihilation, expectation, total_number, FockSpace, Operator, QuantumState, Truncation, C64,
};
use cavitylink::model::{build_common_in, build_local_in, make_frame, SystemParams};
use cavitylink::solvers::{evolve_master, steady_state, EvolveOptions};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn complex(max_abs: f64) -> impl Strategy<Value = C64> {
    (0.0..max_abs, 0.0..std::f64::consts::TAU).prop_map(|(r, th)| C64::from_polar(r, th))
}

/// Random two-cavity parameters with moderate drives, so small cutoffs suffice.
pub fn params(max_drive: f64) -> impl Strategy<Value = SystemParams> {
    (
        0.2..2.0f64,
        0.2..2.0f64,
        0.0..6.0f64,
        complex(max_drive),
        complex(max_drive),
        (0.3..1.5f64, 0.0..std::f64::consts::TAU),
        (0.3..1.5f64, 0.0..std::f64::consts::TAU),
    )
        .prop_map(|(k1, k2, km, o1, o2, (r1, t1), (r2, t2))| {
            SystemParams::new(
                k1,
                k2,
                km,
                o1,
                o2,
                C64::from_polar(r1, t1),
                C64::from_polar(r2, t2),
            )
            .expect("strategy draws valid parameters")
        })
}

fn ensure(cond: bool, msg: String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg))
    }
}

/// Largest deviation of `op` from `target·1` on states with total photon number below `n`.
fn deviation_below(op: &Operator, target: f64, space: &FockSpace, n: usize) -> f64 {
    let inner: Vec<usize> = (0..space.dim())
        .filter(|&i| space.total_photons(i) < n)
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

/// `[c_a, c_a†] = [c_b, c_b†] = 1` and `[c_a, c_b†] = [c_a, c_b] = 0` away from the cutoff.
pub fn check_commutators(p: &SystemParams) -> Result<(), TestCaseError> {
    const N: usize = 4;
    let f = make_frame(p).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let space = FockSpace::new(2, N).unwrap();
    let c1 = annihilation(&space, 0).unwrap();
    let c2 = annihilation(&space, 1).unwrap();
    let u = f.local_to_common();
    let ca = Operator::linear_combination(&space, &[(u[0][0], &c1), (u[0][1], &c2)]).unwrap();
    let cb = Operator::linear_combination(&space, &[(u[1][0], &c1), (u[1][1], &c2)]).unwrap();
    let cases = [
        ("[c_a, c_a†]", ca.commutator(&ca.adjoint()).unwrap(), 1.0),
        ("[c_b, c_b†]", cb.commutator(&cb.adjoint()).unwrap(), 1.0),
        ("[c_a, c_b†]", ca.commutator(&cb.adjoint()).unwrap(), 0.0),
        ("[c_a, c_b]", ca.commutator(&cb).unwrap(), 0.0),
    ];
    for (name, op, target) in cases {
        let dev = deviation_below(&op, target, &space, N);
        ensure(dev < 1e-12, format!("{name} off by {dev:e}"))?;
    }
    Ok(())
}

/// The local-to-common transform is unitary and preserves the total drive strength.
pub fn check_drive_unitarity(p: &SystemParams) -> Result<(), TestCaseError> {
    let f = make_frame(p).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let u = f.local_to_common();
    for i in 0..2 {
        for j in 0..2 {
            let s: C64 = (0..2).map(|k| u[i][k] * u[j][k].conj()).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            ensure(
                (s - C64::new(expect, 0.0)).norm() < 1e-12,
                format!("U U† [{i}][{j}] = {s}"),
            )?;
        }
    }
    let local = p.omega1.norm_sqr() + p.omega2.norm_sqr();
    let common = f.omega_a.norm_sqr() + f.omega_b.norm_sqr();
    ensure(
        (local - common).abs() <= 1e-12 * local.max(1.0),
        format!("|Ω_a|²+|Ω_b|² = {common}, |Ω₁|²+|Ω₂|² = {local}"),
    )
}

pub fn check_decay_sum(p: &SystemParams) -> Result<(), TestCaseError> {
    let f = make_frame(p).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let lhs = f.kappa_a + f.kappa_b;
    let rhs = p.kappa1 + p.kappa2;
    ensure(
        (lhs - rhs).abs() <= 1e-12 * rhs,
        format!("κ_a + κ_b = {lhs}, κ₁ + κ₂ = {rhs}"),
    )
}

/// Trace stays 1 within 1e-8 and the smallest eigenvalue stays above −1e-8 while the
/// master equation runs from the Fock state `occ`.
pub fn check_trace_and_positivity(p: &SystemParams, occ: [usize; 2]) -> Result<(), TestCaseError> {
    let space = FockSpace::new(2, 3).unwrap();
    let model = build_local_in(p, &space).unwrap();
    let rho0 = QuantumState::fock(&space, occ).unwrap();
    let r = evolve_master(&model, &rho0, 1.5, 4, &EvolveOptions::default())
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    ensure(
        r.max_trace_error < 1e-8,
        format!("trace error {:e}", r.max_trace_error),
    )?;
    for (t, s) in r.times.iter().zip(&r.states) {
        let min = s.min_eigenvalue();
        ensure(min >= -1e-8, format!("eigenvalue {min:e} at t = {t}"))?;
    }
    Ok(())
}

/// Steady total photon number agrees between the local and common representations.
pub fn check_representation_equivalence(p: &SystemParams) -> Result<(), TestCaseError> {
    let space = FockSpace::with_truncation(2, 4, Truncation::TotalNumber).unwrap();
    let mut totals = Vec::new();
    for model in [
        build_local_in(p, &space).unwrap(),
        build_common_in(p, &space).unwrap(),
    ] {
        let rho = steady_state(&model).map_err(|e| TestCaseError::fail(e.to_string()))?;
        totals.push(expectation(&total_number(&space), &rho).unwrap().re);
    }
    ensure(
        (totals[0] - totals[1]).abs() < 1e-8,
        format!("local ⟨N⟩ = {}, common ⟨N⟩ = {}", totals[0], totals[1]),
    )
}
