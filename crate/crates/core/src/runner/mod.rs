//! Config-driven pipelines behind the `cavitylink` binary.
//!
//! Every scenario writes one or more CSV files into the output directory; each
//! file starts with `#` lines holding the tool version, the seed and the fully
//! resolved config.

mod config;
mod output;
mod validate;

use std::cmp::Ordering;
use std::path::PathBuf;

use rayon::prelude::*;

pub use config::{
    is_symmetric, parse_config, parse_config_str, parse_range, Basis, CalibrateConfig,
    CalibrationChoice, InitialState, Numerics, OutputConfig, OutputFormat, Overrides, RunConfig,
    Scenario, SweepConfig, SweepSolver, SweepSymbol, SystemSection, TruncationChoice,
    DEFAULT_PHI_GRID,
};
pub use output::{line_plot, Cell, Series, Table};
pub use validate::{validation_checks, Check};

use crate::error::{Error, Result};
use crate::fock::{annihilation, FockSpace, Operator, QuantumState, C64};
use crate::model::{
    build_common, build_common_in, build_effective, build_local, build_local_in,
    build_single_cavity, make_frame, recommended_space, CommonModeFrame, OpenSystemModel,
    Representation, SystemParams,
};
use crate::observables::{
    calibration_scan, emission_from_moments, emission_report, population_ratio, CalibrationMethod,
};
use crate::solvers::{
    evolve_master, evolve_rates, expected_max_jump_rate, mcwf_trajectories, rate_steady_state,
    steady_state, steady_state_with_info, symmetric_steady, EvolveOptions, McwfOptions,
    QuadratureState, RateRoute, MAX_JUMP_PROBABILITY,
};

/// Exit code of the binary for a failed run: 2 for configuration problems,
/// 3 for everything raised while solving.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Argument(_) => 2,
        Error::Domain(_) | Error::Solver(_) | Error::Data(_) | Error::Io(_) => 3,
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub tables: Vec<Table>,
    pub files: Vec<PathBuf>,
    /// False only when `validate` found a failing check.
    pub passed: bool,
}

/// Runs the configured scenario and writes its artifacts.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let (tables, passed) = match config.numerics.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Solver(format!("cannot start {w} worker threads: {e}")))?;
            pool.install(|| compute(config))?
        }
        None => compute(config)?,
    };
    let dir = &config.output.dir;
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for t in &tables {
        files.push(t.write(dir, config)?);
    }
    if config.output.format == OutputFormat::CsvSvg {
        for t in &tables {
            if let Some(path) = plot_table(t, config)? {
                files.push(path);
            }
        }
    }
    Ok(RunOutcome {
        tables,
        files,
        passed,
    })
}

/// Computes the scenario's tables without touching the file system.
pub fn compute(config: &RunConfig) -> Result<(Vec<Table>, bool)> {
    let p = &config.system.params;
    match config.scenario {
        Scenario::Single => {
            let model = single_model(p, &config.numerics)?;
            Ok((model_tables(config, &model, None)?, true))
        }
        Scenario::Local | Scenario::Common => {
            let basis = if config.scenario == Scenario::Local {
                Basis::Local
            } else {
                Basis::Common
            };
            let model = full_model(p, &config.numerics, basis)?;
            let frame = make_frame(p)?;
            Ok((model_tables(config, &model, Some(&frame))?, true))
        }
        Scenario::Effective => {
            let frame = make_frame(p)?;
            let probe = build_effective(p, 1)?;
            let cutoff = match config.numerics.cutoff {
                Some(c) => c,
                None => {
                    recommended_space(&probe, config.truncation(), config.numerics.tail)?.cutoff()
                }
            };
            let model = build_effective(p, cutoff)?;
            Ok((model_tables(config, &model, Some(&frame))?, true))
        }
        Scenario::Rates => Ok((rates_tables(config)?, true)),
        Scenario::Sweep => Ok((vec![sweep_table(config)?], true)),
        Scenario::Calibrate => Ok((calibrate_tables(config)?, true)),
        Scenario::Validate => {
            let checks = validation_checks(config)?;
            let passed = checks.iter().all(|c| c.passed);
            let mut t = Table::new(
                "validate_checks",
                &["check", "value", "tolerance", "passed"],
            );
            for c in checks {
                t.push(vec![
                    c.name.into(),
                    c.value.into(),
                    c.tolerance.into(),
                    (if c.passed { "true" } else { "false" }).into(),
                ]);
            }
            Ok((vec![t], passed))
        }
    }
}

fn single_model(p: &SystemParams, n: &Numerics) -> Result<OpenSystemModel> {
    let cutoff = match n.cutoff {
        Some(c) => c,
        None => {
            let probe = build_single_cavity(p.omega1, p.kappa1, 1)?;
            recommended_space(&probe, n.truncation.into(), n.tail)?.cutoff()
        }
    };
    build_single_cavity(p.omega1, p.kappa1, cutoff)
}

/// Two-cavity model in `basis`, on the configured or recommended Fock space.
pub fn full_model(p: &SystemParams, n: &Numerics, basis: Basis) -> Result<OpenSystemModel> {
    let space = match n.cutoff {
        Some(c) => FockSpace::with_truncation(2, c, n.truncation.into())?,
        None => {
            let probe = match basis {
                Basis::Local => build_local(p, 1)?,
                Basis::Common => build_common(p, 1)?,
            };
            recommended_space(&probe, n.truncation.into(), n.tail)?
        }
    };
    match basis {
        Basis::Local => build_local_in(p, &space),
        Basis::Common => build_common_in(p, &space),
    }
}

/// Named observables of a model: mode populations, then `⟨R_x†R_x⟩` per channel.
fn model_observables(
    model: &OpenSystemModel,
    frame: Option<&CommonModeFrame>,
) -> Result<Vec<(String, Operator)>> {
    let space = &model.space;
    let number_of = |row: [C64; 2]| -> Result<Operator> {
        let c0 = annihilation(space, 0)?;
        let c1 = annihilation(space, 1)?;
        let c = Operator::linear_combination(space, &[(row[0], &c0), (row[1], &c1)])?;
        c.adjoint().compose(&c)
    };
    let mut obs = Vec::new();
    match model.representation {
        Representation::Single | Representation::Effective => {
            let c = annihilation(space, 0)?;
            let name = if model.representation == Representation::Single {
                "n"
            } else {
                "n_a"
            };
            obs.push((name.to_string(), c.adjoint().compose(&c)?));
        }
        Representation::Local | Representation::Common => {
            let f = frame.expect("two-mode models come with a frame");
            let one = C64::new(1.0, 0.0);
            let zero = C64::new(0.0, 0.0);
            let (to_a, to_1) = if model.representation == Representation::Local {
                (f.local_to_common(), [[one, zero], [zero, one]])
            } else {
                ([[one, zero], [zero, one]], f.common_to_local())
            };
            obs.push(("n_a".to_string(), number_of(to_a[0])?));
            obs.push(("n_b".to_string(), number_of(to_a[1])?));
            obs.push(("n_1".to_string(), number_of(to_1[0])?));
            obs.push(("n_2".to_string(), number_of(to_1[1])?));
        }
    }
    for j in &model.jumps {
        obs.push((format!("I_{}", j.channel), j.op.adjoint().compose(&j.op)?));
    }
    Ok(obs)
}

fn initial_state(model: &OpenSystemModel, initial: InitialState) -> Result<QuantumState> {
    match initial {
        InitialState::Vacuum => Ok(QuantumState::vacuum(&model.space)),
        InitialState::Fock(occ) => QuantumState::fock(&model.space, occ)
            .map_err(|e| Error::Config(format!("numerics.initial = \"{initial}\": {e}"))),
    }
}

fn sample_times(n: &Numerics) -> Vec<f64> {
    (0..n.n_samples)
        .map(|i| n.t_final * i as f64 / (n.n_samples - 1) as f64)
        .collect()
}

fn kv(t: &mut Table, solver: &str, quantity: &str, value: impl Into<Cell>) {
    t.push(vec![solver.into(), quantity.into(), value.into()]);
}

fn ratio_value(n_a: f64, n_b: f64) -> Result<f64> {
    Ok(population_ratio(n_a, n_b)?.value)
}

/// Steady state, master-equation dynamics and (with `n_traj > 0`) trajectories
/// of a single-cavity, two-cavity or effective model.
fn model_tables(
    config: &RunConfig,
    model: &OpenSystemModel,
    frame: Option<&CommonModeFrame>,
) -> Result<Vec<Table>> {
    let n = &config.numerics;
    let stem = config.scenario.to_string();
    let mut steady = Table::new(format!("{stem}_steady"), &["solver", "quantity", "value"]);

    let sol = steady_state_with_info(model)?;
    let report = emission_report(&sol.state, model, frame)?;
    let route = match sol.method {
        crate::solvers::SteadyMethod::Direct | crate::solvers::SteadyMethod::Krylov => "full",
        crate::solvers::SteadyMethod::Integration => "full_integrated",
    };
    kv(&mut steady, route, "dim", model.space.dim());
    kv(&mut steady, route, "cutoff_1", model.space.cutoffs()[0]);
    if model.space.n_modes() == 2 {
        kv(&mut steady, route, "cutoff_2", model.space.cutoffs()[1]);
    }
    kv(&mut steady, route, "residual", sol.residual);
    kv(
        &mut steady,
        route,
        "boundary_population",
        sol.state.boundary_population(),
    );
    let obs = model_observables(model, frame)?;
    for (name, op) in &obs {
        kv(
            &mut steady,
            route,
            name,
            crate::fock::expectation(op, &sol.state)?.re,
        );
    }
    if let (Some(a), Some(b)) = (report.n_a, report.n_b) {
        if model.representation == Representation::Effective {
            kv(&mut steady, route, "n_b", b);
        }
        kv(&mut steady, route, "ratio", ratio_value(a, b)?);
    }

    match (model.representation, frame) {
        (Representation::Single, _) => {
            let (omega, kappa) = (config.system.params.omega1, config.system.params.kappa1);
            kv(
                &mut steady,
                "closed_form",
                "n",
                omega.norm_sqr() / (kappa * kappa),
            );
            kv(&mut steady, "closed_form", "I_c", omega.norm_sqr() / kappa);
        }
        (Representation::Effective, Some(f)) => {
            let (omega_eff, kappa_eff) = f.effective()?;
            kv(&mut steady, "closed_form", "kappa_eff", kappa_eff);
            kv(&mut steady, "closed_form", "omega_eff_re", omega_eff.re);
            kv(&mut steady, "closed_form", "omega_eff_im", omega_eff.im);
            kv(
                &mut steady,
                "closed_form",
                "n_a",
                omega_eff.norm_sqr() / (kappa_eff * kappa_eff),
            );
            kv(
                &mut steady,
                "closed_form",
                "I_eff",
                omega_eff.norm_sqr() / kappa_eff,
            );
            rate_rows(&mut steady, f)?;
        }
        (_, Some(f)) => rate_rows(&mut steady, f)?,
        (_, None) => {}
    }

    let times = sample_times(n);
    let rho0 = initial_state(model, n.initial)?;
    let evo = evolve_master(
        model,
        &rho0.to_mixed(),
        n.t_final,
        n.n_samples,
        &EvolveOptions {
            rtol: n.rtol,
            atol: n.atol,
            dt_max: n.dt_max,
        },
    )?;
    kv(
        &mut steady,
        "master",
        "max_trace_error",
        evo.max_trace_error,
    );
    kv(
        &mut steady,
        "master",
        "max_boundary_population",
        evo.max_boundary_population,
    );
    let mut cols = vec!["t".to_string()];
    cols.extend(obs.iter().map(|(name, _)| name.clone()));
    let mut dynamics = Table::with_columns(format!("{stem}_dynamics"), cols);
    let series: Vec<Vec<C64>> = obs
        .iter()
        .map(|(_, op)| evo.expectation(op))
        .collect::<Result<_>>()?;
    for (k, t) in evo.times.iter().enumerate() {
        let mut row = vec![Cell::Num(*t)];
        row.extend(series.iter().map(|s| Cell::Num(s[k].re)));
        dynamics.push(row);
    }
    let mut tables = vec![steady, dynamics];

    if n.n_traj > 0 {
        let dt = match n.dt {
            Some(dt) => dt,
            None => 0.5 * MAX_JUMP_PROBABILITY / expected_max_jump_rate(model, &rho0).max(1e-300),
        };
        let obs_refs: Vec<(&str, &Operator)> =
            obs.iter().map(|(name, op)| (name.as_str(), op)).collect();
        let ens = mcwf_trajectories(
            model,
            &rho0,
            &obs_refs,
            &McwfOptions {
                t_final: n.t_final,
                dt,
                n_traj: n.n_traj,
                seed: n.seed,
                sample_times: times,
                workers: n.workers,
            },
        )?;
        let steady = &mut tables[0];
        kv(steady, "mcwf", "dt", ens.dt);
        for j in &model.jumps {
            let (rate, se) = ens.emission_rate(j.channel, 0.5 * n.t_final, n.t_final);
            kv(
                steady,
                "mcwf",
                &format!("jumps_{}", j.channel),
                ens.jump_count(j.channel),
            );
            kv(steady, "mcwf", &format!("I_{}", j.channel), rate);
            kv(steady, "mcwf", &format!("I_{}_se", j.channel), se);
        }
        let mut cols = vec!["t".to_string()];
        for o in &ens.observables {
            cols.push(o.name.clone());
            cols.push(format!("{}_se", o.name));
        }
        let mut traj = Table::with_columns(format!("{stem}_mcwf"), cols);
        for (k, t) in ens.times.iter().enumerate() {
            let mut row = vec![Cell::Num(*t)];
            for o in &ens.observables {
                row.push(Cell::Num(o.mean[k]));
                row.push(Cell::Num(o.std_err[k]));
            }
            traj.push(row);
        }
        tables.push(traj);
    }
    Ok(tables)
}

fn rate_label(route: RateRoute) -> &'static str {
    match route {
        RateRoute::Normalized => "rates",
        RateRoute::Quadrature => "rates_quadrature",
    }
}

fn rate_rows(t: &mut Table, frame: &CommonModeFrame) -> Result<()> {
    let r = rate_steady_state(frame)?;
    let label = rate_label(r.route);
    let [i1, i2, im] = emission_from_moments(&r.quadrature, frame);
    kv(t, label, "n_a", r.n_a);
    kv(t, label, "n_b", r.n_b);
    kv(t, label, "I_1", i1);
    kv(t, label, "I_2", i2);
    kv(t, label, "I_m", im);
    kv(t, label, "ratio", ratio_value(r.n_a, r.n_b)?);
    if let Some(s) = r.rates {
        for (name, v) in ["n_a", "n_b", "k_a", "k_b", "m", "l_a", "l_b"]
            .iter()
            .zip(s.to_array())
        {
            kv(t, label, &format!("var_{name}"), v);
        }
    }
    Ok(())
}

/// Moments of a local Fock state `|n₁, n₂⟩` in the common-mode frame.
fn fock_moments(frame: &CommonModeFrame, occ: [usize; 2]) -> QuadratureState {
    let u = frame.local_to_common();
    let n = [occ[0] as f64, occ[1] as f64];
    let second =
        |j: usize, k: usize| -> C64 { (0..2).map(|l| u[j][l].conj() * u[k][l] * n[l]).sum() };
    QuadratureState {
        alpha_a: C64::new(0.0, 0.0),
        alpha_b: C64::new(0.0, 0.0),
        n_a: second(0, 0).re,
        n_b: second(1, 1).re,
        cross: second(1, 0),
    }
}

fn rates_tables(config: &RunConfig) -> Result<Vec<Table>> {
    let frame = make_frame(&config.system.params)?;
    let mut steady = Table::new("rates_steady", &["solver", "quantity", "value"]);
    kv(&mut steady, "frame", "kappa_a", frame.kappa_a);
    kv(&mut steady, "frame", "kappa_b", frame.kappa_b);
    kv(&mut steady, "frame", "delta_kappa", frame.delta_kappa);
    kv(&mut steady, "frame", "omega_a_abs", frame.omega_a.norm());
    kv(&mut steady, "frame", "omega_b_abs", frame.omega_b.norm());
    kv(&mut steady, "frame", "phi", frame.phi);
    rate_rows(&mut steady, &frame)?;

    let initial = match config.numerics.initial {
        InitialState::Vacuum => QuadratureState::coherent(C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
        InitialState::Fock(occ) => fock_moments(&frame, occ),
    };
    let times = sample_times(&config.numerics);
    let traj = evolve_rates(&frame, initial, &times)?;
    let mut dynamics = Table::new(
        "rates_dynamics",
        &[
            "t",
            "n_a",
            "n_b",
            "alpha_a_re",
            "alpha_a_im",
            "alpha_b_re",
            "alpha_b_im",
            "cross_re",
            "cross_im",
            "I_1",
            "I_2",
            "I_m",
        ],
    );
    for (t, q) in times.iter().zip(&traj) {
        let [i1, i2, im] = emission_from_moments(q, &frame);
        dynamics.push(
            [
                *t,
                q.n_a,
                q.n_b,
                q.alpha_a.re,
                q.alpha_a.im,
                q.alpha_b.re,
                q.alpha_b.im,
                q.cross.re,
                q.cross.im,
                i1,
                i2,
                im,
            ]
            .into_iter()
            .map(Cell::Num)
            .collect(),
        );
    }
    Ok(vec![steady, dynamics])
}

struct SweepPoint {
    params: SystemParams,
    kappa_m: f64,
    phi: f64,
    ratio: Option<C64>,
}

fn sweep_points(p: &SystemParams, s: &SweepConfig) -> Vec<SweepPoint> {
    let mut out = Vec::new();
    let phis: &[f64] = if s.symbol == SweepSymbol::Phi {
        &[0.0]
    } else {
        &s.phi
    };
    for &g in &s.grid {
        for &phi in phis {
            let params = match s.symbol {
                SweepSymbol::KappaM => p.with_kappa_m(g).with_phi(phi),
                SweepSymbol::Phi => p.with_phi(g),
                SweepSymbol::OmegaRatio => p.with_omega_ratio(C64::new(g, 0.0)).with_phi(phi),
            };
            let phi = if s.symbol == SweepSymbol::Phi { g } else { phi };
            let ratio = (params.omega2.norm() > 0.0).then(|| params.omega1 / params.omega2);
            out.push(SweepPoint {
                params,
                kappa_m: params.kappa_m,
                phi,
                ratio,
            });
        }
    }
    out
}

fn sweep_rows(
    pt: &SweepPoint,
    solvers: &[SweepSolver],
    numerics: &Numerics,
) -> Result<Vec<Vec<Cell>>> {
    let frame = make_frame(&pt.params)?;
    let key = |row: &mut Vec<Cell>| {
        row.push(pt.kappa_m.into());
        row.push(pt.phi.into());
        row.push(pt.ratio.map(|r| r.re).into());
        row.push(pt.ratio.map(|r| r.im).into());
    };
    let mut rows = Vec::new();
    for solver in solvers {
        let mut row = Vec::with_capacity(11);
        key(&mut row);
        let (n_a, n_b, i1, i2, im, label) = match solver {
            SweepSolver::ClosedForm => {
                let s = symmetric_steady(
                    pt.params.omega1.norm(),
                    pt.params.kappa1,
                    pt.params.kappa_m,
                    frame.phi,
                )?;
                (
                    s.n_a,
                    s.n_b,
                    None,
                    None,
                    Some(pt.params.kappa_m * s.n_b),
                    "closed_form",
                )
            }
            SweepSolver::Rates => {
                let r = rate_steady_state(&frame)?;
                let [i1, i2, im] = emission_from_moments(&r.quadrature, &frame);
                (
                    r.n_a,
                    r.n_b,
                    Some(i1),
                    Some(i2),
                    Some(im),
                    rate_label(r.route),
                )
            }
            SweepSolver::Full => {
                let model = full_model(&pt.params, numerics, numerics.basis)?;
                let state = steady_state(&model)?;
                let rep = emission_report(&state, &model, Some(&frame))?;
                let (a, b) = (rep.n_a.unwrap_or(0.0), rep.n_b.unwrap_or(0.0));
                (
                    a,
                    b,
                    Some(rep.i_1()),
                    Some(rep.i_2()),
                    Some(rep.i_m()),
                    "full",
                )
            }
        };
        row.push(n_a.into());
        row.push(n_b.into());
        row.push(ratio_value(n_a, n_b)?.into());
        row.push(i1.into());
        row.push(i2.into());
        row.push(im.into());
        row.push(label.into());
        rows.push(row);
    }
    Ok(rows)
}

fn cmp_cells(a: &[Cell], b: &[Cell]) -> Ordering {
    for k in 0..4 {
        let (x, y) = (
            a[k].as_f64().unwrap_or(f64::NAN),
            b[k].as_f64().unwrap_or(f64::NAN),
        );
        match x.total_cmp(&y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

fn sweep_table(config: &RunConfig) -> Result<Table> {
    let s = config
        .sweep
        .as_ref()
        .expect("sweep scenario carries a sweep section");
    let points = sweep_points(&config.system.params, s);
    let per_point: Vec<Vec<Vec<Cell>>> = points
        .par_iter()
        .map(|pt| sweep_rows(pt, &s.solvers, &config.numerics))
        .collect::<Result<_>>()?;
    let mut rows: Vec<Vec<Cell>> = per_point.into_iter().flatten().collect();
    // stable sort keeps the solver order inside a grid point
    rows.sort_by(|a, b| cmp_cells(a, b));
    let mut t = Table::new(
        "sweep",
        &[
            "kappa_m",
            "phi",
            "omega_ratio_re",
            "omega_ratio_im",
            "n_a",
            "n_b",
            "ratio",
            "I_1",
            "I_2",
            "I_m",
            "solver",
        ],
    );
    for r in rows {
        t.push(r);
    }
    Ok(t)
}

fn calibrate_tables(config: &RunConfig) -> Result<Vec<Table>> {
    let c = config
        .calibrate
        .as_ref()
        .expect("calibrate scenario carries a calibrate section");
    let p = &config.system.params;
    let grid: Vec<C64> = c
        .magnitude
        .iter()
        .flat_map(|&m| c.phase.iter().map(move |&ph| C64::from_polar(m, ph)))
        .collect();
    let method = match c.method {
        CalibrationChoice::Coherent => CalibrationMethod::Coherent,
        CalibrationChoice::Liouvillian => CalibrationMethod::Liouvillian,
    };
    let scan = calibration_scan(p, &grid, method)?;
    let mut t = Table::new(
        "calibrate_scan",
        &[
            "ratio_abs",
            "ratio_arg",
            "ratio_re",
            "ratio_im",
            "I_m",
            "n_a",
            "n_b",
        ],
    );
    for (pt, (m, ph)) in scan.points.iter().zip(
        c.magnitude
            .iter()
            .flat_map(|&m| c.phase.iter().map(move |&ph| (m, ph))),
    ) {
        t.push(vec![
            m.into(),
            ph.into(),
            pt.ratio.re.into(),
            pt.ratio.im.into(),
            pt.i_m.into(),
            pt.n_a.into(),
            pt.n_b.into(),
        ]);
    }
    let mut s = Table::new("calibrate_summary", &["quantity", "re", "im"]);
    let row =
        |s: &mut Table, name: &str, z: C64| s.push(vec![name.into(), z.re.into(), z.im.into()]);
    row(&mut s, "scan_min_ratio", scan.min().ratio);
    row(&mut s, "scan_min_I_m", C64::new(scan.min().i_m, 0.0));
    row(&mut s, "scan_max_ratio", scan.max().ratio);
    row(&mut s, "scan_max_I_m", C64::new(scan.max().i_m, 0.0));
    row(&mut s, "predicted_min_ratio", -p.xi2.conj() / p.xi1.conj());
    row(&mut s, "predicted_max_ratio", p.xi1 / p.xi2);
    Ok(vec![t, s])
}

fn plot_table(t: &Table, config: &RunConfig) -> Result<Option<PathBuf>> {
    let path = config.output.dir.join(format!("{}.svg", t.stem));
    let col = |name: &str| t.column(name);
    if t.stem.ends_with("_dynamics") || t.stem.ends_with("_mcwf") {
        let series: Vec<Series> = t
            .columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.starts_with("n") && !c.ends_with("_se"))
            .map(|(k, c)| Series {
                label: c.clone(),
                points: t
                    .rows
                    .iter()
                    .map(|r| {
                        (
                            r[0].as_f64().unwrap_or(f64::NAN),
                            r[k].as_f64().unwrap_or(f64::NAN),
                        )
                    })
                    .collect(),
            })
            .collect();
        line_plot(&path, &t.stem, "t", "population", &series)?;
        return Ok(Some(path));
    }
    if t.stem == "sweep" {
        let s = config
            .sweep
            .as_ref()
            .expect("sweep table comes from a sweep config");
        let (x_col, x_label) = match s.symbol {
            SweepSymbol::KappaM => ("kappa_m", "kappa_m / kappa_0"),
            SweepSymbol::Phi => ("phi", "phi"),
            SweepSymbol::OmegaRatio => ("omega_ratio_re", "omega1 / omega2"),
        };
        let (xi, ri, pi, si) = (
            col(x_col).unwrap(),
            col("ratio").unwrap(),
            col("phi").unwrap(),
            col("solver").unwrap(),
        );
        let mut series: Vec<Series> = Vec::new();
        for r in &t.rows {
            let Cell::Text(solver) = &r[si] else { continue };
            let label = if s.symbol == SweepSymbol::Phi {
                solver.clone()
            } else {
                format!("{solver} phi={:.4}", r[pi].as_f64().unwrap_or(f64::NAN))
            };
            let point = (
                r[xi].as_f64().unwrap_or(f64::NAN),
                r[ri].as_f64().unwrap_or(f64::NAN),
            );
            match series.iter_mut().find(|s| s.label == label) {
                Some(s) => s.points.push(point),
                None => series.push(Series {
                    label,
                    points: vec![point],
                }),
            }
        }
        line_plot(&path, "n_b / n_a", x_label, "n_b / n_a", &series)?;
        return Ok(Some(path));
    }
    Ok(None)
}
