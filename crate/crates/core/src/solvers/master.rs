use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::CsrMatrix;

use crate::error::{argument, Result};
use crate::fock::{expectation, FockSpace, Operator, QuantumState, C64, I};
use crate::model::OpenSystemModel;
use crate::solvers::ode::{integrate, OdeOptions, OdeStats};

/// Boundary population above which a result is flagged as truncation-limited.
pub const LEAKAGE_THRESHOLD: f64 = 1e-6;

/// The master-equation generator
/// `ρ ↦ −i(H_cond ρ − ρ H_cond†) + Σ_x R_x ρ R_x†` acting on dense matrices.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    space: FockSpace,
    h_cond: CsrMatrix<C64>,
    jumps: Vec<CsrMatrix<C64>>,
}

impl Liouvillian {
    pub fn new(model: &OpenSystemModel) -> Self {
        Self {
            space: model.space.clone(),
            h_cond: model.h_cond.csr().clone(),
            jumps: model.jumps.iter().map(|j| j.op.csr().clone()).collect(),
        }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let rho_dag = rho.adjoint();
        // ρH† = (Hρ†)†
        let h_rho = &self.h_cond * rho;
        let rho_h = (&self.h_cond * &rho_dag).adjoint();
        let mut out = (h_rho - rho_h) * (-I);
        for r in &self.jumps {
            // RρR† = R (Rρ†)†
            let r_rho_dag = (r * &rho_dag).adjoint();
            out += r * &r_rho_dag;
        }
        out
    }

    /// Largest entry of `L(ρ)`.
    pub fn residual(&self, state: &QuantumState) -> f64 {
        self.apply(&state.density())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Step bound; `None` uses `0.05 / total rate`.
    pub dt_max: Option<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-11,
            dt_max: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<QuantumState>,
    pub stats: OdeStats,
    /// Step bound actually used.
    pub dt_max: f64,
    pub max_trace_error: f64,
    pub max_boundary_population: f64,
    /// Set when some sampled state puts more than [`LEAKAGE_THRESHOLD`] on the cutoff.
    pub leakage_warning: bool,
}

impl EvolutionResult {
    /// `⟨op⟩(t)` at every stored time.
    pub fn expectation(&self, op: &Operator) -> Result<Vec<C64>> {
        self.states.iter().map(|s| expectation(op, s)).collect()
    }

    pub fn final_state(&self) -> &QuantumState {
        self.states
            .last()
            .expect("at least the initial state is stored")
    }
}

/// Default step bound: `0.05 / (total one-photon rate + drive strength)`.
pub fn default_dt_max(model: &OpenSystemModel) -> f64 {
    let rate = model.total_rate_bound();
    if rate > 0.0 {
        0.05 / rate
    } else {
        f64::INFINITY
    }
}

/// Integrates the master equation from `rho0` and stores `n_samples` equally spaced
/// states over `[0, t_final]`.
pub fn evolve_master(
    model: &OpenSystemModel,
    rho0: &QuantumState,
    t_final: f64,
    n_samples: usize,
    opts: &EvolveOptions,
) -> Result<EvolutionResult> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(argument(format!(
            "t_final must be positive and finite, got {t_final}"
        )));
    }
    if n_samples < 2 {
        return Err(argument("need at least two samples (start and end)"));
    }
    let times: Vec<f64> = (0..n_samples)
        .map(|i| t_final * i as f64 / (n_samples - 1) as f64)
        .collect();
    evolve_master_at(model, rho0, &times, opts)
}

/// Like [`evolve_master`] with explicit output times; the first one is the start time.
pub fn evolve_master_at(
    model: &OpenSystemModel,
    rho0: &QuantumState,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<EvolutionResult> {
    if rho0.space() != &model.space {
        return Err(argument(
            "initial state lives on a different Fock space than the model",
        ));
    }
    if times.is_empty() {
        return Err(argument("no output times requested"));
    }
    let tr0 = rho0.trace();
    if (tr0 - 1.0).abs() > 1e-10 {
        return Err(argument(format!(
            "initial state has trace {tr0}, expected 1"
        )));
    }
    let dt_max = opts.dt_max.unwrap_or_else(|| default_dt_max(model));
    if !(dt_max > 0.0) {
        return Err(argument(format!("dt_max must be positive, got {dt_max}")));
    }
    let liou = Liouvillian::new(model);
    let d = model.space.dim();
    let rho = rho0.density();
    let y0 = DVector::from_column_slice(rho.as_slice());

    let mut states = Vec::with_capacity(times.len());
    let mut max_trace_error = 0.0f64;
    let mut max_boundary = 0.0f64;
    let stats = integrate(
        |_, y, dy| {
            let rho = DMatrix::from_column_slice(d, d, y.as_slice());
            dy.copy_from_slice(liou.apply(&rho).as_slice());
        },
        |y| {
            let rho = DMatrix::from_column_slice(d, d, y.as_slice());
            let sym = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
            y.copy_from_slice(sym.as_slice());
        },
        |_, _, y| {
            let state =
                QuantumState::mixed(&model.space, DMatrix::from_column_slice(d, d, y.as_slice()))?;
            max_trace_error = max_trace_error.max((state.trace() - 1.0).abs());
            max_boundary = max_boundary.max(state.boundary_population());
            states.push(state);
            Ok(())
        },
        y0,
        times,
        &OdeOptions {
            rtol: opts.rtol,
            atol: opts.atol,
            h_max: dt_max,
            h_init: None,
        },
    )?;
    let leakage_warning = max_boundary > LEAKAGE_THRESHOLD;
    if leakage_warning {
        log::warn!(
            "population {max_boundary:e} reaches the Fock cutoff {}; results are truncation-limited",
            model.space.cutoff()
        );
    }
    Ok(EvolutionResult {
        times: times.to_vec(),
        states,
        stats,
        dt_max,
        max_trace_error,
        max_boundary_population: max_boundary,
        leakage_warning,
    })
}
