//! Dynamics and steady states: master-equation integration, Liouvillian
//! steady states, quantum-jump trajectories and the moment (rate) equations.

mod krylov;
mod master;
mod mcwf;
pub mod ode;
mod rates;
mod steady;

pub use master::{
    default_dt_max, evolve_master, evolve_master_at, EvolutionResult, EvolveOptions, Liouvillian,
    LEAKAGE_THRESHOLD,
};
pub use mcwf::{
    expected_max_jump_rate, mcwf_trajectories, JumpRecord, McwfOptions, ObservableSeries,
    TrajectoryEnsemble, MAX_JUMP_PROBABILITY,
};
pub use rates::{
    evolve_rates, quadrature_rhs, quadrature_steady_state, rate_rhs, rate_steady_state,
    symmetric_steady, QuadratureState, RateRoute, RateState, RateSteady, SymmetricSteady,
};
pub use steady::{
    liouvillian_matrix, steady_state, steady_state_with_info, SteadyMethod, SteadySolution,
    KRYLOV_MIN_DIM, STEADY_RESIDUAL_TOL,
};
