use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use nalgebra::DMatrix;
use nalgebra_sparse::{CooMatrix, CscMatrix};

use crate::error::{domain, Error, Result};
use crate::fock::{QuantumState, C64, I, ONE};
use crate::model::OpenSystemModel;
use crate::solvers::krylov;
use crate::solvers::master::{evolve_master, EvolveOptions, Liouvillian};

/// Residual `max |L(ρ)|` a steady state must reach.
pub const STEADY_RESIDUAL_TOL: f64 = 1e-10;

/// Hilbert-space dimension from which GMRES is tried before the sparse LU.
pub const KRYLOV_MIN_DIM: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteadyMethod {
    /// Sparse LU of the Liouvillian with the trace condition in place of one row.
    Direct,
    /// GMRES preconditioned by the exact inverse of the no-jump part, for larger spaces.
    Krylov,
    /// Long-time integration, used when the factorization fails.
    Integration,
}

#[derive(Clone, Debug)]
pub struct SteadySolution {
    pub state: QuantumState,
    pub residual: f64,
    pub method: SteadyMethod,
}

/// Sparse Liouvillian on column-stacked `vec(ρ)`:
/// `−i(1⊗H) + i(H̄⊗1) + Σ R̄⊗R`, with `H = H_cond`.
pub fn liouvillian_matrix(model: &OpenSystemModel) -> CscMatrix<C64> {
    let d = model.space.dim();
    let mut coo = CooMatrix::new(d * d, d * d);
    for (i, k, &v) in model.h_cond.csr().triplet_iter() {
        for j in 0..d {
            coo.push(j * d + i, j * d + k, -I * v);
            // ρH† term: (H†)ᵀ = H̄ acts on the column index
            coo.push(i * d + j, k * d + j, I * v.conj());
        }
    }
    for jump in &model.jumps {
        let entries: Vec<(usize, usize, C64)> = jump
            .op
            .csr()
            .triplet_iter()
            .map(|(r, c, v)| (r, c, *v))
            .collect();
        for &(j, l, u) in &entries {
            for &(i, k, w) in &entries {
                coo.push(j * d + i, l * d + k, u.conj() * w);
            }
        }
    }
    CscMatrix::from(&coo)
}

fn check_solvable(model: &OpenSystemModel) -> Result<()> {
    if model.jumps.iter().all(|j| j.op.nnz() == 0) {
        let names: Vec<String> = model.jumps.iter().map(|j| j.channel.to_string()).collect();
        return Err(domain(format!(
            "every decay channel ({}) has zero rate; the steady state is not unique",
            names.join(", ")
        )));
    }
    let mf = model.mean_field();
    let herm = (&mf.damping + mf.damping.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= 1e-12 * top {
            let v = eig.eigenvectors.column(k);
            let coeffs: Vec<String> = v.iter().map(|z| format!("{:.3}", z)).collect();
            return Err(domain(format!(
                "the mode combination [{}] of {} never decays; the steady state is not unique",
                coeffs.join(", "),
                model.representation
            )));
        }
    }
    Ok(())
}

/// Unique stationary state of the master equation.
pub fn steady_state(model: &OpenSystemModel) -> Result<QuantumState> {
    steady_state_with_info(model).map(|s| s.state)
}

pub fn steady_state_with_info(model: &OpenSystemModel) -> Result<SteadySolution> {
    check_solvable(model)?;
    let d = model.space.dim();
    let liou = Liouvillian::new(model);
    if d >= KRYLOV_MIN_DIM {
        match krylov::steady_state_krylov(model, 1e-13) {
            Ok(sol) => {
                let state = finish(model, sol.rho)?;
                let residual = liou.residual(&state);
                if residual < STEADY_RESIDUAL_TOL && state.trace().is_finite() {
                    log::debug!("GMRES steady state after {} applications", sol.iterations);
                    return Ok(SteadySolution {
                        state,
                        residual,
                        method: SteadyMethod::Krylov,
                    });
                }
                log::warn!("GMRES steady state left residual {residual:e}; trying sparse LU");
            }
            Err(e) => log::warn!("{e}; trying sparse LU"),
        }
    }
    let n = d * d;
    if n > 20_000 {
        log::warn!(
            "Liouvillian dimension {n}: sparse LU may be slow; consider total-number truncation"
        );
    }
    let l = liouvillian_matrix(model);

    // row 0 of L (the ⟨0|·|0⟩ equation) is redundant with the others; swap in tr ρ = 1
    let mut triplets: Vec<Triplet<usize, usize, C64>> = l
        .triplet_iter()
        .filter(|(r, _, _)| *r != 0)
        .map(|(r, c, v)| Triplet::new(r, c, *v))
        .collect();
    triplets.extend((0..d).map(|i| Triplet::new(0, i * d + i, ONE)));

    let direct = SparseColMat::<usize, C64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Solver(format!("building the Liouvillian failed: {e:?}")))
        .and_then(|a| {
            let lu = a
                .sp_lu()
                .map_err(|e| Error::Solver(format!("sparse LU failed: {e:?}")))?;
            let mut b = Mat::<C64>::zeros(n, 1);
            b[(0, 0)] = ONE;
            let mut x = lu.solve(&b);
            // one round of iterative refinement
            let r = &b - &a * &x;
            let dx = lu.solve(&r);
            x += &dx;
            Ok(x)
        });

    match direct {
        Ok(x) => {
            let rho = DMatrix::from_fn(d, d, |i, j| x[(j * d + i, 0)]);
            let state = finish(model, rho)?;
            let residual = liou.residual(&state);
            if residual < STEADY_RESIDUAL_TOL && state.trace().is_finite() {
                return Ok(SteadySolution {
                    state,
                    residual,
                    method: SteadyMethod::Direct,
                });
            }
            log::warn!("direct steady-state solve left residual {residual:e}; integrating instead");
        }
        Err(e) => log::warn!("{e}; integrating to the steady state instead"),
    }
    by_integration(model, &liou)
}

fn finish(model: &OpenSystemModel, rho: DMatrix<C64>) -> Result<QuantumState> {
    let sym = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let tr = sym.trace().re;
    QuantumState::mixed(&model.space, sym / C64::new(tr, 0.0))
}

fn by_integration(model: &OpenSystemModel, liou: &Liouvillian) -> Result<SteadySolution> {
    let mf = model.mean_field();
    let herm = (&mf.damping + mf.damping.adjoint()) * C64::new(0.5, 0.0);
    let slowest = herm
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let chunk = 20.0 / slowest;
    let opts = EvolveOptions {
        rtol: 1e-12,
        atol: 1e-14,
        dt_max: None,
    };
    let mut state = QuantumState::vacuum(&model.space).to_mixed();
    let mut residual = f64::INFINITY;
    for _ in 0..50 {
        let r = evolve_master(model, &state, chunk, 2, &opts)?;
        state = finish(model, r.final_state().density())?;
        residual = liou.residual(&state);
        if residual < STEADY_RESIDUAL_TOL {
            return Ok(SteadySolution {
                state,
                residual,
                method: SteadyMethod::Integration,
            });
        }
    }
    Err(Error::Solver(format!(
        "steady state not reached: Liouvillian residual {residual:e} after {} time units",
        50.0 * chunk
    )))
}
