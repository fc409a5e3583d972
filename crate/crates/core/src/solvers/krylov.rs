//! Steady states by GMRES on the Liouvillian, preconditioned with the exact inverse
//! of its no-jump part.
//!
//! Split `L = L₀ + J` with `L₀(ρ) = −i(H ρ − ρ H†)` (`H = H_cond`) and
//! `J(ρ) = Σ R ρ R†`. With the Schur form `H = Q T Q†`, `L₀⁻¹` is a triangular
//! Sylvester solve costing `O(d³)`, against `O(d⁶)` worst case for a sparse LU
//! of the `d² × d²` Liouvillian. The preconditioned system `(1 + L₀⁻¹J) ρ = 0`
//! is singular along the steady state only, so adding `σ·tr(ρ)` with `σ = 1/d`
//! makes it regular, and its solution for right-hand side `σ` is the steady
//! state with unit trace.

use faer::linalg::matmul::matmul;
use faer::traits::Conjugate;
use faer::{Accum, MatMut, MatRef, Par};
use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::CsrMatrix;

use crate::error::{domain, Error, Result};
use crate::fock::{C64, I, ONE};
use crate::model::OpenSystemModel;

const ZERO: C64 = C64::new(0.0, 0.0);

fn view(m: &DMatrix<C64>) -> MatRef<'_, C64> {
    MatRef::from_column_major_slice(m.as_slice(), m.nrows(), m.ncols())
}

fn product<L, R>(a: MatRef<'_, L>, b: MatRef<'_, R>) -> DMatrix<C64>
where
    L: Conjugate<Canonical = C64>,
    R: Conjugate<Canonical = C64>,
{
    let mut out = DMatrix::zeros(a.nrows(), b.ncols());
    let (r, c) = (out.nrows(), out.ncols());
    matmul(
        MatMut::from_column_major_slice_mut(out.as_mut_slice(), r, c),
        Accum::Replace,
        a,
        b,
        ONE,
        Par::Seq,
    );
    out
}

/// `L₀⁻¹` through the complex Schur form of `H_cond`.
struct NoJumpInverse {
    q: DMatrix<C64>,
    /// Upper-triangular Schur factor.
    t: DMatrix<C64>,
    /// `T†`, so that rows of `T` are read as contiguous columns.
    t_adj: DMatrix<C64>,
}

impl NoJumpInverse {
    fn new(h: DMatrix<C64>) -> Result<Self> {
        let (q, t) = h.schur().unpack();
        let d = t.nrows();
        // L₀ has eigenvalues −i(λ_i − λ̄_j); all must be damped
        let worst = (0..d)
            .map(|i| t[(i, i)].im)
            .fold(f64::NEG_INFINITY, f64::max);
        if !(worst < 0.0) {
            return Err(domain(format!(
                "the no-jump evolution has an undamped eigenvalue (Im λ = {worst:e})"
            )));
        }
        let t_adj = t.adjoint();
        Ok(Self { q, t, t_adj })
    }

    /// `X` with `L₀(X) = Y`.
    fn apply(&self, y: &DMatrix<C64>) -> DMatrix<C64> {
        let d = y.nrows();
        // C = i Q† Y Q, stored transposed so that its rows are contiguous
        let qy = product(view(&self.q).adjoint(), view(y));
        let c = product(view(&qy), view(&self.q)) * I;
        let ct = c.transpose();
        // T Z − Z T† = C, one row of Z at a time from the bottom; zt holds Zᵀ
        let mut zt = DMatrix::<C64>::zeros(d, d);
        let mut r = DVector::<C64>::zeros(d);
        for i in (0..d).rev() {
            r.copy_from(&ct.column(i));
            for k in i + 1..d {
                let tik = self.t[(i, k)];
                if tik != ZERO {
                    r.axpy(-tik, &zt.column(k), ONE);
                }
            }
            let tii = self.t[(i, i)];
            for j in (0..d).rev() {
                let mut s = r[j];
                let col = self.t_adj.column(j);
                for k in j + 1..d {
                    // T†_{kj} = conj(T_jk)
                    s += zt[(k, i)] * col[k];
                }
                zt[(j, i)] = s / (tii - self.t[(j, j)].conj());
            }
        }
        let z = zt.transpose();
        let qz = product(view(&self.q), view(&z));
        product(view(&qz), view(&self.q).adjoint())
    }
}

/// `Σ R ρ R†`.
fn jump_map(jumps: &[CsrMatrix<C64>], rho: &DMatrix<C64>) -> DMatrix<C64> {
    let d = rho.nrows();
    let mut out = DMatrix::<C64>::zeros(d, d);
    for r in jumps {
        let r_rho: DMatrix<C64> = r * rho;
        // R ρ R† = (R (R ρ)†)† holds for any ρ, and keeps both products sparse × dense
        let right: DMatrix<C64> = r * &r_rho.adjoint();
        out += right.adjoint();
    }
    out
}

pub(crate) struct KrylovSolution {
    pub rho: DMatrix<C64>,
    pub iterations: usize,
}

/// Restarted GMRES for the regularized, preconditioned steady-state system.
pub(crate) fn steady_state_krylov(model: &OpenSystemModel, tol: f64) -> Result<KrylovSolution> {
    let d = model.space.dim();
    let inv = NoJumpInverse::new(model.h_cond.to_dense())?;
    let jumps: Vec<CsrMatrix<C64>> = model
        .jumps
        .iter()
        .filter(|j| j.op.nnz() > 0)
        .map(|j| j.op.csr().clone())
        .collect();
    let sigma = C64::new(1.0 / d as f64, 0.0);
    let operator = |x: &DVector<C64>| -> DVector<C64> {
        let rho = DMatrix::from_column_slice(d, d, x.as_slice());
        let z = inv.apply(&jump_map(&jumps, &rho));
        let mut out = rho + z;
        let tr = (0..d).map(|i| x[i * d + i]).sum::<C64>();
        for i in 0..d {
            out[(i, i)] += sigma * tr;
        }
        DVector::from_column_slice(out.as_slice())
    };
    let mut b = DVector::<C64>::zeros(d * d);
    for i in 0..d {
        b[i * d + i] = sigma;
    }
    let (x, iterations, rel) = gmres(operator, &b, 60, 40, tol);
    if !(rel <= tol) {
        return Err(Error::Solver(format!(
            "GMRES stalled at relative residual {rel:e} after {iterations} iterations"
        )));
    }
    Ok(KrylovSolution {
        rho: DMatrix::from_column_slice(d, d, x.as_slice()),
        iterations,
    })
}

/// Restarted GMRES(`restart`) from a zero start. Returns the solution, the number
/// of operator applications and the final relative residual.
fn gmres(
    apply: impl Fn(&DVector<C64>) -> DVector<C64>,
    b: &DVector<C64>,
    restart: usize,
    max_cycles: usize,
    tol: f64,
) -> (DVector<C64>, usize, f64) {
    let n = b.len();
    let b_norm = b.norm();
    let mut x = DVector::<C64>::zeros(n);
    if b_norm == 0.0 {
        return (x, 0, 0.0);
    }
    let mut applications = 0;
    let mut rel = 1.0;
    for _ in 0..max_cycles {
        let r = b - apply(&x);
        applications += 1;
        let beta = r.norm();
        rel = beta / b_norm;
        if rel <= tol {
            break;
        }
        let mut basis: Vec<DVector<C64>> = vec![r / C64::new(beta, 0.0)];
        let mut h = DMatrix::<C64>::zeros(restart + 1, restart);
        let mut cs = vec![0.0f64; restart];
        let mut sn = vec![ZERO; restart];
        let mut g = DVector::<C64>::zeros(restart + 1);
        g[0] = C64::new(beta, 0.0);
        let mut used = 0;
        for k in 0..restart {
            let mut w = apply(&basis[k]);
            applications += 1;
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for (j, v) in basis.iter().enumerate() {
                    let hj = v.dotc(&w);
                    h[(j, k)] += hj;
                    w.axpy(-hj, v, ONE);
                }
            }
            let w_norm = w.norm();
            h[(k + 1, k)] = C64::new(w_norm, 0.0);
            for j in 0..k {
                let (a, bb) = (h[(j, k)], h[(j + 1, k)]);
                h[(j, k)] = a * cs[j] + sn[j] * bb;
                h[(j + 1, k)] = -sn[j].conj() * a + bb * cs[j];
            }
            let (a, bb) = (h[(k, k)], h[(k + 1, k)]);
            let rr = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            if a.norm() == 0.0 {
                cs[k] = 0.0;
                sn[k] = ONE;
            } else {
                cs[k] = a.norm() / rr;
                sn[k] = a / a.norm() * bb.conj() / rr;
            }
            h[(k, k)] = a * cs[k] + sn[k] * bb;
            h[(k + 1, k)] = ZERO;
            let gk = g[k];
            g[k] = gk * cs[k];
            g[k + 1] = -sn[k].conj() * gk;
            used = k + 1;
            rel = g[k + 1].norm() / b_norm;
            if rel <= tol || w_norm == 0.0 {
                break;
            }
            basis.push(w / C64::new(w_norm, 0.0));
        }
        // back substitution on the rotated Hessenberg system
        let mut y = vec![ZERO; used];
        for i in (0..used).rev() {
            let mut s = g[i];
            for j in i + 1..used {
                s -= h[(i, j)] * y[j];
            }
            y[i] = s / h[(i, i)];
        }
        for (j, yj) in y.iter().enumerate() {
            x.axpy(*yj, &basis[j], ONE);
        }
        if rel <= tol {
            // confirm with the true residual
            let r = b - apply(&x);
            applications += 1;
            rel = r.norm() / b_norm;
            if rel <= tol {
                break;
            }
        }
    }
    (x, applications, rel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_local, SystemParams};
    use crate::solvers::master::Liouvillian;

    #[test]
    fn no_jump_inverse_inverts() {
        let p = SystemParams::symmetric(0.8, 1.0, 3.0, 1.3).unwrap();
        let m = build_local(&p, 3).unwrap();
        let d = m.space.dim();
        let inv = NoJumpInverse::new(m.h_cond.to_dense()).unwrap();
        let y = DMatrix::from_fn(d, d, |i, j| {
            C64::new((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.3)
        });
        let x = inv.apply(&y);
        let h = m.h_cond.to_dense();
        let back = (&h * &x - &x * h.adjoint()) * (-I);
        assert!((back - y).camax() < 1e-12);
    }

    #[test]
    fn gmres_steady_state_has_small_residual() {
        let p = SystemParams::symmetric(1.0, 1.0, 8.0, 2.0).unwrap();
        let m = build_local(&p, 5).unwrap();
        let sol = steady_state_krylov(&m, 1e-13).unwrap();
        let rho = &sol.rho;
        assert!((rho.trace() - ONE).norm() < 1e-12);
        let r = Liouvillian::new(&m).apply(rho);
        assert!(r.camax() < 1e-11, "{}", r.camax());
    }

    #[test]
    fn gmres_agrees_with_sparse_lu() {
        let p = SystemParams {
            kappa2: 0.5,
            ..SystemParams::symmetric(1.0, 1.0, 3.0, 0.9 * std::f64::consts::PI).unwrap()
        };
        let m = build_local(&p, 5).unwrap();
        assert!(m.space.dim() < crate::solvers::KRYLOV_MIN_DIM);
        let direct = crate::solvers::steady_state_with_info(&m).unwrap();
        assert_eq!(direct.method, crate::solvers::SteadyMethod::Direct);
        let sol = steady_state_krylov(&m, 1e-13).unwrap();
        let diff = (&sol.rho - direct.state.density()).camax();
        assert!(diff < 1e-11, "{diff:e}");
    }
}
