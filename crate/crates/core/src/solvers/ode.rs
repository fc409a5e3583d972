//! Dormand–Prince 5(4) with an embedded error estimate, for complex state vectors.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fock::{C64, ONE};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    /// First trial step; `None` picks `min(h_max, span/100)`.
    pub h_init: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            h_max: f64::INFINITY,
            h_init: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub h_min: f64,
    pub h_last: f64,
    /// Largest weighted local error estimate of an accepted step (≤ 1 by construction).
    pub max_error_estimate: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th minus 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Adaptive integrator over a fixed, increasing list of output times.
///
/// `rhs(t, y, dy)` writes the derivative into `dy`. `post_step` runs on every
/// accepted state (used to re-symmetrize density matrices). `on_output` receives
/// the state at each entry of `t_out`; the first entry must equal `t0`.
pub fn integrate<F, P, O>(
    mut rhs: F,
    mut post_step: P,
    mut on_output: O,
    y0: DVector<C64>,
    t_out: &[f64],
    opts: &OdeOptions,
) -> Result<OdeStats>
where
    F: FnMut(f64, &DVector<C64>, &mut DVector<C64>),
    P: FnMut(&mut DVector<C64>),
    O: FnMut(usize, f64, &DVector<C64>) -> Result<()>,
{
    if t_out.is_empty() {
        return Ok(OdeStats::default());
    }
    if t_out.windows(2).any(|w| !(w[1] > w[0])) || t_out.iter().any(|t| !t.is_finite()) {
        return Err(Error::Argument(
            "output times must be finite and strictly increasing".into(),
        ));
    }
    let n = y0.len();
    let mut y = y0;
    let mut t = t_out[0];
    let span = t_out[t_out.len() - 1] - t;
    on_output(0, t, &y)?;
    let mut stats = OdeStats {
        h_min: f64::INFINITY,
        ..Default::default()
    };
    if span == 0.0 {
        stats.h_min = 0.0;
        return Ok(stats);
    }
    let mut h = opts
        .h_init
        .unwrap_or(span / 100.0)
        .min(opts.h_max)
        .min(span);

    let mut k1 = DVector::zeros(n);
    let mut k2 = DVector::zeros(n);
    let mut k3 = DVector::zeros(n);
    let mut k4 = DVector::zeros(n);
    let mut k5 = DVector::zeros(n);
    let mut k6 = DVector::zeros(n);
    let mut k7 = DVector::zeros(n);
    let mut tmp = DVector::zeros(n);
    rhs(t, &y, &mut k1);

    for (idx, &target) in t_out.iter().enumerate().skip(1) {
        while t < target {
            let mut step = h.min(target - t);
            // avoid leaving a sliver before the output time
            let hit = step >= target - t || target - t - step < 1e-12 * span;
            if hit {
                step = target - t;
            }
            if step <= 1e-14 * span.max(t.abs()) {
                return Err(Error::Solver(format!(
                    "step size underflow at t = {t}: h = {step:e}; the problem is too stiff for the explicit integrator"
                )));
            }
            let s = C64::new(step, 0.0);
            tmp.copy_from(&y);
            tmp.axpy(s * A21, &k1, ONE);
            rhs(t + C2 * step, &tmp, &mut k2);
            tmp.copy_from(&y);
            tmp.axpy(s * A31, &k1, ONE);
            tmp.axpy(s * A32, &k2, ONE);
            rhs(t + C3 * step, &tmp, &mut k3);
            tmp.copy_from(&y);
            tmp.axpy(s * A41, &k1, ONE);
            tmp.axpy(s * A42, &k2, ONE);
            tmp.axpy(s * A43, &k3, ONE);
            rhs(t + C4 * step, &tmp, &mut k4);
            tmp.copy_from(&y);
            tmp.axpy(s * A51, &k1, ONE);
            tmp.axpy(s * A52, &k2, ONE);
            tmp.axpy(s * A53, &k3, ONE);
            tmp.axpy(s * A54, &k4, ONE);
            rhs(t + C5 * step, &tmp, &mut k5);
            tmp.copy_from(&y);
            tmp.axpy(s * A61, &k1, ONE);
            tmp.axpy(s * A62, &k2, ONE);
            tmp.axpy(s * A63, &k3, ONE);
            tmp.axpy(s * A64, &k4, ONE);
            tmp.axpy(s * A65, &k5, ONE);
            rhs(t + step, &tmp, &mut k6);
            // 5th-order solution
            tmp.copy_from(&y);
            tmp.axpy(s * B1, &k1, ONE);
            tmp.axpy(s * B3, &k3, ONE);
            tmp.axpy(s * B4, &k4, ONE);
            tmp.axpy(s * B5, &k5, ONE);
            tmp.axpy(s * B6, &k6, ONE);
            rhs(t + step, &tmp, &mut k7);

            let mut err = 0.0f64;
            for i in 0..n {
                let e = step
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = opts.atol + opts.rtol * y[i].norm().max(tmp[i].norm());
                err = err.max(e.norm() / sc);
            }
            if !err.is_finite() {
                return Err(Error::Solver(format!(
                    "non-finite state encountered at t = {t}"
                )));
            }
            if err <= 1.0 {
                t = if hit { target } else { t + step };
                std::mem::swap(&mut y, &mut tmp);
                post_step(&mut y);
                rhs(t, &y, &mut k1);
                stats.accepted += 1;
                stats.h_min = stats.h_min.min(step);
                stats.h_last = step;
                stats.max_error_estimate = stats.max_error_estimate.max(err);
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                // a step shortened to land on an output time says nothing about the next one
                h = if hit { h.max(step * grow) } else { step * grow }.min(opts.h_max);
            } else {
                stats.rejected += 1;
                h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        on_output(idx, t, &y)?;
    }
    Ok(stats)
}
