use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::CsrMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{argument, Error, Result};
use crate::fock::{total_number, Operator, QuantumState, C64, I};
use crate::model::{Channel, OpenSystemModel};

/// Bound on `dt` times the largest expected jump rate.
pub const MAX_JUMP_PROBABILITY: f64 = 0.1;

/// Jump times are located to within `dt / 2^JUMP_TIME_BISECTIONS`.
const JUMP_TIME_BISECTIONS: usize = 20;

#[derive(Clone, Debug)]
pub struct McwfOptions {
    pub t_final: f64,
    pub dt: f64,
    pub n_traj: usize,
    pub seed: u64,
    /// Times at which observables are averaged; each is rounded to the step grid.
    pub sample_times: Vec<f64>,
    /// Thread count; `None` uses the global rayon pool. Results do not depend on it.
    pub workers: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpRecord {
    pub time: f64,
    pub channel: Channel,
}

/// Ensemble mean and standard error of one observable at each sample time.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSeries {
    pub name: String,
    pub mean: Vec<f64>,
    pub std_err: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct TrajectoryEnsemble {
    pub n_traj: usize,
    pub seed: u64,
    pub dt: f64,
    pub t_final: f64,
    /// Sample times after rounding to the step grid.
    pub times: Vec<f64>,
    /// Jump records per trajectory, in trajectory index order.
    pub jumps: Vec<Vec<JumpRecord>>,
    pub observables: Vec<ObservableSeries>,
}

impl TrajectoryEnsemble {
    pub fn jump_count(&self, channel: Channel) -> usize {
        self.jumps
            .iter()
            .flatten()
            .filter(|j| j.channel == channel)
            .count()
    }

    /// Mean emission rate into `channel` over `[t0, t1]`, with its standard error.
    pub fn emission_rate(&self, channel: Channel, t0: f64, t1: f64) -> (f64, f64) {
        let per: Vec<f64> = self
            .jumps
            .iter()
            .map(|js| {
                js.iter()
                    .filter(|j| j.channel == channel && j.time > t0 && j.time <= t1)
                    .count() as f64
            })
            .collect();
        let (mean, se) = mean_and_error(&per);
        (mean / (t1 - t0), se / (t1 - t0))
    }

    pub fn observable(&self, name: &str) -> Option<&ObservableSeries> {
        self.observables.iter().find(|o| o.name == name)
    }
}

fn mean_and_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

struct Propagators {
    /// `steps[k] = exp(−i H_cond dt / 2^k)`
    steps: Vec<DMatrix<C64>>,
    jumps: Vec<(Channel, CsrMatrix<C64>)>,
    observables: Vec<CsrMatrix<C64>>,
}

/// Largest jump rate the run is expected to see: fastest one-photon decay rate
/// times a photon-number scale taken from the initial state and the mean-field
/// steady state.
pub fn expected_max_jump_rate(model: &OpenSystemModel, psi0: &QuantumState) -> f64 {
    let mf = model.mean_field();
    let n0 = crate::fock::expectation(&total_number(&model.space), psi0)
        .map(|z| z.re)
        .unwrap_or(0.0);
    let n_ss: f64 = mf
        .steady_amplitudes()
        .map(|a| a.iter().map(|z| z.norm_sqr()).sum())
        .unwrap_or(0.0);
    mf.max_rate() * (n0 + n_ss).max(1.0)
}

/// Quantum-jump unraveling of the model's master equation.
///
/// Waiting-time form of the first-order jump scheme: the unnormalized state follows
/// the exact propagator `exp(−i H_cond dt)`, and a jump fires when `‖ψ‖²` falls
/// below a uniform draw. Within the step the jump time is found by bisection, so
/// the only time discretization left is in where observables are sampled. The
/// channel is picked with weights `‖R_x ψ‖²` at the jump time.
///
/// Trajectory `k` draws from the ChaCha8 stream `k` of `seed`, and results are
/// reduced in trajectory order, so the output is independent of the thread count.
pub fn mcwf_trajectories(
    model: &OpenSystemModel,
    psi0: &QuantumState,
    observables: &[(&str, &Operator)],
    opts: &McwfOptions,
) -> Result<TrajectoryEnsemble> {
    if opts.n_traj == 0 {
        return Err(argument("n_traj must be positive"));
    }
    if !(opts.dt > 0.0 && opts.t_final > 0.0 && opts.t_final.is_finite()) {
        return Err(argument("dt and t_final must be positive and finite"));
    }
    let psi0_vec = psi0
        .ket()
        .ok_or_else(|| argument("trajectories need a pure initial state"))?;
    if psi0.space() != &model.space {
        return Err(argument(
            "initial state lives on a different Fock space than the model",
        ));
    }
    if (psi0_vec.norm() - 1.0).abs() > 1e-10 {
        return Err(argument("initial state must be normalized"));
    }
    let rate = expected_max_jump_rate(model, psi0);
    if opts.dt * rate >= MAX_JUMP_PROBABILITY {
        return Err(argument(format!(
            "dt = {} too large: dt x expected jump rate {rate:.4} must stay below {MAX_JUMP_PROBABILITY}",
            opts.dt
        )));
    }
    for (name, op) in observables {
        if op.space() != &model.space {
            return Err(argument(format!(
                "observable {name} lives on a different Fock space"
            )));
        }
    }

    let n_steps = (opts.t_final / opts.dt).round().max(1.0) as usize;
    let dt = opts.t_final / n_steps as f64;
    let mut sample_steps: Vec<usize> = Vec::with_capacity(opts.sample_times.len());
    for &t in &opts.sample_times {
        if !(0.0..=opts.t_final * (1.0 + 1e-12)).contains(&t) {
            return Err(argument(format!("sample time {t} outside [0, t_final]")));
        }
        sample_steps.push(((t / dt).round() as usize).min(n_steps));
    }

    let h = model.h_cond.to_dense();
    let steps = (0..=JUMP_TIME_BISECTIONS)
        .map(|k| (&h * (-I * dt / (1u64 << k) as f64)).exp())
        .collect();
    let props = Propagators {
        steps,
        jumps: model
            .jumps
            .iter()
            .filter(|j| j.op.nnz() > 0)
            .map(|j| (j.channel, j.op.csr().clone()))
            .collect(),
        observables: observables.iter().map(|(_, op)| op.csr().clone()).collect(),
    };

    let run = |k: usize| {
        run_trajectory(
            &props,
            psi0_vec,
            dt,
            n_steps,
            &sample_steps,
            opts.seed,
            k as u64,
        )
    };
    let results: Vec<Trajectory> = match opts.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Solver(format!("thread pool: {e}")))?
            .install(|| (0..opts.n_traj).into_par_iter().map(run).collect()),
        None => (0..opts.n_traj).into_par_iter().map(run).collect(),
    };

    let series = observables
        .iter()
        .enumerate()
        .map(|(o, (name, _))| {
            let (mean, std_err) = (0..sample_steps.len())
                .map(|s| {
                    let vals: Vec<f64> = results.iter().map(|r| r.samples[s][o]).collect();
                    mean_and_error(&vals)
                })
                .unzip();
            ObservableSeries {
                name: name.to_string(),
                mean,
                std_err,
            }
        })
        .collect();

    Ok(TrajectoryEnsemble {
        n_traj: opts.n_traj,
        seed: opts.seed,
        dt,
        t_final: opts.t_final,
        times: sample_steps.iter().map(|&s| s as f64 * dt).collect(),
        jumps: results.into_iter().map(|r| r.jumps).collect(),
        observables: series,
    })
}

struct Trajectory {
    jumps: Vec<JumpRecord>,
    /// `samples[sample][observable]`
    samples: Vec<Vec<f64>>,
}

/// Dense `m v` through faer's SIMD kernels; nalgebra's generic complex product is
/// several times slower and this is the inner loop of every trajectory.
fn matvec(m: &DMatrix<C64>, v: &DVector<C64>) -> DVector<C64> {
    let mut out = DVector::zeros(m.nrows());
    let a = faer::MatRef::from_column_major_slice(m.as_slice(), m.nrows(), m.ncols());
    let x = faer::MatRef::from_column_major_slice(v.as_slice(), v.len(), 1);
    let y = faer::MatMut::from_column_major_slice_mut(out.as_mut_slice(), m.nrows(), 1);
    faer::linalg::matmul::matmul(
        y,
        faer::Accum::Replace,
        a,
        x,
        C64::new(1.0, 0.0),
        faer::Par::Seq,
    );
    out
}

fn record(props: &Propagators, psi: &DVector<C64>) -> Vec<f64> {
    let norm = psi.norm_squared();
    props
        .observables
        .iter()
        .map(|o| psi.dotc(&(o * psi)).re / norm)
        .collect()
}

fn apply_jump(
    props: &Propagators,
    psi: &DVector<C64>,
    rng: &mut ChaCha8Rng,
) -> (Channel, DVector<C64>) {
    let candidates: Vec<(Channel, DVector<C64>)> =
        props.jumps.iter().map(|(c, r)| (*c, r * psi)).collect();
    let weights: Vec<f64> = candidates.iter().map(|(_, v)| v.norm_squared()).collect();
    let total: f64 = weights.iter().sum();
    let mut pick = rng.random::<f64>() * total;
    let mut chosen = candidates.len() - 1;
    for (i, w) in weights.iter().enumerate() {
        if pick < *w {
            chosen = i;
            break;
        }
        pick -= w;
    }
    // skip channels that cannot fire from this state
    while weights[chosen] == 0.0 && chosen > 0 {
        chosen -= 1;
    }
    let (channel, v) = candidates.into_iter().nth(chosen).expect("index in range");
    let norm = v.norm();
    (channel, v / C64::new(norm, 0.0))
}

struct Walker<'a> {
    props: &'a Propagators,
    rng: ChaCha8Rng,
    /// Jump threshold on `‖ψ‖²`.
    threshold: f64,
    jumps: Vec<JumpRecord>,
}

impl Walker<'_> {
    /// Advances `psi` from `t` by `dt / 2^level`, jumping whenever the norm
    /// crosses the threshold.
    fn advance(&mut self, psi: DVector<C64>, level: usize, t: f64, dt: f64) -> DVector<C64> {
        let next = matvec(&self.props.steps[level], &psi);
        if next.norm_squared() > self.threshold {
            return next;
        }
        let h = dt / (1u64 << level) as f64;
        if level == JUMP_TIME_BISECTIONS {
            let (channel, jumped) = apply_jump(self.props, &next, &mut self.rng);
            self.jumps.push(JumpRecord {
                time: t + h,
                channel,
            });
            self.threshold = self.rng.random();
            return jumped;
        }
        let mid = self.advance(psi, level + 1, t, dt);
        self.advance(mid, level + 1, t + 0.5 * h, dt)
    }
}

fn run_trajectory(
    props: &Propagators,
    psi0: &DVector<C64>,
    dt: f64,
    n_steps: usize,
    sample_steps: &[usize],
    seed: u64,
    stream: u64,
) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let threshold = rng.random();
    let mut walker = Walker {
        props,
        rng,
        threshold,
        jumps: Vec::new(),
    };
    let mut psi = psi0.clone();
    let mut samples = vec![Vec::new(); sample_steps.len()];
    let store = |step: usize, psi: &DVector<C64>, samples: &mut Vec<Vec<f64>>| {
        for (s, &target) in sample_steps.iter().enumerate() {
            if target == step {
                samples[s] = record(props, psi);
            }
        }
    };
    store(0, &psi, &mut samples);
    for step in 0..n_steps {
        psi = walker.advance(psi, 0, step as f64 * dt, dt);
        store(step + 1, &psi, &mut samples);
    }
    Trajectory {
        jumps: walker.jumps,
        samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::number;
    use crate::model::build_single_cavity;

    fn opts(n_traj: usize, seed: u64) -> McwfOptions {
        McwfOptions {
            t_final: 8.0,
            dt: 0.01,
            n_traj,
            seed,
            sample_times: vec![0.0, 1.0, 2.0],
            workers: None,
        }
    }

    #[test]
    fn one_photon_gives_one_jump() {
        let m = build_single_cavity(C64::new(0.0, 0.0), 1.0, 2).unwrap();
        let psi0 = QuantumState::fock(&m.space, [1, 0]).unwrap();
        let ens = mcwf_trajectories(&m, &psi0, &[], &opts(200, 3)).unwrap();
        // P(no jump by t = 8) = e^-8, so essentially every trajectory jumps once
        assert!(ens.jumps.iter().all(|j| j.len() <= 1));
        assert!(ens.jump_count(Channel::Cavity) >= 198);
        assert!(ens
            .jumps
            .iter()
            .flatten()
            .all(|j| j.time > 0.0 && j.time <= 8.0));
    }

    #[test]
    fn population_decay_matches_exponential() {
        let m = build_single_cavity(C64::new(0.0, 0.0), 1.0, 2).unwrap();
        let psi0 = QuantumState::fock(&m.space, [1, 0]).unwrap();
        let n = number(&m.space, 0).unwrap();
        let ens = mcwf_trajectories(&m, &psi0, &[("n", &n)], &opts(4000, 11)).unwrap();
        let s = ens.observable("n").unwrap();
        assert_eq!(s.mean[0], 1.0);
        for (i, &t) in ens.times.iter().enumerate().skip(1) {
            assert!(
                (s.mean[i] - (-t).exp()).abs() < 4.0 * s.std_err[i],
                "t = {t}"
            );
        }
    }

    #[test]
    fn reproducible_and_worker_independent() {
        let m = build_single_cavity(C64::new(0.5, 0.0), 1.0, 5).unwrap();
        let psi0 = QuantumState::fock(&m.space, [2, 0]).unwrap();
        let n = number(&m.space, 0).unwrap();
        let mut o = opts(50, 7);
        o.workers = Some(1);
        let a = mcwf_trajectories(&m, &psi0, &[("n", &n)], &o).unwrap();
        o.workers = Some(4);
        let b = mcwf_trajectories(&m, &psi0, &[("n", &n)], &o).unwrap();
        assert_eq!(a.jumps, b.jumps);
        assert_eq!(a.observables, b.observables);
        o.seed = 8;
        let c = mcwf_trajectories(&m, &psi0, &[("n", &n)], &o).unwrap();
        assert_ne!(a.jumps, c.jumps);
    }

    #[test]
    fn argument_checks() {
        let m = build_single_cavity(C64::new(0.0, 0.0), 1.0, 2).unwrap();
        let psi0 = QuantumState::fock(&m.space, [1, 0]).unwrap();
        assert!(mcwf_trajectories(&m, &psi0, &[], &opts(0, 1)).is_err());
        let mut o = opts(10, 1);
        o.dt = 0.5;
        assert!(matches!(
            mcwf_trajectories(&m, &psi0, &[], &o),
            Err(Error::Argument(_))
        ));
        assert!(mcwf_trajectories(&m, &psi0.to_mixed(), &[], &opts(10, 1)).is_err());
    }
}
