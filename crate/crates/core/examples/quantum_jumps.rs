//! Quantum-jump trajectories of the local model, compared with the master
//! equation, and the emission rate into each channel.

use std::f64::consts::PI;

use cavitylink::fock::{number, QuantumState};
use cavitylink::model::{build_local, Channel, SystemParams};
use cavitylink::solvers::{evolve_master_at, mcwf_trajectories, EvolveOptions, McwfOptions};

fn main() -> cavitylink::Result<()> {
    let p = SystemParams::symmetric(1.0, 1.0, 8.0, PI / 2.0)?;
    let model = build_local(&p, 5)?;
    let n1 = number(&model.space, 0)?;
    let psi0 = QuantumState::fock(&model.space, [1, 0])?;
    let times: Vec<f64> = (0..=8).map(|k| 0.5 * k as f64).collect();
    let ens = mcwf_trajectories(
        &model,
        &psi0,
        &[("n_1", &n1)],
        &McwfOptions {
            t_final: 4.0,
            dt: 0.005,
            n_traj: 500,
            seed: 1,
            sample_times: times.clone(),
            workers: None,
        },
    )?;
    let exact = evolve_master_at(&model, &psi0.to_mixed(), &times, &EvolveOptions::default())?
        .expectation(&n1)?;
    let s = ens.observable("n_1").expect("recorded");
    println!("{:>5} {:>10} {:>10} {:>10}", "t", "mcwf", "± se", "master");
    for (k, t) in ens.times.iter().enumerate() {
        println!(
            "{t:>5.2} {:>10.5} {:>10.5} {:>10.5}",
            s.mean[k], s.std_err[k], exact[k].re
        );
    }
    for channel in [Channel::Cavity1, Channel::Cavity2, Channel::Fiber] {
        let (rate, se) = ens.emission_rate(channel, 2.0, 4.0);
        println!("{channel}: {rate:.4} ± {se:.4} photons per unit time on t ∈ (2, 4]");
    }
    Ok(())
}
