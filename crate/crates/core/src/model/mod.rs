//! Open-system models in four representations: a single cavity, two cavities
//! in local modes `c₁, c₂`, the same in common modes `c_a, c_b`, and the
//! effective single-mode model left after eliminating `c_b`.

mod builders;
mod frame;
mod params;
mod regime;

use std::fmt;

use nalgebra::{DMatrix, DVector};

pub use builders::{
    build_common, build_common_in, build_effective, build_local, build_local_in,
    build_single_cavity, recommended_space,
};
pub use frame::{make_frame, CommonModeFrame};
pub use params::SystemParams;
pub use regime::{validate_regime, RegimeCheck, RegimeOptions, RegimeReport, SPEED_OF_LIGHT};

use crate::fock::{FockSpace, Operator, C64, I};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representation {
    Single,
    Local,
    Common,
    Effective,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representation::Single => "single",
            Representation::Local => "local",
            Representation::Common => "common",
            Representation::Effective => "effective",
        })
    }
}

/// Emission channel of a reset operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    /// Mirror leakage of a lone cavity.
    Cavity,
    /// Outer mirror of cavity 1.
    Cavity1,
    /// Outer mirror of cavity 2.
    Cavity2,
    /// Absorption by the coated fiber.
    Fiber,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::Cavity => "c",
            Channel::Cavity1 => "1",
            Channel::Cavity2 => "2",
            Channel::Fiber => "m",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Jump {
    pub channel: Channel,
    pub op: Operator,
}

/// Conditional (no-jump) Hamiltonian plus reset operators on a truncated space.
#[derive(Clone, Debug)]
pub struct OpenSystemModel {
    pub representation: Representation,
    pub space: FockSpace,
    /// Non-Hermitian generator of the no-jump evolution, damping part included.
    pub h_cond: Operator,
    pub jumps: Vec<Jump>,
    /// Parameters the model was built from; `None` for the lone cavity.
    pub params: Option<SystemParams>,
}

/// Drive vector and damping matrix of a model that is linear in the mode operators:
/// `H = Σ_j (Ω_j/2) c_j + h.c.` and `Σ_x R_x†R_x = Σ_jk Γ_jk c_j† c_k`.
#[derive(Clone, Debug)]
pub struct MeanField {
    pub drive: DVector<C64>,
    pub damping: DMatrix<C64>,
}

impl MeanField {
    /// Steady amplitudes `⟨c_j⟩ = −i Γ⁻¹ Ω*`, if the damping matrix is invertible.
    pub fn steady_amplitudes(&self) -> Option<DVector<C64>> {
        let rhs = self.drive.map(|o| -I * o.conj());
        self.damping.clone().lu().solve(&rhs)
    }

    /// Largest eigenvalue of the (Hermitian) damping matrix: the fastest
    /// one-photon decay rate.
    pub fn max_rate(&self) -> f64 {
        let herm = (&self.damping + self.damping.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }
}

impl OpenSystemModel {
    /// `Σ_x R_x† R_x`.
    pub fn damping_operator(&self) -> Operator {
        self.jumps
            .iter()
            .fold(Operator::zero(&self.space), |acc, j| {
                acc.add(
                    &j.op
                        .adjoint()
                        .compose(&j.op)
                        .expect("jumps share the model space"),
                )
                .expect("jumps share the model space")
            })
    }

    /// Hermitian Hamiltonian `H_cond + (i/2) Σ R†R`.
    pub fn hamiltonian(&self) -> Operator {
        self.h_cond
            .add(&self.damping_operator().scale(C64::new(0.0, 0.5)))
            .expect("same space")
    }

    /// Largest entry of the anti-Hermitian part of `H_cond + (i/2)ΣR†R`; zero for a
    /// model in proper Lindblad form.
    pub fn lindblad_defect(&self) -> f64 {
        self.hamiltonian().anti_hermitian_part().max_abs()
    }

    pub fn jump(&self, channel: Channel) -> Option<&Jump> {
        self.jumps.iter().find(|j| j.channel == channel)
    }

    /// Reads the drive and damping coefficients off the one-photon matrix elements.
    pub fn mean_field(&self) -> MeanField {
        let n = self.space.n_modes();
        let vac = self.space.index_of([0, 0]).expect("vacuum");
        let one: Vec<usize> = (0..n)
            .map(|m| {
                let mut occ = [0, 0];
                occ[m] = 1;
                self.space
                    .index_of(occ)
                    .expect("cutoff >= 1 keeps one-photon states")
            })
            .collect();
        let h = self.hamiltonian();
        let d = self.damping_operator();
        let drive = DVector::from_fn(n, |j, _| h.get(vac, one[j]) * 2.0);
        let damping = DMatrix::from_fn(n, n, |j, k| d.get(one[j], one[k]));
        MeanField { drive, damping }
    }

    /// Total one-photon decay rate plus drive strengths; sets the integrator step bound.
    pub fn total_rate_bound(&self) -> f64 {
        let mf = self.mean_field();
        let drive: f64 = mf.drive.iter().map(|o| o.norm()).sum();
        mf.damping.trace().re.max(mf.max_rate()) + drive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_field_of_single_cavity() {
        let m = build_single_cavity(C64::new(0.6, 0.8), 2.0, 4).unwrap();
        let mf = m.mean_field();
        assert!((mf.drive[0] - C64::new(0.6, 0.8)).norm() < 1e-14);
        assert!((mf.damping[(0, 0)].re - 2.0).abs() < 1e-14);
        let alpha = mf.steady_amplitudes().unwrap()[0];
        assert!((alpha.norm() - 0.5).abs() < 1e-14);
    }
}
