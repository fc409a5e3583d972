//! Truncated Fock-space operator algebra for one or two bosonic modes.
//!
//! Operators are stored as CSR matrices with sorted column indices, so two
//! builds from the same inputs are bit-identical. States are dense.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// How the infinite-dimensional mode space is cut off.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Every mode keeps photon numbers `0..=cutoff`; dimension `(cutoff+1)^modes`.
    #[default]
    PerMode,
    /// Keep states whose total photon number is at most `cutoff`. This subspace
    /// is invariant under passive mode rotations such as `c1,c2 -> c_a,c_b`.
    TotalNumber,
}

/// Basis of a truncated one- or two-mode Fock space.
#[derive(Clone)]
pub struct FockSpace {
    n_modes: usize,
    /// Largest photon number per mode (box) or in total (total-number truncation).
    cutoffs: [usize; 2],
    truncation: Truncation,
    occupations: Arc<Vec<[usize; 2]>>,
}

impl PartialEq for FockSpace {
    fn eq(&self, other: &Self) -> bool {
        self.n_modes == other.n_modes
            && self.cutoffs == other.cutoffs
            && self.truncation == other.truncation
    }
}

impl Eq for FockSpace {}

impl fmt::Debug for FockSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FockSpace")
            .field("n_modes", &self.n_modes)
            .field("cutoffs", &self.cutoffs)
            .field("truncation", &self.truncation)
            .field("dim", &self.dim())
            .finish()
    }
}

impl FockSpace {
    /// Per-mode (box) truncation.
    pub fn new(n_modes: usize, cutoff: usize) -> Result<Self> {
        Self::with_truncation(n_modes, cutoff, Truncation::PerMode)
    }

    pub fn with_truncation(n_modes: usize, cutoff: usize, truncation: Truncation) -> Result<Self> {
        if !(1..=2).contains(&n_modes) {
            return Err(argument(format!("n_modes must be 1 or 2, got {n_modes}")));
        }
        let cutoffs = if n_modes == 1 {
            [cutoff, 0]
        } else {
            [cutoff, cutoff]
        };
        Self::build(n_modes, cutoffs, truncation)
    }

    /// Two-mode box with its own cutoff per mode.
    pub fn with_cutoffs(cutoffs: [usize; 2]) -> Result<Self> {
        Self::build(2, cutoffs, Truncation::PerMode)
    }

    fn build(n_modes: usize, cutoffs: [usize; 2], truncation: Truncation) -> Result<Self> {
        if cutoffs[..n_modes].contains(&0) {
            return Err(argument("cutoff must be at least 1"));
        }
        let mut occupations = Vec::new();
        if n_modes == 1 {
            occupations.extend((0..=cutoffs[0]).map(|n| [n, 0]));
        } else {
            for n0 in 0..=cutoffs[0] {
                let top = match truncation {
                    Truncation::PerMode => cutoffs[1],
                    Truncation::TotalNumber => cutoffs[0] - n0,
                };
                occupations.extend((0..=top).map(|n1| [n0, n1]));
            }
        }
        Ok(Self {
            n_modes,
            cutoffs,
            truncation,
            occupations: Arc::new(occupations),
        })
    }

    pub fn single(cutoff: usize) -> Result<Self> {
        Self::new(1, cutoff)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Largest retained photon number of any mode (the total for total-number truncation).
    pub fn cutoff(&self) -> usize {
        self.cutoffs[0].max(self.cutoffs[1])
    }

    /// Per-mode cutoffs; the second entry is 0 for a single mode.
    pub fn cutoffs(&self) -> [usize; 2] {
        self.cutoffs
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn dim(&self) -> usize {
        self.occupations.len()
    }

    /// Photon numbers of basis state `index` (second entry is 0 for one mode).
    pub fn occupation(&self, index: usize) -> [usize; 2] {
        self.occupations[index]
    }

    pub fn total_photons(&self, index: usize) -> usize {
        let [a, b] = self.occupations[index];
        a + b
    }

    /// Basis index of the given occupation numbers, if retained by the truncation.
    pub fn index_of(&self, occ: [usize; 2]) -> Option<usize> {
        let [n0, n1] = occ;
        let [c0, c1] = self.cutoffs;
        let n = c0;
        if self.n_modes == 1 {
            return (n1 == 0 && n0 <= n).then_some(n0);
        }
        match self.truncation {
            Truncation::PerMode => (n0 <= c0 && n1 <= c1).then(|| n0 * (c1 + 1) + n1),
            Truncation::TotalNumber => {
                (n0 + n1 <= n).then(|| n0 * (n + 1) - n0 * n0.saturating_sub(1) / 2 + n1)
            }
        }
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes {
            return Err(argument(format!(
                "mode index {mode} out of range for a {}-mode space",
                self.n_modes
            )));
        }
        Ok(())
    }
}

/// Sparse complex operator on a [`FockSpace`].
#[derive(Clone, Debug)]
pub struct Operator {
    space: FockSpace,
    mat: CsrMatrix<C64>,
}

fn pruned(mat: &CsrMatrix<C64>) -> CsrMatrix<C64> {
    let mut coo = CooMatrix::new(mat.nrows(), mat.ncols());
    for (i, j, v) in mat.triplet_iter() {
        if *v != ZERO {
            coo.push(i, j, *v);
        }
    }
    CsrMatrix::from(&coo)
}

impl Operator {
    /// Builds an operator from `(row, col, value)` entries. Duplicates are summed
    /// and exact zeros dropped.
    pub fn from_triplets(space: &FockSpace, entries: &[(usize, usize, C64)]) -> Result<Self> {
        let dim = space.dim();
        let mut coo = CooMatrix::new(dim, dim);
        for &(i, j, v) in entries {
            if i >= dim || j >= dim {
                return Err(argument(format!(
                    "entry ({i}, {j}) outside dimension {dim}"
                )));
            }
            coo.push(i, j, v);
        }
        Ok(Self::from_csr(space, CsrMatrix::from(&coo)))
    }

    fn from_csr(space: &FockSpace, mat: CsrMatrix<C64>) -> Self {
        Self {
            space: space.clone(),
            mat: pruned(&mat),
        }
    }

    pub fn zero(space: &FockSpace) -> Self {
        let dim = space.dim();
        Self {
            space: space.clone(),
            mat: CsrMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(space: &FockSpace) -> Self {
        Self {
            space: space.clone(),
            mat: CsrMatrix::identity(space.dim()),
        }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn csr(&self) -> &CsrMatrix<C64> {
        &self.mat
    }

    pub fn nnz(&self) -> usize {
        self.mat.nnz()
    }

    /// Matrix element `<row|op|col>`.
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat
            .get_entry(row, col)
            .map(|e| e.into_value())
            .unwrap_or(ZERO)
    }

    fn check_space(&self, other: &FockSpace) -> Result<()> {
        if &self.space != other {
            return Err(argument(format!(
                "Fock space mismatch: {:?} vs {:?}",
                self.space, other
            )));
        }
        Ok(())
    }

    pub fn compose(&self, rhs: &Operator) -> Result<Operator> {
        self.check_space(&rhs.space)?;
        Ok(Self::from_csr(&self.space, &self.mat * &rhs.mat))
    }

    pub fn add(&self, rhs: &Operator) -> Result<Operator> {
        self.check_space(&rhs.space)?;
        Ok(Self::from_csr(&self.space, &self.mat + &rhs.mat))
    }

    pub fn sub(&self, rhs: &Operator) -> Result<Operator> {
        self.check_space(&rhs.space)?;
        Ok(Self::from_csr(&self.space, &self.mat - &rhs.mat))
    }

    pub fn scale(&self, factor: C64) -> Operator {
        if factor == ZERO {
            return Self::zero(&self.space);
        }
        Self::from_csr(&self.space, &self.mat * factor)
    }

    pub fn adjoint(&self) -> Operator {
        let mut t = self.mat.transpose();
        t.values_mut().iter_mut().for_each(|v| *v = v.conj());
        Self {
            space: self.space.clone(),
            mat: t,
        }
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Operator) -> Result<Operator> {
        self.compose(rhs)?.sub(&rhs.compose(self)?)
    }

    /// `Σ_k c_k · op_k` over operators on a common space.
    pub fn linear_combination(space: &FockSpace, terms: &[(C64, &Operator)]) -> Result<Operator> {
        let mut acc = Self::zero(space);
        for (c, op) in terms {
            acc.check_space(&op.space)?;
            if *c != ZERO {
                acc = Self::from_csr(space, &acc.mat + &(&op.mat * *c));
            }
        }
        Ok(acc)
    }

    /// `(self − self†)/2`, the part that changes sign under the adjoint.
    pub fn anti_hermitian_part(&self) -> Operator {
        let adj = self.adjoint();
        Self::from_csr(&self.space, &(&self.mat - &adj.mat) * C64::new(0.5, 0.0))
    }

    pub fn hermitian_part(&self) -> Operator {
        let adj = self.adjoint();
        Self::from_csr(&self.space, &(&self.mat + &adj.mat) * C64::new(0.5, 0.0))
    }

    /// Largest entry-wise modulus of `self − rhs`.
    pub fn max_abs_diff(&self, rhs: &Operator) -> Result<f64> {
        let diff = self.sub(rhs)?;
        Ok(diff.max_abs())
    }

    pub fn max_abs(&self) -> f64 {
        self.mat
            .values()
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, psi: &DVector<C64>) -> DVector<C64> {
        &self.mat * psi
    }

    /// `op · m` for a dense square matrix.
    pub fn mul_dense(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        &self.mat * m
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let dim = self.space.dim();
        let mut d = DMatrix::zeros(dim, dim);
        for (i, j, v) in self.mat.triplet_iter() {
            d[(i, j)] = *v;
        }
        d
    }
}

/// Bosonic annihilation operator of `mode`: `a|n⟩ = √n |n−1⟩`.
pub fn annihilation(space: &FockSpace, mode: usize) -> Result<Operator> {
    space.check_mode(mode)?;
    let mut entries = Vec::with_capacity(space.dim());
    for col in 0..space.dim() {
        let occ = space.occupation(col);
        let n = occ[mode];
        if n == 0 {
            continue;
        }
        let mut lowered = occ;
        lowered[mode] -= 1;
        let row = space
            .index_of(lowered)
            .expect("lowering stays inside every truncation");
        entries.push((row, col, C64::new((n as f64).sqrt(), 0.0)));
    }
    Operator::from_triplets(space, &entries)
}

pub fn creation(space: &FockSpace, mode: usize) -> Result<Operator> {
    Ok(annihilation(space, mode)?.adjoint())
}

pub fn number(space: &FockSpace, mode: usize) -> Result<Operator> {
    space.check_mode(mode)?;
    let entries: Vec<_> = (0..space.dim())
        .filter_map(|i| {
            let n = space.occupation(i)[mode];
            (n > 0).then(|| (i, i, C64::new(n as f64, 0.0)))
        })
        .collect();
    Operator::from_triplets(space, &entries)
}

/// Total photon number `Σ_modes a†a`.
pub fn total_number(space: &FockSpace) -> Operator {
    let entries: Vec<_> = (0..space.dim())
        .filter_map(|i| {
            let n = space.total_photons(i);
            (n > 0).then(|| (i, i, C64::new(n as f64, 0.0)))
        })
        .collect();
    Operator::from_triplets(space, &entries).expect("diagonal entries are in range")
}

/// Dense state: a normalized ket or a density matrix.
#[derive(Clone, Debug)]
pub enum StateData {
    Pure(DVector<C64>),
    Mixed(DMatrix<C64>),
}

#[derive(Clone, Debug)]
pub struct QuantumState {
    space: FockSpace,
    data: StateData,
}

impl QuantumState {
    pub fn pure(space: &FockSpace, psi: DVector<C64>) -> Result<Self> {
        if psi.len() != space.dim() {
            return Err(argument(format!(
                "state vector length {} does not match dimension {}",
                psi.len(),
                space.dim()
            )));
        }
        Ok(Self {
            space: space.clone(),
            data: StateData::Pure(psi),
        })
    }

    pub fn mixed(space: &FockSpace, rho: DMatrix<C64>) -> Result<Self> {
        let d = space.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(argument(format!(
                "density matrix shape {}x{} does not match dimension {d}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        Ok(Self {
            space: space.clone(),
            data: StateData::Mixed(rho),
        })
    }

    /// Fock basis state with the given photon numbers.
    pub fn fock(space: &FockSpace, occ: [usize; 2]) -> Result<Self> {
        let idx = space
            .index_of(occ)
            .ok_or_else(|| argument(format!("occupation {occ:?} outside the truncated space")))?;
        let mut psi = DVector::zeros(space.dim());
        psi[idx] = ONE;
        Self::pure(space, psi)
    }

    pub fn vacuum(space: &FockSpace) -> Self {
        Self::fock(space, [0, 0]).expect("vacuum is always retained")
    }

    /// Product coherent state with amplitudes per mode, built from explicit
    /// Poisson amplitudes `e^{-|α|²/2} αⁿ/√n!` and renormalized on the truncated space.
    pub fn coherent(space: &FockSpace, alphas: &[C64]) -> Result<Self> {
        if alphas.len() != space.n_modes() {
            return Err(argument(format!(
                "expected {} amplitudes, got {}",
                space.n_modes(),
                alphas.len()
            )));
        }
        let amp = |alpha: C64, n: usize| -> C64 {
            let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
            for k in 1..=n {
                c *= alpha / (k as f64).sqrt();
            }
            c
        };
        let psi = DVector::from_fn(space.dim(), |i, _| {
            let occ = space.occupation(i);
            alphas
                .iter()
                .enumerate()
                .map(|(m, &a)| amp(a, occ[m]))
                .product::<C64>()
        });
        let norm = psi.norm();
        Self::pure(space, psi / C64::new(norm, 0.0))
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn ket(&self) -> Option<&DVector<C64>> {
        match &self.data {
            StateData::Pure(psi) => Some(psi),
            StateData::Mixed(_) => None,
        }
    }

    /// Density matrix; a ket `ψ` becomes `ψψ†`.
    pub fn density(&self) -> DMatrix<C64> {
        match &self.data {
            StateData::Pure(psi) => psi * psi.adjoint(),
            StateData::Mixed(rho) => rho.clone(),
        }
    }

    pub fn to_mixed(&self) -> Self {
        Self {
            space: self.space.clone(),
            data: StateData::Mixed(self.density()),
        }
    }

    /// Trace of the density matrix (squared norm for a ket).
    pub fn trace(&self) -> f64 {
        match &self.data {
            StateData::Pure(psi) => psi.norm_squared(),
            StateData::Mixed(rho) => rho.trace().re,
        }
    }

    /// Largest entry of `ρ − ρ†` (zero for kets).
    pub fn hermiticity_error(&self) -> f64 {
        match &self.data {
            StateData::Pure(_) => 0.0,
            StateData::Mixed(rho) => (rho - rho.adjoint())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
        }
    }

    /// Smallest eigenvalue of the Hermitian part of the density matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let rho = self.density();
        let herm = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Population of basis states sitting on the truncation boundary.
    pub fn boundary_population(&self) -> f64 {
        let [c0, c1] = self.space.cutoffs();
        let on_edge = |i: usize| {
            let [a, b] = self.space.occupation(i);
            match self.space.truncation() {
                Truncation::PerMode => a == c0 || (self.space.n_modes() == 2 && b == c1),
                Truncation::TotalNumber => a + b == c0,
            }
        };
        let rho_diag: Vec<f64> = match &self.data {
            StateData::Pure(psi) => psi.iter().map(|z| z.norm_sqr()).collect(),
            StateData::Mixed(rho) => rho.diagonal().iter().map(|z| z.re).collect(),
        };
        rho_diag
            .iter()
            .enumerate()
            .filter(|(i, _)| on_edge(*i))
            .map(|(_, p)| *p)
            .sum::<f64>()
            / self.trace()
    }
}

/// `⟨ψ|op|ψ⟩` for kets, `tr(op·ρ)` for density matrices.
pub fn expectation(op: &Operator, state: &QuantumState) -> Result<C64> {
    op.check_space(&state.space)?;
    match &state.data {
        StateData::Pure(psi) => Ok(psi.dotc(&op.apply(psi))),
        StateData::Mixed(rho) => {
            let tr = rho.trace().re;
            if (tr - 1.0).abs() > 1e-6 {
                log::warn!("expectation on density matrix with trace {tr}");
            }
            let mut acc = ZERO;
            for (i, j, v) in op.csr().triplet_iter() {
                acc += v * rho[(j, i)];
            }
            Ok(acc)
        }
    }
}

/// Poisson tail `P(n > cutoff)` for mean `mean`.
pub fn poisson_tail(mean: f64, cutoff: usize) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    let mut p = (-mean).exp();
    let mut cdf = p;
    for n in 1..=cutoff {
        p *= mean / n as f64;
        cdf += p;
    }
    // sum the tail directly once the cdf saturates in double precision
    if 1.0 - cdf > 1e-12 {
        return (1.0 - cdf).max(0.0);
    }
    let mut tail = 0.0;
    let mut term = p;
    let mut n = cutoff;
    loop {
        n += 1;
        term *= mean / n as f64;
        tail += term;
        if term < tail * 1e-17 || term == 0.0 {
            break;
        }
    }
    tail
}

/// Smallest cutoff (at least 1) whose Poisson tail at `mean` photons is below `tail`.
pub fn recommend_cutoff(mean_photons: f64, tail: f64) -> usize {
    let mut n = 1;
    while poisson_tail(mean_photons, n) >= tail {
        n += 1;
    }
    n
}

/// Default tail target for [`recommend_cutoff`].
pub const DEFAULT_TAIL: f64 = 1e-10;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_matrix_elements() {
        let s = FockSpace::single(3).unwrap();
        let a = annihilation(&s, 0).unwrap();
        assert_eq!(a.get(1, 2), C64::new(2f64.sqrt(), 0.0));
        assert_eq!(a.get(0, 1), ONE);
        assert_eq!(a.get(2, 1), ZERO);
        let ad = creation(&s, 0).unwrap();
        assert_eq!(ad.get(2, 1), C64::new(2f64.sqrt(), 0.0));
    }

    #[test]
    fn lowering_the_vacuum_gives_zero() {
        let s = FockSpace::single(2).unwrap();
        let a = annihilation(&s, 0).unwrap();
        let one = QuantumState::fock(&s, [1, 0]).unwrap();
        let out = a.apply(one.ket().unwrap());
        assert_eq!(out[0], ONE);
        let vac = QuantumState::vacuum(&s);
        assert_eq!(a.apply(vac.ket().unwrap()).norm(), 0.0);
    }

    #[test]
    fn mode_out_of_range() {
        let s = FockSpace::new(2, 2).unwrap();
        assert!(matches!(
            annihilation(&s, 2),
            Err(crate::Error::Argument(_))
        ));
        assert!(FockSpace::new(3, 2).is_err());
        assert!(FockSpace::new(1, 0).is_err());
    }

    #[test]
    fn dimensions() {
        assert_eq!(FockSpace::new(2, 5).unwrap().dim(), 36);
        assert_eq!(FockSpace::new(1, 5).unwrap().dim(), 6);
        let t = FockSpace::with_truncation(2, 4, Truncation::TotalNumber).unwrap();
        assert_eq!(t.dim(), 15);
        for i in 0..t.dim() {
            assert_eq!(t.index_of(t.occupation(i)), Some(i));
        }
        let b = FockSpace::new(2, 3).unwrap();
        for i in 0..b.dim() {
            assert_eq!(b.index_of(b.occupation(i)), Some(i));
        }
    }

    #[test]
    fn number_operator_from_product() {
        let s = FockSpace::single(4).unwrap();
        let a = annihilation(&s, 0).unwrap();
        let n = a.adjoint().compose(&a).unwrap();
        for k in 0..=4 {
            assert!((n.get(k, k).re - k as f64).abs() < 1e-14);
        }
        assert!(n.max_abs_diff(&number(&s, 0).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn no_stored_zeros_after_cancellation() {
        let s = FockSpace::single(3).unwrap();
        let a = annihilation(&s, 0).unwrap();
        let z = a.sub(&a).unwrap();
        assert_eq!(z.nnz(), 0);
    }

    #[test]
    fn space_mismatch_is_rejected() {
        let s1 = FockSpace::single(3).unwrap();
        let s2 = FockSpace::single(4).unwrap();
        let a = annihilation(&s1, 0).unwrap();
        let b = annihilation(&s2, 0).unwrap();
        assert!(a.compose(&b).is_err());
        assert!(expectation(&a, &QuantumState::vacuum(&s2)).is_err());
    }

    #[test]
    fn fock_expectations() {
        let s = FockSpace::single(3).unwrap();
        let n = number(&s, 0).unwrap();
        assert_eq!(expectation(&n, &QuantumState::vacuum(&s)).unwrap(), ZERO);
        let one = QuantumState::fock(&s, [1, 0]).unwrap();
        assert!((expectation(&n, &one).unwrap().re - 1.0).abs() < 1e-15);
        assert!((expectation(&n, &one.to_mixed()).unwrap().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uneven_box() {
        let s = FockSpace::with_cutoffs([3, 1]).unwrap();
        assert_eq!(s.dim(), 8);
        assert_eq!(s.cutoff(), 3);
        for i in 0..s.dim() {
            assert_eq!(s.index_of(s.occupation(i)), Some(i));
        }
        assert_eq!(s.index_of([1, 2]), None);
        let b = annihilation(&s, 1).unwrap();
        let comm = b.commutator(&b.adjoint()).unwrap();
        // [b, b†] = 1 except on the b-cutoff edge
        assert_eq!(
            comm.get(s.index_of([2, 0]).unwrap(), s.index_of([2, 0]).unwrap()),
            ONE
        );
        let edge = QuantumState::fock(&s, [0, 1]).unwrap();
        assert_eq!(edge.boundary_population(), 1.0);
        assert!(FockSpace::with_cutoffs([2, 0]).is_err());
    }

    #[test]
    fn cutoff_rule() {
        // P(n > 10) at mean 1 is about 1.0e-8; P(n > 11) about 8.3e-10
        assert_eq!(recommend_cutoff(1.0, 1e-8), 11);
        assert_eq!(recommend_cutoff(0.0, 1e-8), 1);
        assert!(poisson_tail(4.0, 16) < 1e-5);
    }
}
