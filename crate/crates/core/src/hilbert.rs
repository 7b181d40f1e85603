//! State spaces, density matrices and the Jordan-Schwinger relabeling between
//! a two-mode Fock sector with 2j excitations and the spin-j space.
//!
//! Basis conventions: spin and sector blocks are ordered by descending m
//! (index 0 is m = +j); two-mode Fock states (n1, n2) are ordered
//! lexicographically with index n1 (N+1) + n2 for per-mode cutoff N.

use crate::error::{Error, Result};
use crate::specfun::HalfInt;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

pub const DEFAULT_CUTOFF: usize = 24;

const C0: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Spin { j: HalfInt },
    Fock1 { cutoff: usize },
    Fock2 { cutoff: usize },
}

impl Basis {
    pub fn dim(&self) -> usize {
        match *self {
            Basis::Spin { j } => j.dim(),
            Basis::Fock1 { cutoff } => cutoff + 1,
            Basis::Fock2 { cutoff } => (cutoff + 1) * (cutoff + 1),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Basis::Spin { .. } => "spin",
            Basis::Fock1 { .. } => "fock1",
            Basis::Fock2 { .. } => "fock2",
        }
    }
}

/// Density matrix over one of the supported bases.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    basis: Basis,
    data: DMatrix<Complex64>,
}

/// Summary of the checks made by [`DensityMatrix::diagnostics`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateDiagnostics {
    pub hermiticity_error: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl DensityMatrix {
    /// Validated constructor: Hermitian and unit trace to 1e-12, eigenvalues >= -1e-10.
    pub fn new(basis: Basis, data: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self::from_raw(basis, data)?;
        let d = rho.diagnostics();
        if d.hermiticity_error > 1e-12 {
            return Err(Error::InvalidState(format!("not Hermitian (error {:e})", d.hermiticity_error)));
        }
        if d.trace_error > 1e-12 {
            return Err(Error::InvalidState(format!("trace deviates from 1 by {:e}", d.trace_error)));
        }
        if d.min_eigenvalue < -1e-10 {
            return Err(Error::InvalidState(format!("negative eigenvalue {:e}", d.min_eigenvalue)));
        }
        Ok(rho)
    }

    /// Shape-checked constructor without physical checks; used for reconstructions
    /// whose quadrature noise should stay visible.
    pub fn from_raw(basis: Basis, data: DMatrix<Complex64>) -> Result<Self> {
        let dim = basis.dim();
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::InvalidState(format!(
                "{} basis needs a {dim}x{dim} matrix, got {}x{}",
                basis.name(),
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(DensityMatrix { basis, data })
    }

    pub fn pure(basis: Basis, amplitudes: &DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = amplitudes / Complex64::new(norm, 0.0);
        Self::from_raw(basis, &v * v.adjoint())
    }

    pub fn maximally_mixed(basis: Basis) -> Self {
        let dim = basis.dim();
        let data = DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
        DensityMatrix { basis, data }
    }

    pub fn fock(cutoff: usize, n: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::CutoffTooSmall { cutoff, reason: format!("Fock state |{n}>") });
        }
        let mut v = DVector::from_element(cutoff + 1, C0);
        v[n] = Complex64::new(1.0, 0.0);
        Self::pure(Basis::Fock1 { cutoff }, &v)
    }

    /// Coherent state |gamma> truncated at the cutoff (renormalized after truncation).
    pub fn coherent(cutoff: usize, gamma: Complex64) -> Result<Self> {
        let mut v = DVector::from_element(cutoff + 1, C0);
        let mut term = Complex64::new((-0.5 * gamma.norm_sqr()).exp(), 0.0);
        for n in 0..=cutoff {
            if n > 0 {
                term *= gamma / (n as f64).sqrt();
            }
            v[n] = term;
        }
        Self::pure(Basis::Fock1 { cutoff }, &v)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        let herm = (&self.data - self.data.adjoint()).camax();
        let trace_error = (self.data.trace() - Complex64::new(1.0, 0.0)).norm();
        let h = hermitian_part(&self.data);
        let min_eigenvalue = SymmetricEigen::new(h).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        StateDiagnostics { hermiticity_error: herm, trace_error, min_eigenvalue }
    }

    /// Replaces the matrix by its Hermitian part.
    pub fn hermitize(mut self) -> Self {
        self.data = hermitian_part(&self.data);
        self
    }

    /// Divides by the trace; returns the trace that was removed.
    pub fn normalize_trace(&mut self) -> Result<f64> {
        let t = self.data.trace().re;
        if t.abs() < 1e-300 {
            return Err(Error::InvalidState("zero trace".into()));
        }
        self.data /= Complex64::new(t, 0.0);
        Ok(t)
    }

    /// Explicit repair: Hermitize, clip negative eigenvalues, renormalize.
    pub fn repair(&self) -> Result<Self> {
        let eig = SymmetricEigen::new(hermitian_part(&self.data));
        let vals = eig.eigenvalues.map(|v| Complex64::new(v.max(0.0), 0.0));
        let v = &eig.eigenvectors;
        let data = v * DMatrix::from_diagonal(&vals) * v.adjoint();
        let mut out = DensityMatrix { basis: self.basis, data };
        out.normalize_trace()?;
        Ok(out)
    }

    /// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch {
                expected: format!("{:?}", self.basis),
                found: format!("{:?}", other.basis),
            });
        }
        Ok(fidelity(&self.data, &other.data))
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.data - &other.data).camax()
    }
}

pub fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let vals = eig.eigenvalues.map(|v| Complex64::new(v.max(0.0).sqrt(), 0.0));
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&vals) * v.adjoint()
}

/// Uhlmann fidelity between two (approximately) positive matrices, as the
/// squared nuclear norm of sqrt(rho) sqrt(sigma).
pub fn fidelity(rho: &DMatrix<Complex64>, sigma: &DMatrix<Complex64>) -> f64 {
    let prod = psd_sqrt(rho) * psd_sqrt(sigma);
    let tr: f64 = prod.singular_values().iter().sum();
    tr * tr
}

/// Occupations (n1, n2) of a two-mode Fock state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwoModeIndex {
    pub n1: usize,
    pub n2: usize,
}

impl TwoModeIndex {
    pub fn new(n1: usize, n2: usize) -> Self {
        TwoModeIndex { n1, n2 }
    }

    pub fn flat(self, cutoff: usize) -> usize {
        self.n1 * (cutoff + 1) + self.n2
    }

    pub fn from_flat(idx: usize, cutoff: usize) -> Self {
        TwoModeIndex { n1: idx / (cutoff + 1), n2: idx % (cutoff + 1) }
    }
}

/// (n1, n2) -> (j, m) = ((n1+n2)/2, (n1-n2)/2).
pub fn js_relabel(state: TwoModeIndex) -> (HalfInt, HalfInt) {
    let (n1, n2) = (state.n1 as i64, state.n2 as i64);
    (HalfInt::from_twice(n1 + n2), HalfInt::from_twice(n1 - n2))
}

/// Inverse relabeling: (j, m) -> (j+m, j-m).
pub fn js_occupations(j: HalfInt, m: HalfInt) -> TwoModeIndex {
    TwoModeIndex::new(((j.twice() + m.twice()) / 2) as usize, ((j.twice() - m.twice()) / 2) as usize)
}

/// Flat two-mode indices of sector S_{2j}, in descending-m order.
pub fn sector_indices(j: HalfInt, cutoff: usize) -> Result<Vec<usize>> {
    if j.twice() < 0 {
        return Err(Error::LabelOutOfRange(format!("j = {j}")));
    }
    if (j.twice() as usize) > cutoff {
        return Err(Error::CutoffTooSmall { cutoff, reason: format!("sector 2j = {} exceeds it", j.twice()) });
    }
    Ok(j.projections().map(|m| js_occupations(j, m).flat(cutoff)).collect())
}

fn fock2_cutoff(rho: &DensityMatrix) -> Result<usize> {
    match rho.basis() {
        Basis::Fock2 { cutoff } => Ok(cutoff),
        b => Err(Error::BasisMismatch { expected: "fock2".into(), found: b.name().into() }),
    }
}

/// Block Pi rho Pi of sector 2j (descending m) and its weight Tr[Pi rho].
pub fn project_sector(rho2: &DensityMatrix, j: HalfInt) -> Result<(DMatrix<Complex64>, f64)> {
    let cutoff = fock2_cutoff(rho2)?;
    let idx = sector_indices(j, cutoff)?;
    let m = rho2.matrix();
    let block = DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])]);
    let weight = block.trace().re;
    if weight < 1e-14 {
        return Err(Error::EmptySector { twice_j: j.twice(), weight });
    }
    Ok((block, weight))
}

/// Renormalized spin-j density matrix of sector S_{2j}.
pub fn js_forward(rho2: &DensityMatrix, j: HalfInt) -> Result<DensityMatrix> {
    let (block, weight) = project_sector(rho2, j)?;
    DensityMatrix::from_raw(Basis::Spin { j }, block / Complex64::new(weight, 0.0))
}

/// Embeds a spin-j density matrix into sector S_{2j} of a two-mode Fock space.
pub fn js_inverse(rho_j: &DensityMatrix, cutoff: usize) -> Result<DensityMatrix> {
    let j = match rho_j.basis() {
        Basis::Spin { j } => j,
        b => return Err(Error::BasisMismatch { expected: "spin".into(), found: b.name().into() }),
    };
    let idx = sector_indices(j, cutoff)?;
    let dim = (cutoff + 1) * (cutoff + 1);
    let mut data = DMatrix::from_element(dim, dim, C0);
    for (r, &ir) in idx.iter().enumerate() {
        for (c, &ic) in idx.iter().enumerate() {
            data[(ir, ic)] = rho_j.matrix()[(r, c)];
        }
    }
    DensityMatrix::from_raw(Basis::Fock2 { cutoff }, data)
}

/// Pure spin-j state sum_m a_m |j, m>, amplitudes in descending-m order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinSuperposition {
    pub j: HalfInt,
    pub amplitudes: Vec<Complex64>,
    /// Factor the raw amplitudes were multiplied by to reach unit norm.
    pub renormalization: f64,
}

impl SpinSuperposition {
    pub fn new(j: HalfInt, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != j.dim() {
            return Err(Error::InvalidArgument(format!(
                "spin {j} needs {} amplitudes, got {}",
                j.dim(),
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero amplitudes".into()));
        }
        let factor = if (norm - 1.0).abs() > 1e-12 { 1.0 / norm } else { 1.0 };
        let amplitudes = amplitudes.into_iter().map(|a| a * factor).collect();
        Ok(SpinSuperposition { j, amplitudes, renormalization: factor })
    }

    /// Amplitude a_m.
    pub fn amplitude(&self, m: HalfInt) -> Complex64 {
        self.amplitudes[self.j.index_of(m)]
    }

    pub fn vector(&self) -> DVector<Complex64> {
        DVector::from_vec(self.amplitudes.clone())
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        let v = self.vector();
        DensityMatrix { basis: Basis::Spin { j: self.j }, data: &v * v.adjoint() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaperState {
    JHalf,
    JOne,
    JThreeHalf,
}

impl PaperState {
    pub const ALL: [PaperState; 3] = [PaperState::JHalf, PaperState::JOne, PaperState::JThreeHalf];

    pub fn j(self) -> HalfInt {
        match self {
            PaperState::JHalf => HalfInt::from_twice(1),
            PaperState::JOne => HalfInt::from_twice(2),
            PaperState::JThreeHalf => HalfInt::from_twice(3),
        }
    }

    pub fn from_j(j: HalfInt) -> Result<Self> {
        match j.twice() {
            1 => Ok(PaperState::JHalf),
            2 => Ok(PaperState::JOne),
            3 => Ok(PaperState::JThreeHalf),
            _ => Err(Error::InvalidArgument(format!("no reference state for j = {j}"))),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            PaperState::JHalf => "ref_j1/2",
            PaperState::JOne => "ref_j1",
            PaperState::JThreeHalf => "ref_j3/2",
        }
    }
}

/// The three reference superpositions (printed to three decimals, renormalized).
pub fn make_paper_state(which: PaperState) -> SpinSuperposition {
    let c = Complex64::new;
    // listed from m = -j up to m = +j
    let ascending = match which {
        PaperState::JHalf => vec![c(0.011, -0.443), c(-0.871, -0.211)],
        PaperState::JOne => vec![c(-0.272, 0.105), c(0.274, 0.252), c(-0.876, 0.096)],
        PaperState::JThreeHalf => {
            vec![c(0.166, 0.812), c(0.144, -0.187), c(0.182, -0.109), c(-0.055, -0.457)]
        }
    };
    let descending: Vec<_> = ascending.into_iter().rev().collect();
    SpinSuperposition::new(which.j(), descending).expect("reference amplitudes are valid")
}

/// Seeded random superposition with i.i.d. complex Gaussian amplitudes.
pub fn random_spin_state(j: HalfInt, seed: u64) -> SpinSuperposition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<Complex64> = (0..j.dim())
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let amplitudes = amps.into_iter().map(|a| a / norm).collect();
    SpinSuperposition { j, amplitudes, renormalization: 1.0 }
}

/// Two-mode state vector a_m |j+m, j-m> for a spin superposition.
pub fn embed_superposition(state: &SpinSuperposition, cutoff: usize) -> Result<DVector<Complex64>> {
    let idx = sector_indices(state.j, cutoff)?;
    let mut v = DVector::from_element((cutoff + 1) * (cutoff + 1), C0);
    for (i, &flat) in idx.iter().enumerate() {
        v[flat] = state.amplitudes[i];
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i64) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn relabel_examples() {
        assert_eq!(js_relabel(TwoModeIndex::new(1, 0)), (h(1), h(1)));
        assert_eq!(js_relabel(TwoModeIndex::new(0, 0)), (h(0), h(0)));
        assert_eq!(js_relabel(TwoModeIndex::new(2, 1)), (h(3), h(1)));
    }

    #[test]
    fn projection_examples() {
        let n = 4;
        let mut v = DVector::from_element(25, C0);
        v[TwoModeIndex::new(1, 1).flat(n)] = Complex64::new(1.0, 0.0);
        let rho = DensityMatrix::pure(Basis::Fock2 { cutoff: n }, &v).unwrap();
        let (block, w) = project_sector(&rho, h(2)).unwrap();
        assert!((w - 1.0).abs() < 1e-15);
        assert!((block[(1, 1)].re - 1.0).abs() < 1e-15);

        let mut v = DVector::from_element(25, C0);
        v[TwoModeIndex::new(0, 0).flat(n)] = Complex64::new(1.0, 0.0);
        v[TwoModeIndex::new(1, 1).flat(n)] = Complex64::new(1.0, 0.0);
        let rho = DensityMatrix::pure(Basis::Fock2 { cutoff: n }, &v).unwrap();
        let (block, w) = project_sector(&rho, h(2)).unwrap();
        assert!((w - 0.5).abs() < 1e-15);
        assert!((block[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!(block[(0, 0)].norm() < 1e-15);

        let mixed = js_inverse(&DensityMatrix::maximally_mixed(Basis::Spin { j: h(2) }), n).unwrap();
        assert!(matches!(project_sector(&mixed, h(1)), Err(Error::EmptySector { .. })));
    }

    #[test]
    fn inverse_examples() {
        let up = SpinSuperposition::new(h(1), vec![Complex64::new(1.0, 0.0), C0]).unwrap();
        let two = js_inverse(&up.density_matrix(), 3).unwrap();
        assert!((two.matrix()[(TwoModeIndex::new(1, 0).flat(3), TwoModeIndex::new(1, 0).flat(3))].re - 1.0).abs() < 1e-15);
        assert!((two.trace().re - 1.0).abs() < 1e-15);
        let mixed = js_inverse(&DensityMatrix::maximally_mixed(Basis::Spin { j: h(1) }), 2).unwrap();
        let i10 = TwoModeIndex::new(1, 0).flat(2);
        let i01 = TwoModeIndex::new(0, 1).flat(2);
        assert!((mixed.matrix()[(i10, i10)].re - 0.5).abs() < 1e-15);
        assert!((mixed.matrix()[(i01, i01)].re - 0.5).abs() < 1e-15);
        assert!(js_inverse(&up.density_matrix(), 0).is_err());
    }

    #[test]
    fn paper_states_are_normalized() {
        for which in PaperState::ALL {
            let s = make_paper_state(which);
            let norm: f64 = s.amplitudes.iter().map(|a| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-14);
            assert!((s.renormalization - 1.0).abs() < 1e-2);
        }
        let s = make_paper_state(PaperState::JOne);
        let raw = Complex64::new(-0.272, 0.105) * s.renormalization;
        assert!((s.amplitude(h(-2)) - raw).norm() < 1e-15);
    }

    #[test]
    fn random_states_are_deterministic() {
        let a = random_spin_state(h(3), 7);
        let b = random_spin_state(h(3), 7);
        assert_eq!(a, b);
        assert_ne!(a, random_spin_state(h(3), 8));
    }

    #[test]
    fn fidelity_of_pure_states() {
        let a = random_spin_state(h(2), 1).density_matrix();
        let b = random_spin_state(h(2), 2).density_matrix();
        assert!((a.fidelity(&a).unwrap() - 1.0).abs() < 1e-12);
        let va = random_spin_state(h(2), 1).vector();
        let vb = random_spin_state(h(2), 2).vector();
        let overlap = va.dotc(&vb).norm_sqr();
        assert!((a.fidelity(&b).unwrap() - overlap).abs() < 1e-10);
    }
}
