//! Independent verification route.
//!
//! Operators are built from first principles (matrix exponentials of ladder
//! and angular-momentum matrices, Gram-Schmidt tensor bases) and the
//! transforms are recomputed stepwise through density matrices. This module
//! never calls into `kernels`, and `transforms` never calls the sector
//! embedding/projection used here.

use crate::error::{Error, Result};
use crate::hilbert::{js_forward, js_inverse, Basis, DensityMatrix};
use crate::specfun::{hermite_poly, ln_factorial, EulerAngles, HalfInt};
use crate::tomography::{reconstruct_spin, spin_tomogram};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Size of the internal Fock space used for matrix exponentials.
pub const ORACLE_DIM: usize = 100;
/// Fock cutoff of the space on which defining traces are evaluated.
pub const TRACE_CUTOFF: usize = 24;

// ---------------------------------------------------------------------------
// Operator construction
// ---------------------------------------------------------------------------

/// Annihilation operator on 0..dim.
pub fn annihilation(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |r, c| if c == r + 1 { Complex64::new((c as f64).sqrt(), 0.0) } else { C0 })
}

fn block(m: &DMatrix<Complex64>, n: usize) -> DMatrix<Complex64> {
    m.view((0, 0), (n, n)).into_owned()
}

/// exp(beta a^dag - beta^* a) on the internal space.
pub fn displacement_operator(beta: Complex64) -> DMatrix<Complex64> {
    let a = annihilation(ORACLE_DIM);
    let gen = a.adjoint() * beta - &a * beta.conj();
    gen.exp()
}

/// exp(-i (mu q + nu p)) with q = (a + a^dag)/sqrt2, p = (a - a^dag)/(i sqrt2).
pub fn quadrature_exponential(mu: f64, nu: f64) -> DMatrix<Complex64> {
    let a = annihilation(ORACLE_DIM);
    let ad = a.adjoint();
    let q = (&a + &ad) / Complex64::new(SQRT_2, 0.0);
    let p = (&a - &ad) / Complex64::new(0.0, SQRT_2);
    ((q * Complex64::new(mu, 0.0) + p * Complex64::new(nu, 0.0)) * (-I)).exp()
}

/// Symplectic quantizer e^{ix} exp(-i(mu q + nu p)) / 2pi on 0..=cutoff.
pub fn sympl_quantizer(x: f64, mu: f64, nu: f64, cutoff: usize) -> DMatrix<Complex64> {
    block(&quadrature_exponential(mu, nu), cutoff + 1) * Complex64::from_polar(1.0 / (2.0 * PI), x)
}

/// <x; mu, nu | n>: the eigenvector of mu q + nu p = e^{i theta N} r q e^{-i theta N}
/// is e^{i theta N} |x / r>_q / sqrt(r), giving e^{-i n theta} psi_n(x/r) / sqrt(r).
pub fn quadrature_eigen_overlaps(x: f64, mu: f64, nu: f64, cutoff: usize) -> Result<DVector<Complex64>> {
    let r = mu.hypot(nu);
    if r == 0.0 {
        return Err(Error::DegenerateFrame);
    }
    let theta = nu.atan2(mu);
    let y = x / r;
    Ok(DVector::from_fn(cutoff + 1, |n, _| {
        let ln_norm = -0.5 * (n as f64 * 2f64.ln() + ln_factorial(n) + 0.5 * PI.ln());
        let psi = hermite_poly(n, y) * (ln_norm - 0.5 * y * y).exp();
        Complex64::from_polar(psi / r.sqrt(), -(n as f64) * theta)
    }))
}

/// Symplectic dequantizer |x; mu, nu><x; mu, nu| on 0..=cutoff.
pub fn sympl_dequantizer(x: f64, mu: f64, nu: f64, cutoff: usize) -> Result<DMatrix<Complex64>> {
    let v = quadrature_eigen_overlaps(x, mu, nu, cutoff)?;
    // <a|x><x|b> = conj(<x|a>) <x|b>
    Ok(DMatrix::from_fn(cutoff + 1, cutoff + 1, |a, b| v[a].conj() * v[b]))
}

/// Photon dequantizer D(-alpha) |n><n| D(alpha) on 0..=cutoff.
pub fn photon_dequantizer(n: usize, alpha: Complex64, cutoff: usize) -> DMatrix<Complex64> {
    let d = displacement_operator(alpha);
    let row = d.row(n).into_owned();
    let full = row.adjoint() * row;
    block(&full, cutoff + 1)
}

/// Photon quantizer 4/(pi(1-s^2)) D(-alpha) g^{N-n} D(alpha) on 0..=cutoff.
pub fn photon_quantizer(n: usize, alpha: Complex64, s: f64, cutoff: usize) -> Result<DMatrix<Complex64>> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::OrderingOutOfDomain(s));
    }
    let g = (s - 1.0) / (s + 1.0);
    let d = displacement_operator(alpha);
    let dm = d.adjoint();
    let diag = DMatrix::from_fn(ORACLE_DIM, ORACLE_DIM, |r, c| {
        if r == c {
            Complex64::new(g.powi(r as i32 - n as i32), 0.0)
        } else {
            C0
        }
    });
    let c = 4.0 / (PI * (1.0 - s * s));
    Ok(block(&(dm * diag * d), cutoff + 1) * Complex64::new(c, 0.0))
}

fn parity(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |r, c| {
        if r != c {
            C0
        } else if r % 2 == 0 {
            C1
        } else {
            -C1
        }
    })
}

/// Wigner dequantizer D(2 alpha) P / pi on 0..=cutoff.
pub fn wigner_dequantizer(alpha: Complex64, cutoff: usize) -> DMatrix<Complex64> {
    let d = displacement_operator(alpha * 2.0);
    block(&(d * parity(ORACLE_DIM)), cutoff + 1) / Complex64::new(PI, 0.0)
}

/// Calibrated Wigner quantizer 4 D(2 alpha) P on 0..=cutoff.
pub fn wigner_quantizer(alpha: Complex64, cutoff: usize) -> DMatrix<Complex64> {
    let d = displacement_operator(alpha * 2.0);
    block(&(d * parity(ORACLE_DIM)), cutoff + 1) * Complex64::new(4.0, 0.0)
}

/// (J_y, J_z) for spin j in the descending-m basis.
pub fn spin_operators(j: HalfInt) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let dim = j.dim();
    let jv = j.value();
    let mval = |i: usize| jv - i as f64;
    // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, row index of m+1 is i-1
    let jp = DMatrix::from_fn(dim, dim, |r, c| {
        if r + 1 == c {
            let m = mval(c);
            Complex64::new((jv * (jv + 1.0) - m * (m + 1.0)).sqrt(), 0.0)
        } else {
            C0
        }
    });
    let jm = jp.adjoint();
    let jy = (&jp - &jm) / Complex64::new(0.0, 2.0);
    let jz = DMatrix::from_fn(dim, dim, |r, c| if r == c { Complex64::new(mval(r), 0.0) } else { C0 });
    (jy, jz)
}

/// R(Omega) = exp(-i alpha Jz) exp(-i beta Jy) exp(-i gamma Jz).
pub fn rotation_operator(j: HalfInt, omega: EulerAngles) -> DMatrix<Complex64> {
    let (jy, jz) = spin_operators(j);
    let ez = |t: f64| (&jz * Complex64::new(0.0, -t)).exp();
    ez(omega.alpha) * (jy * Complex64::new(0.0, -omega.beta)).exp() * ez(omega.gamma)
}

/// Orthonormal diagonal tensors T_L (L = 0..=2j) from Gram-Schmidt on powers of Jz.
pub fn diagonal_tensor_basis(j: HalfInt) -> Vec<DVector<f64>> {
    let dim = j.dim();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for l in 0..dim {
        let mut v = DVector::from_fn(dim, |i, _| (j.value() - i as f64).powi(l as i32));
        for b in &basis {
            let proj = v.dot(b);
            v -= b * proj;
        }
        let norm = v.norm();
        basis.push(v / norm);
    }
    basis
}

/// Spin dequantizer R^dag |m><m| R.
pub fn spin_dequantizer(j: HalfInt, m: HalfInt, omega: EulerAngles) -> DMatrix<Complex64> {
    let r = rotation_operator(j, omega);
    let i = j.index_of(m);
    let mut proj = DMatrix::from_element(j.dim(), j.dim(), C0);
    proj[(i, i)] = C1;
    r.adjoint() * proj * r
}

/// Spin quantizer R^dag [sum_L (2L+1)/(8pi^2) (T_L)_{mm} T_L] R.
pub fn spin_quantizer(j: HalfInt, m: HalfInt, omega: EulerAngles) -> DMatrix<Complex64> {
    let i = j.index_of(m);
    let mut diag = vec![0.0; j.dim()];
    for (l, t) in diagonal_tensor_basis(j).iter().enumerate() {
        let c = (2 * l + 1) as f64 / (8.0 * PI * PI) * t[i];
        for (d, v) in diag.iter_mut().zip(t.iter()) {
            *d += c * v;
        }
    }
    let inner = DMatrix::from_fn(j.dim(), j.dim(), |r, c| if r == c { Complex64::new(diag[r], 0.0) } else { C0 });
    let r = rotation_operator(j, omega);
    r.adjoint() * inner * r
}

/// Embeds a spin-space operator into sector 2j of the two-mode space 0..=cutoff.
pub fn embed_operator(j: HalfInt, op: &DMatrix<Complex64>, cutoff: usize) -> DMatrix<Complex64> {
    let n = cutoff + 1;
    let tj = j.twice() as usize;
    let flat = |i: usize| {
        // descending m: i = 0 <-> (n1, n2) = (2j, 0)
        (tj - i) * n + i
    };
    let mut out = DMatrix::from_element(n * n, n * n, C0);
    for r in 0..j.dim() {
        for c in 0..j.dim() {
            out[(flat(r), flat(c))] = op[(r, c)];
        }
    }
    out
}

/// Tr[(A (x) B) E] on the full two-mode space.
pub fn product_trace(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, e: &DMatrix<Complex64>) -> Complex64 {
    let n = a.nrows();
    let mut acc = C0;
    for (col, ecol) in e.column_iter().enumerate() {
        for (row, ev) in ecol.iter().enumerate() {
            if *ev == C0 {
                continue;
            }
            // (A (x) B)_{col,row} E_{row,col}
            let (c1, c2) = (col / n, col % n);
            let (r1, r2) = (row / n, row % n);
            acc += a[(c1, r1)] * b[(c2, r2)] * ev;
        }
    }
    acc
}

/// Tr[Pi_2j (A (x) B)].
pub fn sector_trace(j: HalfInt, a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    let id = DMatrix::from_fn(j.dim(), j.dim(), |r, c| if r == c { C1 } else { C0 });
    product_trace(a, b, &embed_operator(j, &id, a.nrows() - 1))
}

// ---------------------------------------------------------------------------
// Kernel trace oracles
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    SymplToSpin,
    SpinToSympl,
    PhotonToSpin,
    SpinToPhoton,
    WignerToSpin,
    SpinToWigner,
    SymplPhoton,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 7] = [
        KernelFamily::SymplToSpin,
        KernelFamily::SpinToSympl,
        KernelFamily::PhotonToSpin,
        KernelFamily::SpinToPhoton,
        KernelFamily::WignerToSpin,
        KernelFamily::SpinToWigner,
        KernelFamily::SymplPhoton,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::SymplToSpin => "kernel_sympl_to_spin",
            KernelFamily::SpinToSympl => "kernel_spin_to_sympl",
            KernelFamily::PhotonToSpin => "kernel_photon_to_spin",
            KernelFamily::SpinToPhoton => "kernel_spin_to_photon",
            KernelFamily::WignerToSpin => "kernel_wigner_to_spin",
            KernelFamily::SpinToWigner => "kernel_spin_to_wigner",
            KernelFamily::SymplPhoton => "kernel_sympl_photon",
        }
    }
}

/// One random parameter draw for the kernel suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelDraw {
    pub j: HalfInt,
    pub m: HalfInt,
    pub omega: EulerAngles,
    pub x: [f64; 2],
    pub mu: [f64; 2],
    pub nu: [f64; 2],
    pub alpha: [Complex64; 2],
    pub n_vec: [usize; 2],
    pub s: f64,
}

/// Seeded draws: j <= 3/2, |alpha| <= 1.5, |mu|, |nu| <= 2, |x| <= 3, n <= 6, s in [0.3, 0.7].
pub fn kernel_draws(seed: u64, count: usize) -> Vec<KernelDraw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let tj = rng.random_range(1..=3i64);
            let j = HalfInt::from_twice(tj);
            let m = HalfInt::from_twice(tj - 2 * rng.random_range(0..=tj));
            let omega = EulerAngles::new(
                rng.random_range(0.0..2.0 * PI),
                rng.random_range(0.0..PI),
                rng.random_range(0.0..2.0 * PI),
            );
            let mut frame = || loop {
                let mu: f64 = rng.random_range(-2.0..2.0);
                let nu: f64 = rng.random_range(-2.0..2.0);
                if mu.hypot(nu) > 0.3 {
                    return (mu, nu);
                }
            };
            let (mu1, nu1) = frame();
            let (mu2, nu2) = frame();
            let mut disc = || {
                let r = 1.5 * rng.random::<f64>().sqrt();
                Complex64::from_polar(r, rng.random_range(0.0..2.0 * PI))
            };
            let alpha = [disc(), disc()];
            KernelDraw {
                j,
                m,
                omega,
                x: [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)],
                mu: [mu1, mu2],
                nu: [nu1, nu2],
                alpha,
                n_vec: [rng.random_range(0..=6), rng.random_range(0..=6)],
                s: rng.random_range(0.3..0.7),
            }
        })
        .collect()
}

/// Defining trace for the kernel family at the draw, evaluated on the cutoff-24
/// two-mode space. `SymplPhoton` returns the pair (sympl -> photon, photon -> sympl)
/// for mode 1 of the draw; the other families return one value and, for the
/// CV -> spin directions, the sector denominator as a second value.
pub fn kernel_trace(family: KernelFamily, d: &KernelDraw) -> Result<Vec<Complex64>> {
    let n = TRACE_CUTOFF;
    let j = d.j;
    Ok(match family {
        KernelFamily::SymplToSpin => {
            let a = sympl_quantizer(d.x[0], d.mu[0], d.nu[0], n);
            let b = sympl_quantizer(d.x[1], d.mu[1], d.nu[1], n);
            let e = embed_operator(j, &spin_dequantizer(j, d.m, d.omega), n);
            vec![product_trace(&a, &b, &e), sector_trace(j, &a, &b)]
        }
        KernelFamily::SpinToSympl => {
            let a = sympl_dequantizer(d.x[0], d.mu[0], d.nu[0], n)?;
            let b = sympl_dequantizer(d.x[1], d.mu[1], d.nu[1], n)?;
            let e = embed_operator(j, &spin_quantizer(j, d.m, d.omega), n);
            vec![product_trace(&a, &b, &e)]
        }
        KernelFamily::PhotonToSpin => {
            let a = photon_quantizer(d.n_vec[0], d.alpha[0], d.s, n)?;
            let b = photon_quantizer(d.n_vec[1], d.alpha[1], d.s, n)?;
            let e = embed_operator(j, &spin_dequantizer(j, d.m, d.omega), n);
            vec![product_trace(&a, &b, &e), sector_trace(j, &a, &b)]
        }
        KernelFamily::SpinToPhoton => {
            let a = photon_dequantizer(d.n_vec[0], d.alpha[0], n);
            let b = photon_dequantizer(d.n_vec[1], d.alpha[1], n);
            let e = embed_operator(j, &spin_quantizer(j, d.m, d.omega), n);
            vec![product_trace(&a, &b, &e)]
        }
        KernelFamily::WignerToSpin => {
            let a = wigner_quantizer(d.alpha[0], n);
            let b = wigner_quantizer(d.alpha[1], n);
            let e = embed_operator(j, &spin_dequantizer(j, d.m, d.omega), n);
            vec![product_trace(&a, &b, &e), sector_trace(j, &a, &b)]
        }
        KernelFamily::SpinToWigner => {
            let a = wigner_dequantizer(d.alpha[0], n);
            let b = wigner_dequantizer(d.alpha[1], n);
            let e = embed_operator(j, &spin_quantizer(j, d.m, d.omega), n);
            vec![product_trace(&a, &b, &e)]
        }
        KernelFamily::SymplPhoton => {
            let (x, mu, nu, k, al) = (d.x[0], d.mu[0], d.nu[0], d.n_vec[0], d.alpha[0]);
            // Tr[D_sympl U_n(alpha)] = <n| D(alpha) D_sympl D(-alpha) |n>
            let disp = displacement_operator(al);
            let q = quadrature_exponential(mu, nu) * Complex64::from_polar(1.0 / (2.0 * PI), x);
            let to_photon = (&disp * q * disp.adjoint())[(k, k)];
            // Tr[D_n(alpha) U_sympl] = <x| D_n(alpha) |x> on a wide truncation
            let wide = 60;
            let quant = photon_quantizer(k, al, d.s, wide)?;
            let v = quadrature_eigen_overlaps(x, mu, nu, wide)?;
            let to_sympl = (v.transpose() * quant * v.map(|z| z.conj()))[(0, 0)];
            vec![to_photon, to_sympl]
        }
    })
}

// ---------------------------------------------------------------------------
// Stepwise density-matrix route
// ---------------------------------------------------------------------------

/// Two-mode source state for CV -> spin checks: 0.7 x (embedded spin state) + 0.3 |0,0><0,0|,
/// so the sector weight is 0.7.
pub fn mixed_source(spin: &DensityMatrix, j: HalfInt) -> Result<DensityMatrix> {
    let cutoff = j.twice() as usize;
    let emb = js_inverse(spin, cutoff)?;
    let mut m = emb.matrix() * Complex64::new(0.7, 0.0);
    m[(0, 0)] += Complex64::new(0.3, 0.0);
    DensityMatrix::new(Basis::Fock2 { cutoff }, m)
}

/// Spin tomogram -> reconstructed spin state -> embedding in sector 2j.
pub fn embedded_from_spin_tomogram(omega: &crate::tomography::SpinTomogram) -> Result<DensityMatrix> {
    let rho = reconstruct_spin(omega)?;
    js_inverse(&rho, omega.j.twice() as usize)
}

/// Two-mode state -> renormalized sector block -> spin tomogram on `grid`.
pub fn spin_tomogram_of_sector(
    source: &DensityMatrix,
    j: HalfInt,
    grid: &crate::quadrature::EulerQuadrature,
) -> Result<crate::tomography::SpinTomogram> {
    spin_tomogram(&js_forward(source, j)?, grid)
}
