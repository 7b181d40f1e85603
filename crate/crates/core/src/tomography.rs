//! Dequantizers, quantizers, direct tomograms and reconstructions for the
//! spin, symplectic, photon-number and Wigner representations.
//!
//! Operator conventions: q = (a + a^dag)/sqrt2, p = (a - a^dag)/(i sqrt2),
//! D(xi) = exp(xi a^dag - xi^* a). The symplectic frame (mu, nu) corresponds
//! to D(k xi) = exp(-i k (mu q + nu p)) with xi = (nu - i mu)/sqrt2.

use crate::error::{Error, Result};
use crate::hilbert::{hermitian_part, Basis, DensityMatrix};
use crate::quadrature::{EulerQuadrature, LineQuadrature, PlaneQuadrature};
use crate::specfun::{cg_unchecked, displacement_element, hermite_functions, rotation_matrix, EulerAngles, HalfInt};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Quantizer prefactor for the Wigner function W(alpha) = Tr[rho D(2 alpha) P] / pi.
/// The displacement-parity quantizer 2 D(2 alpha) P reconstructs rho / 2 under this
/// dequantizer; the calibrated factor 2 x 2 restores the identity.
pub const WIGNER_QUANTIZER_SCALE: f64 = 4.0;
/// Calibration applied on top of the displacement-parity quantizer prefactor 2.
pub const WIGNER_CALIBRATION: f64 = 2.0;
/// Negative tomogram values above this threshold are treated as quadrature noise.
pub const NEGATIVITY_CLAMP: f64 = 1e-8;

// ---------------------------------------------------------------------------
// Spin
// ---------------------------------------------------------------------------

/// Irreducible tensor operator T_{LN} = sum (-1)^{j-m'} <j m; j -m'|L N> |m><m'|.
pub fn ito_operator(j: HalfInt, big_l: usize, big_n: i64) -> DMatrix<Complex64> {
    let dim = j.dim();
    let tj = j.twice();
    DMatrix::from_fn(dim, dim, |r, c| {
        let m = j.projection_at(r).twice();
        let mp = j.projection_at(c).twice();
        let cg = cg_unchecked(tj, m, tj, -mp, 2 * big_l as i64, 2 * big_n);
        let sign = if ((tj - mp) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(sign * cg, 0.0)
    })
}

/// a_L(m) = (-1)^{j-m} <j m; j -m | L 0>, the expansion of |m><m| over T_{L0}.
pub fn projector_ito_coefficient(j: HalfInt, m: HalfInt, big_l: usize) -> f64 {
    let tj = j.twice();
    let sign = if ((tj - m.twice()) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    sign * cg_unchecked(tj, m.twice(), tj, -m.twice(), 2 * big_l as i64, 0)
}

/// U(m, Omega) = R^dag |m><m| R with entries D^*_{m,m_r} D_{m,m_c}.
pub fn spin_dequantizer_matrix(j: HalfInt, m: HalfInt, omega: EulerAngles) -> Result<DMatrix<Complex64>> {
    check_label(j, m)?;
    let r = rotation_matrix(j, omega);
    let row = r.row(j.index_of(m)).into_owned();
    Ok(row.adjoint() * row)
}

/// Quantizer D(m, Omega) = sum_L (2L+1)/(8 pi^2) a_L(m) R^dag T_{L0} R.
pub fn spin_quantizer_matrix(j: HalfInt, m: HalfInt, omega: EulerAngles) -> Result<DMatrix<Complex64>> {
    check_label(j, m)?;
    let r = rotation_matrix(j, omega);
    let mut inner = DMatrix::from_element(j.dim(), j.dim(), C0);
    for big_l in 0..=(j.twice() as usize) {
        let c = (2 * big_l + 1) as f64 / (8.0 * PI * PI) * projector_ito_coefficient(j, m, big_l);
        inner += ito_operator(j, big_l, 0) * Complex64::new(c, 0.0);
    }
    Ok(r.adjoint() * inner * r)
}

fn check_label(j: HalfInt, m: HalfInt) -> Result<()> {
    if j.twice() < 0 || m.twice().abs() > j.twice() || (j.twice() - m.twice()) % 2 != 0 {
        return Err(Error::LabelOutOfRange(format!("m = {m} for j = {j}")));
    }
    Ok(())
}

/// Spin tomogram on an Euler grid; `values[g][i]` is the probability of
/// projection m = j - i at grid node g.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinTomogram {
    pub j: HalfInt,
    pub grid: EulerQuadrature,
    pub values: Vec<Vec<f64>>,
}

impl SpinTomogram {
    /// Largest deviation of sum_m omega from 1 over the grid.
    pub fn row_sum_error(&self) -> f64 {
        self.values.iter().map(|row| (row.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &SpinTomogram) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn spin_j(rho: &DensityMatrix) -> Result<HalfInt> {
    match rho.basis() {
        Basis::Spin { j } => Ok(j),
        b => Err(Error::BasisMismatch { expected: "spin".into(), found: b.name().into() }),
    }
}

/// omega(m, Omega_g) = <m| R rho R^dag |m> at every node of the grid.
pub fn spin_tomogram(rho: &DensityMatrix, grid: &EulerQuadrature) -> Result<SpinTomogram> {
    let j = spin_j(rho)?;
    let values: Result<Vec<Vec<f64>>> = grid
        .nodes
        .par_iter()
        .map(|&omega| {
            let r = rotation_matrix(j, omega);
            let rot = &r * rho.matrix() * r.adjoint();
            (0..j.dim())
                .map(|i| {
                    let v = rot[(i, i)];
                    if v.im.abs() > 1e-9 {
                        return Err(Error::Numerical(format!("spin tomogram imaginary residue {:e}", v.im)));
                    }
                    Ok(v.re)
                })
                .collect()
        })
        .collect();
    Ok(SpinTomogram { j, grid: grid.clone(), values: values? })
}

/// rho = sum_g w_g sum_m omega(m, Omega_g) D(m, Omega_g).
pub fn reconstruct_spin(tomogram: &SpinTomogram) -> Result<DensityMatrix> {
    let j = tomogram.j;
    tomogram.grid.check_exact_for(j)?;
    let dim = j.dim();
    let ranks = j.twice() as usize;
    let itos: Vec<DMatrix<Complex64>> = (0..=ranks).map(|l| ito_operator(j, l, 0)).collect();
    let coeff: Vec<Vec<f64>> = (0..=ranks)
        .map(|l| {
            j.projections()
                .map(|m| (2 * l + 1) as f64 / (8.0 * PI * PI) * projector_ito_coefficient(j, m, l))
                .collect()
        })
        .collect();
    let mut acc = DMatrix::from_element(dim, dim, C0);
    for ((omega, w), row) in tomogram.grid.nodes.iter().zip(&tomogram.grid.weights).zip(&tomogram.values) {
        let mut inner = DMatrix::from_element(dim, dim, C0);
        for l in 0..=ranks {
            let c: f64 = row.iter().zip(&coeff[l]).map(|(o, a)| o * a).sum();
            inner += &itos[l] * Complex64::new(c, 0.0);
        }
        let r = rotation_matrix(j, *omega);
        acc += r.adjoint() * inner * r * Complex64::new(*w, 0.0);
    }
    DensityMatrix::from_raw(Basis::Spin { j }, acc)
}

// ---------------------------------------------------------------------------
// Shared factorization of CV states
// ---------------------------------------------------------------------------

/// Eigen-factors of a one- or two-mode state restricted to its occupied support.
/// Each factor is an amplitude table U[(n1, n2)] (a single column for one mode).
pub(crate) struct Factors {
    pub modes: usize,
    pub support: usize,
    pub terms: Vec<(f64, DMatrix<Complex64>)>,
}

pub(crate) fn factorize(rho: &DensityMatrix) -> Result<Factors> {
    let (modes, cutoff) = match rho.basis() {
        Basis::Fock1 { cutoff } => (1, cutoff),
        Basis::Fock2 { cutoff } => (2, cutoff),
        b => return Err(Error::BasisMismatch { expected: "fock1 or fock2".into(), found: b.name().into() }),
    };
    let m = hermitian_part(rho.matrix());
    let n = cutoff + 1;
    let occupied = |flat: usize| m.row(flat).iter().any(|v| v.norm() > 1e-15);
    let mut support = 0;
    for flat in 0..m.nrows() {
        if occupied(flat) {
            let k = if modes == 1 { flat } else { (flat / n).max(flat % n) };
            support = support.max(k);
        }
    }
    let k = support + 1;
    let keep: Vec<usize> = if modes == 1 {
        (0..k).collect()
    } else {
        (0..k).flat_map(|a| (0..k).map(move |b| a * n + b)).collect()
    };
    let sub = DMatrix::from_fn(keep.len(), keep.len(), |r, c| m[(keep[r], keep[c])]);
    let eig = SymmetricEigen::new(sub);
    let scale = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut terms = Vec::new();
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() <= 1e-15 * scale.max(1e-300) {
            continue;
        }
        let col = eig.eigenvectors.column(i);
        let table = if modes == 1 {
            DMatrix::from_fn(k, 1, |a, _| col[a])
        } else {
            DMatrix::from_fn(k, k, |a, b| col[a * k + b])
        };
        terms.push((lambda, table));
    }
    Ok(Factors { modes, support, terms })
}

// ---------------------------------------------------------------------------
// Symplectic
// ---------------------------------------------------------------------------

/// Polar form (r, theta) of a frame (mu, nu).
pub fn frame_polar(mu: f64, nu: f64) -> Result<(f64, f64)> {
    let r = mu.hypot(nu);
    if r == 0.0 {
        return Err(Error::DegenerateFrame);
    }
    Ok((r, nu.atan2(mu)))
}

/// Displacement argument xi = (nu - i mu)/sqrt2 of the frame.
pub fn frame_xi(mu: f64, nu: f64) -> Complex64 {
    Complex64::new(nu, -mu) * FRAC_1_SQRT_2
}

/// <x; mu, nu | n> = e^{-i n theta} psi_n(x / r) / sqrt(r).
pub fn symplectic_dequantizer_overlap(n: usize, x: f64, mu: f64, nu: f64) -> Result<Complex64> {
    Ok(symplectic_overlaps(n, x, mu, nu)?[n])
}

/// <x; mu, nu | k> for k = 0..=n.
pub fn symplectic_overlaps(n: usize, x: f64, mu: f64, nu: f64) -> Result<Vec<Complex64>> {
    let (r, theta) = frame_polar(mu, nu)?;
    let psi = hermite_functions(n, x / r);
    let s = 1.0 / r.sqrt();
    Ok(psi
        .iter()
        .enumerate()
        .map(|(k, p)| Complex64::from_polar(p * s, -(k as f64) * theta))
        .collect())
}

/// Uniform x lattice min, min+step, ..., max.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl XGrid {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        crate::quadrature::uniform_points(min, max, step)?;
        Ok(XGrid { min, max, step })
    }

    pub fn points(&self) -> Vec<f64> {
        crate::quadrature::uniform_points(self.min, self.max, self.step).expect("validated grid")
    }

    pub fn rule(&self) -> LineQuadrature {
        LineQuadrature::trapezoid(self.min, self.max, self.step).expect("validated grid")
    }

    pub fn len(&self) -> usize {
        self.points().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// One frame: (mu, nu) for each mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
}

impl Frame {
    pub fn single(mu: f64, nu: f64) -> Self {
        Frame { mu: vec![mu], nu: vec![nu] }
    }

    pub fn pair(mu: [f64; 2], nu: [f64; 2]) -> Self {
        Frame { mu: mu.to_vec(), nu: nu.to_vec() }
    }
}

/// Optical frames (cos theta, sin theta) with theta = pi k / n_theta; for two
/// modes the product of both angle sets (first mode major).
pub fn optical_frames(n_theta: usize, modes: usize) -> Vec<Frame> {
    let thetas: Vec<f64> = (0..n_theta).map(|k| PI * k as f64 / n_theta as f64).collect();
    match modes {
        1 => thetas.iter().map(|t| Frame::single(t.cos(), t.sin())).collect(),
        _ => thetas
            .iter()
            .flat_map(|t1| thetas.iter().map(move |t2| Frame::pair([t1.cos(), t2.cos()], [t1.sin(), t2.sin()])))
            .collect(),
    }
}

/// Symplectic tomogram samples. Layout: frame-major; within a frame the
/// x-product grid with the first mode's x as the slow index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymplecticTomogram {
    pub modes: usize,
    pub x: XGrid,
    pub frames: Vec<Frame>,
    pub values: Vec<f64>,
    /// Values in [-1e-8, 0) that were clamped to zero.
    pub clamped: usize,
}

impl SymplecticTomogram {
    pub fn points_per_frame(&self) -> usize {
        self.x.len().pow(self.modes as u32)
    }

    pub fn frame_values(&self, f: usize) -> &[f64] {
        let n = self.points_per_frame();
        &self.values[f * n..(f + 1) * n]
    }

    /// Trapezoid integral over x (all modes) for frame f.
    pub fn integral(&self, f: usize) -> f64 {
        let rule = self.x.rule();
        let vals = self.frame_values(f);
        if self.modes == 1 {
            vals.iter().zip(&rule.weights).map(|(v, w)| v * w).sum()
        } else {
            let n = rule.len();
            let mut s = 0.0;
            for i in 0..n {
                for k in 0..n {
                    s += rule.weights[i] * rule.weights[k] * vals[i * n + k];
                }
            }
            s
        }
    }

    pub fn max_abs_diff(&self, other: &SymplecticTomogram) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

pub fn clamp_negative(v: f64, counter: &mut usize) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -NEGATIVITY_CLAMP {
        *counter += 1;
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!("tomogram value {v:e} below -1e-8 (truncation error)")))
    }
}

/// W(x | mu, nu) = <x; mu, nu| rho |x; mu, nu> on the grid (product over modes).
pub fn symplectic_tomogram(rho: &DensityMatrix, x: XGrid, frames: &[Frame]) -> Result<SymplecticTomogram> {
    let f = factorize(rho)?;
    for fr in frames {
        if fr.mu.len() != f.modes || fr.nu.len() != f.modes {
            return Err(Error::InvalidArgument(format!("frame has wrong mode count for a {}-mode state", f.modes)));
        }
        for (mu, nu) in fr.mu.iter().zip(&fr.nu) {
            frame_polar(*mu, *nu)?;
        }
    }
    let xs = x.points();
    let mut values = Vec::with_capacity(frames.len() * xs.len().pow(f.modes as u32));
    let mut clamped = 0;
    for fr in frames {
        let overlaps = |mode: usize| -> Vec<Vec<Complex64>> {
            xs.iter()
                .map(|&xv| symplectic_overlaps(f.support, xv, fr.mu[mode], fr.nu[mode]).unwrap())
                .collect()
        };
        let ov1 = overlaps(0);
        let raw: Vec<f64> = if f.modes == 1 {
            ov1.iter()
                .map(|phi| {
                    f.terms
                        .iter()
                        .map(|(lambda, u)| {
                            let amp: Complex64 = (0..=f.support).map(|a| phi[a] * u[(a, 0)]).sum();
                            lambda * amp.norm_sqr()
                        })
                        .sum()
                })
                .collect()
        } else {
            let ov2 = overlaps(1);
            ov1.par_iter()
                .flat_map_iter(|phi1| {
                    let rows: Vec<DVector<Complex64>> = f
                        .terms
                        .iter()
                        .map(|(_, u)| DVector::from_fn(f.support + 1, |b, _| (0..=f.support).map(|a| phi1[a] * u[(a, b)]).sum()))
                        .collect();
                    ov2.iter()
                        .map(|phi2| {
                            f.terms
                                .iter()
                                .zip(&rows)
                                .map(|((lambda, _), row)| {
                                    let amp: Complex64 = (0..=f.support).map(|b| row[b] * phi2[b]).sum();
                                    lambda * amp.norm_sqr()
                                })
                                .sum::<f64>()
                        })
                        .collect::<Vec<f64>>()
                })
                .collect()
        };
        for v in raw {
            values.push(clamp_negative(v, &mut clamped)?);
        }
    }
    Ok(SymplecticTomogram { modes: f.modes, x, frames: frames.to_vec(), values, clamped })
}

/// Radial rule on [0, r_max] for integrands r e^{i r y} <a|D(r xi)|b>.
pub fn radial_rule(cutoff: usize, y_max: f64) -> LineQuadrature {
    // <a|D(r xi)|b> is negligible once r^2/2 exceeds (sqrt(cutoff) + 6)^2.
    let r_max = std::f64::consts::SQRT_2 * ((cutoff as f64).sqrt() + 6.5);
    let panels = ((r_max * (y_max + 4.0)) / 6.0).ceil().max(8.0) as usize;
    LineQuadrature::composite_gauss(0.0, r_max, panels, 12)
}

/// Checks that the frames are the uniform optical set on [0, pi) and returns n_theta.
pub fn optical_angle_count(t: &SymplecticTomogram) -> Result<usize> {
    let n_frames = t.frames.len();
    let n_theta = if t.modes == 1 { n_frames } else { (n_frames as f64).sqrt().round() as usize };
    let expected = optical_frames(n_theta, t.modes);
    let ok = n_theta > 0
        && expected.len() == n_frames
        && expected.iter().zip(&t.frames).all(|(a, b)| {
            a.mu.iter().zip(&b.mu).all(|(x, y)| (x - y).abs() < 1e-12)
                && a.nu.iter().zip(&b.nu).all(|(x, y)| (x - y).abs() < 1e-12)
        });
    if !ok {
        return Err(Error::InsufficientQuadrature(
            "symplectic input must use uniform optical frames theta = pi k / n on [0, pi)".into(),
        ));
    }
    Ok(n_theta)
}

/// Characteristic function chi(r) = sum_y w_y W(y) e^{i r y} on r in (-inf, inf)
/// folded as (chi(r), chi(-r)) for r >= 0.
pub fn characteristic(values: &[f64], ys: &[f64], wy: &[f64], rs: &[f64]) -> Vec<(Complex64, Complex64)> {
    rs.iter()
        .map(|&r| {
            let mut plus = C0;
            for ((v, y), w) in values.iter().zip(ys).zip(wy) {
                plus += Complex64::from_polar(v * w, r * y);
            }
            // W is real, so chi(-r) = chi(r)^*
            (plus, plus.conj())
        })
        .collect()
}

/// Inverse Radon reconstruction from optical samples w(y, theta), theta on [0, pi):
/// rho_ab = int_0^pi dtheta int dy w(y, theta) (1/2pi) int_R |r| e^{iry} <a|D(r xi_theta)|b> dr.
pub fn reconstruct_from_symplectic(tomogram: &SymplecticTomogram, cutoff: usize) -> Result<DensityMatrix> {
    if tomogram.modes != 1 {
        return Err(Error::InvalidArgument("reconstruction expects a single-mode tomogram".into()));
    }
    let n_theta = optical_angle_count(tomogram)?;
    let ys = tomogram.x.points();
    let wy = tomogram.x.rule().weights;
    let y_max = tomogram.x.min.abs().max(tomogram.x.max.abs());
    let radial = radial_rule(cutoff, y_max);
    let dim = cutoff + 1;
    let dtheta = PI / n_theta as f64;
    let parts: Vec<DMatrix<Complex64>> = (0..n_theta)
        .into_par_iter()
        .map(|k| {
            let theta = PI * k as f64 / n_theta as f64;
            let xi = frame_xi(theta.cos(), theta.sin());
            let chi = characteristic(tomogram.frame_values(k), &ys, &wy, &radial.nodes);
            let mut acc = DMatrix::from_element(dim, dim, C0);
            for ((r, wr), (cp, cm)) in radial.nodes.iter().zip(&radial.weights).zip(&chi) {
                let wgt = r * wr * dtheta / (2.0 * PI);
                let beta = xi * *r;
                for a in 0..dim {
                    for b in 0..dim {
                        let m = displacement_element(a, b, beta);
                        // D(-r xi) elements: <a|D(-beta)|b> = (-1)^{a-b} <a|D(beta)|b>
                        let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                        acc[(a, b)] += (cp * m + cm * m * sign) * wgt;
                    }
                }
            }
            acc
        })
        .collect();
    let mut acc = DMatrix::from_element(dim, dim, C0);
    for p in parts {
        acc += p;
    }
    let rho = DensityMatrix::from_raw(Basis::Fock1 { cutoff }, acc)?.hermitize();
    let check = symplectic_tomogram(&rho.repair()?, tomogram.x, &tomogram.frames);
    if let Ok(check) = check {
        let residual = check.max_abs_diff(tomogram);
        if residual > 1e-3 {
            return Err(Error::Numerical(format!(
                "ill-conditioned symplectic reconstruction: round-trip residual {residual:e}"
            )));
        }
    }
    Ok(rho)
}

// ---------------------------------------------------------------------------
// Photon number
// ---------------------------------------------------------------------------

/// g(s) = (s - 1)/(s + 1); requires s in (0, 1).
pub fn ordering_ratio(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::OrderingOutOfDomain(s));
    }
    Ok((s - 1.0) / (s + 1.0))
}

/// Number of l terms after n needed for |g|^{l-n} < 1e-14.
pub fn geometric_terms(g: f64) -> usize {
    ((1e-14f64).ln() / g.abs().ln()).ceil() as usize
}

/// Photon-number tomogram; `values[p][k]` at alpha point p with k = n (one mode)
/// or k = n1 (cutoff+1) + n2 (two modes).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotonTomogram {
    pub modes: usize,
    pub cutoff: usize,
    /// Displacement per point, one entry per mode.
    pub alphas: Vec<Vec<Complex64>>,
    /// Quadrature weight of each point (unit weights for plain evaluation grids).
    pub weights: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub clamped: usize,
}

impl PhotonTomogram {
    /// Largest truncation deficit 1 - sum_n w_n over the points.
    pub fn max_tail(&self) -> f64 {
        self.values.iter().map(|row| 1.0 - row.iter().sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &PhotonTomogram) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn n_index(&self, n1: usize, n2: usize) -> usize {
        n1 * (self.cutoff + 1) + n2
    }
}

/// Single-mode evaluation points from a plane rule.
pub fn single_mode_points(rule: &PlaneQuadrature) -> (Vec<Vec<Complex64>>, Vec<f64>) {
    (rule.points.iter().map(|p| vec![*p]).collect(), rule.weights.clone())
}

/// Product of two single-mode rules (first mode major).
pub fn product_points(a: &PlaneQuadrature, b: &PlaneQuadrature) -> (Vec<Vec<Complex64>>, Vec<f64>) {
    let mut pts = Vec::with_capacity(a.len() * b.len());
    let mut wts = Vec::with_capacity(a.len() * b.len());
    for (pa, wa) in a.points.iter().zip(&a.weights) {
        for (pb, wb) in b.points.iter().zip(&b.weights) {
            pts.push(vec![*pa, *pb]);
            wts.push(wa * wb);
        }
    }
    (pts, wts)
}

/// w_n(alpha) = <n| D(alpha) rho D^dag(alpha) |n> for n up to `cutoff` per mode.
pub fn photon_tomogram(
    rho: &DensityMatrix,
    alphas: &[Vec<Complex64>],
    weights: &[f64],
    cutoff: usize,
) -> Result<PhotonTomogram> {
    let f = factorize(rho)?;
    if alphas.iter().any(|a| a.len() != f.modes) || weights.len() != alphas.len() {
        return Err(Error::InvalidArgument("alpha points do not match the state's mode count".into()));
    }
    let k = f.support + 1;
    let rows: Vec<Vec<f64>> = alphas
        .par_iter()
        .map(|al| {
            let d1 = DMatrix::from_fn(cutoff + 1, k, |n, a| displacement_element(n, a, al[0]));
            let mut out = vec![0.0; (cutoff + 1).pow(f.modes as u32)];
            if f.modes == 1 {
                for (lambda, u) in &f.terms {
                    let amp = &d1 * u;
                    for n in 0..=cutoff {
                        out[n] += lambda * amp[(n, 0)].norm_sqr();
                    }
                }
            } else {
                let d2 = DMatrix::from_fn(cutoff + 1, k, |n, a| displacement_element(n, a, al[1]));
                for (lambda, u) in &f.terms {
                    let amp = &d1 * u * d2.transpose();
                    for (idx, v) in amp.iter().enumerate() {
                        // column-major: idx = n1 + (cutoff+1) n2
                        let n1 = idx % (cutoff + 1);
                        let n2 = idx / (cutoff + 1);
                        out[n1 * (cutoff + 1) + n2] += lambda * v.norm_sqr();
                    }
                }
            }
            out
        })
        .collect();
    let mut clamped = 0;
    let mut values = Vec::with_capacity(rows.len());
    for row in rows {
        let mut r = Vec::with_capacity(row.len());
        for v in row {
            r.push(clamp_negative(v, &mut clamped)?);
        }
        values.push(r);
    }
    let t = PhotonTomogram { modes: f.modes, cutoff, alphas: alphas.to_vec(), weights: weights.to_vec(), values, clamped };
    let tail = t.max_tail() / rho.trace().re.max(1e-300);
    if tail > 1e-6 {
        return Err(Error::CutoffTooSmall { cutoff, reason: format!("photon-number tail deficit {tail:e} > 1e-6") });
    }
    Ok(t)
}

/// Photon-number quantizer prefactor 4 / (pi (1 - s^2)).
pub fn photon_quantizer_prefactor(s: f64) -> f64 {
    4.0 / (PI * (1.0 - s * s))
}

/// Number of l terms used for the quantizer l-sum at displacement alpha.
pub fn quantizer_l_terms(n: usize, cutoff: usize, alpha: Complex64, g: f64) -> usize {
    let x = alpha.norm_sqr();
    n.max(cutoff) + geometric_terms(g) + (x + 10.0 * (x + 1.0).sqrt()).ceil() as usize + 10
}

/// T_ab(alpha) = sum_l g^l <a|D(-alpha)|l><l|D(alpha)|b> for a, b <= cutoff.
pub fn displaced_ordering_matrix(cutoff: usize, alpha: Complex64, g: f64, l_terms: usize) -> DMatrix<Complex64> {
    let left = DMatrix::from_fn(cutoff + 1, l_terms + 1, |a, l| displacement_element(a, l, -alpha));
    let right = DMatrix::from_fn(l_terms + 1, cutoff + 1, |l, b| {
        displacement_element(l, b, alpha) * g.powi(l as i32)
    });
    left * right
}

/// Quantizer D_n(alpha) = 4/(pi(1-s^2)) D(-alpha) g^{N-n} D(alpha) on 0..=cutoff.
pub fn photon_quantizer_matrix(n: usize, alpha: Complex64, s: f64, cutoff: usize) -> Result<DMatrix<Complex64>> {
    let g = ordering_ratio(s)?;
    let l_terms = quantizer_l_terms(n, cutoff, alpha, g);
    let t = displaced_ordering_matrix(cutoff, alpha, g, l_terms);
    Ok(t * Complex64::new(photon_quantizer_prefactor(s) * g.powi(-(n as i32)), 0.0))
}

/// Closed form of sum_l z^l |<a|D(alpha)|l>|^2 = z^a e^{-(1-z)|alpha|^2} L_a(-(1-z)^2 |alpha|^2 / z).
pub fn displaced_number_generating(a: usize, z: f64, alpha: Complex64) -> f64 {
    let x = alpha.norm_sqr();
    z.powi(a as i32) * (-(1.0 - z) * x).exp() * crate::specfun::laguerre(a, 0.0, -(1.0 - z).powi(2) * x / z)
}

/// Radius of the plane grid for photon-number reconstructions: beyond it the
/// integrand envelope exp(-4|alpha|^2/(1-s^2)) is below 1e-15.
pub fn photon_plane_radius(s: f64) -> f64 {
    (34.5 * (1.0 - s * s) / 4.0).sqrt()
}

/// Disc lattice (spacing 0.1) for photon-number reconstructions at ordering s.
pub fn photon_reconstruction_rule(s: f64) -> Result<PlaneQuadrature> {
    ordering_ratio(s)?;
    PlaneQuadrature::disc(photon_plane_radius(s), 0.1)
}

/// Photon-number cutoff needed so that sum_n g^{-n} w_n(alpha) converges on a
/// grid of the given radius (Poisson tail of mean radius^2/|g| plus state support).
pub fn photon_sum_cutoff(radius: f64, s: f64, support: usize) -> usize {
    let g = ((1.0 - s) / (1.0 + s)).abs();
    let x = radius * radius / g;
    (x + 12.0 * x.sqrt() + 25.0).ceil() as usize + support
}

/// rho = sum_n int d^2alpha w_n(alpha) D_n(alpha), via
/// sum_n w_n D_n = c [sum_n g^{-n} w_n] D(-alpha) g^N D(alpha).
pub fn reconstruct_from_photon(tomogram: &PhotonTomogram, s: f64, cutoff: usize) -> Result<DensityMatrix> {
    if tomogram.modes != 1 {
        return Err(Error::InvalidArgument("reconstruction expects a single-mode photon tomogram".into()));
    }
    let g = ordering_ratio(s)?;
    let c = photon_quantizer_prefactor(s);
    let dim = cutoff + 1;
    let parts: Vec<Result<DMatrix<Complex64>>> = tomogram
        .alphas
        .par_iter()
        .zip(&tomogram.values)
        .zip(&tomogram.weights)
        .map(|((al, row), w)| {
            let alpha = al[0];
            let (sum, last) = weighted_number_sum(row, g);
            if last > 1e-10 * sum.abs().max(1e-300) && last > 1e-14 {
                return Err(Error::CutoffTooSmall {
                    cutoff: tomogram.cutoff,
                    reason: format!("sum_n g^-n w_n not converged at |alpha| = {:.3}", alpha.norm()),
                });
            }
            let l_terms = quantizer_l_terms(0, cutoff, alpha, g);
            let t = displaced_ordering_matrix(cutoff, alpha, g, l_terms);
            Ok(t * Complex64::new(c * sum * w, 0.0))
        })
        .collect();
    let mut acc = DMatrix::from_element(dim, dim, C0);
    for p in parts {
        acc += p?;
    }
    Ok(DensityMatrix::from_raw(Basis::Fock1 { cutoff }, acc)?.hermitize())
}

/// (sum_n g^{-n} w_n, magnitude of the last few terms).
pub fn weighted_number_sum(row: &[f64], g: f64) -> (f64, f64) {
    let mut sum = 0.0;
    let mut pow = 1.0;
    let mut tail = 0.0;
    let n_max = row.len();
    for (n, w) in row.iter().enumerate() {
        let term = w * pow;
        sum += term;
        if n + 3 >= n_max {
            tail = f64::max(tail, term.abs());
        }
        pow /= g;
    }
    (sum, tail)
}

// ---------------------------------------------------------------------------
// Wigner
// ---------------------------------------------------------------------------

/// Wigner samples (dequantizer D(2 alpha) P / pi per mode).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub modes: usize,
    pub alphas: Vec<Vec<Complex64>>,
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn integral(&self) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    pub fn max_abs_diff(&self, other: &WignerGrid) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// (D(2 alpha) P)_{ab} = <a|D(2 alpha)|b> (-1)^b on 0..k.
pub(crate) fn displaced_parity(k: usize, alpha: Complex64) -> DMatrix<Complex64> {
    DMatrix::from_fn(k, k, |a, b| {
        let v = displacement_element(a, b, alpha * 2.0);
        if b % 2 == 0 {
            v
        } else {
            -v
        }
    })
}

/// W(alpha) = Tr[rho U(alpha)], U = D(2 alpha) P / pi per mode.
pub fn wigner_function(rho: &DensityMatrix, alphas: &[Vec<Complex64>], weights: &[f64]) -> Result<WignerGrid> {
    let f = factorize(rho)?;
    if alphas.iter().any(|a| a.len() != f.modes) || weights.len() != alphas.len() {
        return Err(Error::InvalidArgument("alpha points do not match the state's mode count".into()));
    }
    let k = f.support + 1;
    let norm = PI.powi(-(f.modes as i32));
    let values: Vec<f64> = alphas
        .par_iter()
        .map(|al| {
            let a1 = displaced_parity(k, al[0]);
            let mut total = C0;
            if f.modes == 1 {
                for (lambda, u) in &f.terms {
                    total += (u.adjoint() * &a1 * u)[(0, 0)] * *lambda;
                }
            } else {
                let a2 = displaced_parity(k, al[1]);
                for (lambda, u) in &f.terms {
                    let t = &a1 * u * a2.transpose();
                    let v: Complex64 = u.iter().zip(t.iter()).map(|(x, y)| x.conj() * y).sum();
                    total += v * *lambda;
                }
            }
            total.re * norm
        })
        .collect();
    Ok(WignerGrid { modes: f.modes, alphas: alphas.to_vec(), weights: weights.to_vec(), values })
}

/// Single-mode reconstruction rho = int W(alpha) 4 D(2 alpha) P d^2alpha.
/// Returns the state (trace forced to 1) and the trace deviation before forcing.
pub fn reconstruct_from_wigner(grid: &WignerGrid, cutoff: usize) -> Result<(DensityMatrix, f64)> {
    if grid.modes != 1 {
        return Err(Error::InvalidArgument("reconstruction expects a single-mode Wigner grid".into()));
    }
    let dim = cutoff + 1;
    let parts: Vec<DMatrix<Complex64>> = grid
        .alphas
        .par_iter()
        .zip(&grid.values)
        .zip(&grid.weights)
        .map(|((al, v), w)| displaced_parity(dim, al[0]) * Complex64::new(WIGNER_QUANTIZER_SCALE * v * w, 0.0))
        .collect();
    let mut acc = DMatrix::from_element(dim, dim, C0);
    for p in parts {
        acc += p;
    }
    let mut rho = DensityMatrix::from_raw(Basis::Fock1 { cutoff }, acc)?.hermitize();
    let tr = rho.normalize_trace()?;
    let deviation = tr - 1.0;
    if deviation.abs() > 1e-2 {
        return Err(Error::Numerical(format!("Wigner reconstruction trace deviation {deviation:e} > 1e-2")));
    }
    Ok((rho, deviation))
}

/// Measures the quantizer calibration on vacuum: 1 / <0| int W_vac 2 D(2a) P |0>.
pub fn measure_wigner_calibration(rule: &PlaneQuadrature) -> Result<f64> {
    let vac = DensityMatrix::fock(0, 0)?;
    let (pts, wts) = single_mode_points(rule);
    let w = wigner_function(&vac, &pts, &wts)?;
    let mut acc = 0.0;
    for ((al, v), wt) in w.alphas.iter().zip(&w.values).zip(&w.weights) {
        acc += 2.0 * (displacement_element(0, 0, al[0] * 2.0)).re * v * wt;
    }
    Ok(1.0 / acc)
}

/// Husimi function Q(alpha) = <alpha| rho |alpha> / pi (single mode).
pub fn husimi_q(rho: &DensityMatrix, alpha: Complex64) -> Result<f64> {
    let cutoff = match rho.basis() {
        Basis::Fock1 { cutoff } => cutoff,
        b => return Err(Error::BasisMismatch { expected: "fock1".into(), found: b.name().into() }),
    };
    let coh = DVector::from_fn(cutoff + 1, |n, _| displacement_element(n, 0, alpha));
    Ok((coh.adjoint() * rho.matrix() * &coh)[(0, 0)].re / PI)
}

/// Identity matrix helper used by tests and the oracle.
pub fn identity(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |r, c| if r == c { C1 } else { C0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::random_spin_state;
    use crate::quadrature::make_euler_quadrature;
    use crate::specfun::wigner_small_d;

    fn h(t: i64) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn dequantizer_examples() {
        let j = h(3);
        let u = spin_dequantizer_matrix(j, h(1), EulerAngles::IDENTITY).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let want = if r == 1 && c == 1 { 1.0 } else { 0.0 };
                assert!((u[(r, c)] - Complex64::new(want, 0.0)).norm() < 1e-15);
            }
        }
        let omega = EulerAngles::new(0.3, 1.1, 2.0);
        let mut sum = DMatrix::from_element(4, 4, C0);
        for m in j.projections() {
            sum += spin_dequantizer_matrix(j, m, omega).unwrap();
        }
        assert!((sum - identity(4)).camax() < 1e-14);
        let b = 0.77;
        let u = spin_dequantizer_matrix(h(1), h(1), EulerAngles::new(0.0, b, 0.0)).unwrap();
        assert!((u[(0, 0)].re - (b / 2.0).cos().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn spin_tomogram_examples() {
        let up = DensityMatrix::pure(Basis::Spin { j: h(1) }, &DVector::from_vec(vec![C1, C0])).unwrap();
        let grid = make_euler_quadrature(h(1));
        let t = spin_tomogram(&up, &grid).unwrap();
        for (node, row) in grid.nodes.iter().zip(&t.values) {
            let c = (node.beta / 2.0).cos().powi(2);
            assert!((row[0] - c).abs() < 1e-14 && (row[1] - (1.0 - c)).abs() < 1e-14);
        }
        let mixed = DensityMatrix::maximally_mixed(Basis::Spin { j: h(3) });
        let t = spin_tomogram(&mixed, &make_euler_quadrature(h(3))).unwrap();
        assert!(t.values.iter().flatten().all(|v| (v - 0.25).abs() < 1e-14));
    }

    #[test]
    fn quantizer_expansion_agrees_with_small_d() {
        // a_L(m) reproduces |m><m| = sum_L a_L(m) T_{L0}
        for tj in 1..5 {
            let j = h(tj);
            for m in j.projections() {
                let mut acc = DMatrix::from_element(j.dim(), j.dim(), C0);
                for l in 0..=(tj as usize) {
                    acc += ito_operator(j, l, 0) * Complex64::new(projector_ito_coefficient(j, m, l), 0.0);
                }
                let mut want = DMatrix::from_element(j.dim(), j.dim(), C0);
                want[(j.index_of(m), j.index_of(m))] = C1;
                assert!((acc - want).camax() < 1e-14);
            }
        }
        assert!((wigner_small_d(h(2), h(0), h(0), 0.4).unwrap() - 0.4f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn spin_round_trip() {
        for tj in 1..=4 {
            let j = h(tj);
            let grid = make_euler_quadrature(j);
            for seed in 0..5 {
                let rho = random_spin_state(j, seed).density_matrix();
                let t = spin_tomogram(&rho, &grid).unwrap();
                let back = reconstruct_spin(&t).unwrap();
                assert!(back.max_abs_diff(&rho) < 1e-12, "j={j} seed={seed}");
            }
        }
    }

    #[test]
    fn symplectic_overlap_examples() {
        let v = symplectic_dequantizer_overlap(0, 0.6, 1.0, 0.0).unwrap();
        assert!((v.re - PI.powf(-0.25) * (-0.18f64).exp()).abs() < 1e-15);
        assert!(matches!(symplectic_dequantizer_overlap(0, 0.0, 0.0, 0.0), Err(Error::DegenerateFrame)));
    }

    #[test]
    fn photon_tomogram_of_vacuum_is_poissonian() {
        let vac = DensityMatrix::fock(4, 0).unwrap();
        let a = Complex64::new(0.7, -0.4);
        let t = photon_tomogram(&vac, &[vec![a]], &[1.0], 30).unwrap();
        let x = a.norm_sqr();
        for n in 0..=30 {
            let want = (-x).exp() * x.powi(n as i32) / crate::specfun::ln_factorial(n).exp();
            assert!((t.values[0][n] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn wigner_of_fock_states_at_origin() {
        let o = Complex64::new(0.0, 0.0);
        let vac = DensityMatrix::fock(3, 0).unwrap();
        let one = DensityMatrix::fock(3, 1).unwrap();
        let w0 = wigner_function(&vac, &[vec![o]], &[1.0]).unwrap().values[0];
        let w1 = wigner_function(&one, &[vec![o]], &[1.0]).unwrap().values[0];
        assert!((w0 - 1.0 / PI).abs() < 1e-15);
        assert!((w1 + 1.0 / PI).abs() < 1e-15);
    }
}
