//! Closed-form transition kernels between spin tomograms and the two-mode
//! continuous-variable representations, plus the sector denominators.
//!
//! Every spin/CV kernel has the shape
//! K = sum_{m1,m2} S_{m1 m2} A(j+m2, j+m1) B(j-m2, j-m1)
//! with S the spin dequantizer (CV -> spin) or quantizer (spin -> CV) matrix and
//! A, B the per-mode Fock elements of the CV quantizer or dequantizer.

use crate::error::{Error, Result};
use crate::specfun::{
    binomial, cg_unchecked, displacement_element, hermite_table, laguerre, ln_factorial, small_d_unchecked,
    EulerAngles, HalfInt,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Parameters of a spin/CV kernel evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub j: HalfInt,
    pub m: HalfInt,
    pub omega: EulerAngles,
    pub x: [f64; 2],
    pub mu: [f64; 2],
    pub nu: [f64; 2],
    pub alpha: [Complex64; 2],
    pub n_vec: [usize; 2],
    pub s_param: f64,
}

impl KernelParams {
    pub fn new(j: HalfInt, m: HalfInt, omega: EulerAngles) -> Self {
        KernelParams {
            j,
            m,
            omega,
            x: [0.0; 2],
            mu: [1.0; 2],
            nu: [0.0; 2],
            alpha: [C0; 2],
            n_vec: [0; 2],
            s_param: 0.5,
        }
    }

    /// xi_k = -(i/sqrt2)(mu_k + i nu_k).
    pub fn xi(&self) -> [Complex64; 2] {
        [xi_of(self.mu[0], self.nu[0]), xi_of(self.mu[1], self.nu[1])]
    }
}

pub fn xi_of(mu: f64, nu: f64) -> Complex64 {
    Complex64::new(0.0, -1.0 / SQRT_2) * Complex64::new(mu, nu)
}

/// Per-j tables: CG coefficients of the ITO expansion and the projector coefficients a_L(m).
#[derive(Clone, Debug)]
pub struct SpinTables {
    pub j: HalfInt,
    /// ito[L][(i1, i2)] = (-1)^{j-m2} <j m1; j -m2 | L, m1-m2>.
    ito: Vec<DMatrix<f64>>,
    /// proj[L][i] = (2L+1)/(8 pi^2) (-1)^{j-m} <j m; j -m | L 0>.
    proj: Vec<Vec<f64>>,
}

impl SpinTables {
    pub fn new(j: HalfInt) -> Self {
        let tj = j.twice();
        let dim = j.dim();
        let sign = |t: i64| if ((tj - t) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let mut ito = Vec::new();
        let mut proj = Vec::new();
        for l in 0..=(tj as usize) {
            let tl = 2 * l as i64;
            ito.push(DMatrix::from_fn(dim, dim, |r, c| {
                let m1 = j.projection_at(r).twice();
                let m2 = j.projection_at(c).twice();
                sign(m2) * cg_unchecked(tj, m1, tj, -m2, tl, m1 - m2)
            }));
            proj.push(
                (0..dim)
                    .map(|i| {
                        let m = j.projection_at(i).twice();
                        (2 * l + 1) as f64 / (8.0 * PI * PI) * sign(m) * cg_unchecked(tj, m, tj, -m, tl, 0)
                    })
                    .collect(),
            );
        }
        SpinTables { j, ito, proj }
    }

    fn index(&self, m: HalfInt) -> Result<usize> {
        let j = self.j;
        if m.twice().abs() > j.twice() || (j.twice() - m.twice()) % 2 != 0 {
            return Err(Error::LabelOutOfRange(format!("m = {m} for j = {j}")));
        }
        Ok(j.index_of(m))
    }

    /// Dequantizer elements U_{m1 m2} = D^{j*}_{m,m1}(Omega) D^j_{m,m2}(Omega).
    pub fn dequantizer(&self, m: HalfInt, omega: EulerAngles) -> Result<DMatrix<Complex64>> {
        self.index(m)?;
        let j = self.j;
        let row: Vec<Complex64> = (0..j.dim())
            .map(|c| {
                let mc = j.projection_at(c);
                let d = small_d_unchecked(j.twice(), m.twice(), mc.twice(), omega.beta);
                Complex64::from_polar(d, -(m.value() * omega.alpha + mc.value() * omega.gamma))
            })
            .collect();
        Ok(DMatrix::from_fn(j.dim(), j.dim(), |r, c| row[r].conj() * row[c]))
    }

    /// Quantizer elements D_{m1 m2} = sum_L (2L+1)/(8pi^2) a_L(m) D^{L*}_{0, m1-m2}(Omega) (T_{L, m1-m2})_{m1 m2}.
    pub fn quantizer(&self, m: HalfInt, omega: EulerAngles) -> Result<DMatrix<Complex64>> {
        let im = self.index(m)?;
        let j = self.j;
        let dim = j.dim();
        let mut out = DMatrix::from_element(dim, dim, C0);
        for (l, (ito, proj)) in self.ito.iter().zip(&self.proj).enumerate() {
            let a = proj[im];
            if a == 0.0 {
                continue;
            }
            let tl = 2 * l as i64;
            for r in 0..dim {
                for c in 0..dim {
                    let t = ito[(r, c)];
                    if t == 0.0 {
                        continue;
                    }
                    let big_m = (j.projection_at(r).twice() - j.projection_at(c).twice()) / 2;
                    if big_m.abs() > l as i64 {
                        continue;
                    }
                    // D^{L*}_{0,M} = d^L_{0M}(beta) e^{i M gamma}
                    let d = small_d_unchecked(tl, 0, 2 * big_m, omega.beta);
                    out[(r, c)] += Complex64::from_polar(a * d * t, big_m as f64 * omega.gamma);
                }
            }
        }
        Ok(out)
    }
}

/// sum_{m1,m2} S_{m1 m2} A(j+m2, j+m1) B(j-m2, j-m1).
pub fn sector_contract<A, B>(j: HalfInt, s: &DMatrix<Complex64>, a: A, b: B) -> Complex64
where
    A: Fn(usize, usize) -> Complex64,
    B: Fn(usize, usize) -> Complex64,
{
    let tj = j.twice();
    let mut acc = C0;
    for r in 0..j.dim() {
        let m1 = j.projection_at(r).twice();
        for c in 0..j.dim() {
            let m2 = j.projection_at(c).twice();
            let v = s[(r, c)];
            if v == C0 {
                continue;
            }
            let (p1, p2) = (((tj + m1) / 2) as usize, ((tj + m2) / 2) as usize);
            let (q1, q2) = (((tj - m1) / 2) as usize, ((tj - m2) / 2) as usize);
            acc += v * a(p2, p1) * b(q2, q1);
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Per-mode Fock elements
// ---------------------------------------------------------------------------

/// <a| e^{ix} D(xi) / 2pi |b>, the symplectic quantizer element.
pub fn sympl_quantizer_element(a: usize, b: usize, x: f64, mu: f64, nu: f64) -> Complex64 {
    Complex64::from_polar(1.0 / (2.0 * PI), x) * displacement_element(a, b, xi_of(mu, nu))
}

/// <a| delta(x - mu q - nu p) |b> in Hermite-sum form:
/// (1/(sqrt(2pi)|xi|)) e^{-x^2/(2|xi|^2)} sqrt(min!/max!) phi (i/(sqrt2|xi|))^D
/// sum_s C(min+D, min-s) H_{D+2s}(x/(sqrt2|xi|)) / (s! 2^s),
/// phi = xi^D for a >= b and (-xi^*)^D otherwise.
pub fn sympl_dequantizer_element(a: usize, b: usize, x: f64, mu: f64, nu: f64) -> Result<Complex64> {
    let xi = xi_of(mu, nu);
    let r = xi.norm();
    if r == 0.0 {
        return Err(Error::DegenerateFrame);
    }
    let (lo, hi) = if a >= b { (b, a) } else { (a, b) };
    let delta = hi - lo;
    let u = x / (SQRT_2 * r);
    let h = hermite_table(delta + 2 * lo, u);
    let mut sum = 0.0;
    for s in 0..=lo {
        sum += binomial(lo + delta, lo - s) * h[delta + 2 * s] / (ln_factorial(s).exp() * 2f64.powi(s as i32));
    }
    let base = if a >= b { xi } else { -xi.conj() };
    let phase = (base * Complex64::new(0.0, 1.0) / (SQRT_2 * r)).powu(delta as u32);
    let mag = (-x * x / (2.0 * r * r)).exp() / ((2.0 * PI).sqrt() * r)
        * (0.5 * (ln_factorial(lo) - ln_factorial(hi))).exp();
    Ok(phase * mag * sum)
}

/// <a| D(-alpha) |n><n| D(alpha) |b>, the photon-number dequantizer element.
pub fn photon_dequantizer_element(a: usize, b: usize, n: usize, alpha: Complex64) -> Complex64 {
    displacement_element(a, n, -alpha) * displacement_element(n, b, alpha)
}

/// Number of l terms kept in photon quantizer sums.
pub fn photon_l_terms(n: usize, a: usize, b: usize, alpha: Complex64, g: f64) -> usize {
    let x = alpha.norm_sqr();
    let geometric = ((1e-14f64).ln() / g.abs().ln()).ceil() as usize;
    n.max(a).max(b) + geometric + (x + 10.0 * (x + 1.0).sqrt()).ceil() as usize + 10
}

/// <a| 4/(pi(1-s^2)) D(-alpha) g^{N-n} D(alpha) |b> with g = (s-1)/(s+1).
pub fn photon_quantizer_element(a: usize, b: usize, n: usize, alpha: Complex64, s: f64) -> Result<Complex64> {
    let g = ordering(s)?;
    let terms = photon_l_terms(n, a, b, alpha, g);
    let mut acc = C0;
    // g^{l-n}, accumulated from l = 0 in log space to avoid overflow of g^{-n}.
    let lg = g.abs().ln();
    for l in 0..=terms {
        let e = l as f64 - n as f64;
        let w = (e * lg).exp() * if (l + n).is_multiple_of(2) || g > 0.0 { 1.0 } else { -1.0 };
        acc += displacement_element(a, l, -alpha) * displacement_element(l, b, alpha) * w;
    }
    Ok(acc * (4.0 / (PI * (1.0 - s * s))))
}

fn ordering(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::OrderingOutOfDomain(s));
    }
    Ok((s - 1.0) / (s + 1.0))
}

fn parity_sign(b: usize) -> f64 {
    if b.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// <a| D(2 alpha) P |b> / pi, the Wigner dequantizer element.
pub fn wigner_dequantizer_element(a: usize, b: usize, alpha: Complex64) -> Complex64 {
    displacement_element(a, b, alpha * 2.0) * (parity_sign(b) / PI)
}

/// <a| 4 D(2 alpha) P |b>, the calibrated Wigner quantizer element.
pub fn wigner_quantizer_element(a: usize, b: usize, alpha: Complex64) -> Complex64 {
    displacement_element(a, b, alpha * 2.0) * (4.0 * parity_sign(b))
}

// ---------------------------------------------------------------------------
// Spin <-> CV kernels
// ---------------------------------------------------------------------------

/// Tr[D_sympl(x, mu, nu) U_j(m, Omega)].
pub fn kernel_sympl_to_spin(p: &KernelParams) -> Result<Complex64> {
    let u = SpinTables::new(p.j).dequantizer(p.m, p.omega)?;
    Ok(sector_contract(
        p.j,
        &u,
        |a, b| sympl_quantizer_element(a, b, p.x[0], p.mu[0], p.nu[0]),
        |a, b| sympl_quantizer_element(a, b, p.x[1], p.mu[1], p.nu[1]),
    ))
}

/// Tr[U_sympl(x, mu, nu) D_j(m, Omega)].
pub fn kernel_spin_to_sympl(p: &KernelParams) -> Result<Complex64> {
    for k in 0..2 {
        if p.mu[k] == 0.0 && p.nu[k] == 0.0 {
            return Err(Error::DegenerateFrame);
        }
    }
    let d = SpinTables::new(p.j).quantizer(p.m, p.omega)?;
    Ok(sector_contract(
        p.j,
        &d,
        |a, b| sympl_dequantizer_element(a, b, p.x[0], p.mu[0], p.nu[0]).unwrap(),
        |a, b| sympl_dequantizer_element(a, b, p.x[1], p.mu[1], p.nu[1]).unwrap(),
    ))
}

/// Tr[D_{n_vec}(alpha) U_j(m, Omega)].
pub fn kernel_photon_to_spin(p: &KernelParams) -> Result<Complex64> {
    ordering(p.s_param)?;
    let u = SpinTables::new(p.j).dequantizer(p.m, p.omega)?;
    Ok(sector_contract(
        p.j,
        &u,
        |a, b| photon_quantizer_element(a, b, p.n_vec[0], p.alpha[0], p.s_param).unwrap(),
        |a, b| photon_quantizer_element(a, b, p.n_vec[1], p.alpha[1], p.s_param).unwrap(),
    ))
}

/// Tr[U_{n_vec}(alpha) D_j(m, Omega)].
pub fn kernel_spin_to_photon(p: &KernelParams) -> Result<Complex64> {
    let d = SpinTables::new(p.j).quantizer(p.m, p.omega)?;
    Ok(sector_contract(
        p.j,
        &d,
        |a, b| photon_dequantizer_element(a, b, p.n_vec[0], p.alpha[0]),
        |a, b| photon_dequantizer_element(a, b, p.n_vec[1], p.alpha[1]),
    ))
}

/// Tr[D_W(alpha) U_j(m, Omega)] with the calibrated Wigner quantizer.
pub fn kernel_wigner_to_spin(p: &KernelParams) -> Result<Complex64> {
    let u = SpinTables::new(p.j).dequantizer(p.m, p.omega)?;
    Ok(sector_contract(
        p.j,
        &u,
        |a, b| wigner_quantizer_element(a, b, p.alpha[0]),
        |a, b| wigner_quantizer_element(a, b, p.alpha[1]),
    ))
}

/// Tr[U_W(alpha) D_j(m, Omega)].
pub fn kernel_spin_to_wigner(p: &KernelParams) -> Result<Complex64> {
    let d = SpinTables::new(p.j).quantizer(p.m, p.omega)?;
    Ok(sector_contract(
        p.j,
        &d,
        |a, b| wigner_dequantizer_element(a, b, p.alpha[0]),
        |a, b| wigner_dequantizer_element(a, b, p.alpha[1]),
    ))
}

// ---------------------------------------------------------------------------
// Sector denominators
// ---------------------------------------------------------------------------

/// Tr[Pi_2j D_sympl(x, mu, nu)] = e^{i(x1+x2)}/(2pi)^2 e^{-(|xi1|^2+|xi2|^2)/2} sum_m L_{j+m}(|xi1|^2) L_{j-m}(|xi2|^2).
pub fn denom_trace_sympl(j: HalfInt, x: [f64; 2], mu: [f64; 2], nu: [f64; 2]) -> Complex64 {
    let t1 = xi_of(mu[0], nu[0]).norm_sqr();
    let t2 = xi_of(mu[1], nu[1]).norm_sqr();
    let tj = j.twice() as usize;
    let sum: f64 = (0..=tj).map(|k| laguerre(k, 0.0, t1) * laguerre(tj - k, 0.0, t2)).sum();
    Complex64::from_polar((-(t1 + t2) / 2.0).exp() * sum / (4.0 * PI * PI), x[0] + x[1])
}

/// Tr[Pi_2j D_{n_vec}(alpha)] from the generating function
/// sum_l z^l |<l|D(alpha)|a>|^2 = z^a e^{-(1-z)|alpha|^2} L_a(-(1-z)^2 |alpha|^2 / z).
pub fn denom_trace_photon(j: HalfInt, n_vec: [usize; 2], alpha: [Complex64; 2], s: f64) -> Result<f64> {
    let g = ordering(s)?;
    let c = 4.0 / (PI * (1.0 - s * s));
    let diag = |a: usize, n: usize, al: Complex64| {
        let x = al.norm_sqr();
        let gen = g.powi(a as i32) * (-(1.0 - g) * x).exp() * laguerre(a, 0.0, -(1.0 - g).powi(2) * x / g);
        c * gen * g.powi(-(n as i32))
    };
    let tj = j.twice() as usize;
    Ok((0..=tj).map(|k| diag(k, n_vec[0], alpha[0]) * diag(tj - k, n_vec[1], alpha[1])).sum())
}

/// Tr[Pi_2j 4D(2a1)P x 4D(2a2)P] = 16 (-1)^{2j} e^{-2X} L^{(1)}_{2j}(4X), X = |a1|^2 + |a2|^2.
pub fn denom_trace_wigner(j: HalfInt, alpha: [Complex64; 2]) -> f64 {
    let x = alpha[0].norm_sqr() + alpha[1].norm_sqr();
    let tj = j.twice() as usize;
    16.0 * parity_sign(tj) * (-2.0 * x).exp() * laguerre(tj, 1.0, 4.0 * x)
}

// ---------------------------------------------------------------------------
// Single-mode symplectic <-> photon kernels
// ---------------------------------------------------------------------------

/// Tr[D_sympl(x, mu, nu) U_n(alpha)] =
/// (1/2pi) e^{ix} e^{i sqrt2 (mu Re alpha + nu Im alpha)} e^{-(mu^2+nu^2)/4} L_n((mu^2+nu^2)/2).
pub fn kernel_sympl_to_photon(x: f64, mu: f64, nu: f64, n: usize, alpha: Complex64) -> Complex64 {
    let r2 = mu * mu + nu * nu;
    let phase = x + SQRT_2 * (mu * alpha.re + nu * alpha.im);
    Complex64::from_polar((-r2 / 4.0).exp() * laguerre(n, 0.0, r2 / 2.0) / (2.0 * PI), phase)
}

/// Tr[D_n(alpha) U_sympl(x, mu, nu)] =
/// 2/(pi^{3/2}(1-s) sqrt(s) r) g^{-n} exp(-(x + sqrt2 (mu Re alpha + nu Im alpha))^2 / (s r^2)).
pub fn kernel_photon_to_sympl(x: f64, mu: f64, nu: f64, n: usize, alpha: Complex64, s: f64) -> Result<f64> {
    let g = ordering(s)?;
    let r = mu.hypot(nu);
    if r == 0.0 {
        return Err(Error::DegenerateFrame);
    }
    let shift = x + SQRT_2 * (mu * alpha.re + nu * alpha.im);
    let pre = 2.0 / (PI.powf(1.5) * (1.0 - s) * s.sqrt() * r);
    Ok(pre * g.powi(-(n as i32)) * (-shift * shift / (s * r * r)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sympl_to_photon_examples() {
        let v = kernel_sympl_to_photon(0.0, 1.0, 0.0, 0, C0);
        assert!((v.re - (-0.25f64).exp() / (2.0 * PI)).abs() < 1e-15 && v.im.abs() < 1e-15);
        let v = kernel_sympl_to_photon(0.7, 0.0, 0.0, 3, Complex64::new(0.3, 0.2));
        assert!((v - Complex64::from_polar(1.0 / (2.0 * PI), 0.7)).norm() < 1e-15);
    }

    #[test]
    fn wigner_denominator_at_origin() {
        for tj in 0..4 {
            let j = HalfInt::from_twice(tj);
            let want = 16.0 * parity_sign(tj as usize) * (tj + 1) as f64;
            assert!((denom_trace_wigner(j, [C0, C0]) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn sympl_denominator_small_xi_limit() {
        let j = HalfInt::from_twice(3);
        let v = denom_trace_sympl(j, [0.2, 0.1], [1e-9, 1e-9], [0.0, 0.0]);
        let want = Complex64::from_polar(4.0 / (4.0 * PI * PI), 0.3);
        assert!((v - want).norm() < 1e-12);
    }

    #[test]
    fn spin_tables_match_rotation_matrix() {
        let j = HalfInt::from_twice(3);
        let omega = EulerAngles::new(0.4, 1.2, -0.7);
        let r = crate::specfun::rotation_matrix(j, omega);
        let t = SpinTables::new(j);
        for (i, m) in j.projections().enumerate() {
            let u = t.dequantizer(m, omega).unwrap();
            for a in 0..4 {
                for b in 0..4 {
                    assert!((u[(a, b)] - r[(i, a)].conj() * r[(i, b)]).norm() < 1e-14);
                }
            }
        }
    }
}
