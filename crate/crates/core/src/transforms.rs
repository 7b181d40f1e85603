//! Tomogram-to-tomogram transforms between spin tomograms and the two-mode
//! CV representations, and between single-mode photon-number and symplectic
//! tomograms, evaluated with the closed-form kernels.
//!
//! Spin -> CV: the Omega integral of sum_m omega K is done first on the spin
//! factor of the kernel, sum_g w_g sum_m omega(m, Omega_g) D_{m1 m2}(m, Omega_g),
//! and the result is contracted with the per-mode CV dequantizer elements at
//! every output point.
//!
//! CV -> spin: the CV integral of W K is done first on the per-mode quantizer
//! elements, giving sector moments X_{m2 m1}; the spin tomogram is then
//! sum U_{m1 m2} X_{m2 m1} divided by the denominator integral.

use crate::error::{Error, Result};
use crate::kernels::{
    denom_trace_photon, kernel_photon_to_sympl, photon_dequantizer_element, photon_quantizer_element,
    sympl_dequantizer_element, wigner_dequantizer_element, wigner_quantizer_element, SpinTables,
};
use crate::quadrature::{EulerQuadrature, LineQuadrature, PlaneQuadrature};
use crate::specfun::{displacement_element, laguerre, HalfInt};
use crate::tomography::{
    characteristic, clamp_negative, frame_xi, optical_angle_count, ordering_ratio, radial_rule, Frame,
    PhotonTomogram, SpinTomogram, SymplecticTomogram, WignerGrid, XGrid,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

const C0: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Raw,
    Renormalized,
}

/// Which photon-number labels enter the photon -> spin denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Denominator {
    /// All n1, n2 (equals the sector weight).
    Full,
    /// Only n1 + n2 = 2j.
    SectorOnly,
}

/// Tomogram tied to one excitation sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Restricted<T> {
    pub j: HalfInt,
    pub normalization: Normalization,
    /// Sector weight (spin -> CV: trace of the spin state; CV -> spin: denominator).
    pub weight: f64,
    pub tomogram: T,
}

// ---------------------------------------------------------------------------
// Spin -> CV
// ---------------------------------------------------------------------------

/// sum_g w_g sum_m omega(m, Omega_g) D(m, Omega_g) from the kernel tables.
pub fn integrate_spin_factor(tomogram: &SpinTomogram, tables: &SpinTables) -> Result<DMatrix<Complex64>> {
    let j = tomogram.j;
    tomogram.grid.check_exact_for(j)?;
    let dim = j.dim();
    let parts: Vec<Result<DMatrix<Complex64>>> = tomogram
        .grid
        .nodes
        .par_iter()
        .zip(&tomogram.grid.weights)
        .zip(&tomogram.values)
        .map(|((omega, w), row)| {
            let mut acc = DMatrix::from_element(dim, dim, C0);
            for (m, v) in j.projections().zip(row) {
                acc += tables.quantizer(m, *omega)? * Complex64::new(v * w, 0.0);
            }
            Ok(acc)
        })
        .collect();
    let mut acc = DMatrix::from_element(dim, dim, C0);
    for p in parts {
        acc += p?;
    }
    Ok(acc)
}

fn restricted<T>(j: HalfInt, s: &DMatrix<Complex64>, tomogram: T) -> Restricted<T> {
    Restricted { j, normalization: Normalization::Raw, weight: s.trace().re, tomogram }
}

fn check_real(v: Complex64, what: &str) -> Result<f64> {
    if v.im.abs() > 1e-9 * v.re.abs().max(1.0) {
        return Err(Error::Numerical(format!("{what}: imaginary residue {:e}", v.im)));
    }
    Ok(v.re)
}

/// Per-mode element table e[(a, b)] for a, b in 0..=2j.
fn mode_table<F: Fn(usize, usize) -> Complex64>(tj: usize, f: F) -> DMatrix<Complex64> {
    DMatrix::from_fn(tj + 1, tj + 1, f)
}

/// sum_{m1 m2} S_{m1 m2} A(j+m2, j+m1) B(j-m2, j-m1) from precomputed tables.
fn contract_tables(j: HalfInt, s: &DMatrix<Complex64>, a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    let tj = j.twice() as usize;
    let mut acc = C0;
    for r in 0..=tj {
        // index r <-> m1 = j - r: j + m1 = tj - r, j - m1 = r
        for c in 0..=tj {
            acc += s[(r, c)] * a[(tj - c, tj - r)] * b[(c, r)];
        }
    }
    acc
}

/// Restricted two-mode symplectic tomogram W^{(2j)}(x | mu, nu) on a product x grid.
pub fn spin_to_symplectic(tomogram: &SpinTomogram, x: XGrid, frames: &[Frame]) -> Result<Restricted<SymplecticTomogram>> {
    let j = tomogram.j;
    let tj = j.twice() as usize;
    let tables = SpinTables::new(j);
    let s = integrate_spin_factor(tomogram, &tables)?;
    let xs = x.points();
    let mut values = Vec::with_capacity(frames.len() * xs.len() * xs.len());
    let mut clamped = 0;
    for fr in frames {
        if fr.mu.len() != 2 || fr.nu.len() != 2 {
            return Err(Error::InvalidArgument("spin -> symplectic needs two-mode frames".into()));
        }
        let tables_for = |mode: usize| -> Result<Vec<DMatrix<Complex64>>> {
            xs.iter()
                .map(|&xv| {
                    sympl_dequantizer_element(0, 0, xv, fr.mu[mode], fr.nu[mode])?;
                    Ok(mode_table(tj, |a, b| {
                        sympl_dequantizer_element(a, b, xv, fr.mu[mode], fr.nu[mode]).expect("checked frame")
                    }))
                })
                .collect()
        };
        let f1 = tables_for(0)?;
        let f2 = tables_for(1)?;
        let raw: Vec<Result<f64>> = f1
            .par_iter()
            .flat_map_iter(|a| f2.iter().map(|b| check_real(contract_tables(j, &s, a, b), "spin -> symplectic")))
            .collect();
        for v in raw {
            values.push(clamp_negative(v?, &mut clamped)?);
        }
    }
    let t = SymplecticTomogram { modes: 2, x, frames: frames.to_vec(), values, clamped };
    Ok(restricted(j, &s, t))
}

/// Restricted two-mode photon-number tomogram at the given (alpha1, alpha2)
/// points for all n1, n2 <= cutoff.
pub fn spin_to_photon(
    tomogram: &SpinTomogram,
    alphas: &[[Complex64; 2]],
    cutoff: usize,
) -> Result<Restricted<PhotonTomogram>> {
    let j = tomogram.j;
    let tj = j.twice() as usize;
    let tables = SpinTables::new(j);
    let s = integrate_spin_factor(tomogram, &tables)?;
    let rows: Vec<Result<Vec<f64>>> = alphas
        .par_iter()
        .map(|al| {
            let t1: Vec<DMatrix<Complex64>> =
                (0..=cutoff).map(|n| mode_table(tj, |a, b| photon_dequantizer_element(a, b, n, al[0]))).collect();
            let t2: Vec<DMatrix<Complex64>> =
                (0..=cutoff).map(|n| mode_table(tj, |a, b| photon_dequantizer_element(a, b, n, al[1]))).collect();
            let mut row = Vec::with_capacity((cutoff + 1) * (cutoff + 1));
            for a in &t1 {
                for b in &t2 {
                    row.push(check_real(contract_tables(j, &s, a, b), "spin -> photon")?);
                }
            }
            Ok(row)
        })
        .collect();
    let mut clamped = 0;
    let mut values = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row?;
        let mut out = Vec::with_capacity(row.len());
        for v in row {
            out.push(clamp_negative(v, &mut clamped)?);
        }
        values.push(out);
    }
    let t = PhotonTomogram {
        modes: 2,
        cutoff,
        alphas: alphas.iter().map(|a| a.to_vec()).collect(),
        weights: vec![1.0; alphas.len()],
        values,
        clamped,
    };
    Ok(restricted(j, &s, t))
}

/// Restricted two-mode Wigner function at the given points.
pub fn spin_to_wigner(
    tomogram: &SpinTomogram,
    alphas: &[[Complex64; 2]],
    weights: &[f64],
) -> Result<Restricted<WignerGrid>> {
    if weights.len() != alphas.len() {
        return Err(Error::InvalidArgument("weights and points differ in length".into()));
    }
    let j = tomogram.j;
    let tj = j.twice() as usize;
    let tables = SpinTables::new(j);
    let s = integrate_spin_factor(tomogram, &tables)?;
    let values: Result<Vec<f64>> = alphas
        .par_iter()
        .map(|al| {
            let a = mode_table(tj, |x, y| wigner_dequantizer_element(x, y, al[0]));
            let b = mode_table(tj, |x, y| wigner_dequantizer_element(x, y, al[1]));
            check_real(contract_tables(j, &s, &a, &b), "spin -> Wigner")
        })
        .collect();
    let t = WignerGrid {
        modes: 2,
        alphas: alphas.iter().map(|a| a.to_vec()).collect(),
        weights: weights.to_vec(),
        values: values?,
    };
    Ok(restricted(j, &s, t))
}

// ---------------------------------------------------------------------------
// CV -> spin
// ---------------------------------------------------------------------------

/// Options for the CV -> spin transforms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToSpinOptions {
    /// Output Euler grid; defaults to the exact rule for j.
    pub grid: Option<EulerQuadrature>,
    pub normalization: Normalization,
    pub denominator: Denominator,
}

impl Default for ToSpinOptions {
    fn default() -> Self {
        ToSpinOptions { grid: None, normalization: Normalization::Renormalized, denominator: Denominator::Full }
    }
}

/// Sector moments X_{r c} = int W <j+m_r, j-m_r| D |j+m_c, j-m_c> in descending-m indices,
/// built from per-mode moment tables x1[(a1,b1)] x2[(a2,b2)] accumulated by the caller.
struct SectorMoments {
    tj: usize,
    /// flat index ((a1 * (tj+1) + b1) * (tj+1) + a2) * (tj+1) + b2
    acc: Vec<Complex64>,
}

impl SectorMoments {
    fn new(tj: usize) -> Self {
        SectorMoments { tj, acc: vec![C0; (tj + 1).pow(4)] }
    }

    fn add(&mut self, weight: Complex64, a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) {
        let n = self.tj + 1;
        // only sector entries a1 + a2 = b1 + b2 = 2j are needed
        for a1 in 0..n {
            let a2 = self.tj - a1;
            for b1 in 0..n {
                let b2 = self.tj - b1;
                self.acc[((a1 * n + b1) * n + a2) * n + b2] += weight * a[(a1, b1)] * b[(a2, b2)];
            }
        }
    }

    fn merge(mut self, other: SectorMoments) -> Self {
        for (x, y) in self.acc.iter_mut().zip(other.acc) {
            *x += y;
        }
        self
    }

    /// Block in spin indices: row r <-> m = j - r <-> (a1, a2) = (2j - r, r).
    fn block(&self) -> DMatrix<Complex64> {
        let n = self.tj + 1;
        DMatrix::from_fn(n, n, |r, c| {
            let (a1, a2) = (self.tj - r, r);
            let (b1, b2) = (self.tj - c, c);
            self.acc[((a1 * n + b1) * n + a2) * n + b2]
        })
    }
}

/// omega(m, Omega) = sum U_{m1 m2} X_{m2 m1} / denominator on the output grid.
fn spin_from_moments(
    j: HalfInt,
    block: &DMatrix<Complex64>,
    denominator: f64,
    opts: &ToSpinOptions,
) -> Result<Restricted<SpinTomogram>> {
    if denominator.abs() < 1e-10 {
        return Err(Error::EmptySector { twice_j: j.twice(), weight: denominator });
    }
    let grid = opts.grid.clone().unwrap_or_else(|| crate::quadrature::make_euler_quadrature(j));
    let tables = SpinTables::new(j);
    let scale = match opts.normalization {
        Normalization::Raw => 1.0,
        Normalization::Renormalized => 1.0 / denominator,
    };
    let mut clamped = 0;
    let mut values = Vec::with_capacity(grid.len());
    for omega in &grid.nodes {
        let mut row = Vec::with_capacity(j.dim());
        for m in j.projections() {
            let u = tables.dequantizer(m, *omega)?;
            // sum_{r,c} U_{rc} X_{cr} = Tr[U X]
            let v = (u * block).trace() * scale;
            row.push(clamp_negative(check_real(v, "CV -> spin")?, &mut clamped)?);
        }
        values.push(row);
    }
    Ok(Restricted {
        j,
        normalization: opts.normalization,
        weight: denominator,
        tomogram: SpinTomogram { j, grid, values },
    })
}

/// Spin tomogram of the sector-2j part of a two-mode state given by its optical
/// symplectic tomogram (uniform frames theta_k = pi k / n per mode).
pub fn symplectic_to_spin(
    tomogram: &SymplecticTomogram,
    j: HalfInt,
    opts: &ToSpinOptions,
) -> Result<Restricted<SpinTomogram>> {
    if tomogram.modes != 2 {
        return Err(Error::InvalidArgument("symplectic -> spin needs a two-mode tomogram".into()));
    }
    let n_theta = optical_angle_count(tomogram)?;
    let tj = j.twice() as usize;
    let ys = tomogram.x.points();
    let wy = tomogram.x.rule().weights;
    let ny = ys.len();
    let y_max = tomogram.x.min.abs().max(tomogram.x.max.abs());
    let radial = radial_rule(tj, y_max);
    let nr = radial.len();
    // signed radial nodes: r and -r with weight |r| w_r
    let rs: Vec<f64> = radial.nodes.iter().copied().chain(radial.nodes.iter().map(|r| -r)).collect();
    let rw: Vec<f64> = radial.nodes.iter().zip(&radial.weights).map(|(r, w)| r * w).collect();
    let rw: Vec<f64> = rw.iter().chain(rw.iter()).copied().collect();
    let dtheta = PI / n_theta as f64;
    let thetas: Vec<f64> = (0..n_theta).map(|k| PI * k as f64 / n_theta as f64).collect();
    // per-mode M tables on signed radial nodes, per angle
    let m_tables: Vec<Vec<DMatrix<Complex64>>> = thetas
        .iter()
        .map(|t| {
            let xi = frame_xi(t.cos(), t.sin());
            rs.iter().map(|r| mode_table(tj, |a, b| displacement_element(a, b, xi * *r))).collect()
        })
        .collect();
    // e^{i r y} for signed nodes
    let phases: Vec<Vec<Complex64>> =
        rs.iter().map(|r| ys.iter().map(|y| Complex64::from_polar(1.0, r * y)).collect()).collect();
    let pre = Complex64::new(dtheta * dtheta / (4.0 * PI * PI), 0.0);
    let frame_count = tomogram.frames.len();
    let moments = (0..frame_count)
        .into_par_iter()
        .map(|f| {
            let (k1, k2) = (f / n_theta, f % n_theta);
            let vals = tomogram.frame_values(f);
            // G(r1, y2) = sum_y1 w_y1 e^{i r1 y1} W(y1, y2)
            let mut g = vec![C0; 2 * nr * ny];
            for (i1, y1w) in wy.iter().enumerate() {
                let row = &vals[i1 * ny..(i1 + 1) * ny];
                for (ri, ph) in phases.iter().enumerate() {
                    let c = ph[i1] * *y1w;
                    let dst = &mut g[ri * ny..(ri + 1) * ny];
                    for (d, v) in dst.iter_mut().zip(row) {
                        *d += c * *v;
                    }
                }
            }
            // chi(r1, r2) = sum_y2 w_y2 e^{i r2 y2} G(r1, y2), contracted with mode-2 tables
            let mut out = SectorMoments::new(tj);
            for ri in 0..2 * nr {
                let gi = &g[ri * ny..(ri + 1) * ny];
                let mut inner = DMatrix::from_element(tj + 1, tj + 1, C0);
                for (rj, ph) in phases.iter().enumerate() {
                    let mut chi = C0;
                    for ((gv, w), e) in gi.iter().zip(&wy).zip(ph) {
                        chi += gv * e * *w;
                    }
                    inner += &m_tables[k2][rj] * (chi * rw[rj]);
                }
                out.add(pre * rw[ri], &m_tables[k1][ri], &inner);
            }
            out
        })
        .reduce(|| SectorMoments::new(tj), SectorMoments::merge);
    let block = moments.block();
    let denominator = check_real(block.trace(), "symplectic -> spin denominator")?;
    spin_from_moments(j, &block, denominator, opts)
}

/// Gaussian-polar rule per mode for photon -> spin at ordering s: the integrand
/// sum_n g^{-n} w_n(alpha) <a|D(-alpha) g^N D(alpha)|b> is a polynomial times
/// exp(-4|alpha|^2/(1-s^2)) for states supported on a sector.
pub fn photon_to_spin_rule(j: HalfInt, s: f64) -> Result<PlaneQuadrature> {
    ordering_ratio(s)?;
    let tj = j.twice() as usize;
    PlaneQuadrature::gaussian_polar(2 * tj + 3, tj + 3, 4.0 / (1.0 - s * s))
}

/// Photon-number cutoff per mode that converges sum_n g^{-n} w_n on `rule`.
pub fn photon_to_spin_cutoff(rule: &PlaneQuadrature, j: HalfInt, s: f64) -> usize {
    crate::tomography::photon_sum_cutoff(rule.max_radius(), s, j.twice() as usize)
}

/// Gaussian-polar rule per mode for Wigner -> spin (integrand decays as exp(-4|alpha|^2)).
pub fn wigner_to_spin_rule(j: HalfInt) -> Result<PlaneQuadrature> {
    let tj = j.twice() as usize;
    PlaneQuadrature::gaussian_polar(2 * tj + 3, tj + 3, 4.0)
}

/// Spin tomogram of the sector-2j part of a two-mode state from its photon-number
/// tomogram sampled on a product plane rule (weights carried by the tomogram).
pub fn photon_to_spin(
    tomogram: &PhotonTomogram,
    j: HalfInt,
    s: f64,
    opts: &ToSpinOptions,
) -> Result<Restricted<SpinTomogram>> {
    if tomogram.modes != 2 {
        return Err(Error::InvalidArgument("photon -> spin needs a two-mode tomogram".into()));
    }
    let g = ordering_ratio(s)?;
    let tj = j.twice() as usize;
    let nc = tomogram.cutoff + 1;
    let parts: Vec<Result<(SectorMoments, f64)>> = tomogram
        .alphas
        .par_iter()
        .zip(&tomogram.values)
        .zip(&tomogram.weights)
        .map(|((al, row), w)| {
            // S = sum_{n1 n2} g^{-n1-n2} w_{n1 n2}
            let mut sum = 0.0;
            let mut edge: f64 = 0.0;
            let mut scale = 0.0;
            for n1 in 0..nc {
                for n2 in 0..nc {
                    let term = row[n1 * nc + n2] * g.powi(-((n1 + n2) as i32));
                    sum += term;
                    scale = f64::max(scale, term.abs());
                    if n1 + 2 >= nc || n2 + 2 >= nc {
                        edge = edge.max(term.abs());
                    }
                }
            }
            if edge > 1e-10 * scale.max(1e-300) && edge > 1e-14 {
                return Err(Error::CutoffTooSmall {
                    cutoff: tomogram.cutoff,
                    reason: format!("sum_n g^-n w_n not converged at |alpha| = ({:.3}, {:.3})", al[0].norm(), al[1].norm()),
                });
            }
            let q1 = mode_table(tj, |a, b| photon_quantizer_element(a, b, 0, al[0], s).unwrap());
            let q2 = mode_table(tj, |a, b| photon_quantizer_element(a, b, 0, al[1], s).unwrap());
            let mut m = SectorMoments::new(tj);
            m.add(Complex64::new(sum * w, 0.0), &q1, &q2);
            let mut sector_den = 0.0;
            if opts.denominator == Denominator::SectorOnly {
                for n1 in 0..=tj.min(tomogram.cutoff) {
                    let n2 = tj - n1;
                    if n2 < nc {
                        sector_den += row[n1 * nc + n2] * denom_trace_photon(j, [n1, n2], [al[0], al[1]], s)?;
                    }
                }
            }
            Ok((m, sector_den * w))
        })
        .collect();
    let mut moments = SectorMoments::new(tj);
    let mut sector_den = 0.0;
    for p in parts {
        let (m, d) = p?;
        moments = moments.merge(m);
        sector_den += d;
    }
    let block = moments.block();
    let denominator = match opts.denominator {
        Denominator::Full => check_real(block.trace(), "photon -> spin denominator")?,
        Denominator::SectorOnly => sector_den,
    };
    spin_from_moments(j, &block, denominator, opts)
}

/// Spin tomogram of the sector-2j part of a two-mode state from its Wigner
/// function sampled on a product plane rule.
pub fn wigner_to_spin(grid: &WignerGrid, j: HalfInt, opts: &ToSpinOptions) -> Result<Restricted<SpinTomogram>> {
    if grid.modes != 2 {
        return Err(Error::InvalidArgument("Wigner -> spin needs a two-mode grid".into()));
    }
    let tj = j.twice() as usize;
    let moments = grid
        .alphas
        .par_iter()
        .zip(&grid.values)
        .zip(&grid.weights)
        .map(|((al, v), w)| {
            let q1 = mode_table(tj, |a, b| wigner_quantizer_element(a, b, al[0]));
            let q2 = mode_table(tj, |a, b| wigner_quantizer_element(a, b, al[1]));
            let mut m = SectorMoments::new(tj);
            m.add(Complex64::new(v * w, 0.0), &q1, &q2);
            m
        })
        .reduce(|| SectorMoments::new(tj), SectorMoments::merge);
    let block = moments.block();
    let denominator = check_real(block.trace(), "Wigner -> spin denominator")?;
    spin_from_moments(j, &block, denominator, opts)
}

// ---------------------------------------------------------------------------
// Photon <-> symplectic (single mode)
// ---------------------------------------------------------------------------

/// W(x | mu, nu) = int d^2alpha sum_n w_n(alpha) K_{w->W}(x, mu, nu, n, alpha).
pub fn photon_to_symplectic(
    tomogram: &PhotonTomogram,
    x: XGrid,
    frames: &[Frame],
    s: f64,
) -> Result<SymplecticTomogram> {
    if tomogram.modes != 1 {
        return Err(Error::InvalidArgument("photon -> symplectic needs a single-mode tomogram".into()));
    }
    let g = ordering_ratio(s)?;
    let weighted: Vec<f64> = tomogram
        .values
        .iter()
        .zip(&tomogram.weights)
        .map(|(row, w)| {
            let (sum, _) = crate::tomography::weighted_number_sum(row, g);
            sum * w
        })
        .collect();
    let xs = x.points();
    let mut values = Vec::new();
    let mut clamped = 0;
    for fr in frames {
        if fr.mu.len() != 1 {
            return Err(Error::InvalidArgument("photon -> symplectic needs single-mode frames".into()));
        }
        let (mu, nu) = (fr.mu[0], fr.nu[0]);
        kernel_photon_to_sympl(0.0, mu, nu, 0, C0, s)?;
        let col: Vec<f64> = xs
            .par_iter()
            .map(|&xv| {
                tomogram
                    .alphas
                    .iter()
                    .zip(&weighted)
                    .map(|(al, sw)| sw * kernel_photon_to_sympl(xv, mu, nu, 0, al[0], s).expect("checked frame"))
                    .sum()
            })
            .collect();
        for v in col {
            values.push(clamp_negative(v, &mut clamped)?);
        }
    }
    Ok(SymplecticTomogram { modes: 1, x, frames: frames.to_vec(), values, clamped })
}

/// w_n(alpha) = int dx dmu dnu W(x | mu, nu) K_{W->w}(x, mu, nu, n, alpha), in polar form
/// over optical samples: sum_theta dtheta int_R |r| dr chi(r, theta) K(0, r cos, r sin, n, alpha).
pub fn symplectic_to_photon(
    tomogram: &SymplecticTomogram,
    alphas: &[Complex64],
    cutoff: usize,
) -> Result<PhotonTomogram> {
    if tomogram.modes != 1 {
        return Err(Error::InvalidArgument("symplectic -> photon needs a single-mode tomogram".into()));
    }
    let n_theta = optical_angle_count(tomogram)?;
    let ys = tomogram.x.points();
    let wy = tomogram.x.rule().weights;
    let y_max = tomogram.x.min.abs().max(tomogram.x.max.abs());
    let a_max = alphas.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let radial: LineQuadrature = radial_rule(cutoff, y_max + SQRT_2 * a_max);
    let dtheta = PI / n_theta as f64;
    let chis: Vec<Vec<(Complex64, Complex64)>> = (0..n_theta)
        .into_par_iter()
        .map(|k| characteristic(tomogram.frame_values(k), &ys, &wy, &radial.nodes))
        .collect();
    let lag: Vec<Vec<f64>> = radial
        .nodes
        .iter()
        .map(|r| {
            let t = r * r / 2.0;
            crate::specfun::laguerre_table(cutoff, 0.0, t).iter().map(|l| l * (-t / 2.0).exp()).collect()
        })
        .collect();
    let rows: Vec<Vec<f64>> = alphas
        .par_iter()
        .map(|al| {
            let mut row = vec![C0; cutoff + 1];
            for (k, chi) in chis.iter().enumerate() {
                let theta = PI * k as f64 / n_theta as f64;
                let proj = SQRT_2 * (theta.cos() * al.re + theta.sin() * al.im);
                for (i, (r, wr)) in radial.nodes.iter().zip(&radial.weights).enumerate() {
                    let (cp, cm) = chi[i];
                    let e = Complex64::from_polar(1.0, r * proj);
                    let f = (cp * e + cm * e.conj()) * (r * wr * dtheta / (2.0 * PI));
                    for (n, l) in lag[i].iter().enumerate() {
                        row[n] += f * *l;
                    }
                }
            }
            row.iter().map(|v| v.re).collect()
        })
        .collect();
    let mut clamped = 0;
    let mut values = Vec::with_capacity(rows.len());
    for row in rows {
        let mut out = Vec::with_capacity(row.len());
        for v in row {
            out.push(clamp_negative(v, &mut clamped)?);
        }
        values.push(out);
    }
    Ok(PhotonTomogram {
        modes: 1,
        cutoff,
        alphas: alphas.iter().map(|a| vec![*a]).collect(),
        weights: vec![1.0; alphas.len()],
        values,
        clamped,
    })
}

/// Laguerre helper shared with tests: e^{-t/2} L_n(t).
pub fn damped_laguerre(n: usize, t: f64) -> f64 {
    (-t / 2.0).exp() * laguerre(n, 0.0, t)
}
