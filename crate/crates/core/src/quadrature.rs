//! Node/weight rules: Gauss rules on the line, the Euler-angle product rule
//! for SU(2) integrals, and complex-plane grids.

use crate::error::{Error, Result};
use crate::specfun::{EulerAngles, HalfInt};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Golub-Welsch: nodes and weights from a symmetric tridiagonal Jacobi matrix.
fn golub_welsch(diag: &[f64], off: &[f64], mu0: f64) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jm[(i, i)] = diag[i];
        if i + 1 < n {
            jm[(i, i + 1)] = off[i];
            jm[(i + 1, i)] = off[i];
        }
    }
    let eig = SymmetricEigen::new(jm);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let (x, w) = golub_welsch(&diag, &off, 2.0);
    polish_legendre(n, x, w)
}

// Newton steps on the Legendre recurrence tighten the eigen-solver nodes to
// full precision; weights come from the derivative.
fn polish_legendre(n: usize, x: Vec<f64>, _w: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for mut xi in x {
        for _ in 0..2 {
            let (p, d) = legendre_with_derivative(n, xi);
            xi -= p / d;
        }
        let (_, d) = legendre_with_derivative(n, xi);
        nodes.push(xi);
        weights.push(2.0 / ((1.0 - xi * xi) * d * d));
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// n-point Gauss-Laguerre rule for the weight e^{-t} on [0, inf).
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Laguerre rule needs at least one node");
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|k| k as f64).collect();
    golub_welsch(&diag, &off, 1.0)
}

/// Weighted nodes on the real line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LineQuadrature {
    /// Trapezoid rule on min, min+step, ..., max.
    pub fn trapezoid(min: f64, max: f64, step: f64) -> Result<Self> {
        let nodes = uniform_points(min, max, step)?;
        let n = nodes.len();
        let mut weights = vec![step; n];
        if n > 1 {
            weights[0] *= 0.5;
            weights[n - 1] *= 0.5;
        }
        Ok(LineQuadrature { nodes, weights })
    }

    /// Composite Gauss-Legendre with `panels` equal panels of `order` nodes.
    pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(lo + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        LineQuadrature { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Points min, min+step, ..., max (max included when it lies on the lattice).
pub fn uniform_points(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(max >= min) || !min.is_finite() || !max.is_finite() {
        return Err(Error::InvalidArgument(format!("bad range {min}:{max}:{step}")));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| min + i as f64 * step).collect())
}

/// Product rule over SU(2): Gauss-Legendre in cos(beta), uniform in alpha and gamma.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerQuadrature {
    pub n_alpha: usize,
    pub n_beta: usize,
    pub n_gamma: usize,
    pub nodes: Vec<EulerAngles>,
    pub weights: Vec<f64>,
}

impl EulerQuadrature {
    pub fn new(n_alpha: usize, n_beta: usize, n_gamma: usize) -> Result<Self> {
        if n_alpha == 0 || n_beta == 0 || n_gamma == 0 {
            return Err(Error::InvalidArgument("Euler quadrature orders must be positive".into()));
        }
        let (cb, wb) = gauss_legendre(n_beta);
        let wa = 2.0 * PI / n_alpha as f64;
        let wg = 2.0 * PI / n_gamma as f64;
        let mut nodes = Vec::with_capacity(n_alpha * n_beta * n_gamma);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for ia in 0..n_alpha {
            let alpha = ia as f64 * wa;
            for (c, w) in cb.iter().zip(&wb) {
                let beta = c.clamp(-1.0, 1.0).acos();
                for ig in 0..n_gamma {
                    nodes.push(EulerAngles::new(alpha, beta, ig as f64 * wg));
                    weights.push(wa * w * wg);
                }
            }
        }
        Ok(EulerQuadrature { n_alpha, n_beta, n_gamma, nodes, weights })
    }

    /// Largest rank L for which every D^{(L)}_{M,M'} integrates exactly.
    ///
    /// Only M = M' = 0 survives the uniform alpha/gamma sums (which resolve
    /// frequencies below n_alpha, n_gamma); what remains is P_L(cos beta).
    pub fn exact_rank(&self) -> usize {
        let beta_deg = 2 * self.n_beta - 1;
        beta_deg.min(self.n_alpha - 1).min(self.n_gamma - 1)
    }

    /// Products omega(m, Omega) x quantizer carry total rank up to 4j.
    pub fn check_exact_for(&self, j: HalfInt) -> Result<()> {
        let need = 2 * j.twice() as usize;
        if self.exact_rank() < need {
            return Err(Error::InsufficientQuadrature(format!(
                "Euler rule ({}, {}, {}) is not exact for j = {j}",
                self.n_alpha, self.n_beta, self.n_gamma
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Exact Euler rule for spin j: 2j+2 nodes in cos(beta), 4j+3 in alpha and gamma.
pub fn make_euler_quadrature(j: HalfInt) -> EulerQuadrature {
    let tj = j.twice().max(0) as usize;
    EulerQuadrature::new(2 * tj + 3, tj + 2, 2 * tj + 3).expect("positive orders")
}

/// Weighted points in the complex plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneQuadrature {
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
    pub kind: PlaneRule,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PlaneRule {
    /// Trapezoid product grid on [-radius, radius]^2.
    Square { radius: f64, spacing: f64 },
    /// Square trapezoid lattice with the points outside |alpha| <= radius dropped.
    Disc { radius: f64, spacing: f64 },
    /// Uniform angles times Gauss-Laguerre radii, exact for polynomial x exp(-rate |alpha|^2).
    GaussianPolar { n_angle: usize, n_radial: usize, rate: f64 },
    /// Explicit points with unit weights (evaluation only).
    Points,
}

impl PlaneQuadrature {
    pub fn square(radius: f64, spacing: f64) -> Result<Self> {
        let line = LineQuadrature::trapezoid(-radius, radius, spacing)?;
        let mut points = Vec::with_capacity(line.len() * line.len());
        let mut weights = Vec::with_capacity(points.capacity());
        for (x, wx) in line.nodes.iter().zip(&line.weights) {
            for (y, wy) in line.nodes.iter().zip(&line.weights) {
                points.push(Complex64::new(*x, *y));
                weights.push(wx * wy);
            }
        }
        Ok(PlaneQuadrature { points, weights, kind: PlaneRule::Square { radius, spacing } })
    }

    /// Trapezoid lattice restricted to the disc; suited to integrands that are
    /// negligible outside it.
    pub fn disc(radius: f64, spacing: f64) -> Result<Self> {
        let sq = Self::square(radius, spacing)?;
        let (points, weights) = sq
            .points
            .into_iter()
            .zip(sq.weights)
            .filter(|(p, _)| p.norm() <= radius + 1e-12)
            .unzip();
        Ok(PlaneQuadrature { points, weights, kind: PlaneRule::Disc { radius, spacing } })
    }

    /// Exact for p(alpha, alpha^*) exp(-rate |alpha|^2) when p has angular
    /// frequency below `n_angle` and radial degree (in |alpha|^2) below 2 n_radial.
    pub fn gaussian_polar(n_angle: usize, n_radial: usize, rate: f64) -> Result<Self> {
        if n_angle == 0 || n_radial == 0 || !(rate > 0.0) {
            return Err(Error::InvalidArgument("bad Gaussian polar rule parameters".into()));
        }
        let (t, wt) = gauss_laguerre(n_radial);
        let dphi = 2.0 * PI / n_angle as f64;
        let mut points = Vec::with_capacity(n_angle * n_radial);
        let mut weights = Vec::with_capacity(points.capacity());
        for (tk, wk) in t.iter().zip(&wt) {
            let r = (tk / rate).sqrt();
            let w = wk / (2.0 * rate) * tk.exp() * dphi;
            for l in 0..n_angle {
                points.push(Complex64::from_polar(r, l as f64 * dphi));
                weights.push(w);
            }
        }
        Ok(PlaneQuadrature { points, weights, kind: PlaneRule::GaussianPolar { n_angle, n_radial, rate } })
    }

    pub fn from_points(points: Vec<Complex64>) -> Self {
        let weights = vec![1.0; points.len()];
        PlaneQuadrature { points, weights, kind: PlaneRule::Points }
    }

    pub fn max_radius(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let num: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((num - exact).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn laguerre_rule_integrates_moments() {
        let (t, w) = gauss_laguerre(8);
        for deg in 0..16 {
            let num: f64 = t.iter().zip(&w).map(|(ti, wi)| wi * ti.powi(deg)).sum();
            let exact = crate::specfun::ln_factorial(deg as usize).exp();
            assert_relative_eq!(num, exact, max_relative = 1e-11);
        }
    }

    #[test]
    fn euler_rule_shape_and_weight() {
        let q = make_euler_quadrature(HalfInt::from_twice(1));
        assert_eq!((q.n_beta, q.n_alpha, q.n_gamma, q.len()), (3, 5, 5, 75));
        let total: f64 = q.weights.iter().sum();
        assert_relative_eq!(total, 8.0 * PI * PI, max_relative = 1e-13);
    }

    #[test]
    fn plane_rules() {
        let sq = PlaneQuadrature::square(4.0, 0.1).unwrap();
        let area: f64 = sq.weights.iter().sum();
        assert_relative_eq!(area, 64.0, max_relative = 1e-12);
        let g = PlaneQuadrature::gaussian_polar(6, 6, 2.0).unwrap();
        let val: f64 = g
            .points
            .iter()
            .zip(&g.weights)
            .map(|(a, w)| w * a.norm_sqr().powi(3) * (-2.0 * a.norm_sqr()).exp())
            .sum();
        // int |a|^6 e^{-2|a|^2} d^2a = pi * 3! / 2^4
        assert_relative_eq!(val, PI * 6.0 / 16.0, max_relative = 1e-12);
    }
}
