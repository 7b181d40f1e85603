//! Special functions used by the tomogram kernels.
//!
//! Factorial ratios are accumulated in log space. Spin labels are stored as
//! doubled integers so half-integer selection rules are exact.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

pub type ComplexAmplitude = Complex64;

/// Spin label stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(v: i64) -> Self {
        HalfInt { twice: 2 * v }
    }

    pub fn from_f64(v: f64) -> Result<Self> {
        let t = 2.0 * v;
        if !t.is_finite() || (t - t.round()).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("{v} is not a half-integer")));
        }
        Ok(HalfInt { twice: t.round() as i64 })
    }

    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// Dimension 2j+1 of the spin-j space.
    pub fn dim(self) -> usize {
        (self.twice + 1) as usize
    }

    /// Projections m = j, j-1, ..., -j (descending, the basis order used throughout).
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        let t = self.twice;
        (0..=t).map(move |i| HalfInt { twice: t - 2 * i })
    }

    /// Basis index of projection `m` in the descending-m ordering.
    pub fn index_of(self, m: HalfInt) -> usize {
        ((self.twice - m.twice) / 2) as usize
    }

    /// Projection at basis index `i` (i = 0 is m = +j).
    pub fn projection_at(self, i: usize) -> HalfInt {
        HalfInt { twice: self.twice - 2 * i as i64 }
    }

    fn check_projection(self, m: HalfInt) -> Result<()> {
        if self.twice < 0 {
            return Err(Error::LabelOutOfRange(format!("j = {self} is negative")));
        }
        if m.twice.abs() > self.twice || (self.twice - m.twice) % 2 != 0 {
            return Err(Error::LabelOutOfRange(format!("m = {m} not a projection of j = {self}")));
        }
        Ok(())
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad half-integer '{s}'")))?;
            match den.trim() {
                "2" => Ok(HalfInt::from_twice(num)),
                "1" => Ok(HalfInt::from_int(num)),
                _ => Err(Error::InvalidArgument(format!("bad half-integer '{s}'"))),
            }
        } else {
            let v: f64 = s
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad half-integer '{s}'")))?;
            HalfInt::from_f64(v)
        }
    }
}

impl serde::Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> serde::Deserialize<'de> for HalfInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        HalfInt::from_f64(v).map_err(serde::de::Error::custom)
    }
}

/// Euler angles in the z-y-z convention.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub const IDENTITY: EulerAngles = EulerAngles { alpha: 0.0, beta: 0.0, gamma: 0.0 };

    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        EulerAngles { alpha, beta, gamma }
    }
}

const LN_FACT_TABLE: usize = 4096;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0; LN_FACT_TABLE];
        for k in 1..LN_FACT_TABLE {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    })
}

/// ln(n!).
pub fn ln_factorial(n: usize) -> f64 {
    if n < LN_FACT_TABLE {
        return ln_fact_table()[n];
    }
    // Stirling series; relative error far below 1e-16 at this size.
    let x = n as f64 + 1.0;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
}

/// ln C(n, k); `None` when k > n.
pub fn ln_binomial(n: usize, k: usize) -> Option<f64> {
    (k <= n).then(|| ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k))
}

/// Binomial coefficient C(n, k), 0 when k > n.
pub fn binomial(n: usize, k: usize) -> f64 {
    match ln_binomial(n, k) {
        Some(l) if n < 60 => l.exp().round(),
        Some(l) => l.exp(),
        None => 0.0,
    }
}

/// Associated Laguerre polynomial L_n^{(k)}(x) by three-term recurrence.
pub fn laguerre(n: usize, k: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + k - x;
    for i in 1..n {
        let fi = i as f64;
        let next = ((2.0 * fi + 1.0 + k - x) * cur - (fi + k) * prev) / (fi + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// L_0^{(k)}(x), ..., L_n^{(k)}(x).
pub fn laguerre_table(n: usize, k: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(1.0 + k - x);
    for i in 1..n {
        let fi = i as f64;
        let next = ((2.0 * fi + 1.0 + k - x) * out[i] - (fi + k) * out[i - 1]) / (fi + 1.0);
        out.push(next);
    }
    out
}

/// Checked L_n^{(k)}(x); requires n >= 0 and k >= -n.
pub fn assoc_laguerre(n: i64, k: i64, x: f64) -> Result<f64> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!("Laguerre degree {n} < 0")));
    }
    if k < -n {
        return Err(Error::InvalidArgument(format!("Laguerre order {k} < -{n}")));
    }
    Ok(laguerre(n as usize, k as f64, x))
}

/// Physicists' Hermite polynomial H_r(x).
pub fn hermite_poly(r: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if r == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for i in 1..r {
        let next = 2.0 * x * cur - 2.0 * i as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// H_0(x), ..., H_r(x).
pub fn hermite_table(r: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(r + 1);
    out.push(1.0);
    if r == 0 {
        return out;
    }
    out.push(2.0 * x);
    for i in 1..r {
        let next = 2.0 * x * out[i] - 2.0 * i as f64 * out[i - 1];
        out.push(next);
    }
    out
}

pub fn hermite(r: i64, x: f64) -> Result<f64> {
    if r < 0 {
        return Err(Error::InvalidArgument(format!("Hermite degree {r} < 0")));
    }
    Ok(hermite_poly(r as usize, x))
}

/// Normalized oscillator eigenfunctions psi_0(x), ..., psi_n(x).
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * out[0]);
    for k in 1..n {
        let fk = k as f64;
        let next = (2.0 / (fk + 1.0)).sqrt() * x * out[k] - (fk / (fk + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Jacobi polynomial P_n^{(a,b)}(x) by recurrence.
pub fn jacobi(n: i64, a: i64, b: i64, x: f64) -> Result<f64> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!("Jacobi degree {n} < 0")));
    }
    if a < 0 || b < 0 {
        return Err(Error::InvalidArgument(format!("Jacobi parameters ({a}, {b}) must be >= 0")));
    }
    Ok(jacobi_poly(n as usize, a as f64, b as f64, x))
}

pub fn jacobi_poly(n: usize, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        let c1 = 2.0 * k * (k + a + b) * (s - 2.0);
        let c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
        let next = (c2 * cur - c3 * prev) / c1;
        prev = cur;
        cur = next;
    }
    cur
}

/// Small Wigner matrix element d^j_{m,mp}(beta) = <j m| exp(-i beta J_y) |j mp>.
pub fn wigner_small_d(j: HalfInt, m: HalfInt, mp: HalfInt, beta: f64) -> Result<f64> {
    j.check_projection(m)?;
    j.check_projection(mp)?;
    Ok(small_d_unchecked(j.twice, m.twice, mp.twice, beta))
}

/// d^j_{m,mp}(beta) from doubled labels; labels must be valid.
pub(crate) fn small_d_unchecked(tj: i64, tm: i64, tmp: i64, beta: f64) -> f64 {
    // Jacobi form valid on every branch: pick k = min(j+m, j-m, j+m', j-m')
    // so that both Jacobi parameters are non-negative.
    let (row, col) = (tm, tmp);
    let jp_col = (tj + col) / 2;
    let jm_col = (tj - col) / 2;
    let jp_row = (tj + row) / 2;
    let jm_row = (tj - row) / 2;
    let k = jp_col.min(jm_col).min(jp_row).min(jm_row);
    let diff = (row - col) / 2;
    let (a, lambda) = if k == jp_col {
        (diff, diff)
    } else if k == jm_col || k == jp_row {
        (-diff, 0)
    } else {
        (diff, diff)
    };
    let b = tj - 2 * k - a;
    let (k, a, b) = (k as usize, a as usize, b as usize);
    let two_j = tj as usize;
    let ln_norm = 0.5 * (ln_binomial(two_j - k, k + a).unwrap() - ln_binomial(k + b, b).unwrap());
    let sign = if lambda.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    let (s, c) = (0.5 * beta).sin_cos();
    sign * ln_norm.exp() * s.powi(a as i32) * c.powi(b as i32) * jacobi_poly(k, a as f64, b as f64, beta.cos())
}

/// Full rotation matrix element D^j_{m,mp}(Omega) = e^{-i m alpha} d^j_{m,mp}(beta) e^{-i mp gamma}.
#[allow(non_snake_case)]
pub fn wigner_D(j: HalfInt, m: HalfInt, mp: HalfInt, omega: EulerAngles) -> Result<Complex64> {
    let d = wigner_small_d(j, m, mp, omega.beta)?;
    let phase = -(m.value() * omega.alpha + mp.value() * omega.gamma);
    Ok(Complex64::from_polar(d, phase))
}

/// d^j(beta) in the descending-m basis.
pub fn small_d_matrix(j: HalfInt, beta: f64) -> DMatrix<f64> {
    let dim = j.dim();
    DMatrix::from_fn(dim, dim, |r, c| {
        small_d_unchecked(j.twice, j.projection_at(r).twice, j.projection_at(c).twice, beta)
    })
}

/// D^j(Omega) in the descending-m basis; entry (r, c) is <m_r| R(Omega) |m_c>.
pub fn rotation_matrix(j: HalfInt, omega: EulerAngles) -> DMatrix<Complex64> {
    let d = small_d_matrix(j, omega.beta);
    let dim = j.dim();
    DMatrix::from_fn(dim, dim, |r, c| {
        let m = j.projection_at(r).value();
        let mp = j.projection_at(c).value();
        Complex64::from_polar(d[(r, c)], -(m * omega.alpha + mp * omega.gamma))
    })
}

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> (Condon-Shortley phase, Racah sum).
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    big_j: HalfInt,
    big_m: HalfInt,
) -> Result<f64> {
    j1.check_projection(m1)?;
    j2.check_projection(m2)?;
    if big_j.twice < 0 || (j1.twice + j2.twice + big_j.twice) % 2 != 0 {
        return Err(Error::LabelOutOfRange(format!(
            "J = {big_j} incompatible with j1 = {j1}, j2 = {j2}"
        )));
    }
    if big_m.twice.abs() > big_j.twice || (big_j.twice - big_m.twice) % 2 != 0 {
        return Err(Error::LabelOutOfRange(format!("M = {big_m} not a projection of J = {big_j}")));
    }
    Ok(cg_unchecked(j1.twice, m1.twice, j2.twice, m2.twice, big_j.twice, big_m.twice))
}

pub(crate) fn cg_unchecked(tj1: i64, tm1: i64, tj2: i64, tm2: i64, tj: i64, tm: i64) -> f64 {
    if tm1 + tm2 != tm {
        return 0.0;
    }
    if tj < (tj1 - tj2).abs() || tj > tj1 + tj2 {
        return 0.0;
    }
    let h = |t: i64| -> usize { (t / 2) as usize };
    let lf = ln_factorial;
    let ln_pre = 0.5
        * (((tj + 1) as f64).ln() + lf(h(tj + tj1 - tj2)) + lf(h(tj - tj1 + tj2)) + lf(h(tj1 + tj2 - tj))
            - lf(h(tj1 + tj2 + tj) + 1)
            + lf(h(tj + tm))
            + lf(h(tj - tm))
            + lf(h(tj1 - tm1))
            + lf(h(tj1 + tm1))
            + lf(h(tj2 - tm2))
            + lf(h(tj2 + tm2)));
    let kmin = 0.max((tj2 - tj - tm1) / 2).max((tj1 + tm2 - tj) / 2);
    let kmax = ((tj1 + tj2 - tj) / 2).min((tj1 - tm1) / 2).min((tj2 + tm2) / 2);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let terms = [
            k,
            (tj1 + tj2 - tj) / 2 - k,
            (tj1 - tm1) / 2 - k,
            (tj2 + tm2) / 2 - k,
            (tj - tj2 + tm1) / 2 + k,
            (tj - tj1 - tm2) / 2 + k,
        ];
        if terms.iter().any(|&t| t < 0) {
            continue;
        }
        let ln_den: f64 = terms.iter().map(|&t| lf(t as usize)).sum();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (ln_pre - ln_den).exp();
    }
    sum
}

/// <np| D(beta) |n> for the displacement D(beta) = exp(beta a^dag - beta^* a).
pub fn displacement_element(np: usize, n: usize, beta: Complex64) -> Complex64 {
    let x = beta.norm_sqr();
    let gauss = (-0.5 * x).exp();
    if np == n {
        return Complex64::new(gauss * laguerre(n, 0.0, x), 0.0);
    }
    if x == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let (lo, hi) = if np > n { (n, np) } else { (np, n) };
    let delta = hi - lo;
    let ln_mag = delta as f64 * 0.5 * x.ln() + 0.5 * (ln_factorial(lo) - ln_factorial(hi));
    // phase of beta^delta for np > n, of (-beta^*)^delta otherwise
    let phase = if np > n {
        delta as f64 * beta.arg()
    } else {
        delta as f64 * (-beta.conj()).arg()
    };
    let lag = laguerre(lo, delta as f64, x);
    Complex64::from_polar(ln_mag.exp() * gauss * lag, phase)
}

/// Matrix of <a| D(beta) |b> for a, b in 0..=cutoff.
pub fn displacement_matrix(cutoff: usize, beta: Complex64) -> DMatrix<Complex64> {
    DMatrix::from_fn(cutoff + 1, cutoff + 1, |a, b| displacement_element(a, b, beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn h(t: i64) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn halfint_parsing_and_display() {
        assert_eq!("3/2".parse::<HalfInt>().unwrap(), h(3));
        assert_eq!("1".parse::<HalfInt>().unwrap(), h(2));
        assert_eq!("0.5".parse::<HalfInt>().unwrap(), h(1));
        assert!("0.3".parse::<HalfInt>().is_err());
        assert_eq!(h(3).to_string(), "3/2");
        assert_eq!(h(4).to_string(), "2");
        let ms: Vec<_> = h(3).projections().map(|m| m.twice()).collect();
        assert_eq!(ms, vec![3, 1, -1, -3]);
        assert_eq!(h(3).index_of(h(-1)), 2);
    }

    #[test]
    fn laguerre_values() {
        assert_eq!(assoc_laguerre(5, 3, 0.0).unwrap(), 56.0);
        assert_eq!(assoc_laguerre(0, 0, 7.3).unwrap(), 1.0);
        assert!(assoc_laguerre(-1, 0, 1.0).is_err());
        // L_2^{(1)}(x) = (x^2 - 6x + 6)/2
        assert_relative_eq!(assoc_laguerre(2, 1, 1.0).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn hermite_values() {
        assert_eq!(hermite(0, 0.7).unwrap(), 1.0);
        assert_eq!(hermite(1, 0.5).unwrap(), 1.0);
        assert!(hermite(-2, 0.1).is_err());
        // H_6 = 64x^6 - 480x^4 + 720x^2 - 120
        let x: f64 = 1.3;
        let direct = 64.0 * x.powi(6) - 480.0 * x.powi(4) + 720.0 * x * x - 120.0;
        assert_relative_eq!(hermite(6, x).unwrap(), direct, max_relative = 1e-13);
    }

    #[test]
    fn jacobi_values() {
        assert_eq!(jacobi(0, 2, 3, 0.4).unwrap(), 1.0);
        assert_relative_eq!(jacobi(1, 0, 0, 0.37).unwrap(), 0.37, epsilon = 1e-15);
        assert!(jacobi(-1, 0, 0, 0.1).is_err());
    }

    #[test]
    fn small_d_basic() {
        let b = 0.83;
        assert_relative_eq!(wigner_small_d(h(1), h(1), h(1), b).unwrap(), (b / 2.0).cos(), epsilon = 1e-15);
        assert_relative_eq!(wigner_small_d(h(1), h(1), h(-1), b).unwrap(), -(b / 2.0).sin(), epsilon = 1e-15);
        assert_relative_eq!(wigner_small_d(h(2), h(0), h(0), b).unwrap(), b.cos(), epsilon = 1e-15);
        assert!(wigner_small_d(h(2), h(3), h(0), b).is_err());
        for tj in 0..6 {
            let d = small_d_matrix(h(tj), 0.0);
            assert!((d - DMatrix::identity(tj as usize + 1, tj as usize + 1)).amax() < 1e-15);
        }
    }

    #[test]
    fn cg_values() {
        let v = clebsch_gordan(h(1), h(1), h(1), h(-1), h(2), h(0)).unwrap();
        assert_relative_eq!(v, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        let s = clebsch_gordan(h(1), h(1), h(1), h(-1), h(0), h(0)).unwrap();
        assert_relative_eq!(s, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        let a = clebsch_gordan(h(1), h(-1), h(1), h(1), h(0), h(0)).unwrap();
        assert_relative_eq!(a, -std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(clebsch_gordan(h(1), h(1), h(1), h(1), h(2), h(0)).unwrap(), 0.0);
        // <1 1; 1 -1 | 1 0> = 1/sqrt(2)
        let v = clebsch_gordan(h(2), h(2), h(2), h(-2), h(2), h(0)).unwrap();
        assert_relative_eq!(v, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn displacement_basic() {
        let beta = Complex64::new(0.4, -0.7);
        let g = (-0.5 * beta.norm_sqr()).exp();
        assert_relative_eq!(displacement_element(0, 0, beta).re, g, epsilon = 1e-15);
        let e = displacement_element(1, 0, beta);
        assert!((e - beta * g).norm() < 1e-15);
        let e = displacement_element(0, 1, beta);
        assert!((e + beta.conj() * g).norm() < 1e-15);
        assert_eq!(displacement_element(3, 1, Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
    }
}
