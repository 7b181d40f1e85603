use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use tomobridge::hilbert::{js_forward, js_inverse, random_spin_state, Basis, DensityMatrix};
use tomobridge::quadrature::make_euler_quadrature;
use tomobridge::specfun::{clebsch_gordan, displacement_element, rotation_matrix, small_d_matrix};
use tomobridge::tomography::{photon_tomogram, spin_tomogram, symplectic_tomogram, Frame, SpinTomogram, XGrid};
use tomobridge::transforms::{spin_to_photon, spin_to_symplectic};
use tomobridge::{EulerAngles, HalfInt};

fn identity_error(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    (m * m.adjoint() - DMatrix::<Complex64>::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn mix(a: &DensityMatrix, b: &DensityMatrix, p: f64) -> DensityMatrix {
    let m = a.matrix() * Complex64::new(p, 0.0) + b.matrix() * Complex64::new(1.0 - p, 0.0);
    DensityMatrix::new(a.basis(), m).unwrap()
}

fn combine(a: &SpinTomogram, b: &SpinTomogram, p: f64) -> SpinTomogram {
    let values = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| p * x + (1.0 - p) * y).collect())
        .collect();
    SpinTomogram { j: a.j, grid: a.grid.clone(), values }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn small_d_is_orthogonal(tj in 0i64..=6, beta in 0.0..std::f64::consts::PI) {
        let d = small_d_matrix(HalfInt::from_twice(tj), beta);
        let n = d.nrows();
        let err = (&d * d.transpose() - DMatrix::<f64>::identity(n, n)).abs().max();
        prop_assert!(err < 1e-12, "err {err}");
    }

    #[test]
    fn rotation_matrix_is_unitary(tj in 0i64..=5, a in 0.0..6.3f64, b in 0.0..3.15f64, g in 0.0..6.3f64) {
        let r = rotation_matrix(HalfInt::from_twice(tj), EulerAngles::new(a, b, g));
        prop_assert!(identity_error(&r) < 1e-12);
    }

    #[test]
    fn cg_exchange_symmetry(tj1 in 0i64..=3, tj2 in 0i64..=3, k1 in 0usize..4, k2 in 0usize..4, kj in 0usize..4) {
        let (j1, j2) = (HalfInt::from_twice(tj1), HalfInt::from_twice(tj2));
        let m1 = j1.projections().nth(k1 % j1.dim()).unwrap();
        let m2 = j2.projections().nth(k2 % j2.dim()).unwrap();
        let tjs: Vec<i64> = ((tj1 - tj2).abs()..=tj1 + tj2).step_by(2).collect();
        let big_j = HalfInt::from_twice(tjs[kj % tjs.len()]);
        let big_m = HalfInt::from_twice(m1.twice() + m2.twice());
        prop_assume!(big_m.twice().abs() <= big_j.twice());
        let a = clebsch_gordan(j1, m1, j2, m2, big_j, big_m).unwrap();
        let b = clebsch_gordan(j2, m2, j1, m1, big_j, big_m).unwrap();
        let sign = if ((tj1 + tj2 - big_j.twice()) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a - sign * b).abs() < 1e-12);
    }

    #[test]
    fn displacement_composition(ar in -1.0..1.0f64, ai in -1.0..1.0f64, br in -1.0..1.0f64, bi in -1.0..1.0f64,
                                m in 0usize..6, n in 0usize..6) {
        let (alpha, beta) = (Complex64::new(ar, ai), Complex64::new(br, bi));
        let lhs: Complex64 = (0..80).map(|k| displacement_element(m, k, alpha) * displacement_element(k, n, beta)).sum();
        let phase = ((alpha * beta.conj() - alpha.conj() * beta) * 0.5).exp();
        let rhs = phase * displacement_element(m, n, alpha + beta);
        prop_assert!((lhs - rhs).norm() < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn displacement_columns_are_normalized(ar in -2.0..2.0f64, ai in -2.0..2.0f64, n in 0usize..10) {
        let alpha = Complex64::new(ar, ai);
        let s: f64 = (0..120).map(|k| displacement_element(k, n, alpha).norm_sqr()).sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symplectic_homogeneity(x in -2.0..2.0f64, mu in -1.5..1.5f64, nu in -1.5..1.5f64,
                              lambda in prop_oneof![-3.0..-0.3f64, 0.3..3.0f64], gr in -0.5..0.5f64) {
        prop_assume!(mu.hypot(nu) > 0.2);
        let rho = DensityMatrix::coherent(20, Complex64::new(gr, 0.3)).unwrap();
        let at = |x: f64, mu: f64, nu: f64| {
            symplectic_tomogram(&rho, XGrid::new(x, x, 1.0).unwrap(), &[Frame::single(mu, nu)]).unwrap().values[0]
        };
        let lhs = at(lambda * x, lambda * mu, lambda * nu);
        let rhs = at(x, mu, nu) / lambda.abs();
        prop_assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn spin_tomogram_is_a_probability_table(tj in 1i64..=3, seed in 0u64..1000) {
        let j = HalfInt::from_twice(tj);
        let t = spin_tomogram(&random_spin_state(j, seed).density_matrix(), &make_euler_quadrature(j)).unwrap();
        prop_assert!(t.row_sum_error() < 1e-12);
        prop_assert!(t.values.iter().flatten().all(|&v| v >= 0.0));
    }

    #[test]
    fn spin_tomogram_is_linear(tj in 1i64..=3, s1 in 0u64..1000, s2 in 0u64..1000, p in 0.0..1.0f64) {
        let j = HalfInt::from_twice(tj);
        let grid = make_euler_quadrature(j);
        let a = random_spin_state(j, s1).density_matrix();
        let b = random_spin_state(j, s2).density_matrix();
        let direct = spin_tomogram(&mix(&a, &b, p), &grid).unwrap();
        let combined = combine(&spin_tomogram(&a, &grid).unwrap(), &spin_tomogram(&b, &grid).unwrap(), p);
        prop_assert!(direct.max_abs_diff(&combined) < 1e-13);
    }

    #[test]
    fn spin_to_cv_transforms_are_linear(tj in 1i64..=3, s1 in 0u64..1000, s2 in 0u64..1000, p in 0.0..1.0f64,
                                        a1 in -1.5..1.5f64, a2 in -1.5..1.5f64) {
        let j = HalfInt::from_twice(tj);
        let grid = make_euler_quadrature(j);
        let wa = spin_tomogram(&random_spin_state(j, s1).density_matrix(), &grid).unwrap();
        let wb = spin_tomogram(&random_spin_state(j, s2).density_matrix(), &grid).unwrap();
        let wm = combine(&wa, &wb, p);
        let alphas = [[Complex64::new(a1, 0.2), Complex64::new(a2, -0.4)]];
        let ph = |w: &SpinTomogram| spin_to_photon(w, &alphas, tj as usize).unwrap().tomogram.values.concat();
        let (pa, pb, pm) = (ph(&wa), ph(&wb), ph(&wm));
        for k in 0..pm.len() {
            prop_assert!((pm[k] - (p * pa[k] + (1.0 - p) * pb[k])).abs() < 1e-12);
        }
        let x = XGrid::new(-2.0, 2.0, 0.5).unwrap();
        let frames = [Frame::pair([1.0, a1], [a2, 1.0])];
        let sy = |w: &SpinTomogram| spin_to_symplectic(w, x, &frames).unwrap().tomogram.values;
        let (sa, sb, sm) = (sy(&wa), sy(&wb), sy(&wm));
        for k in 0..sm.len() {
            prop_assert!((sm[k] - (p * sa[k] + (1.0 - p) * sb[k])).abs() < 1e-12);
        }
    }

    #[test]
    fn jordan_schwinger_round_trip(tj in 0i64..=3, seed in 0u64..1000, extra in 0usize..3) {
        let j = HalfInt::from_twice(tj);
        let rho = random_spin_state(j, seed).density_matrix();
        let two_mode = js_inverse(&rho, tj as usize + extra).unwrap();
        let is_fock2 = matches!(two_mode.basis(), Basis::Fock2 { .. });
        prop_assert!(is_fock2);
        let back = js_forward(&two_mode, j).unwrap();
        prop_assert!(back.max_abs_diff(&rho) < 1e-14);
    }

    #[test]
    fn photon_rows_sum_to_one(gr in -1.0..1.0f64, gi in -1.0..1.0f64, ar in -1.5..1.5f64, ai in -1.5..1.5f64) {
        let rho = DensityMatrix::coherent(25, Complex64::new(gr, gi)).unwrap();
        let w = photon_tomogram(&rho, &[vec![Complex64::new(ar, ai)]], &[1.0], 45).unwrap();
        prop_assert!(w.max_tail().abs() < 1e-10);
        prop_assert!(w.values[0].iter().all(|&v| v >= 0.0));
    }
}
