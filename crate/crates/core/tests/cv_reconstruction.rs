use num_complex::Complex64;
use tomobridge::hilbert::DensityMatrix;
use tomobridge::quadrature::PlaneQuadrature;
use tomobridge::tomography::*;

fn states() -> Vec<(&'static str, DensityMatrix)> {
    vec![
        ("vacuum", DensityMatrix::fock(6, 0).unwrap()),
        ("one", DensityMatrix::fock(6, 1).unwrap()),
        ("coherent", DensityMatrix::coherent(20, Complex64::new(0.4, 0.3)).unwrap()),
    ]
}

#[test]
fn symplectic_round_trip() {
    let x = XGrid::new(-8.0, 8.0, 0.05).unwrap();
    let frames = optical_frames(16, 1);
    for (name, rho) in states() {
        let cutoff = 8;
        let t = symplectic_tomogram(&rho, x, &frames).unwrap();
        let back = reconstruct_from_symplectic(&t, cutoff).unwrap();
        let f = back.repair().unwrap();
        let target = truncate(&rho, cutoff);
        let fid = f.fidelity(&target).unwrap();
        println!("symplectic {name}: fidelity {fid} max diff {}", back.max_abs_diff(&target));
        assert!(fid > 1.0 - 1e-3);
    }
}

#[test]
fn photon_round_trip() {
    let s = 0.5;
    let radius = photon_plane_radius(s);
    let rule = photon_reconstruction_rule(s).unwrap();
    let (pts, wts) = single_mode_points(&rule);
    for (name, rho) in states() {
        let cutoff = 8;
        let n_max = photon_sum_cutoff(radius, s, 6);
        let t = photon_tomogram(&rho, &pts, &wts, n_max).unwrap();
        let back = reconstruct_from_photon(&t, s, cutoff).map_err(|e| e.to_string()).unwrap();
        let target = truncate(&rho, cutoff);
        let fid = back.repair().unwrap().fidelity(&target).unwrap();
        println!("photon {name}: n_max {n_max} fidelity {fid} max diff {}", back.max_abs_diff(&target));
        assert!(fid > 1.0 - 1e-3);
    }
}

#[test]
fn wigner_round_trip() {
    let rule = PlaneQuadrature::square(4.0, 0.1).unwrap();
    let (pts, wts) = single_mode_points(&rule);
    println!("calibration {}", measure_wigner_calibration(&rule).unwrap());
    for (name, rho) in states() {
        let cutoff = 8;
        let w = wigner_function(&rho, &pts, &wts).unwrap();
        let (back, dev) = reconstruct_from_wigner(&w, cutoff).unwrap();
        let target = truncate(&rho, cutoff);
        let fid = back.repair().unwrap().fidelity(&target).unwrap();
        println!("wigner {name}: dev {dev} fidelity {fid} max diff {}", back.max_abs_diff(&target));
        assert!(fid > 1.0 - 1e-3);
    }
}

fn truncate(rho: &DensityMatrix, cutoff: usize) -> DensityMatrix {
    let src = rho.matrix();
    let m = nalgebra::DMatrix::from_fn(cutoff + 1, cutoff + 1, |r, c| {
        if r < src.nrows() && c < src.ncols() { src[(r, c)] } else { Complex64::new(0.0, 0.0) }
    });
    let mut d = DensityMatrix::from_raw(tomobridge::hilbert::Basis::Fock1 { cutoff }, m).unwrap();
    d.normalize_trace().unwrap();
    d
}
