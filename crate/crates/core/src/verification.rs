//! Comparison driver: runs each transform through the kernel route and the
//! independent density-matrix route and reports pointwise differences.

use crate::error::{Error, Result};
use crate::hilbert::{make_paper_state, random_spin_state, Basis, DensityMatrix, PaperState};
use crate::kernels;
use crate::oracle::{self, KernelDraw, KernelFamily};
use crate::quadrature::make_euler_quadrature;
use crate::specfun::HalfInt;
use crate::tomography::{
    optical_frames, photon_reconstruction_rule, photon_sum_cutoff, photon_tomogram, product_points,
    single_mode_points, spin_tomogram, symplectic_tomogram, wigner_function, Frame, XGrid,
};
use crate::transforms;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Offender {
    pub index: usize,
    pub computed: f64,
    pub reference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub transform: String,
    pub state: String,
    pub grid: String,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub worst: Vec<Offender>,
    /// Set when one of the two routes failed outright.
    pub error: Option<String>,
}

impl VerificationReport {
    /// Pointwise comparison; a point passes when |c - r| <= max(tol, rel_tol |r|).
    pub fn compare(
        transform: &str,
        state: &str,
        grid: &str,
        computed: &[f64],
        reference: &[f64],
        tolerance: f64,
        rel_tolerance: f64,
    ) -> Self {
        let mut max_abs: f64 = 0.0;
        let mut max_rel: f64 = 0.0;
        let mut pass = computed.len() == reference.len();
        let mut offenders: Vec<Offender> = Vec::new();
        for (i, (c, r)) in computed.iter().zip(reference).enumerate() {
            let err = (c - r).abs();
            let rel = if r.abs() > 0.0 { err / r.abs() } else { err };
            max_abs = max_abs.max(err);
            max_rel = max_rel.max(rel);
            if !(err <= tolerance.max(rel_tolerance * r.abs())) {
                pass = false;
            }
            offenders.push(Offender { index: i, computed: *c, reference: *r });
        }
        offenders.sort_by(|a, b| {
            let ea = (a.computed - a.reference).abs();
            let eb = (b.computed - b.reference).abs();
            eb.total_cmp(&ea).then(a.index.cmp(&b.index))
        });
        offenders.truncate(10);
        VerificationReport {
            transform: transform.into(),
            state: state.into(),
            grid: grid.into(),
            max_abs_error: max_abs,
            max_rel_error: max_rel,
            tolerance,
            pass,
            worst: offenders,
            error: None,
        }
    }

    pub fn failure(transform: &str, state: &str, grid: &str, tolerance: f64, err: &Error) -> Self {
        VerificationReport {
            transform: transform.into(),
            state: state.into(),
            grid: grid.into(),
            max_abs_error: f64::INFINITY,
            max_rel_error: f64::INFINITY,
            tolerance,
            pass: false,
            worst: Vec::new(),
            error: Some(err.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// Transform verification
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformId {
    SpinToSymplectic,
    SpinToPhoton,
    SpinToWigner,
    SymplecticToSpin,
    PhotonToSpin,
    WignerToSpin,
    PhotonToSymplectic,
    SymplecticToPhoton,
}

impl TransformId {
    pub const ALL: [TransformId; 8] = [
        TransformId::SpinToSymplectic,
        TransformId::SpinToPhoton,
        TransformId::SpinToWigner,
        TransformId::SymplecticToSpin,
        TransformId::PhotonToSpin,
        TransformId::WignerToSpin,
        TransformId::PhotonToSymplectic,
        TransformId::SymplecticToPhoton,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TransformId::SpinToSymplectic => "spin_to_symplectic",
            TransformId::SpinToPhoton => "spin_to_photon",
            TransformId::SpinToWigner => "spin_to_wigner",
            TransformId::SymplecticToSpin => "symplectic_to_spin",
            TransformId::PhotonToSpin => "photon_to_spin",
            TransformId::WignerToSpin => "wigner_to_spin",
            TransformId::PhotonToSymplectic => "photon_to_symplectic",
            TransformId::SymplecticToPhoton => "symplectic_to_photon",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s || t.name().replace('_', "-") == s)
    }

    /// Whether the transform starts from (or ends in) a spin tomogram.
    pub fn is_spin(self) -> bool {
        !matches!(self, TransformId::PhotonToSymplectic | TransformId::SymplecticToPhoton)
    }

    /// Default tolerance of the verification profile.
    pub fn default_tolerance(self) -> f64 {
        match self {
            TransformId::SpinToSymplectic | TransformId::SpinToPhoton | TransformId::SpinToWigner => 1e-6,
            _ => 1e-4,
        }
    }
}

/// A test state for verification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Paper { which: PaperState },
    RandomSpin { j: HalfInt, seed: u64 },
    Fock { n: usize },
}

impl StateSpec {
    pub fn id(&self) -> String {
        match self {
            StateSpec::Paper { which } => which.id().to_string(),
            StateSpec::RandomSpin { j, seed } => format!("random_j{j}_seed{seed}"),
            StateSpec::Fock { n } => format!("fock_{n}"),
        }
    }

    /// Spin density matrix for spin specs.
    pub fn spin_state(&self) -> Result<DensityMatrix> {
        match self {
            StateSpec::Paper { which } => Ok(make_paper_state(*which).density_matrix()),
            StateSpec::RandomSpin { j, seed } => Ok(random_spin_state(*j, *seed).density_matrix()),
            StateSpec::Fock { .. } => Err(Error::InvalidArgument("Fock spec is not a spin state".into())),
        }
    }
}

/// Grid presets for verification runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub name: String,
    /// x lattice for spin -> symplectic (two-mode) and photon -> symplectic outputs.
    pub x: XGrid,
    /// Two-mode frames for spin -> symplectic.
    pub frames2: Vec<Frame>,
    /// Displacement pairs for spin -> photon / spin -> Wigner.
    pub alpha_pairs: Vec<[Complex64; 2]>,
    /// Optical input lattice (y grid, angles per mode) for symplectic -> spin / photon.
    pub optical_y: XGrid,
    pub n_theta: usize,
    /// Ordering parameter for photon routes.
    pub s: f64,
}

impl GridSpec {
    /// Moderate grids used by `verify`.
    pub fn default_profile() -> Self {
        let pts = [0.0, 0.5, 1.0, 1.5];
        let mut alpha_pairs: Vec<[Complex64; 2]> =
            pts.iter().map(|&a| [Complex64::new(a, 0.0), Complex64::new(a, 0.0)]).collect();
        alpha_pairs.push([Complex64::new(0.3, -0.7), Complex64::new(-0.4, 0.2)]);
        alpha_pairs.push([Complex64::new(-1.1, 0.5), Complex64::new(0.0, 0.9)]);
        alpha_pairs.push([Complex64::new(0.2, 0.2), Complex64::new(-0.6, -0.6)]);
        GridSpec {
            name: "default".into(),
            x: XGrid { min: -4.0, max: 4.0, step: 0.2 },
            frames2: vec![Frame::pair([1.0, 1.0], [1.0, 1.0]), Frame::pair([0.5, -1.2], [0.8, 0.3])],
            alpha_pairs,
            optical_y: XGrid { min: -6.0, max: 6.0, step: 0.1 },
            n_theta: 8,
            s: 0.5,
        }
    }

    /// x in [-5, 5]^2 step 0.1 at mu = nu = (1, 1).
    pub fn fig3() -> Self {
        GridSpec {
            name: "fig3".into(),
            x: XGrid { min: -5.0, max: 5.0, step: 0.1 },
            frames2: vec![Frame::pair([1.0, 1.0], [1.0, 1.0])],
            ..Self::default_profile()
        }
    }

    /// alpha1 = alpha2 in {0, 0.5, 1.0, 1.5}.
    pub fn fig4() -> Self {
        GridSpec {
            name: "fig4".into(),
            alpha_pairs: FIG4_ALPHAS.iter().map(|&a| [Complex64::new(a, 0.0), Complex64::new(a, 0.0)]).collect(),
            ..Self::default_profile()
        }
    }
}

pub const FIG4_ALPHAS: [f64; 4] = [0.0, 0.5, 1.0, 1.5];

fn flatten_photon(values: &[Vec<f64>], cutoff: usize, keep: usize) -> Vec<f64> {
    let nc = cutoff + 1;
    values
        .iter()
        .flat_map(|row| (0..=keep).flat_map(move |n1| (0..=keep).map(move |n2| row[n1 * nc + n2])))
        .collect()
}

/// Runs the kernel route and the stepwise density-matrix route and compares them.
pub fn verify_transform(id: TransformId, state: &StateSpec, grid: &GridSpec, tolerance: f64) -> VerificationReport {
    let name = id.name();
    let sid = state.id();
    match run_both(id, state, grid) {
        Ok((kernel, oracle)) => VerificationReport::compare(name, &sid, &grid.name, &kernel, &oracle, tolerance, 0.0),
        Err(e) => VerificationReport::failure(name, &sid, &grid.name, tolerance, &e),
    }
}

/// (kernel route, oracle route) values for one transform and state.
pub fn run_both(id: TransformId, state: &StateSpec, grid: &GridSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((kernel_route(id, state, grid)?, oracle_route(id, state, grid)?))
}

fn spin_input(state: &StateSpec) -> Result<(DensityMatrix, HalfInt)> {
    let rho = state.spin_state()?;
    match rho.basis() {
        Basis::Spin { j } => Ok((rho, j)),
        b => Err(Error::BasisMismatch { expected: "spin".into(), found: b.name().into() }),
    }
}

fn fock_input(state: &StateSpec) -> Result<usize> {
    match state {
        StateSpec::Fock { n } => Ok(*n),
        _ => Err(Error::InvalidArgument("photon/symplectic checks use Fock states".into())),
    }
}

/// Test frames and evaluation points for the photon <-> symplectic checks.
fn single_mode_frames() -> [Frame; 3] {
    [Frame::single(1.0, 0.0), Frame::single(0.6, 0.8), Frame::single(0.5, -1.5)]
}

const SINGLE_MODE_X: XGrid = XGrid { min: -4.0, max: 4.0, step: 0.1 };
const SINGLE_MODE_CUTOFF: usize = 10;

fn single_mode_alphas() -> Vec<Complex64> {
    [(0.0, 0.0), (0.5, 0.0), (0.3, -0.8), (-1.0, 0.4), (1.2, 1.1)]
        .iter()
        .map(|&(a, b)| Complex64::new(a, b))
        .collect()
}

/// Kernel-based values, flattened in the order used for comparison.
pub fn kernel_route(id: TransformId, state: &StateSpec, grid: &GridSpec) -> Result<Vec<f64>> {
    match id {
        TransformId::SpinToSymplectic | TransformId::SpinToPhoton | TransformId::SpinToWigner => {
            let (rho, j) = spin_input(state)?;
            let omega = spin_tomogram(&rho, &make_euler_quadrature(j))?;
            let tj = j.twice() as usize;
            Ok(match id {
                TransformId::SpinToSymplectic => transforms::spin_to_symplectic(&omega, grid.x, &grid.frames2)?.tomogram.values,
                TransformId::SpinToPhoton => {
                    let k = transforms::spin_to_photon(&omega, &grid.alpha_pairs, tj)?;
                    flatten_photon(&k.tomogram.values, tj, tj)
                }
                _ => {
                    let wts = vec![1.0; grid.alpha_pairs.len()];
                    transforms::spin_to_wigner(&omega, &grid.alpha_pairs, &wts)?.tomogram.values
                }
            })
        }
        TransformId::SymplecticToSpin | TransformId::PhotonToSpin | TransformId::WignerToSpin => {
            let (spin, j) = spin_input(state)?;
            let source = oracle::mixed_source(&spin, j)?;
            let opts = transforms::ToSpinOptions::default();
            let k = match id {
                TransformId::SymplecticToSpin => {
                    let w = symplectic_tomogram(&source, grid.optical_y, &optical_frames(grid.n_theta, 2))?;
                    transforms::symplectic_to_spin(&w, j, &opts)?
                }
                TransformId::PhotonToSpin => {
                    let rule = transforms::photon_to_spin_rule(j, grid.s)?;
                    let cutoff = transforms::photon_to_spin_cutoff(&rule, j, grid.s);
                    let (pts, wts) = product_points(&rule, &rule);
                    let w = photon_tomogram(&source, &pts, &wts, cutoff)?;
                    transforms::photon_to_spin(&w, j, grid.s, &opts)?
                }
                _ => {
                    let rule = transforms::wigner_to_spin_rule(j)?;
                    let (pts, wts) = product_points(&rule, &rule);
                    let w = wigner_function(&source, &pts, &wts)?;
                    transforms::wigner_to_spin(&w, j, &opts)?
                }
            };
            Ok(k.tomogram.values.concat())
        }
        TransformId::PhotonToSymplectic => {
            let n = fock_input(state)?;
            let rho = DensityMatrix::fock(n, n)?;
            let rule = photon_reconstruction_rule(grid.s)?;
            let (pts, wts) = single_mode_points(&rule);
            let cutoff = photon_sum_cutoff(rule.max_radius(), grid.s, n);
            let w = photon_tomogram(&rho, &pts, &wts, cutoff)?;
            Ok(transforms::photon_to_symplectic(&w, SINGLE_MODE_X, &single_mode_frames(), grid.s)?.values)
        }
        TransformId::SymplecticToPhoton => {
            let n = fock_input(state)?;
            let rho = DensityMatrix::fock(n, n)?;
            let y = XGrid { min: -8.0, max: 8.0, step: 0.05 };
            let w = symplectic_tomogram(&rho, y, &optical_frames(16, 1))?;
            Ok(transforms::symplectic_to_photon(&w, &single_mode_alphas(), SINGLE_MODE_CUTOFF)?.values.concat())
        }
    }
}

/// Stepwise density-matrix values (no kernel module involved), same layout as [`kernel_route`].
pub fn oracle_route(id: TransformId, state: &StateSpec, grid: &GridSpec) -> Result<Vec<f64>> {
    match id {
        TransformId::SpinToSymplectic | TransformId::SpinToPhoton | TransformId::SpinToWigner => {
            let (rho, j) = spin_input(state)?;
            let omega = spin_tomogram(&rho, &make_euler_quadrature(j))?;
            let tj = j.twice() as usize;
            let embedded = oracle::embedded_from_spin_tomogram(&omega)?;
            let pts: Vec<Vec<Complex64>> = grid.alpha_pairs.iter().map(|a| a.to_vec()).collect();
            Ok(match id {
                TransformId::SpinToSymplectic => symplectic_tomogram(&embedded, grid.x, &grid.frames2)?.values,
                TransformId::SpinToPhoton => {
                    let wide = tj + 60;
                    let o = photon_tomogram(&embedded, &pts, &vec![1.0; pts.len()], wide)?;
                    flatten_photon(&o.values, wide, tj)
                }
                _ => wigner_function(&embedded, &pts, &vec![1.0; pts.len()])?.values,
            })
        }
        TransformId::SymplecticToSpin | TransformId::PhotonToSpin | TransformId::WignerToSpin => {
            let (spin, j) = spin_input(state)?;
            let source = oracle::mixed_source(&spin, j)?;
            let o = oracle::spin_tomogram_of_sector(&source, j, &make_euler_quadrature(j))?;
            Ok(o.values.concat())
        }
        TransformId::PhotonToSymplectic => {
            let n = fock_input(state)?;
            let rho = DensityMatrix::fock(n, n)?;
            Ok(symplectic_tomogram(&rho, SINGLE_MODE_X, &single_mode_frames())?.values)
        }
        TransformId::SymplecticToPhoton => {
            let n = fock_input(state)?;
            let rho = DensityMatrix::fock(n, n)?;
            let pts: Vec<Vec<Complex64>> = single_mode_alphas().iter().map(|a| vec![*a]).collect();
            let o = photon_tomogram(&rho, &pts, &vec![1.0; pts.len()], SINGLE_MODE_CUTOFF + 40)?;
            Ok(flatten_single(&o.values, SINGLE_MODE_CUTOFF))
        }
    }
}

fn flatten_single(values: &[Vec<f64>], keep: usize) -> Vec<f64> {
    values.iter().flat_map(|row| row[..=keep].iter().copied()).collect()
}

/// All verification states: the three reference states, five random states per j <= 3/2
/// (for spin transforms) and vacuum/|1> (for photon <-> symplectic).
pub fn verification_states(id: TransformId, seed: u64) -> Vec<StateSpec> {
    if !id.is_spin() {
        return vec![StateSpec::Fock { n: 0 }, StateSpec::Fock { n: 1 }];
    }
    let mut out: Vec<StateSpec> = PaperState::ALL.iter().map(|&w| StateSpec::Paper { which: w }).collect();
    for tj in 1..=3 {
        for k in 0..5 {
            out.push(StateSpec::RandomSpin { j: HalfInt::from_twice(tj), seed: seed.wrapping_add(100 * tj as u64 + k) });
        }
    }
    out
}

/// Tolerance profile: `None` uses each transform's default tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    pub override_tolerance: Option<f64>,
}

impl ToleranceProfile {
    pub fn default_profile() -> Self {
        ToleranceProfile { override_tolerance: None }
    }

    pub fn tolerance_for(&self, id: TransformId) -> f64 {
        self.override_tolerance.unwrap_or(id.default_tolerance())
    }
}

/// Sweeps every transform over its verification states (order fixed by transform, then state).
pub fn verify_all(seed: u64, profile: ToleranceProfile) -> Vec<VerificationReport> {
    verify_selected(&TransformId::ALL, seed, profile, &GridSpec::default_profile())
}

pub fn verify_selected(
    ids: &[TransformId],
    seed: u64,
    profile: ToleranceProfile,
    grid: &GridSpec,
) -> Vec<VerificationReport> {
    let jobs: Vec<(TransformId, StateSpec)> = ids
        .iter()
        .flat_map(|&id| verification_states(id, seed).into_iter().map(move |s| (id, s)))
        .collect();
    jobs.par_iter()
        .map(|(id, s)| verify_transform(*id, s, grid, profile.tolerance_for(*id)))
        .collect()
}

// ---------------------------------------------------------------------------
// Kernel suite
// ---------------------------------------------------------------------------

/// Closed-form values matching the layout of `oracle::kernel_trace`.
pub fn kernel_closed_form(family: KernelFamily, d: &KernelDraw) -> Result<Vec<Complex64>> {
    let p = kernels::KernelParams {
        j: d.j,
        m: d.m,
        omega: d.omega,
        x: d.x,
        mu: d.mu,
        nu: d.nu,
        alpha: d.alpha,
        n_vec: d.n_vec,
        s_param: d.s,
    };
    let re = |v: f64| Complex64::new(v, 0.0);
    Ok(match family {
        KernelFamily::SymplToSpin => {
            vec![kernels::kernel_sympl_to_spin(&p)?, kernels::denom_trace_sympl(d.j, d.x, d.mu, d.nu)]
        }
        KernelFamily::SpinToSympl => vec![kernels::kernel_spin_to_sympl(&p)?],
        KernelFamily::PhotonToSpin => vec![
            kernels::kernel_photon_to_spin(&p)?,
            re(kernels::denom_trace_photon(d.j, d.n_vec, d.alpha, d.s)?),
        ],
        KernelFamily::SpinToPhoton => vec![kernels::kernel_spin_to_photon(&p)?],
        KernelFamily::WignerToSpin => {
            vec![kernels::kernel_wigner_to_spin(&p)?, re(kernels::denom_trace_wigner(d.j, d.alpha))]
        }
        KernelFamily::SpinToWigner => vec![kernels::kernel_spin_to_wigner(&p)?],
        KernelFamily::SymplPhoton => vec![
            kernels::kernel_sympl_to_photon(d.x[0], d.mu[0], d.nu[0], d.n_vec[0], d.alpha[0]),
            re(kernels::kernel_photon_to_sympl(d.x[0], d.mu[0], d.nu[0], d.n_vec[0], d.alpha[0], d.s)?),
        ],
    })
}

/// Compares one kernel family with its defining trace over seeded draws; real and
/// imaginary parts are compared separately at max(abs_tol, rel_tol |reference|).
pub fn verify_kernel_family(
    family: KernelFamily,
    seed: u64,
    count: usize,
    abs_tol: f64,
    rel_tol: f64,
) -> VerificationReport {
    let draws = oracle::kernel_draws(seed ^ (family as u64 + 1).wrapping_mul(0x9E37_79B9), count);
    let results: Vec<Result<(Vec<Complex64>, Vec<Complex64>)>> = draws
        .par_iter()
        .map(|d| Ok((kernel_closed_form(family, d)?, oracle::kernel_trace(family, d)?)))
        .collect();
    let mut computed = Vec::new();
    let mut reference = Vec::new();
    for r in results {
        match r {
            Ok((k, o)) => {
                for (a, b) in k.iter().zip(&o) {
                    computed.extend([a.re, a.im]);
                    reference.extend([b.re, b.im]);
                }
            }
            Err(e) => return VerificationReport::failure(family.name(), "random draws", "trace", abs_tol, &e),
        }
    }
    VerificationReport::compare(
        family.name(),
        &format!("{count} draws"),
        &format!("cutoff {}", oracle::TRACE_CUTOFF),
        &computed,
        &reference,
        abs_tol,
        rel_tol,
    )
}

/// All seven kernel families, 100 draws each, 1e-6 absolute / 1e-8 relative.
pub fn verify_kernels(seed: u64) -> Vec<VerificationReport> {
    KernelFamily::ALL.iter().map(|&f| verify_kernel_family(f, seed, 100, 1e-6, 1e-8)).collect()
}
