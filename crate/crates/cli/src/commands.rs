use crate::config::RunConfig;
use crate::plot;
use crate::{
    Cli, Command, DenominatorChoice, Direction, Figure, NormalizationChoice, PlaneRuleChoice, ReproduceArgs,
    Representation, SamplingArgs, StateOut, StateSource, TomogramArgs, TransformArgs, VerifyArgs,
};
use anyhow::{anyhow, Context};
use clap::ValueEnum;
use nalgebra::DVector;
use num_complex::Complex64;
use serde_json::{json, Value};
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use tomobridge::hilbert::{js_inverse, make_paper_state, random_spin_state, Basis, DensityMatrix, PaperState};
use tomobridge::io::{self, TomogramDocument};
use tomobridge::quadrature::{make_euler_quadrature, EulerQuadrature, PlaneQuadrature};
use tomobridge::tomography::{
    optical_frames, photon_reconstruction_rule, photon_sum_cutoff, photon_tomogram, product_points,
    single_mode_points, spin_tomogram, symplectic_tomogram, wigner_function, Frame, XGrid,
};
use tomobridge::transforms::{self, Denominator, Normalization, ToSpinOptions};
use tomobridge::verification::{
    oracle_route, verify_kernel_family, verify_kernels, verify_selected, GridSpec, StateSpec, ToleranceProfile,
    TransformId, VerificationReport,
};
use tomobridge::oracle::KernelFamily;
use tomobridge::{Error, HalfInt};

/// Bad command-line input detected after argument parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug)]
pub struct VerificationFailed(pub usize);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} verification check(s) failed", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// 2 for usage errors (bad flags, unreadable or malformed input), 3 for
/// numerical and verification failures.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<UsageError>() || cause.is::<std::io::Error>() || cause.is::<serde_json::Error>() {
            return 2;
        }
        if cause.is::<VerificationFailed>() {
            return 3;
        }
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::InvalidArgument(_)
                | Error::LabelOutOfRange(_)
                | Error::BasisMismatch { .. }
                | Error::OrderingOutOfDomain(_)
                | Error::InvalidState(_)
                | Error::Format(_)
                | Error::Json(_)
                | Error::Io(_) => 2,
                _ => 3,
            };
        }
    }
    3
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(|e| usage(e.to_string()))?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::State { source } => cmd_state(source, &cfg),
        Command::Tomogram(args) => cmd_tomogram(args, &cfg),
        Command::Transform(args) => cmd_transform(args, &cfg),
        Command::Reproduce(args) => cmd_reproduce(args, &cfg),
        Command::Verify(args) => cmd_verify(args, &cfg),
    }
}

// ---------------------------------------------------------------------------
// Parsing helpers
// ---------------------------------------------------------------------------

fn parse_j(s: &str) -> anyhow::Result<HalfInt> {
    let j: HalfInt = s.parse()?;
    if j.twice() < 0 {
        return Err(usage(format!("j must be nonnegative, got {j}")));
    }
    Ok(j)
}

fn parse_grid(s: &str) -> anyhow::Result<XGrid> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad grid '{s}', expected min:max:step")))?;
    if nums.len() != 3 {
        return Err(usage(format!("bad grid '{s}', expected min:max:step")));
    }
    Ok(XGrid::new(nums[0], nums[1], nums[2])?)
}

fn parse_complex(s: &str) -> anyhow::Result<Complex64> {
    let bad = || usage(format!("bad complex number '{s}', expected re or re,im"));
    let mut it = s.split(',').map(|p| p.trim().parse::<f64>());
    let re = it.next().ok_or_else(bad)?.map_err(|_| bad())?;
    let im = match it.next() {
        Some(v) => v.map_err(|_| bad())?,
        None => 0.0,
    };
    if it.next().is_some() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// "re,im" broadcast to every mode, or "re,im;re,im" with one entry per mode.
fn parse_point(s: &str, modes: usize) -> anyhow::Result<Vec<Complex64>> {
    let parts: Vec<Complex64> = s.split(';').map(parse_complex).collect::<anyhow::Result<_>>()?;
    match parts.len() {
        1 => Ok(vec![parts[0]; modes]),
        n if n == modes => Ok(parts),
        n => Err(usage(format!("point '{s}' has {n} entries for a {modes}-mode grid"))),
    }
}

fn explicit_points(sampling: &SamplingArgs, modes: usize) -> anyhow::Result<Option<Vec<Vec<Complex64>>>> {
    let mut pts = Vec::new();
    for a in &sampling.alpha {
        pts.push(parse_point(a, modes)?);
    }
    if let Some(diag) = &sampling.alpha_diag {
        pts.extend(diag.iter().map(|&a| vec![Complex64::new(a, 0.0); modes]));
    }
    Ok((!pts.is_empty()).then_some(pts))
}

fn frames_for(sampling: &SamplingArgs, modes: usize, default: (f64, f64), cfg: &RunConfig) -> anyhow::Result<Vec<Frame>> {
    if let Some(n) = sampling.optical {
        let n = cfg.optical_angles(n);
        if n == 0 {
            return Err(usage("--optical needs at least one angle"));
        }
        if !sampling.mu.is_empty() || !sampling.nu.is_empty() {
            return Err(usage("--optical cannot be combined with --mu/--nu"));
        }
        return Ok(optical_frames(n, modes));
    }
    let pick = |v: &Vec<f64>, d: f64, name: &str| -> anyhow::Result<Vec<f64>> {
        match v.len() {
            0 => Ok(vec![d; modes]),
            1 => Ok(vec![v[0]; modes]),
            n if n == modes => Ok(v.clone()),
            n => Err(usage(format!("--{name} has {n} values for {modes} mode(s)"))),
        }
    };
    Ok(vec![Frame { mu: pick(&sampling.mu, default.0, "mu")?, nu: pick(&sampling.nu, default.1, "nu")? }])
}

/// Optical sampling defaults to the wider input lattice used by the inverse transforms.
fn x_grid(sampling: &SamplingArgs, cfg: &RunConfig) -> anyhow::Result<XGrid> {
    let flag = sampling.x.as_deref().map(parse_grid).transpose()?;
    Ok(if sampling.optical.is_some() { cfg.optical_grid(flag) } else { cfg.x_grid(flag) })
}

fn require_j(sampling: &SamplingArgs) -> anyhow::Result<HalfInt> {
    parse_j(sampling.j.as_deref().ok_or_else(|| usage("--j is required"))?)
}

fn modes_of(basis: Basis) -> anyhow::Result<usize> {
    match basis {
        Basis::Fock1 { .. } => Ok(1),
        Basis::Fock2 { .. } => Ok(2),
        Basis::Spin { .. } => Err(usage("CV tomograms need a Fock-basis state; create it with `state ... --embed`")),
    }
}

fn support_cutoff(basis: Basis) -> usize {
    match basis {
        Basis::Fock1 { cutoff } | Basis::Fock2 { cutoff } => cutoff,
        Basis::Spin { j } => j.twice() as usize,
    }
}

fn read_state(path: &Path) -> anyhow::Result<DensityMatrix> {
    let v = io::read_json(path).with_context(|| format!("reading {}", path.display()))?;
    io::density_from_value(v).with_context(|| format!("parsing {}", path.display()))
}

fn read_document(path: &Path) -> anyhow::Result<TomogramDocument> {
    let v = io::read_json(path).with_context(|| format!("reading {}", path.display()))?;
    TomogramDocument::from_value(v).with_context(|| format!("parsing {}", path.display()))
}

fn emit(value: &Value, out: Option<&Path>) -> anyhow::Result<()> {
    let text = io::to_json_string(value);
    match out {
        Some(p) => io::write_text(p, &text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Status text goes to stdout when the data went to a file, to stderr otherwise.
fn note(out: Option<&Path>, msg: &str) {
    if out.is_some() {
        println!("{msg}");
    } else {
        eprintln!("{msg}");
    }
}

fn write_csv(path: Option<&PathBuf>, doc: &TomogramDocument) -> anyhow::Result<()> {
    if let Some(p) = path {
        io::write_text(p, &io::document_csv(doc)?).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// state
// ---------------------------------------------------------------------------

fn cmd_state(source: StateSource, cfg: &RunConfig) -> anyhow::Result<()> {
    let (rho, label, out): (DensityMatrix, String, StateOut) = match source {
        StateSource::Paper { j, out } => {
            let which = PaperState::from_j(parse_j(&j)?)?;
            let sup = make_paper_state(which);
            let label = format!("reference state j = {}, amplitudes renormalized by {}", sup.j, sup.renormalization);
            (sup.density_matrix(), label, out)
        }
        StateSource::Random { j, seed, out } => {
            let seed = cfg.seed(seed);
            let sup = random_spin_state(parse_j(&j)?, seed);
            (sup.density_matrix(), format!("random state j = {}, seed {seed}", sup.j), out)
        }
        StateSource::File { input, repair, out } => {
            let v = io::read_json(&input).with_context(|| format!("reading {}", input.display()))?;
            let rho = if repair {
                io::density_from_value_raw(v)?.repair()?
            } else {
                io::density_from_value(v)?
            };
            (rho, format!("state from {}", input.display()), out)
        }
        StateSource::Fock { n, out } => {
            let cutoff = out.cutoff.unwrap_or_else(|| n.iter().copied().max().unwrap_or(0));
            if n.iter().any(|&k| k > cutoff) {
                return Err(usage(format!("occupation exceeds cutoff {cutoff}")));
            }
            let rho = if n.len() == 1 {
                DensityMatrix::fock(cutoff, n[0])?
            } else {
                let dim = (cutoff + 1) * (cutoff + 1);
                let mut v = DVector::from_element(dim, Complex64::new(0.0, 0.0));
                v[n[0] * (cutoff + 1) + n[1]] = Complex64::new(1.0, 0.0);
                DensityMatrix::pure(Basis::Fock2 { cutoff }, &v)?
            };
            let out = StateOut { cutoff: None, ..out };
            (rho, format!("Fock state {n:?}"), out)
        }
        StateSource::Coherent { gamma, out } => {
            let g = parse_complex(&gamma)?;
            let cutoff = cfg.cutoff(out.cutoff);
            let rho = DensityMatrix::coherent(cutoff, g)?;
            let out = StateOut { cutoff: None, ..out };
            (rho, format!("coherent state gamma = {g}, cutoff {cutoff}"), out)
        }
    };
    let rho = if out.embed {
        let j = match rho.basis() {
            Basis::Spin { j } => j,
            _ => return Err(usage("--embed applies to spin states")),
        };
        let cutoff = out.cutoff.unwrap_or(j.twice() as usize);
        js_inverse(&rho, cutoff)?
    } else {
        rho
    };
    emit(&io::density_to_value(&rho), out.out.as_deref())?;
    let d = rho.diagnostics();
    note(
        out.out.as_deref(),
        &format!(
            "{label}; basis {} dim {}; trace {:.12}; hermiticity error {:.1e}; min eigenvalue {:.3e}",
            rho.basis().name(),
            rho.dim(),
            rho.trace().re,
            d.hermiticity_error,
            d.min_eigenvalue
        ),
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// tomogram
// ---------------------------------------------------------------------------

fn euler_rule(orders: Option<&[usize]>, cfg: &RunConfig, j: HalfInt) -> anyhow::Result<EulerQuadrature> {
    let orders = match orders {
        Some(&[a, b, g]) => Some([a, b, g]),
        Some(o) => return Err(usage(format!("--orders needs 3 node counts, got {}", o.len()))),
        None => None,
    };
    match orders.or(cfg.euler_orders) {
        Some([a, b, g]) => Ok(EulerQuadrature::new(a, b, g)?),
        None => Ok(make_euler_quadrature(j)),
    }
}

/// Points, weights and the cutoff a rule needs.
type PlanePoints = (Vec<Vec<Complex64>>, Vec<f64>, Option<usize>);

/// Evaluation points for photon / Wigner sampling, with the cutoff a rule needs.
fn plane_points(
    rep: Representation,
    sampling: &SamplingArgs,
    modes: usize,
    support: usize,
    cfg: &RunConfig,
) -> anyhow::Result<PlanePoints> {
    let s = cfg.s_param(sampling.s);
    if let Some(rule) = sampling.rule {
        if !sampling.alpha.is_empty() || sampling.alpha_diag.is_some() {
            return Err(usage("--rule cannot be combined with explicit alpha points"));
        }
        return match (rule, rep) {
            (PlaneRuleChoice::ToSpin, _) => {
                if modes != 2 {
                    return Err(usage("--rule to-spin needs a two-mode state"));
                }
                let j = require_j(sampling)?;
                let (rule, cutoff) = if rep == Representation::Photon {
                    let r = transforms::photon_to_spin_rule(j, s)?;
                    let c = transforms::photon_to_spin_cutoff(&r, j, s);
                    (r, Some(c))
                } else {
                    (transforms::wigner_to_spin_rule(j)?, None)
                };
                let (p, w) = product_points(&rule, &rule);
                Ok((p, w, cutoff))
            }
            (PlaneRuleChoice::Reconstruct, Representation::Photon) => {
                if modes != 1 {
                    return Err(usage("--rule reconstruct needs a single-mode state"));
                }
                let rule = photon_reconstruction_rule(s)?;
                let cutoff = photon_sum_cutoff(rule.max_radius(), s, support);
                let (p, w) = single_mode_points(&rule);
                Ok((p, w, Some(cutoff)))
            }
            (PlaneRuleChoice::Reconstruct | PlaneRuleChoice::Square, _) => {
                if modes != 1 {
                    return Err(usage("single-mode rules need a single-mode state"));
                }
                let (p, w) = single_mode_points(&PlaneQuadrature::square(4.0, 0.1)?);
                Ok((p, w, None))
            }
        };
    }
    let pts = explicit_points(sampling, modes)?.unwrap_or_else(|| vec![vec![Complex64::new(0.0, 0.0); modes]]);
    let n = pts.len();
    Ok((pts, vec![1.0; n], None))
}

fn cmd_tomogram(args: TomogramArgs, cfg: &RunConfig) -> anyhow::Result<()> {
    let rho = read_state(&args.input)?;
    let sampling = &args.sampling;
    let (doc, summary) = match args.representation {
        Representation::Spin => {
            let j = match rho.basis() {
                Basis::Spin { j } => j,
                b => return Err(Error::BasisMismatch { expected: "spin".into(), found: b.name().into() }.into()),
            };
            let grid = euler_rule(args.orders.as_deref(), cfg, j)?;
            let t = spin_tomogram(&rho, &grid)?;
            let summary = format!(
                "spin tomogram j = {j}: {} Euler nodes, max |sum_m omega - 1| = {:.1e}",
                t.grid.len(),
                t.row_sum_error()
            );
            (TomogramDocument::plain(io::spin_to_file(&t)), summary)
        }
        Representation::Symplectic => {
            let modes = modes_of(rho.basis())?;
            let frames = frames_for(sampling, modes, (1.0, 0.0), cfg)?;
            let x = x_grid(sampling, cfg)?;
            let t = symplectic_tomogram(&rho, x, &frames)?;
            let summary = format!(
                "symplectic tomogram: {} frame(s) x {} points, {} clamped value(s)",
                t.frames.len(),
                t.points_per_frame(),
                t.clamped
            );
            (TomogramDocument::plain(io::symplectic_to_file(&t)), summary)
        }
        Representation::Photon => {
            let modes = modes_of(rho.basis())?;
            let support = support_cutoff(rho.basis());
            let (pts, wts, rule_cutoff) = plane_points(Representation::Photon, sampling, modes, support, cfg)?;
            let cutoff = sampling.cutoff.or(rule_cutoff).unwrap_or_else(|| cfg.cutoff(None).max(support));
            let t = photon_tomogram(&rho, &pts, &wts, cutoff)?;
            let summary = format!(
                "photon-number tomogram: {} point(s), cutoff {cutoff}, max tail {:.1e}",
                t.alphas.len(),
                t.max_tail()
            );
            (TomogramDocument::plain(io::photon_to_file(&t)), summary)
        }
        Representation::Wigner => {
            let modes = modes_of(rho.basis())?;
            let support = support_cutoff(rho.basis());
            let (pts, wts, _) = plane_points(Representation::Wigner, sampling, modes, support, cfg)?;
            let t = wigner_function(&rho, &pts, &wts)?;
            let summary = format!("Wigner function: {} point(s)", t.alphas.len());
            (TomogramDocument::plain(io::wigner_to_file(&t)), summary)
        }
    };
    emit(&doc.to_value(), args.out.as_deref())?;
    write_csv(args.csv.as_ref(), &doc)?;
    note(args.out.as_deref(), &summary);
    Ok(())
}

// ---------------------------------------------------------------------------
// transform
// ---------------------------------------------------------------------------

fn spin_options(args: &TransformArgs) -> ToSpinOptions {
    ToSpinOptions {
        grid: None,
        normalization: match args.normalization {
            Some(NormalizationChoice::Raw) => Normalization::Raw,
            _ => Normalization::Renormalized,
        },
        denominator: match args.denominator {
            Some(DenominatorChoice::Sector) => Denominator::SectorOnly,
            _ => Denominator::Full,
        },
    }
}

fn pairs(points: Vec<Vec<Complex64>>) -> Vec<[Complex64; 2]> {
    points.into_iter().map(|p| [p[0], p[1]]).collect()
}

fn cmd_transform(args: TransformArgs, cfg: &RunConfig) -> anyhow::Result<()> {
    let input = read_document(&args.input)?;
    let sampling = &args.sampling;
    let s = cfg.s_param(sampling.s);
    let direction = args.direction.to_possible_value().expect("value enum").get_name().to_string();
    let opts = spin_options(&args);
    let (doc, provenance) = match args.direction {
        Direction::SpinToSymplectic => {
            let t = input.spin()?;
            let frames = frames_for(sampling, 2, (1.0, 1.0), cfg)?;
            let x = x_grid(sampling, cfg)?;
            let r = transforms::spin_to_symplectic(&t, x, &frames)?;
            let doc = TomogramDocument::restricted(&r, io::symplectic_to_file(&r.tomogram));
            (doc, json!({"kernels": "spin -> symplectic", "input_nodes": t.grid.len()}))
        }
        Direction::SpinToPhoton | Direction::SpinToWigner => {
            let t = input.spin()?;
            let pts = match explicit_points(sampling, 2)? {
                Some(p) => p,
                None => cfg.alphas(None).iter().map(|&a| vec![Complex64::new(a, 0.0); 2]).collect(),
            };
            let pts = pairs(pts);
            if args.direction == Direction::SpinToPhoton {
                let r = transforms::spin_to_photon(&t, &pts, t.j.twice() as usize)?;
                let doc = TomogramDocument::restricted(&r, io::photon_to_file(&r.tomogram));
                (doc, json!({"kernels": "spin -> photon number", "input_nodes": t.grid.len()}))
            } else {
                let r = transforms::spin_to_wigner(&t, &pts, &vec![1.0; pts.len()])?;
                let doc = TomogramDocument::restricted(&r, io::wigner_to_file(&r.tomogram));
                (doc, json!({"kernels": "spin -> Wigner", "input_nodes": t.grid.len()}))
            }
        }
        Direction::SymplecticToSpin => {
            let t = input.symplectic()?;
            let j = require_j(sampling)?;
            let r = transforms::symplectic_to_spin(&t, j, &opts)?;
            let doc = TomogramDocument::restricted(&r, io::spin_to_file(&r.tomogram));
            let quad = format!("{} frames, x [{}, {}] step {}", t.frames.len(), t.x.min, t.x.max, t.x.step);
            (doc, json!({"kernels": "symplectic -> spin", "input_quadrature": quad}))
        }
        Direction::PhotonToSpin => {
            let t = input.photon()?;
            let j = require_j(sampling)?;
            let r = transforms::photon_to_spin(&t, j, s, &opts)?;
            let doc = TomogramDocument::restricted(&r, io::spin_to_file(&r.tomogram));
            let den = if opts.denominator == Denominator::Full { "full" } else { "sector" };
            (
                doc,
                json!({"kernels": "photon number -> spin", "s": s, "denominator": den, "input_points": t.alphas.len()}),
            )
        }
        Direction::WignerToSpin => {
            let t = input.wigner()?;
            let j = require_j(sampling)?;
            let r = transforms::wigner_to_spin(&t, j, &opts)?;
            let doc = TomogramDocument::restricted(&r, io::spin_to_file(&r.tomogram));
            (doc, json!({"kernels": "Wigner -> spin", "input_points": t.alphas.len()}))
        }
        Direction::PhotonToSymplectic => {
            let t = input.photon()?;
            let frames = frames_for(sampling, 1, (1.0, 0.0), cfg)?;
            let x = x_grid(sampling, cfg)?;
            let out = transforms::photon_to_symplectic(&t, x, &frames, s)?;
            let doc = TomogramDocument::plain(io::symplectic_to_file(&out));
            (doc, json!({"kernels": "photon number -> symplectic", "s": s, "input_points": t.alphas.len()}))
        }
        Direction::SymplecticToPhoton => {
            let t = input.symplectic()?;
            let pts: Vec<Complex64> = explicit_points(sampling, 1)?
                .unwrap_or_else(|| vec![vec![Complex64::new(0.0, 0.0)]])
                .into_iter()
                .map(|p| p[0])
                .collect();
            let cutoff = sampling.cutoff.unwrap_or(10);
            let out = transforms::symplectic_to_photon(&t, &pts, cutoff)?;
            let doc = TomogramDocument::plain(io::photon_to_file(&out));
            let quad = format!("{} frames, x [{}, {}] step {}", t.frames.len(), t.x.min, t.x.max, t.x.step);
            (doc, json!({"kernels": "symplectic -> photon number", "input_quadrature": quad}))
        }
    };
    let mut provenance = provenance;
    provenance["direction"] = Value::String(direction.clone());
    let doc = doc.with_provenance(provenance);
    emit(&doc.to_value(), args.out.as_deref())?;
    write_csv(args.csv.as_ref(), &doc)?;
    let sector = doc
        .restricted
        .map(|r| format!(", sector j = {} weight {:.12}", r.j, r.weight))
        .unwrap_or_default();
    note(args.out.as_deref(), &format!("{direction}: wrote {} tomogram{sector}", doc.data.kind()));
    Ok(())
}

// ---------------------------------------------------------------------------
// reproduce
// ---------------------------------------------------------------------------

fn file_stem(state: PaperState) -> String {
    state.id().replace('/', "_")
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    io::write_text(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_reproduce(args: ReproduceArgs, cfg: &RunConfig) -> anyhow::Result<()> {
    let tol = cfg.tolerance(args.tolerance).unwrap_or(1e-6);
    let base = cfg.out_dir(args.out_dir);
    let reports = match args.figure {
        Figure::Fig3 => reproduce_fig3(&base.join("fig3"), tol, cfg)?,
        Figure::Fig4 => reproduce_fig4(&base.join("fig4"), tol, cfg)?,
    };
    finish_reports(&reports, false)
}

fn reproduce_fig3(dir: &Path, tol: f64, cfg: &RunConfig) -> anyhow::Result<Vec<VerificationReport>> {
    let x = cfg.x_grid(None);
    let frames = vec![Frame::pair([1.0, 1.0], [1.0, 1.0])];
    let grid = GridSpec { name: "fig3".into(), x, frames2: frames.clone(), ..GridSpec::fig3() };
    let xs = x.points();
    let mut reports = Vec::new();
    for which in PaperState::ALL {
        let rho = make_paper_state(which).density_matrix();
        let j = which.j();
        let omega = spin_tomogram(&rho, &euler_rule(None, cfg, j)?)?;
        let r = transforms::spin_to_symplectic(&omega, x, &frames)?;
        let stem = file_stem(which);
        let doc = TomogramDocument::restricted(&r, io::symplectic_to_file(&r.tomogram))
            .with_provenance(json!({"direction": "spin-to-symplectic", "state": which.id()}));
        write_file(&dir.join(format!("{stem}.json")), &io::to_json_string(&doc.to_value()))?;
        write_file(&dir.join(format!("{stem}.csv")), &io::symplectic_csv(&r.tomogram))?;
        let title = format!("j = {j}: symplectic tomogram at mu = nu = (1, 1)");
        write_file(&dir.join(format!("{stem}.svg")), &plot::heatmap_svg(&title, &xs, &xs, &r.tomogram.values, "x1", "x2"))?;
        let reference = oracle_route(TransformId::SpinToSymplectic, &StateSpec::Paper { which }, &grid)?;
        reports.push(VerificationReport::compare(
            TransformId::SpinToSymplectic.name(),
            which.id(),
            "fig3",
            &r.tomogram.values,
            &reference,
            tol,
            0.0,
        ));
    }
    write_file(&dir.join("report.json"), &io::to_json_string(&serde_json::to_value(&reports)?))?;
    Ok(reports)
}

fn reproduce_fig4(dir: &Path, tol: f64, cfg: &RunConfig) -> anyhow::Result<Vec<VerificationReport>> {
    let amps = cfg.alphas(None);
    let alpha_pairs: Vec<[Complex64; 2]> = amps.iter().map(|&a| [Complex64::new(a, 0.0); 2]).collect();
    let grid = GridSpec { name: "fig4".into(), alpha_pairs: alpha_pairs.clone(), ..GridSpec::fig4() };
    let mut reports = Vec::new();
    let mut table = String::from("state,j,alpha,n1,n2,value\n");
    for which in PaperState::ALL {
        let rho = make_paper_state(which).density_matrix();
        let j = which.j();
        let tj = j.twice() as usize;
        let omega = spin_tomogram(&rho, &euler_rule(None, cfg, j)?)?;
        let r = transforms::spin_to_photon(&omega, &alpha_pairs, tj)?;
        let t = &r.tomogram;
        let stem = file_stem(which);
        let doc = TomogramDocument::restricted(&r, io::photon_to_file(t))
            .with_provenance(json!({"direction": "spin-to-photon", "state": which.id()}));
        write_file(&dir.join(format!("{stem}.json")), &io::to_json_string(&doc.to_value()))?;
        let labels: Vec<String> = (0..=tj).map(|n1| format!("({n1},{})", tj - n1)).collect();
        let mut groups = Vec::new();
        for (a, row) in amps.iter().zip(&t.values) {
            let bars: Vec<f64> = (0..=tj).map(|n1| row[t.n_index(n1, tj - n1)]).collect();
            for (n1, v) in bars.iter().enumerate() {
                table.push_str(&format!("{},{j},{a},{n1},{},{v}\n", which.id(), tj - n1));
            }
            groups.push((format!("alpha = {a}"), bars));
        }
        let title = format!("j = {j}: photon-number tomogram, alpha1 = alpha2");
        write_file(&dir.join(format!("{stem}.svg")), &plot::grouped_bars_svg(&title, &labels, &groups))?;
        let reference = oracle_route(TransformId::SpinToPhoton, &StateSpec::Paper { which }, &grid)?;
        reports.push(VerificationReport::compare(
            TransformId::SpinToPhoton.name(),
            which.id(),
            "fig4",
            &t.values.concat(),
            &reference,
            tol,
            0.0,
        ));
    }
    write_file(&dir.join("tables.csv"), &table)?;
    write_file(&dir.join("report.json"), &io::to_json_string(&serde_json::to_value(&reports)?))?;
    Ok(reports)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn use_color() -> bool {
    std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && std::io::stdout().is_terminal()
}

fn status(pass: bool, color: bool) -> &'static str {
    match (pass, color) {
        (true, true) => "\x1b[32mPASS\x1b[0m",
        (false, true) => "\x1b[31mFAIL\x1b[0m",
        (true, false) => "PASS",
        (false, false) => "FAIL",
    }
}

fn finish_reports(reports: &[VerificationReport], json_lines: bool) -> anyhow::Result<()> {
    let color = !json_lines && use_color();
    for r in reports {
        if json_lines {
            println!("{}", serde_json::to_string(r)?);
        } else {
            let mut line = format!(
                "{}  {:<22} {:<22} {:<10} max abs {:.2e}  tol {:.0e}",
                status(r.pass, color),
                r.transform,
                r.state,
                r.grid,
                r.max_abs_error,
                r.tolerance
            );
            if let Some(e) = &r.error {
                line.push_str(&format!("  ({e})"));
            }
            println!("{line}");
        }
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    if !json_lines {
        println!("{} of {} checks passed", reports.len() - failed, reports.len());
    }
    if failed > 0 {
        return Err(VerificationFailed(failed).into());
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs, cfg: &RunConfig) -> anyhow::Result<()> {
    let seed = cfg.seed(args.seed);
    let tol = cfg.tolerance(args.tolerance);
    let profile = ToleranceProfile { override_tolerance: tol };
    let grid = GridSpec {
        optical_y: cfg.optical_grid(None),
        n_theta: cfg.optical_angles(None),
        s: cfg.s_param(None),
        ..GridSpec::default_profile()
    };
    let kernels = || -> Vec<VerificationReport> {
        match tol {
            Some(t) => KernelFamily::ALL.iter().map(|&f| verify_kernel_family(f, seed, 100, t, 0.0)).collect(),
            None => verify_kernels(seed),
        }
    };
    let reports = match args.only.as_deref() {
        None => {
            let mut r = verify_selected(&TransformId::ALL, seed, profile, &grid);
            r.extend(kernels());
            r
        }
        Some("kernels") => kernels(),
        Some("transforms") => verify_selected(&TransformId::ALL, seed, profile, &grid),
        Some(name) => {
            let id = TransformId::from_name(name).ok_or_else(|| {
                let names: Vec<&str> = TransformId::ALL.iter().map(|t| t.name()).collect();
                anyhow!(UsageError(format!(
                    "unknown check '{name}'; expected kernels, transforms or one of {}",
                    names.join(", ")
                )))
            })?;
            verify_selected(&[id], seed, profile, &grid)
        }
    };
    if let Some(p) = &args.out {
        write_file(p, &io::to_json_string(&serde_json::to_value(&reports)?))?;
    }
    finish_reports(&reports, args.json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_points_and_grids() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("-1,2").unwrap(), Complex64::new(-1.0, 2.0));
        assert!(parse_complex("1,2,3").is_err());
        assert_eq!(parse_point("1,0", 2).unwrap().len(), 2);
        assert!(parse_point("1;2;3", 2).is_err());
        let g = parse_grid("-5:5:0.1").unwrap();
        assert_eq!(g.len(), 101);
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&usage("x")), 2);
        assert_eq!(exit_code(&VerificationFailed(1).into()), 3);
        assert_eq!(exit_code(&Error::InvalidArgument("x".into()).into()), 2);
        assert_eq!(exit_code(&Error::Numerical("x".into()).into()), 3);
    }
}
