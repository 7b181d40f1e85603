//! JSON and CSV formats for states and tomograms.
//!
//! Density matrices: `{"basis": "spin"|"fock1"|"fock2", "j" | "cutoff", "re", "im"}`
//! with row-major nested arrays. Tomogram documents carry a `"kind"` tag on
//! output; on input the tag may be omitted and is inferred from the fields.

use crate::error::{Error, Result};
use crate::hilbert::{Basis, DensityMatrix};
use crate::quadrature::EulerQuadrature;
use crate::specfun::{EulerAngles, HalfInt};
use crate::tomography::{Frame, PhotonTomogram, SpinTomogram, SymplecticTomogram, WignerGrid, XGrid};
use crate::transforms::{Normalization, Restricted};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt::Write as _;
use std::path::Path;

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DensityFile {
    basis: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    j: Option<HalfInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cutoff: Option<usize>,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

pub fn density_to_value(rho: &DensityMatrix) -> Value {
    let m = rho.matrix();
    let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect()
    };
    let (j, cutoff) = match rho.basis() {
        Basis::Spin { j } => (Some(j), None),
        Basis::Fock1 { cutoff } | Basis::Fock2 { cutoff } => (None, Some(cutoff)),
    };
    let file = DensityFile {
        basis: rho.basis().name().into(),
        j,
        cutoff,
        re: rows(|z| z.re),
        im: rows(|z| z.im),
    };
    serde_json::to_value(file).expect("density serialization")
}

/// Parses a density matrix; the standard validity checks of [`DensityMatrix::new`] apply.
pub fn density_from_value(v: Value) -> Result<DensityMatrix> {
    let (basis, data) = parse_density(v)?;
    DensityMatrix::new(basis, data)
}

/// Parses without the positivity/trace checks (for inspection and repair).
pub fn density_from_value_raw(v: Value) -> Result<DensityMatrix> {
    let (basis, data) = parse_density(v)?;
    DensityMatrix::from_raw(basis, data)
}

fn parse_density(v: Value) -> Result<(Basis, DMatrix<Complex64>)> {
    let f: DensityFile = serde_json::from_value(v)?;
    let basis = match (f.basis.as_str(), f.j, f.cutoff) {
        ("spin", Some(j), _) => Basis::Spin { j },
        ("fock1", _, Some(cutoff)) => Basis::Fock1 { cutoff },
        ("fock2", _, Some(cutoff)) => Basis::Fock2 { cutoff },
        ("spin", None, _) => return Err(Error::Format("spin basis needs \"j\"".into())),
        ("fock1" | "fock2", _, None) => return Err(Error::Format(format!("{} basis needs \"cutoff\"", f.basis))),
        (b, _, _) => return Err(Error::Format(format!("unknown basis '{b}'"))),
    };
    let dim = basis.dim();
    let shape_ok = |m: &Vec<Vec<f64>>| m.len() == dim && m.iter().all(|r| r.len() == dim);
    if !shape_ok(&f.re) || !shape_ok(&f.im) {
        return Err(Error::Format(format!("matrix must be {dim} x {dim} for basis {}", f.basis)));
    }
    let data = DMatrix::from_fn(dim, dim, |r, c| Complex64::new(f.re[r][c], f.im[r][c]));
    Ok((basis, data))
}

// ---------------------------------------------------------------------------
// Tomogram documents
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerNode {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinFile {
    pub j: HalfInt,
    /// Numbers of alpha, beta, gamma nodes; inferred from the grid when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<[usize; 3]>,
    pub grid: Vec<EulerNode>,
    pub values: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymplecticGridFile {
    /// [min, max, step]
    pub x: [f64; 3],
    /// One entry per frame, one value per mode.
    pub mu: Vec<Vec<f64>>,
    pub nu: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymplecticFile {
    #[serde(default = "one")]
    pub modes: usize,
    pub grid: SymplecticGridFile,
    pub values: Vec<f64>,
    #[serde(default)]
    pub clamped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotonFile {
    #[serde(default = "one")]
    pub modes: usize,
    /// Per point: [re1, im1, re2, im2, ...].
    pub alphas: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub cutoff: usize,
    pub values: Vec<Vec<f64>>,
    #[serde(default)]
    pub clamped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerFile {
    #[serde(default = "one")]
    pub modes: usize,
    pub alphas: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub values: Vec<f64>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TomogramData {
    Spin(SpinFile),
    Symplectic(SymplecticFile),
    Photon(PhotonFile),
    Wigner(WignerFile),
}

impl TomogramData {
    pub fn kind(&self) -> &'static str {
        match self {
            TomogramData::Spin(_) => "spin",
            TomogramData::Symplectic(_) => "symplectic",
            TomogramData::Photon(_) => "photon",
            TomogramData::Wigner(_) => "wigner",
        }
    }
}

/// Sector metadata attached to transform outputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictedMeta {
    pub j: HalfInt,
    pub normalization: Normalization,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomogramDocument {
    #[serde(flatten)]
    pub data: TomogramData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restricted: Option<RestrictedMeta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Value>,
}

impl TomogramDocument {
    pub fn plain(data: TomogramData) -> Self {
        TomogramDocument { data, restricted: None, provenance: None }
    }

    pub fn restricted<T>(r: &Restricted<T>, data: TomogramData) -> Self {
        TomogramDocument {
            data,
            restricted: Some(RestrictedMeta { j: r.j, normalization: r.normalization, weight: r.weight }),
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, p: Value) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("tomogram serialization")
    }

    /// Parses a document, inferring `"kind"` when it is missing.
    pub fn from_value(mut v: Value) -> Result<Self> {
        let obj = v.as_object_mut().ok_or_else(|| Error::Format("tomogram must be a JSON object".into()))?;
        if !obj.contains_key("kind") {
            let kind = if obj.get("grid").is_some_and(Value::is_array) {
                "spin"
            } else if obj.get("grid").is_some_and(Value::is_object) {
                "symplectic"
            } else if obj.contains_key("cutoff") {
                "photon"
            } else if obj.contains_key("alphas") {
                "wigner"
            } else {
                return Err(Error::Format("cannot tell the tomogram kind from its fields".into()));
            };
            obj.insert("kind".into(), Value::String(kind.into()));
        }
        Ok(serde_json::from_value(v)?)
    }

    pub fn spin(&self) -> Result<SpinTomogram> {
        match &self.data {
            TomogramData::Spin(f) => spin_from_file(f),
            d => Err(kind_mismatch("spin", d)),
        }
    }

    pub fn symplectic(&self) -> Result<SymplecticTomogram> {
        match &self.data {
            TomogramData::Symplectic(f) => symplectic_from_file(f),
            d => Err(kind_mismatch("symplectic", d)),
        }
    }

    pub fn photon(&self) -> Result<PhotonTomogram> {
        match &self.data {
            TomogramData::Photon(f) => photon_from_file(f),
            d => Err(kind_mismatch("photon", d)),
        }
    }

    pub fn wigner(&self) -> Result<WignerGrid> {
        match &self.data {
            TomogramData::Wigner(f) => wigner_from_file(f),
            d => Err(kind_mismatch("wigner", d)),
        }
    }
}

fn kind_mismatch(expected: &str, d: &TomogramData) -> Error {
    Error::BasisMismatch { expected: format!("{expected} tomogram"), found: format!("{} tomogram", d.kind()) }
}

pub fn spin_to_file(t: &SpinTomogram) -> TomogramData {
    let grid = t
        .grid
        .nodes
        .iter()
        .zip(&t.grid.weights)
        .map(|(n, &w)| EulerNode { alpha: n.alpha, beta: n.beta, gamma: n.gamma, weight: w })
        .collect();
    TomogramData::Spin(SpinFile {
        j: t.j,
        orders: Some([t.grid.n_alpha, t.grid.n_beta, t.grid.n_gamma]),
        grid,
        values: t.values.clone(),
    })
}

fn distinct(values: impl Iterator<Item = f64>) -> usize {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    v.len()
}

fn spin_from_file(f: &SpinFile) -> Result<SpinTomogram> {
    let dim = f.j.dim();
    if f.values.len() != f.grid.len() || f.values.iter().any(|r| r.len() != dim) {
        return Err(Error::Format(format!("spin values must be {} rows of {dim}", f.grid.len())));
    }
    let [n_alpha, n_beta, n_gamma] = f.orders.unwrap_or([
        distinct(f.grid.iter().map(|n| n.alpha)),
        distinct(f.grid.iter().map(|n| n.beta)),
        distinct(f.grid.iter().map(|n| n.gamma)),
    ]);
    if n_alpha * n_beta * n_gamma != f.grid.len() {
        return Err(Error::Format("spin grid is not a product of alpha, beta, gamma nodes".into()));
    }
    let grid = EulerQuadrature {
        n_alpha,
        n_beta,
        n_gamma,
        nodes: f.grid.iter().map(|n| EulerAngles::new(n.alpha, n.beta, n.gamma)).collect(),
        weights: f.grid.iter().map(|n| n.weight).collect(),
    };
    Ok(SpinTomogram { j: f.j, grid, values: f.values.clone() })
}

pub fn symplectic_to_file(t: &SymplecticTomogram) -> TomogramData {
    TomogramData::Symplectic(SymplecticFile {
        modes: t.modes,
        grid: SymplecticGridFile {
            x: [t.x.min, t.x.max, t.x.step],
            mu: t.frames.iter().map(|f| f.mu.clone()).collect(),
            nu: t.frames.iter().map(|f| f.nu.clone()).collect(),
        },
        values: t.values.clone(),
        clamped: t.clamped,
    })
}

fn symplectic_from_file(f: &SymplecticFile) -> Result<SymplecticTomogram> {
    let x = XGrid::new(f.grid.x[0], f.grid.x[1], f.grid.x[2])?;
    if f.grid.mu.len() != f.grid.nu.len() {
        return Err(Error::Format("mu and nu list different numbers of frames".into()));
    }
    let frames: Vec<Frame> =
        f.grid.mu.iter().zip(&f.grid.nu).map(|(m, n)| Frame { mu: m.clone(), nu: n.clone() }).collect();
    if frames.iter().any(|fr| fr.mu.len() != f.modes || fr.nu.len() != f.modes) {
        return Err(Error::Format(format!("each frame needs {} mu and nu values", f.modes)));
    }
    let t = SymplecticTomogram { modes: f.modes, x, frames, values: f.values.clone(), clamped: f.clamped };
    if t.values.len() != t.points_per_frame() * t.frames.len() {
        return Err(Error::Format(format!(
            "expected {} symplectic values, found {}",
            t.points_per_frame() * t.frames.len(),
            t.values.len()
        )));
    }
    Ok(t)
}

fn alphas_to_rows(alphas: &[Vec<Complex64>]) -> Vec<Vec<f64>> {
    alphas.iter().map(|p| p.iter().flat_map(|a| [a.re, a.im]).collect()).collect()
}

fn rows_to_alphas(rows: &[Vec<f64>], modes: usize) -> Result<Vec<Vec<Complex64>>> {
    rows.iter()
        .map(|r| {
            if r.len() != 2 * modes {
                return Err(Error::Format(format!("each alpha point needs {} numbers", 2 * modes)));
            }
            Ok(r.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
        })
        .collect()
}

fn unit_weights(w: &[f64]) -> bool {
    w.iter().all(|&x| x == 1.0)
}

pub fn photon_to_file(t: &PhotonTomogram) -> TomogramData {
    TomogramData::Photon(PhotonFile {
        modes: t.modes,
        alphas: alphas_to_rows(&t.alphas),
        weights: (!unit_weights(&t.weights)).then(|| t.weights.clone()),
        cutoff: t.cutoff,
        values: t.values.clone(),
        clamped: t.clamped,
    })
}

fn photon_from_file(f: &PhotonFile) -> Result<PhotonTomogram> {
    let alphas = rows_to_alphas(&f.alphas, f.modes)?;
    let weights = f.weights.clone().unwrap_or_else(|| vec![1.0; alphas.len()]);
    let per_point = (f.cutoff + 1).pow(f.modes as u32);
    if weights.len() != alphas.len() || f.values.len() != alphas.len() || f.values.iter().any(|r| r.len() != per_point)
    {
        return Err(Error::Format(format!(
            "photon tomogram needs one weight and {per_point} values per alpha point"
        )));
    }
    Ok(PhotonTomogram {
        modes: f.modes,
        cutoff: f.cutoff,
        alphas,
        weights,
        values: f.values.clone(),
        clamped: f.clamped,
    })
}

pub fn wigner_to_file(t: &WignerGrid) -> TomogramData {
    TomogramData::Wigner(WignerFile {
        modes: t.modes,
        alphas: alphas_to_rows(&t.alphas),
        weights: (!unit_weights(&t.weights)).then(|| t.weights.clone()),
        values: t.values.clone(),
    })
}

fn wigner_from_file(f: &WignerFile) -> Result<WignerGrid> {
    let alphas = rows_to_alphas(&f.alphas, f.modes)?;
    let weights = f.weights.clone().unwrap_or_else(|| vec![1.0; alphas.len()]);
    if weights.len() != alphas.len() || f.values.len() != alphas.len() {
        return Err(Error::Format("Wigner grid needs one weight and one value per alpha point".into()));
    }
    Ok(WignerGrid { modes: f.modes, alphas, weights, values: f.values.clone() })
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

/// Pretty-printed JSON with a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value");
    s.push('\n');
    s
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

fn csv_line(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

pub fn spin_csv(t: &SpinTomogram) -> String {
    let mut out = String::from("alpha,beta,gamma,weight,m,value\n");
    let ms: Vec<HalfInt> = t.j.projections().collect();
    for ((node, w), row) in t.grid.nodes.iter().zip(&t.grid.weights).zip(&t.values) {
        for (m, v) in ms.iter().zip(row) {
            let _ = writeln!(out, "{},{},{},{},{},{}", node.alpha, node.beta, node.gamma, w, m, v);
        }
    }
    out
}

pub fn symplectic_csv(t: &SymplecticTomogram) -> String {
    let mut out = String::new();
    let mut head = vec!["frame".to_string()];
    head.extend((1..=t.modes).map(|k| format!("mu{k}")));
    head.extend((1..=t.modes).map(|k| format!("nu{k}")));
    head.extend((1..=t.modes).map(|k| format!("x{k}")));
    head.push("value".into());
    csv_line(&mut out, &head);
    let xs = t.x.points();
    let per = t.points_per_frame();
    for (f, frame) in t.frames.iter().enumerate() {
        for k in 0..per {
            let mut cells = vec![f.to_string()];
            cells.extend(frame.mu.iter().map(|v| v.to_string()));
            cells.extend(frame.nu.iter().map(|v| v.to_string()));
            let mut rem = k;
            let mut idx = vec![0; t.modes];
            for slot in idx.iter_mut().rev() {
                *slot = rem % xs.len();
                rem /= xs.len();
            }
            cells.extend(idx.iter().map(|&i| xs[i].to_string()));
            cells.push(t.values[f * per + k].to_string());
            csv_line(&mut out, &cells);
        }
    }
    out
}

fn alpha_header(modes: usize) -> Vec<String> {
    (1..=modes).flat_map(|k| [format!("re{k}"), format!("im{k}")]).collect()
}

pub fn photon_csv(t: &PhotonTomogram) -> String {
    let mut out = String::new();
    let mut head = vec!["point".to_string()];
    head.extend(alpha_header(t.modes));
    head.extend((1..=t.modes).map(|k| format!("n{k}")));
    head.push("value".into());
    csv_line(&mut out, &head);
    let nc = t.cutoff + 1;
    for (p, (alpha, row)) in t.alphas.iter().zip(&t.values).enumerate() {
        for (k, v) in row.iter().enumerate() {
            let mut cells = vec![p.to_string()];
            cells.extend(alpha.iter().flat_map(|a| [a.re.to_string(), a.im.to_string()]));
            if t.modes == 1 {
                cells.push(k.to_string());
            } else {
                cells.push((k / nc).to_string());
                cells.push((k % nc).to_string());
            }
            cells.push(v.to_string());
            csv_line(&mut out, &cells);
        }
    }
    out
}

pub fn wigner_csv(t: &WignerGrid) -> String {
    let mut out = String::new();
    let mut head = vec!["point".to_string()];
    head.extend(alpha_header(t.modes));
    head.extend(["weight".to_string(), "value".to_string()]);
    csv_line(&mut out, &head);
    for (p, ((alpha, w), v)) in t.alphas.iter().zip(&t.weights).zip(&t.values).enumerate() {
        let mut cells = vec![p.to_string()];
        cells.extend(alpha.iter().flat_map(|a| [a.re.to_string(), a.im.to_string()]));
        cells.push(w.to_string());
        cells.push(v.to_string());
        csv_line(&mut out, &cells);
    }
    out
}

pub fn document_csv(doc: &TomogramDocument) -> Result<String> {
    Ok(match doc.data {
        TomogramData::Spin(_) => spin_csv(&doc.spin()?),
        TomogramData::Symplectic(_) => symplectic_csv(&doc.symplectic()?),
        TomogramData::Photon(_) => photon_csv(&doc.photon()?),
        TomogramData::Wigner(_) => wigner_csv(&doc.wigner()?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{make_paper_state, PaperState};
    use crate::quadrature::make_euler_quadrature;
    use crate::tomography::spin_tomogram;

    #[test]
    fn density_round_trip() {
        let rho = make_paper_state(PaperState::JOne).density_matrix();
        let v = density_to_value(&rho);
        assert_eq!(v["basis"], "spin");
        assert_eq!(v["j"], 1.0);
        let back = density_from_value(v).unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn spin_document_round_trip_without_kind() {
        let rho = make_paper_state(PaperState::JHalf).density_matrix();
        let t = spin_tomogram(&rho, &make_euler_quadrature(HalfInt::from_twice(1))).unwrap();
        let mut v = TomogramDocument::plain(spin_to_file(&t)).to_value();
        let obj = v.as_object_mut().unwrap();
        obj.remove("kind");
        obj.remove("orders");
        let back = TomogramDocument::from_value(v).unwrap().spin().unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn wrong_kind_is_reported() {
        let doc = TomogramDocument::plain(TomogramData::Wigner(WignerFile {
            modes: 1,
            alphas: vec![vec![0.0, 0.0]],
            weights: None,
            values: vec![0.3],
        }));
        assert!(matches!(doc.photon(), Err(Error::BasisMismatch { .. })));
        assert!(doc.wigner().is_ok());
    }
}
