//! Run configuration: command-line flags override the config file, which
//! overrides the built-in defaults.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use tomobridge::hilbert::DEFAULT_CUTOFF;
use tomobridge::tomography::XGrid;
use tomobridge::verification::FIG4_ALPHAS;

pub const DEFAULT_SEED: u64 = 1;

/// Contents of a `--config` file; every field is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub cutoff: Option<usize>,
    pub s_param: Option<f64>,
    /// Euler rule (alpha, beta, gamma node counts); the exact rule for j when absent.
    pub euler_orders: Option<[usize; 3]>,
    /// Output x lattice [min, max, step] for symplectic tomograms.
    pub x_grid: Option<[f64; 3]>,
    /// Input lattice [min, max, step] for optical tomograms fed to inverse transforms.
    pub optical_grid: Option<[f64; 3]>,
    pub optical_angles: Option<usize>,
    /// Real field amplitudes (alpha1 = alpha2) for photon-number tables.
    pub alphas: Option<Vec<f64>>,
    /// Overrides every per-check tolerance.
    pub tolerance: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("bad config {}: {e}", path.display()))
    }

    pub fn cutoff(&self, flag: Option<usize>) -> usize {
        flag.or(self.cutoff).unwrap_or(DEFAULT_CUTOFF)
    }

    pub fn s_param(&self, flag: Option<f64>) -> f64 {
        flag.or(self.s_param).unwrap_or(0.5)
    }

    pub fn x_grid(&self, flag: Option<XGrid>) -> XGrid {
        flag.or(self.x_grid.map(|[min, max, step]| XGrid { min, max, step }))
            .unwrap_or(XGrid { min: -5.0, max: 5.0, step: 0.1 })
    }

    pub fn optical_grid(&self, flag: Option<XGrid>) -> XGrid {
        flag.or(self.optical_grid.map(|[min, max, step]| XGrid { min, max, step }))
            .unwrap_or(XGrid { min: -6.0, max: 6.0, step: 0.1 })
    }

    pub fn optical_angles(&self, flag: Option<usize>) -> usize {
        flag.or(self.optical_angles).unwrap_or(8)
    }

    pub fn alphas(&self, flag: Option<Vec<f64>>) -> Vec<f64> {
        flag.or_else(|| self.alphas.clone()).unwrap_or_else(|| FIG4_ALPHAS.to_vec())
    }

    pub fn tolerance(&self, flag: Option<f64>) -> Option<f64> {
        flag.or(self.tolerance)
    }

    pub fn out_dir(&self, flag: Option<PathBuf>) -> PathBuf {
        flag.or_else(|| self.out_dir.clone()).unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.seed).unwrap_or(DEFAULT_SEED)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"s_param": 0.3, "seed": 9}"#).unwrap();
        assert_eq!(cfg.s_param(None), 0.3);
        assert_eq!(cfg.s_param(Some(0.7)), 0.7);
        assert_eq!(cfg.seed(None), 9);
        assert_eq!(cfg.cutoff(None), DEFAULT_CUTOFF);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }
}
