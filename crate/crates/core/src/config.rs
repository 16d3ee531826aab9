//! Config-file ingestion.
//!
//! Configurations are TOML with a required `[lattice]` block plus optional
//! `[dynamics]` and `[scan]` blocks consumed by the dynamics driver:
//!
//! ```toml
//! [lattice]
//! N = 100
//! J = 1.0
//! t = 0.5
//! gamma = 0.5
//! eta = 20.085536923187668
//! impurities = [40]
//!
//! [dynamics]
//! n0 = 95
//!
//! [scan]
//! lneta_min = -3.0
//! lneta_max = 3.0
//! steps = 61
//! sites = [40, 41, 50, 80]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, LatticeConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeSection {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "J")]
    pub j: f64,
    pub t: f64,
    pub gamma: f64,
    pub eta: f64,
    #[serde(default)]
    pub impurities: Vec<usize>,
}

/// Propagation controls block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicsParams {
    pub n0: usize,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub eps_stop: Option<f64>,
}

/// Impurity-strength scan block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanParams {
    pub lneta_min: f64,
    pub lneta_max: f64,
    pub steps: usize,
    #[serde(default)]
    pub sites: Vec<usize>,
}

/// Full parsed config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileConfig {
    pub lattice: LatticeSection,
    #[serde(default)]
    pub dynamics: Option<DynamicsParams>,
    #[serde(default)]
    pub scan: Option<ScanParams>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Config(format!("parse error: {e}")))
    }

    /// Validated lattice configuration.
    pub fn lattice_config(&self) -> Result<LatticeConfig, Error> {
        let l = &self.lattice;
        LatticeConfig::new(l.n, l.j, l.t, l.gamma, l.eta, l.impurities.iter().copied())
    }
}

/// Read and parse a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<FileConfig, Error> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    FileConfig::parse(&text)
}

/// Evenly spaced scan grid, inclusive of both endpoints.
pub fn scan_grid(params: &ScanParams) -> Result<Vec<f64>, Error> {
    if params.steps < 2 {
        return Err(Error::Config(format!("scan needs >= 2 steps, got {}", params.steps)));
    }
    if !(params.lneta_min < params.lneta_max) {
        return Err(Error::Config("scan range must satisfy lneta_min < lneta_max".into()));
    }
    let k = params.steps;
    Ok((0..k)
        .map(|i| {
            params.lneta_min
                + (params.lneta_max - params.lneta_min) * i as f64 / (k - 1) as f64
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[lattice]
N = 50
J = 1.0
t = 0.5
gamma = 0.5
eta = 0.001
impurities = [20]

[dynamics]
n0 = 45

[scan]
lneta_min = -3.0
lneta_max = 3.0
steps = 61
sites = [20, 21]
"#;

    #[test]
    fn parses_all_blocks() {
        let fc = FileConfig::parse(SAMPLE).unwrap();
        let lc = fc.lattice_config().unwrap();
        assert_eq!(lc.n_cells(), 50);
        assert_eq!(lc.impurities(), &[20]);
        assert_eq!(fc.dynamics.unwrap().n0, 45);
        let grid = scan_grid(&fc.scan.unwrap()).unwrap();
        assert_eq!(grid.len(), 61);
        assert!((grid[0] + 3.0).abs() < 1e-15 && (grid[60] - 3.0).abs() < 1e-15);
        assert!((grid[30]).abs() < 1e-15);
    }

    #[test]
    fn lattice_block_alone_is_enough() {
        let fc = FileConfig::parse(
            "[lattice]\nN = 10\nJ = 1.0\nt = 0.5\ngamma = 0.5\neta = 1.0\n",
        )
        .unwrap();
        assert!(fc.dynamics.is_none() && fc.scan.is_none());
        assert_eq!(fc.lattice_config().unwrap().kappa(), 0);
    }

    #[test]
    fn malformed_file_reports_config_error() {
        assert!(matches!(FileConfig::parse("[lattice"), Err(Error::Config(_))));
        assert!(matches!(load_config("/nonexistent/path.toml"), Err(Error::Config(_))));
    }
}
