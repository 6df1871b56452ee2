//! `qchan.toml` defaults. Every key is optional; command-line flags win.
//!
//! ```toml
//! format = "json"
//! tol = 1e-10
//! threads = 2
//! gamma = 0.52
//! lambda = 0.25
//! step = 0.01
//!
//! [oracle]
//! n_states = 4
//! a_grid = 201
//! prob_grid = 20
//! bound = 2e-4
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::args::{ChannelKind, ChannelSpec, Format};
use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
    pub channel: Option<ChannelKind>,
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    pub start: Option<f64>,
    pub end: Option<f64>,
    pub step: Option<f64>,
    pub points: Option<usize>,
    pub ch1: Option<ChannelSpec>,
    pub ch2: Option<ChannelSpec>,
    pub weight: Option<f64>,
    pub resolution: Option<f64>,
    pub certify: Option<bool>,
    #[serde(default)]
    pub oracle: OracleFile,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleFile {
    pub n_states: Option<usize>,
    pub a_grid: Option<usize>,
    pub phase_grid: Option<usize>,
    pub prob_grid: Option<usize>,
    pub restrict_real_b: Option<bool>,
    pub budget: Option<u64>,
    pub prune: Option<bool>,
    pub bound: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Invalid(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text).map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let cfg = FileConfig::parse(
            "format = \"json\"\ngamma = 0.52\nch2 = \"dep:0.25\"\n[oracle]\na_grid = 101\nrestrict_real_b = false\n",
        )
        .unwrap();
        assert_eq!(cfg.format, Some(Format::Json));
        assert_eq!(cfg.gamma, Some(0.52));
        assert_eq!(
            cfg.ch2,
            Some(ChannelSpec {
                kind: ChannelKind::Dep,
                param: 0.25
            })
        );
        assert_eq!(cfg.oracle.a_grid, Some(101));
        assert_eq!(cfg.oracle.restrict_real_b, Some(false));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(FileConfig::parse("gamm = 0.5").is_err());
        assert!(FileConfig::parse("[oracle]\nagrid = 3").is_err());
    }
}
