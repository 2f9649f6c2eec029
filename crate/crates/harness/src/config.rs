//! Flat `key = value` settings files.

use crate::HarnessError;
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Every key is optional; command-line flags override what is set here.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSettings {
    pub delta_seconds: Option<f64>,
    pub deltas: Option<Vec<f64>>,
    pub m: Option<f64>,
    pub c: Option<f64>,
    pub a1_hours: Option<f64>,
    pub horizon_seconds: Option<f64>,
    pub replicates: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub trace: Option<bool>,
    pub naive_collisions: Option<bool>,
    pub table: Option<String>,
}

impl FileSettings {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text).map_err(|e| HarnessError::Config {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_flat_pairs() {
        let s = FileSettings::parse("delta_seconds = 45\nm = 0.137\ndeltas = [30, 42.5]\ntable = \"calibrated\"\n").unwrap();
        assert_eq!(s.delta_seconds, Some(45.0));
        assert_eq!(s.m, Some(0.137));
        assert_eq!(s.deltas, Some(vec![30.0, 42.5]));
        assert_eq!(s.table.as_deref(), Some("calibrated"));
        assert_eq!(s.seed, None);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(FileSettings::parse("speed = 3").is_err());
    }
}
