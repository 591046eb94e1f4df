use std::path::Path;

use serde::{Deserialize, Serialize};
use siegel_maass::siegel_kernel::QuadratureSpec;
use siegel_maass::specfun::Precision;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Default truncation heights per family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Heights {
    pub elliptic: i64,
    pub sp2: i64,
    pub p2: i64,
}

impl Default for Heights {
    fn default() -> Self {
        Self {
            elliptic: 40,
            sp2: 2,
            p2: 2,
        }
    }
}

/// Everything a run depends on. Read from one TOML file; command-line flags
/// take precedence over it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub precision: Precision,
    pub quadrature: QuadratureSpec,
    pub heights: Heights,
    pub format: Format,
    pub seed: u64,
    /// Worker threads; `None` lets rayon decide.
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            precision: Precision::default(),
            quadrature: QuadratureSpec::default(),
            heights: Heights::default(),
            format: Format::Json,
            seed: siegel_maass::verify::SEED,
            workers: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let cfg: Self = toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))?;
        cfg.precision.validate().map_err(|e| e.to_string())?;
        cfg.quadrature.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg: RunConfig = toml::from_str("format = \"csv\"\n[quadrature]\nrel_tol = 1e-8\n").unwrap();
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.quadrature.rel_tol, 1e-8);
        assert_eq!(cfg.quadrature.max_depth, QuadratureSpec::default().max_depth);
        assert_eq!(cfg.heights, Heights::default());
    }
}
