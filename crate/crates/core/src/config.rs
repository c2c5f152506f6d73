//! Run configuration shared by the pipeline stages.
//!
//! A run is described by one JSON document. Every section except
//! `master_seed` has defaults, so a minimal file is `{"master_seed": 7}`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::contentgen::GenerationConfig;
use crate::error::{Error, Result};
use crate::similarity::ProviderSettings;
use crate::tables::TableOptions;
use crate::validate::ValidationThresholds;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunPaths {
    /// Reference corpus: a directory with `demographics.csv` and `cvs/`, or a JSONL file.
    pub corpus: PathBuf,
    pub tables: PathBuf,
    /// Generated dataset (`cvs/`, `manifest.json`, `params.json`, `generation_report.json`).
    pub output: PathBuf,
    pub report: PathBuf,
    pub rendered: PathBuf,
}

impl Default for RunPaths {
    fn default() -> Self {
        RunPaths {
            corpus: "corpus".into(),
            tables: "tables".into(),
            output: "output".into(),
            report: "report".into(),
            rendered: "rendered".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub paths: RunPaths,
    pub master_seed: u64,
    #[serde(default)]
    pub tables: TableOptions,
    #[serde(default)]
    pub generation: GenerationConfig,
    #[serde(default)]
    pub validation: ValidationThresholds,
    #[serde(default)]
    pub provider: ProviderSettings,
    /// Parallel generation attempts; `None` uses every core.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn new(master_seed: u64) -> Self {
        RunConfig {
            paths: RunPaths::default(),
            master_seed,
            tables: TableOptions::default(),
            generation: GenerationConfig::default(),
            validation: ValidationThresholds::default(),
            provider: ProviderSettings::default(),
            workers: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn check(&self) -> Result<()> {
        self.generation.check()?;
        self.validation.check()?;
        if self.tables.k_min == 0 {
            return Err(Error::Config("k_min must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.tables.canonical_threshold) {
            return Err(Error::Config(format!(
                "canonical_threshold must lie in [0, 1], got {}",
                self.tables.canonical_threshold
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contentgen::CountPolicy;
    use crate::structgen::CombineStrategy;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = RunConfig::from_json(r#"{"master_seed": 7}"#).unwrap();
        assert_eq!(cfg, RunConfig::new(7));
        assert_eq!(cfg.generation.min_group, 20);
        assert_eq!(cfg.tables.k_min, 5);
    }

    #[test]
    fn seed_is_mandatory() {
        assert!(matches!(RunConfig::from_json("{}"), Err(Error::Config(_))));
    }

    #[test]
    fn partial_sections_merge_with_defaults() {
        let cfg = RunConfig::from_json(
            r#"{"master_seed": 1, "generation": {"strategy": "median", "count": {"fixed": 5}},
                "paths": {"corpus": "data"}}"#,
        )
        .unwrap();
        assert_eq!(cfg.generation.strategy, CombineStrategy::Median);
        assert_eq!(cfg.generation.count, CountPolicy::Fixed(5));
        assert_eq!(cfg.generation.skills_cap, 12);
        assert_eq!(cfg.paths.corpus, PathBuf::from("data"));
        assert_eq!(cfg.paths.tables, PathBuf::from("tables"));
    }

    #[test]
    fn round_trip_and_range_checks() {
        let mut cfg = RunConfig::new(3);
        cfg.workers = Some(2);
        let back = RunConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);

        cfg.validation.default_ceiling = 2.0;
        assert!(cfg.check().is_err());
        let bad = r#"{"master_seed": 1, "generation": {"inclusion": {"phd": -0.5}}}"#;
        assert!(matches!(RunConfig::from_json(bad), Err(Error::Config(_))));
    }
}
