use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloud::CloudConfig;
use crate::cluster::Linkage;
use crate::preprocess::PreprocessConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing config {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterConfig {
    pub max_sparsity: f64,
    pub linkage: Linkage,
    /// Number of flat clusters listed in the report.
    pub clusters: usize,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            max_sparsity: 0.9,
            linkage: Linkage::Ward,
            clusters: 5,
        }
    }
}

/// Settings for a full report run. Every field has a default, so a config
/// file only needs the values it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub preprocess: PreprocessConfig,
    pub assoc_threshold: f64,
    pub min_support: f64,
    pub min_confidence: f64,
    pub cluster: ClusterConfig,
    pub cloud: CloudConfig,
    /// Terms that get an association table; defaults to the five terms with
    /// the highest document frequency.
    pub focus_terms: Option<Vec<String>>,
    /// Rows in the report's frequency table.
    pub top_terms: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            preprocess: PreprocessConfig::default(),
            assoc_threshold: 0.25,
            min_support: 0.25,
            min_confidence: 0.5,
            cluster: ClusterConfig::default(),
            cloud: CloudConfig::default(),
            focus_terms: None,
            top_terms: 25,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |msg: String| Err(ConfigError::Invalid(msg));
        self.preprocess
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.cloud.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !(0.0..=1.0).contains(&self.assoc_threshold) {
            return invalid(format!("assoc_threshold {} not in [0, 1]", self.assoc_threshold));
        }
        if !(self.min_support > 0.0 && self.min_support <= 1.0) {
            return invalid(format!("min_support {} not in (0, 1]", self.min_support));
        }
        if !(self.min_confidence > 0.0 && self.min_confidence <= 1.0) {
            return invalid(format!("min_confidence {} not in (0, 1]", self.min_confidence));
        }
        if !(self.cluster.max_sparsity > 0.0 && self.cluster.max_sparsity <= 1.0) {
            return invalid(format!(
                "cluster.max_sparsity {} not in (0, 1]",
                self.cluster.max_sparsity
            ));
        }
        if self.cluster.clusters == 0 {
            return invalid("cluster.clusters must be positive".into());
        }
        Ok(())
    }
}
