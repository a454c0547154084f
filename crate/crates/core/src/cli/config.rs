//! Declarative run configuration (TOML) and its provenance hash.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{ComplexityParams, ThresholdSpec};
use crate::engine::{EngineKind, MergePolicy};
use crate::error::{validation, Result};
use crate::params::{ModelParams, Scenario};
use crate::topology::FiberSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub jobs: usize,
    pub out: PathBuf,
    pub scenario: Scenario,
    pub model: ModelParams,
    pub engine: EngineConfig,
    pub topology: TopologyConfig,
    pub repeaters: RepeatersConfig,
    pub sweep: SweepConfig,
    pub threshold: ThresholdConfig,
    pub complexity: ComplexityParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            jobs: 1,
            out: PathBuf::from("out"),
            scenario: Scenario::Distributed,
            model: ModelParams::default(),
            engine: EngineConfig::default(),
            topology: TopologyConfig::default(),
            repeaters: RepeatersConfig::default(),
            sweep: SweepConfig::default(),
            threshold: ThresholdConfig::default(),
            complexity: ComplexityParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub reduction: EngineKind,
    pub policy: MergePolicy,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            reduction: EngineKind::Shortcuts,
            policy: MergePolicy::Lexicographic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopologyConfig {
    /// Point-cloud CSV (`id,x,y`).
    pub points: Option<PathBuf>,
    /// Edge-list CSV (`u,v,length_km`).
    pub edges: Option<PathBuf>,
    /// Optional companion node table for `edges`.
    pub nodes: Option<PathBuf>,
    /// Generated cloud size when no file is given.
    pub n: usize,
    pub box_side: f64,
    pub fiber: FiberSpec,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        TopologyConfig {
            points: None,
            edges: None,
            nodes: None,
            n: 1000,
            box_side: 1.0,
            fiber: FiberSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RepeatersConfig {
    pub mean_segment_km: f64,
}

impl Default for RepeatersConfig {
    fn default() -> Self {
        RepeatersConfig { mean_segment_km: 50.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Explicit grid; overrides the log-spaced one when set.
    pub d0: Option<Vec<f64>>,
    pub d0_min: f64,
    pub d0_max: f64,
    pub d0_points: usize,
    pub scenarios: Vec<Scenario>,
    pub replicates: usize,
    pub target: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            d0: None,
            d0_min: 10.0,
            d0_max: 20_000.0,
            d0_points: 34,
            scenarios: Scenario::ALL.to_vec(),
            replicates: 1,
            target: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThresholdConfig {
    pub alphas: Vec<f64>,
    #[serde(flatten)]
    pub spec: ThresholdSpec,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            alphas: vec![0.0, crate::quantum::ALPHA_STAR],
            spec: ThresholdSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| validation(format!("{}: {e}", path.display())))
    }
}

/// Hex sha256 of the canonical JSON form of `value`.
pub fn config_hash<T: Serialize>(value: &T) -> Result<String> {
    let json = serde_json::to_vec(value)?;
    Ok(hex::encode(Sha256::digest(&json)))
}
