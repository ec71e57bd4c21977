use std::path::Path;

use nnapprox::analysis::LipschitzAuditSpec;
use nnapprox::{Extended, GrowthPair, SpaceParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verdict,
    Counterexample,
    LearnerRate,
    LipschitzAudit,
    Gamma,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Space {
    pub alpha: f64,
    pub p: Extended,
    pub d: usize,
}

pub const DEFAULT_PROBE_LIMIT: u64 = 100_000;

/// One experiment, read from a single JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default)]
    pub space: Option<Space>,
    #[serde(default)]
    pub growth: Option<GrowthPair>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub probe_limit: Option<u64>,
    /// Relative critical-band tolerance for verdicts.
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Hölder exponent; selects the Hölder target where applicable.
    #[serde(default)]
    pub beta: Option<f64>,
    /// Growth exponent driving a counterexample sequence (default: `γ*`).
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Network depth of constructed spikes.
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default)]
    pub k_list: Option<Vec<u32>>,
    #[serde(default)]
    pub n_k: Option<Vec<u64>>,
    #[serde(default)]
    pub m_list: Option<Vec<u64>>,
    /// Named corpus functions (`zero`, `sqrt`, `cusp`, `zeta:M′`, `affine:a,b`, `net:path`).
    #[serde(default)]
    pub corpus: Option<Vec<String>>,
    /// Widths of the certified unit-ball spikes in the learner corpus.
    #[serde(default)]
    pub zeta_widths: Option<Vec<u64>>,
    #[serde(default)]
    pub pair_budget: Option<usize>,
    #[serde(default)]
    pub audit: Option<LipschitzAuditSpec>,
}

impl ExperimentConfig {
    /// Parses the file and returns the config with the SHA-256 of its bytes.
    pub fn load(path: &Path) -> Result<(Self, String), CliError> {
        let bytes = std::fs::read(path).map_err(|source| CliError::ReadConfig { path: path.to_owned(), source })?;
        let cfg = serde_json::from_slice(&bytes).map_err(CliError::ParseConfig)?;
        Ok((cfg, hex::encode(Sha256::digest(&bytes))))
    }

    pub fn growth(&self) -> Result<&GrowthPair, CliError> {
        self.growth.as_ref().ok_or(CliError::Missing("growth"))
    }

    pub fn space_params(&self) -> Result<SpaceParams, CliError> {
        let s = self.space.ok_or(CliError::Missing("space"))?;
        Ok(SpaceParams::new(s.alpha, s.p, s.d, self.growth()?.clone())?)
    }

    pub fn probe_limit(&self) -> u64 {
        self.probe_limit.unwrap_or(DEFAULT_PROBE_LIMIT)
    }
}
