//! Serializable snapshot of everything that determines a run's output.
//!
//! Thread count, `--sequential` and the output directory are left out on
//! purpose: they never change results, so runs that differ only in them
//! share a hash.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;
use plexsim::{
    ActivityThresholds, Convention, Layer, NullModel, PValueEstimator, PairDomain, ProximityConfig,
    Sidedness, SynthConfig,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::Format;

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<InputConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attributes: Option<AttributeConfig>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub alphas: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<Convention>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub significance: Option<SignificanceConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_domain: Option<PairDomain>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prune: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            input: None,
            attributes: None,
            alphas: Vec::new(),
            convention: None,
            significance: None,
            bootstrap: None,
            pair_domain: None,
            prune: None,
            synth: None,
            format: None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config is plain data")
    }

    pub fn sha256(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config is plain data");
        hex::encode(Sha256::digest(&canonical))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FileRef {
    pub path: String,
    pub sha256: String,
}

impl FileRef {
    pub fn read(path: &Path) -> anyhow::Result<(Self, Vec<u8>)> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let r = Self {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        };
        Ok((r, bytes))
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InputConfig {
    Events {
        file: FileRef,
        layers: Vec<Layer>,
        /// None when the activity filter is off.
        thresholds: Option<ActivityThresholds>,
        proximity: ProximityConfig,
        /// None when scans from all hours are used.
        utc_offset: Option<String>,
    },
    Counts {
        file: FileRef,
        layers: Vec<Layer>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct AttributeConfig {
    pub file: FileRef,
    pub variables: Vec<String>,
    pub encodings: BTreeMap<String, BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SignificanceConfig {
    pub replicas: usize,
    pub seed: u64,
    pub null_model: NullModel,
    pub sidedness: Sidedness,
    pub estimator: PValueEstimator,
}

#[derive(Debug, Clone, Serialize)]
pub struct BootstrapConfig {
    pub replicas: usize,
    pub seed: u64,
}

/// Parses `var=label:num,label:num`.
pub fn parse_encoding(spec: &str) -> anyhow::Result<(String, BTreeMap<String, f64>)> {
    let (var, rest) = spec
        .split_once('=')
        .with_context(|| format!("encoding `{spec}` must look like var=label:num,..."))?;
    let mut map = BTreeMap::new();
    for item in rest.split(',') {
        let (label, code) = item
            .split_once(':')
            .with_context(|| format!("encoding item `{item}` must look like label:num"))?;
        let code: f64 = code
            .trim()
            .parse()
            .with_context(|| format!("encoding code `{code}` is not a number"))?;
        if map.insert(label.trim().to_string(), code).is_some() {
            anyhow::bail!("label `{label}` encoded twice for `{var}`");
        }
    }
    let mut codes: Vec<f64> = map.values().copied().collect();
    codes.sort_by(f64::total_cmp);
    if codes.windows(2).any(|w| w[0] == w[1]) {
        anyhow::bail!("encoding for `{var}` maps two labels to the same code");
    }
    Ok((var.trim().to_string(), map))
}
