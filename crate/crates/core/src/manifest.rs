//! Reproducible run manifests.
//!
//! A [`RunManifest`] records everything needed to reproduce a batch run and
//! to check that a rerun did reproduce it: the command line, a digest of the
//! configuration, the root seed with every derived per-component seed, the
//! numeric parameters in force, wall-clock per stage, and a SHA-256 digest
//! of every artifact written. Exact outputs must replay bit-identically;
//! the digests make that checkable by byte comparison.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::ReplayError;

/// Hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Derive the seed for a named component from the root seed: SHA-256 over
/// the root seed (8 bytes little-endian) followed by the component name,
/// taking the first 8 digest bytes little-endian. Stable across platforms
/// and releases; distinct names decorrelate their random streams.
pub fn derive_component_seed(root_seed: u64, component: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(root_seed.to_le_bytes());
    h.update(component.as_bytes());
    let out = h.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("digest has 32 bytes"))
}

/// One derived seed, by component name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub component: String,
    pub seed: u64,
}

/// Digest of one artifact written during the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub name: String,
    pub sha256: String,
}

/// Wall-clock bookkeeping for one stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub millis: u64,
}

/// The reproducibility record of one batch run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunManifest {
    pub schema: String,
    pub tool_version: String,
    pub command_line: Vec<String>,
    /// SHA-256 of the configuration bytes as given.
    pub config_digest: String,
    pub root_seed: u64,
    /// Every component seed handed out, in the order first requested.
    pub seeds: Vec<SeedEntry>,
    /// Depth/radius/tolerance registry: every numeric knob in force.
    pub parameters: BTreeMap<String, String>,
    pub stages: Vec<StageTiming>,
    pub artifacts: Vec<ArtifactRecord>,
}

impl RunManifest {
    pub fn new(command_line: Vec<String>, config_bytes: &[u8], root_seed: u64) -> Self {
        RunManifest {
            schema: "run-manifest/1".into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command_line,
            config_digest: sha256_hex(config_bytes),
            root_seed,
            seeds: Vec::new(),
            parameters: BTreeMap::new(),
            stages: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    /// Seed for a named component, derived from the root seed and recorded
    /// in the registry. Asking twice for the same component returns the
    /// same seed and keeps a single entry.
    pub fn seed_for(&mut self, component: &str) -> u64 {
        if let Some(e) = self.seeds.iter().find(|e| e.component == component) {
            return e.seed;
        }
        let seed = derive_component_seed(self.root_seed, component);
        self.seeds.push(SeedEntry {
            component: component.to_string(),
            seed,
        });
        seed
    }

    pub fn set_parameter(&mut self, key: &str, value: impl Into<String>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    pub fn record_stage(&mut self, stage: &str, millis: u64) {
        self.stages.push(StageTiming {
            stage: stage.to_string(),
            millis,
        });
    }

    /// Digest an artifact's bytes and add them to the record; returns the
    /// hex digest.
    pub fn record_artifact(&mut self, name: &str, bytes: &[u8]) -> String {
        let digest = sha256_hex(bytes);
        self.artifacts.push(ArtifactRecord {
            name: name.to_string(),
            sha256: digest.clone(),
        });
        digest
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, ReplayError> {
        serde_json::from_str(s).map_err(|e| ReplayError::BadManifest {
            reason: e.to_string(),
        })
    }

    /// Check a rerun artifact byte-for-byte against the recorded digest.
    pub fn verify_artifact(&self, name: &str, bytes: &[u8]) -> Result<(), ReplayError> {
        let Some(rec) = self.artifacts.iter().find(|a| a.name == name) else {
            return Err(ReplayError::BadManifest {
                reason: format!("artifact {name} is not recorded in the manifest"),
            });
        };
        let actual = sha256_hex(bytes);
        if actual != rec.sha256 {
            return Err(ReplayError::DigestMismatch {
                name: name.to_string(),
                expected: rec.sha256.clone(),
                actual,
            });
        }
        Ok(())
    }

    /// Check that a rerun reproduced every recorded artifact (same names,
    /// same digests, same order).
    pub fn verify_against(&self, rerun: &RunManifest) -> Result<(), ReplayError> {
        if self.artifacts.len() != rerun.artifacts.len() {
            return Err(ReplayError::BadManifest {
                reason: format!(
                    "artifact count changed: {} recorded, {} reproduced",
                    self.artifacts.len(),
                    rerun.artifacts.len()
                ),
            });
        }
        for (a, b) in self.artifacts.iter().zip(&rerun.artifacts) {
            if a.name != b.name {
                return Err(ReplayError::BadManifest {
                    reason: format!("artifact order changed: {} vs {}", a.name, b.name),
                });
            }
            if a.sha256 != b.sha256 {
                return Err(ReplayError::DigestMismatch {
                    name: a.name.clone(),
                    expected: a.sha256.clone(),
                    actual: b.sha256.clone(),
                });
            }
        }
        Ok(())
    }
}
