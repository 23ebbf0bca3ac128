//! The declarative description of a run, and the metadata wrapper around it.
//!
//! Everything an experiment did is a pure function of its [`RunSpec`]: the
//! resolved instance, the algorithm, the trial count, and the root seed.
//! `metadata.json` embeds the spec verbatim, so `replay` can re-execute it
//! and reproduce every artifact byte for byte.  Nothing environmental —
//! paths, timestamps, hostnames, worker counts — is allowed in here, or the
//! replay guarantee would quietly rot.
//!
//! The spec is also fingerprinted the way git fingerprints file contents: a
//! SHA-256 over `blob <len>\0<canonical json>`.  The hash lets a reader spot
//! a hand-edited metadata file, and gives two runs of the same spec the same
//! identity regardless of where their directories ended up.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use collab_bai::{AlgoConfig, Instance};

/// What to execute; the replayable commands, minus anything environmental.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunSpec {
    /// Estimate one algorithm's error rate on one instance.
    Run {
        instance: Instance,
        algo: AlgoConfig,
        trials: u64,
        seed: u64,
        /// Export trial 0's pull ledger alongside the table.
        transcript: bool,
    },
    /// Build a rounds-versus-speedup table against the rejects baseline.
    Sweep {
        instance: Instance,
        agents: u32,
        rounds: Vec<u32>,
        target_err: f64,
        trials: u64,
        seed: u64,
        floor: u64,
        ceiling: u64,
    },
    /// Sign identification at a given gap.
    Signid {
        delta: f64,
        agents: u32,
        horizon: u64,
        rounds: u32,
        trials: u64,
        seed: u64,
    },
}

impl RunSpec {
    /// The canonical byte form the content hash is computed over.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("a run spec always serializes")
    }

    /// Git-style content fingerprint of the spec.
    pub fn content_hash(&self) -> String {
        let canonical = self.canonical_json();
        let mut hasher = Sha256::new();
        hasher.update(format!("blob {}\0", canonical.len()).as_bytes());
        hasher.update(canonical.as_bytes());
        let mut hex = String::with_capacity(7 + 64);
        hex.push_str("sha256:");
        for byte in hasher.finalize() {
            use std::fmt::Write;
            write!(hex, "{byte:02x}").expect("writing to a string cannot fail");
        }
        hex
    }
}

// ---------------------------------------------------------------------------
// Metadata
// ---------------------------------------------------------------------------

/// The `metadata.json` written next to every artifact set.
#[derive(Debug, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: ToolInfo,
    pub spec: RunSpec,
    pub constants: Constants,
    /// Prose definitions of the quantities the artifacts report.
    pub definitions: BTreeMap<String, String>,
    /// Fingerprint of `spec`; `replay` refuses a file where the two disagree.
    pub content_hash: String,
    /// Artifact files this run wrote, besides the metadata itself.
    pub outputs: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

/// Calibration constants in force for the run, recorded so tables produced
/// by different invocations stay comparable.
#[derive(Debug, Serialize, Deserialize)]
pub struct Constants {
    /// Leading constant for hardness-calibrated horizon sizing.
    pub c_alg: f64,
    /// Coverage level of every confidence interval in the artifacts.
    pub confidence: f64,
}

const FAILURE_DEFINITION: &str = "a trial fails when the returned arm differs from the \
                                  instance's best arm; abstentions count as failures";

const SPEEDUP_DEFINITION: &str = "speedup = baseline_T / T_star: the smallest successive-rejects \
                                  pull budget that reaches the target error, divided by the \
                                  smallest collaborative horizon that reaches the same target \
                                  under the same acceptance rule";

const BASELINE_DEFINITION: &str = "centralized successive rejects, its budget found by the same \
                                   doubling-and-bisection search the collaborative rows use";

impl Metadata {
    /// Wrap a spec, fingerprinting it and attaching the definitions its
    /// artifacts need.
    pub fn new(spec: RunSpec, outputs: Vec<String>) -> Self {
        let mut definitions = BTreeMap::new();
        definitions.insert("failure".to_string(), FAILURE_DEFINITION.to_string());
        if let RunSpec::Sweep { .. } = &spec {
            definitions.insert("speedup".to_string(), SPEEDUP_DEFINITION.to_string());
            definitions.insert("baseline".to_string(), BASELINE_DEFINITION.to_string());
        }
        let content_hash = spec.content_hash();
        Metadata {
            tool: ToolInfo {
                name: "collab-bai".to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            spec,
            constants: Constants {
                c_alg: collab_bai::experiments::DEFAULT_C_ALG,
                confidence: collab_bai::experiments::DEFAULT_CONFIDENCE,
            },
            definitions,
            content_hash,
            outputs,
        }
    }

    /// The serialized form written to disk (pretty, trailing newline).
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("metadata always serializes");
        text.push('\n');
        text
    }
}
