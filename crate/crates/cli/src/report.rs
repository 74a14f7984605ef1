//! Machine-readable run reports: one compact JSON object per line on
//! stdout. Nothing time-dependent is ever serialized here, so a rerun of
//! the same command and seed is byte-identical; timings belong in the
//! stderr summary.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// One named invariant check inside a command report.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Check {
    pub invariant: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(invariant: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { invariant: invariant.into(), pass, detail: detail.into() }
    }
}

/// The stdout record of one command invocation.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub input_digest: String,
    pub outputs: serde_json::Value,
    pub verdicts: Vec<Check>,
}

impl RunReport {
    pub fn print(&self) {
        println!("{}", serde_json::to_string(self).expect("report serializes"));
    }
}

/// `sha256:<hex>` of the raw input bytes (file contents, or the canonical
/// parameter string for file-less commands).
pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}
