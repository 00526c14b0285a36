//! On-disk artifacts. Every JSON report carries the run configuration and a
//! SHA-256 of its own canonical body; CSV files stay plain tables and their
//! digests are listed in the sibling JSON report.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use dustlab_core::Verdict;

/// Everything needed to reproduce an artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub precision: &'static str,
    /// Worker threads actually used.
    pub workers: usize,
    /// Command arguments: budgets, depth and node caps, output location, formats.
    pub args: Value,
}

impl RunConfig {
    pub fn new(command: &'static str, precision: &'static str, args: &impl Serialize) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            precision,
            workers: rayon::current_num_threads(),
            args: serde_json::to_value(args).expect("arguments serialize"),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::CertifiedHolds => "CertifiedHolds",
        Verdict::Inconclusive => "Inconclusive",
        Verdict::CertifiedFails => "CertifiedFails",
    }
}

#[derive(Serialize)]
struct Body<'a, R, S> {
    config: &'a RunConfig,
    records: R,
    summary: S,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    artifacts: Option<Value>,
}

/// Serializes a report and appends `content_sha256`, the digest of the
/// serialized object without that key. Output is compact JSON plus a newline.
pub fn report_json(
    config: &RunConfig,
    records: impl Serialize,
    summary: impl Serialize,
    verdict: Verdict,
    artifacts: Option<Value>,
) -> Vec<u8> {
    let body = Body { config, records, summary, verdict: verdict_name(verdict), artifacts };
    let mut out = serde_json::to_vec(&body).expect("report serializes");
    let digest = sha256_hex(&out);
    debug_assert_eq!(out.last(), Some(&b'}'));
    out.pop();
    out.extend_from_slice(format!(",\"content_sha256\":\"{digest}\"}}\n").as_bytes());
    out
}

pub fn write(dir: &Path, name: &str, bytes: &[u8]) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, bytes)?;
    Ok(path)
}
