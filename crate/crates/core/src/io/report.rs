use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::round6;
use crate::constraints::ConformanceReport;
use crate::error::{Error, Result};
use crate::quality::BdRateTable;
use crate::switching::{CodecCapabilities, SessionReport};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

pub fn digest_files(paths: &[PathBuf]) -> Result<Vec<InputDigest>> {
    paths
        .iter()
        .map(|p| {
            let bytes = fs::read(p).map_err(|source| Error::Io {
                path: p.clone(),
                source,
            })?;
            Ok(InputDigest {
                path: p.display().to_string(),
                sha256: hex::encode(Sha256::digest(&bytes)),
            })
        })
        .collect()
}

/// Everything `sim run` produces, in one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub caps: CodecCapabilities,
    pub fallback: bool,
    /// Where the schedule came from: `trace` or `schedule`.
    pub driver: String,
    pub conformance: ConformanceReport,
    pub session: SessionReport,
    pub bdrate: Vec<BdRateTable>,
}

impl RunReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        seed: Option<u64>,
        inputs: Vec<InputDigest>,
        caps: CodecCapabilities,
        fallback: bool,
        driver: &str,
        conformance: ConformanceReport,
        session: SessionReport,
        bdrate: Vec<BdRateTable>,
    ) -> Self {
        RunReport {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: TOOL_VERSION.to_string(),
            seed,
            inputs,
            caps,
            fallback,
            driver: driver.to_string(),
            conformance,
            session,
            bdrate,
        }
    }
}

/// Rounds every non-integer number to six significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n
                .as_f64()
                .map(round6)
                .and_then(serde_json::Number::from_f64)
            {
                *n = x;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON with sorted keys and rounded floats, newline terminated.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}
