//! Canonical JSON reports for the command-line tool.
//!
//! Objects serialise with sorted keys and floats print through the shortest
//! round-trip representation, so two runs on the same inputs differ only in
//! `timings`.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::KernelCertificate;

/// JSON Schema every report validates against.
pub const SCHEMA: &str = include_str!("../../../docs/report.schema.json");

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub task: String,
    pub input_digest: String,
    pub result: Value,
    pub certificate: Option<Value>,
    pub timings: BTreeMap<String, f64>,
    pub tool_version: String,
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::InvalidArgument(format!("serialisation failed: {e}")))
}

/// sha256 of the compact canonical encoding.
pub fn digest(inputs: &Value) -> String {
    let bytes = serde_json::to_vec(inputs).expect("Value always serialises");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn new<T: Serialize>(
        task: &str,
        inputs: &Value,
        result: &T,
        certificate: Option<&KernelCertificate>,
        timings: Timings,
    ) -> Result<Self> {
        let result = to_value(result)?;
        if !matches!(result.get("pass"), Some(Value::Bool(_))) {
            return Err(Error::InvalidArgument(format!("{task}: result carries no pass flag")));
        }
        Ok(Self {
            task: task.into(),
            input_digest: digest(inputs),
            result,
            certificate: certificate.map(to_value).transpose()?,
            timings: timings.0,
            tool_version: TOOL_VERSION.into(),
        })
    }

    pub fn pass(&self) -> bool {
        self.result.get("pass").and_then(Value::as_bool).unwrap_or(false)
    }

    /// Pretty-printed with sorted keys and a trailing newline.
    pub fn to_json(&self) -> String {
        let v = to_value(self).expect("report fields serialise");
        let mut s = serde_json::to_string_pretty(&v).expect("Value always serialises");
        s.push('\n');
        s
    }

    /// The `result` block alone, for comparing runs.
    pub fn result_json(&self) -> String {
        serde_json::to_string(&self.result).expect("Value always serialises")
    }
}

/// Wall time per named phase, in seconds.
#[derive(Clone, Debug, Default)]
pub struct Timings(BTreeMap<String, f64>);

impl Timings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.0.entry(phase.into()).or_default() += start.elapsed().as_secs_f64();
        out
    }

    pub fn phases(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}
