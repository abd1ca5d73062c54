use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use zpf_core::QuadratureSpec;

/// Provenance record embedded in every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub tool_version: String,
    pub spec_tolerances: QuadratureSpec,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, spec: QuadratureSpec, timestamp: String) -> Self {
        Self {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            tool_version: zpf_core::VERSION.to_string(),
            spec_tolerances: spec,
            timestamp,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }
}

/// Current UTC time, second resolution.
pub fn now_utc() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Accepts an RFC 3339 timestamp and normalizes it to UTC.
pub fn parse_timestamp(raw: &str) -> Result<String, String> {
    chrono::DateTime::parse_from_rfc3339(raw)
        .map(|t| {
            t.with_timezone(&chrono::Utc)
                .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
        })
        .map_err(|e| format!("invalid --timestamp {raw:?}: {e}"))
}
