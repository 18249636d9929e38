use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Everything needed to re-run a command: its arguments, resolved config,
/// input fingerprints and outputs. Timings are informational only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub seed: u64,
    /// Input name to content fingerprint (hex SHA-256).
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<PathBuf>,
    pub timings_ms: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(command: &str, config: &impl Serialize, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            args: std::env::args().skip(1).collect(),
            config: serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
            seed,
            ..Default::default()
        }
    }

    pub fn input(&mut self, name: &str, fingerprint: impl ToString) -> &mut Self {
        self.inputs.insert(name.to_string(), fingerprint.to_string());
        self
    }

    pub fn output(&mut self, path: impl Into<PathBuf>) -> &mut Self {
        self.outputs.push(path.into());
        self
    }

    pub fn timing(&mut self, name: &str, d: Duration) -> &mut Self {
        self.timings_ms.insert(name.to_string(), d.as_secs_f64() * 1e3);
        self
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(e.line(), e.to_string()))
    }
}

/// `<out>.manifest.json` next to the primary output, or
/// `s3gnd-<command>.manifest.json` in the working directory.
pub fn default_manifest_path(command: &str, out: Option<&Path>) -> PathBuf {
    match out {
        Some(p) => {
            let mut s = p.as_os_str().to_owned();
            s.push(".manifest.json");
            PathBuf::from(s)
        }
        None => PathBuf::from(format!("s3gnd-{command}.manifest.json")),
    }
}
