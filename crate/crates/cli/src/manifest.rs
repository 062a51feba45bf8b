//! Run manifests: every command writes one next to its outputs, and
//! `macroreal replay` re-executes the recorded invocation bit-identically.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

pub const MANIFEST_SCHEMA: &str = "macroreal-manifest v1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub command: String,
    /// Full argv as invoked (argv[0] normalized to "macroreal").
    pub argv: Vec<String>,
    pub version: String,
    /// Fully resolved configuration of the run.
    pub resolved: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Paths written by the run, relative to the manifest location.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        argv: &[String],
        resolved: serde_json::Value,
        seed: Option<u64>,
    ) -> Self {
        let mut argv: Vec<String> = argv.to_vec();
        if !argv.is_empty() {
            argv[0] = "macroreal".to_string();
        }
        Self {
            schema: MANIFEST_SCHEMA.to_string(),
            command: command.to_string(),
            argv,
            version: env!("CARGO_PKG_VERSION").to_string(),
            resolved,
            seed,
            outputs: Vec::new(),
        }
    }

    pub fn record_output(&mut self, name: &str) {
        self.outputs.push(name.to_string());
    }

    pub fn write(&self, dir: &Path) -> anyhow::Result<PathBuf> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self).context("serializing manifest")?;
        std::fs::write(&path, text + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let m: RunManifest =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if m.schema != MANIFEST_SCHEMA {
            anyhow::bail!("unsupported manifest schema '{}'", m.schema);
        }
        Ok(m)
    }
}
