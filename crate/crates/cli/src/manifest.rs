use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::args::Command;
use cvxclust::SolverConfig;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TOOL: &str = "cvxclust";

/// Record of one invocation. `invocation` holds every flag after environment
/// and default resolution, so replaying it needs nothing else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub invocation: Command,
    pub inputs: Vec<PathBuf>,
    /// Solver settings as used, with λ resolved. `None` when no single solve ran.
    pub config: Option<SolverConfig>,
    pub seed: u64,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub out_dir: PathBuf,
    /// File names inside `out_dir`, in the order they were written.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let m: RunManifest = serde_json::from_str(text)?;
        if m.tool != TOOL {
            anyhow::bail!("manifest was written by {:?}", m.tool);
        }
        if m.command != m.invocation.name() {
            anyhow::bail!("command {:?} does not match the recorded invocation", m.command);
        }
        if let Command::Replay(_) = m.invocation {
            anyhow::bail!("a manifest cannot record a replay");
        }
        Ok(m)
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }
}

pub fn now_unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}
