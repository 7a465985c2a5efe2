//! Sidecar manifest of a simulation run.
//!
//! Stores a hash of the expanded grid (seed and replications included)
//! together with the ids of finished scenarios, so an interrupted run can
//! resume where it stopped. Rows are written in grid order, so the finished
//! ids always form a prefix.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::sim::Scenario;

use super::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format: u32,
    pub seed: u64,
    pub replications: u64,
    pub grid_hash: String,
    pub scenarios: usize,
    /// Scenario ids whose CSV row has been written.
    pub completed: Vec<usize>,
    /// Seconds since the Unix epoch of the last update.
    pub updated_unix: u64,
}

/// SHA-256 of the CSV header and the serialized scenario list.
pub fn grid_hash(header: &str, scenarios: &[Scenario]) -> String {
    let mut h = Sha256::new();
    h.update(header.as_bytes());
    h.update(serde_json::to_vec(scenarios).expect("scenarios serialize"));
    hex::encode(h.finalize())
}

pub fn path_for(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl Manifest {
    pub fn new(seed: u64, replications: u64, grid_hash: String, scenarios: usize) -> Self {
        Manifest {
            format: FORMAT_VERSION,
            seed,
            replications,
            grid_hash,
            scenarios,
            completed: Vec::new(),
            updated_unix: now(),
        }
    }

    pub fn load(path: &Path) -> Result<Option<Self>, CliError> {
        match std::fs::read_to_string(path) {
            Ok(text) => serde_json::from_str(&text)
                .map(Some)
                .map_err(|e| CliError::Config(format!("{}: unreadable manifest: {e}", path.display()))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(CliError::Runtime(format!("cannot read {}: {e}", path.display()))),
        }
    }

    /// Writes through a temporary file so an interruption never leaves a
    /// truncated manifest.
    pub fn save(&mut self, path: &Path) -> Result<(), CliError> {
        self.updated_unix = now();
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Runtime(e.to_string()))?;
        std::fs::write(&tmp, text + "\n")?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Number of leading scenarios already finished.
    pub fn finished_prefix(&self) -> usize {
        self.completed.iter().enumerate().take_while(|(i, &id)| *i == id).count()
    }
}
