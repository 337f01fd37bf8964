use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HatError, Result};
use crate::game::PairFile;

/// Resumable search state.
///
/// `cursor` counts completed units: enumeration index for exhaustive
/// scans, finished restarts for hill climbing. `rng_state` is the seed of
/// the next restart and is absent for exhaustive scans.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config_hash: String,
    pub cursor: u64,
    pub total: u64,
    pub best_value: Option<String>,
    pub best_pair: Option<PairFile>,
    pub rng_state: Option<u64>,
    pub optimum_count: u64,
    pub iterations: u64,
    #[serde(default)]
    pub witness_indices: Vec<u64>,
    #[serde(default)]
    pub optimal_indices: Vec<u64>,
    #[serde(default)]
    pub witnesses: Vec<PairFile>,
    #[serde(default)]
    pub best_win_counts: Vec<u64>,
    #[serde(default)]
    pub converged: u32,
}

impl Checkpoint {
    /// Loads `path` if it exists, rejecting checkpoints of other configurations.
    pub fn load(path: &Path, config_hash: &str) -> Result<Option<Checkpoint>> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let cp: Checkpoint = serde_json::from_str(&text)?;
        if cp.config_hash != config_hash {
            return Err(HatError::CheckpointMismatch {
                path: path.to_path_buf(),
            });
        }
        Ok(Some(cp))
    }

    /// Writes through a temporary file and a rename.
    pub fn store(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = std::path::PathBuf::from(tmp);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&tmp, text)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}
