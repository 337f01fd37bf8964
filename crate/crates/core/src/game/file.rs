use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FinitePair, FiniteStrategy};
use crate::error::Result;

/// On-disk strategy pair: `{"hats": n, "player1": [...], "player2": [...]}`.
/// Entry `i` (0-based) holds the 1-based hat chosen when the partner shows
/// configuration mask `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub hats: usize,
    pub player1: Vec<u8>,
    pub player2: Vec<u8>,
}

impl PairFile {
    pub fn from_pair(pair: &FinitePair) -> Self {
        PairFile {
            hats: pair.hats(),
            player1: pair.player1().table().to_vec(),
            player2: pair.player2().table().to_vec(),
        }
    }

    pub fn to_pair(&self) -> Result<FinitePair> {
        FinitePair::new(
            FiniteStrategy::new(self.hats, self.player1.clone())?,
            FiniteStrategy::new(self.hats, self.player2.clone())?,
        )
    }

    pub fn parse(text: &str) -> Result<FinitePair> {
        serde_json::from_str::<PairFile>(text)?.to_pair()
    }

    pub fn read(path: &Path) -> Result<FinitePair> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Compact single-line JSON plus a trailing newline.
    pub fn render(pair: &FinitePair) -> String {
        let mut s = serde_json::to_string(&Self::from_pair(pair)).expect("serializable");
        s.push('\n');
        s
    }
}
