//! Searches over finite strategy tables: exhaustive scans of pairs and
//! symmetric tables, and seeded hill climbing.
//!
//! Objectives are exact. At `p = a/b` every candidate gets an integer
//! score with common denominator `b^(2n)`, so ties are real ties.

mod checkpoint;
mod exhaustive;
mod hillclimb;
mod objective;

use std::path::PathBuf;
use std::time::Instant;

use num_rational::BigRational;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::exact::rational::{check_probability, rational_to_string};
use crate::game::{FinitePair, WinCountVector};

pub use checkpoint::Checkpoint;
pub use exhaustive::{exhaustive_pairs, exhaustive_symmetric, space_size};
pub use hillclimb::hill_climb;
pub use objective::delta_evaluate;

pub const DEFAULT_CHECKPOINT_INTERVAL: u64 = 10_000_000;
pub const DEFAULT_MAX_ITERATIONS: u64 = 10_000_000;
/// Witnesses kept in a report.
pub const MAX_WITNESSES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    HillClimb,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckpointOptions {
    pub path: PathBuf,
    /// Units (candidates or restarts) between checkpoint writes.
    pub interval: u64,
    /// Stop with [`crate::HatError::Interrupted`] once this many units are done.
    pub stop_after: Option<u64>,
}

impl CheckpointOptions {
    /// Interval from `HATLAB_CHECKPOINT_INTERVAL`, else the default.
    pub fn new(path: impl Into<PathBuf>) -> Self {
        let interval = std::env::var("HATLAB_CHECKPOINT_INTERVAL")
            .ok()
            .and_then(|v| v.parse().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_CHECKPOINT_INTERVAL);
        CheckpointOptions {
            path: path.into(),
            interval,
            stop_after: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub hats: usize,
    pub p: BigRational,
    pub symmetric: bool,
    pub mode: SearchMode,
    pub seed: u64,
    pub restarts: u32,
    /// Moves examined per restart before giving up on convergence.
    pub max_iterations: u64,
    pub sideways_moves: bool,
    pub workers: usize,
    pub checkpoint: Option<CheckpointOptions>,
}

impl SearchConfig {
    pub fn new(hats: usize, p: BigRational) -> Self {
        SearchConfig {
            hats,
            p,
            symmetric: false,
            mode: SearchMode::Exhaustive,
            seed: 0,
            restarts: 1,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            sideways_moves: false,
            workers: 1,
            checkpoint: None,
        }
    }

    pub fn exhaustive(hats: usize, p: BigRational, symmetric: bool) -> Self {
        SearchConfig {
            symmetric,
            ..Self::new(hats, p)
        }
    }

    pub fn hill_climb(hats: usize, p: BigRational, seed: u64, restarts: u32) -> Self {
        SearchConfig {
            mode: SearchMode::HillClimb,
            seed,
            restarts,
            ..Self::new(hats, p)
        }
    }

    /// Digest of the fields that determine the result (not workers or
    /// checkpoint placement).
    pub fn config_hash(&self) -> String {
        let key = match self.mode {
            SearchMode::Exhaustive => format!(
                "exhaustive;hats={};p={};symmetric={}",
                self.hats,
                rational_to_string(&self.p),
                self.symmetric
            ),
            SearchMode::HillClimb => format!(
                "hillclimb;hats={};p={};symmetric={};seed={};restarts={};max_iterations={};sideways={}",
                self.hats,
                rational_to_string(&self.p),
                self.symmetric,
                self.seed,
                self.restarts,
                self.max_iterations,
                self.sideways_moves
            ),
        };
        hex::encode(Sha256::digest(key.as_bytes()))
    }

    pub(crate) fn validate(&self) -> Result<()> {
        crate::game::check_hats(self.hats)?;
        check_probability(&self.p)?;
        if self.mode == SearchMode::HillClimb && self.restarts == 0 {
            return Err(crate::HatError::invalid(
                "hill climbing needs at least one restart",
            ));
        }
        Ok(())
    }
}

/// Outcome of a search. Equality ignores `wall_time`.
#[derive(Clone, Debug)]
pub struct SearchReport {
    pub best_value: BigRational,
    pub best_win_counts: WinCountVector,
    /// Number of optimal pairs (exhaustive modes only).
    pub optimum_count: Option<u64>,
    /// Renumbering classes among the optima (exhaustive, n ≤ 3).
    pub class_count: Option<usize>,
    pub witnesses: Vec<FinitePair>,
    /// Candidates scanned, or moves examined when climbing.
    pub iterations: u64,
    /// Restarts that stopped at a verified local optimum.
    pub converged_restarts: Option<u32>,
    pub wall_time: f64,
}

impl PartialEq for SearchReport {
    fn eq(&self, other: &Self) -> bool {
        self.best_value == other.best_value
            && self.best_win_counts == other.best_win_counts
            && self.optimum_count == other.optimum_count
            && self.class_count == other.class_count
            && self.witnesses == other.witnesses
            && self.iterations == other.iterations
            && self.converged_restarts == other.converged_restarts
    }
}

/// Runs the search selected by `cfg.mode` and `cfg.symmetric`.
pub fn run_search(cfg: &SearchConfig) -> Result<SearchReport> {
    match (cfg.mode, cfg.symmetric) {
        (SearchMode::HillClimb, _) => hill_climb(cfg),
        (SearchMode::Exhaustive, false) => exhaustive_pairs(cfg),
        (SearchMode::Exhaustive, true) => exhaustive_symmetric(cfg),
    }
}

pub(crate) fn thread_pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
}

pub(crate) fn elapsed(start: Instant) -> f64 {
    start.elapsed().as_secs_f64()
}
