//! Exhaustive scans.
//!
//! Entries at the two monochromatic inputs never change the score, so the
//! scan fixes them to hat 1 and enumerates only the remaining entries. The
//! optimum count is scaled back up by the number of ways to fill the fixed
//! entries. Consecutive candidates differ like an odometer, so most steps
//! rescore a single entry in `O(2^n)`.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;

use super::checkpoint::Checkpoint;
use super::objective::{Evaluator, Score, Weights};
use super::{elapsed, thread_pool, SearchConfig, SearchMode, SearchReport, MAX_WITNESSES};
use crate::error::{HatError, Result};
use crate::exact::rational::{parse_rational, rational_to_string};
use crate::game::{
    self, canonical_form, evaluate_pair, FinitePair, FiniteStrategy, PairFile, Player,
};

const PAIR_MAX_HATS: usize = 3;
const SYMMETRIC_MAX_HATS: usize = 4;
/// Largest symmetric size scanned without a checkpoint.
const SYMMETRIC_UNCHECKPOINTED: usize = 3;
const CLASS_MAX_HATS: usize = 3;

/// Size of the full (unreduced) search space as a decimal string.
pub fn space_size(hats: usize, symmetric: bool) -> String {
    let tables = num_traits::pow(BigInt::from(hats), 1 << hats);
    if symmetric {
        tables.to_string()
    } else {
        (&tables * &tables).to_string()
    }
}

struct Space {
    hats: usize,
    symmetric: bool,
    free_masks: Vec<usize>,
    total: u64,
}

impl Space {
    fn new(hats: usize, symmetric: bool) -> Self {
        let free_masks: Vec<usize> = (0..1usize << hats)
            .filter(|&m| !game::is_monochromatic(hats, m))
            .collect();
        let digits = free_masks.len() * if symmetric { 1 } else { 2 };
        Space {
            hats,
            symmetric,
            total: (hats as u64).pow(digits as u32),
            free_masks,
        }
    }

    fn digits(&self) -> usize {
        self.free_masks.len() * if self.symmetric { 1 } else { 2 }
    }

    /// Optimal pairs per reduced candidate.
    fn multiplicity(&self) -> u64 {
        (self.hats as u64).pow(if self.symmetric { 2 } else { 4 })
    }

    /// Digit `d` as (player, mask); symmetric digits drive both players.
    fn digit(&self, d: usize) -> (Option<Player>, usize) {
        if self.symmetric {
            (None, self.free_masks[d])
        } else if d < self.free_masks.len() {
            (Some(Player::Two), self.free_masks[d])
        } else {
            (
                Some(Player::One),
                self.free_masks[d - self.free_masks.len()],
            )
        }
    }

    /// Tables for candidate `index`, least significant digit first.
    fn decode(&self, mut index: u64) -> (Vec<u8>, Vec<u8>) {
        let size = 1 << self.hats;
        let mut t1 = vec![1u8; size];
        let mut t2 = vec![1u8; size];
        let n = self.hats as u64;
        for d in 0..self.digits() {
            let v = (index % n) as u8 + 1;
            index /= n;
            match self.digit(d) {
                (None, m) => {
                    t1[m] = v;
                    t2[m] = v;
                }
                (Some(Player::One), m) => t1[m] = v,
                (Some(Player::Two), m) => t2[m] = v,
            }
        }
        (t1, t2)
    }

    fn pair(&self, index: u64) -> FinitePair {
        let (t1, t2) = self.decode(index);
        FinitePair::new(
            FiniteStrategy::new(self.hats, t1).expect("valid table"),
            FiniteStrategy::new(self.hats, t2).expect("valid table"),
        )
        .expect("equal sizes")
    }
}

#[derive(Clone, Debug)]
struct Partial<S> {
    best: Option<S>,
    count: u64,
    witnesses: Vec<u64>,
    // every optimal index, kept only when classes are counted
    optimal: Vec<u64>,
}

impl<S: Score> Partial<S> {
    fn empty() -> Self {
        Partial {
            best: None,
            count: 0,
            witnesses: Vec::new(),
            optimal: Vec::new(),
        }
    }

    fn offer(&mut self, index: u64, score: &S, keep_all: bool) {
        match self.best.as_ref().map(|b| score.cmp(b)) {
            Some(std::cmp::Ordering::Less) => return,
            Some(std::cmp::Ordering::Equal) => {}
            _ => {
                self.best = Some(score.clone());
                self.count = 0;
                self.witnesses.clear();
                self.optimal.clear();
            }
        }
        self.count += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(index);
        }
        if keep_all {
            self.optimal.push(index);
        }
    }

    /// Folds in a partial covering a later index range.
    fn merge(&mut self, other: Partial<S>) {
        let Some(ob) = other.best else { return };
        match self.best.as_ref().map(|b| ob.cmp(b)) {
            Some(std::cmp::Ordering::Less) => {}
            Some(std::cmp::Ordering::Equal) => {
                self.count += other.count;
                let room = MAX_WITNESSES - self.witnesses.len();
                self.witnesses
                    .extend(other.witnesses.into_iter().take(room));
                self.optimal.extend(other.optimal);
            }
            _ => {
                *self = Partial {
                    best: Some(ob),
                    ..other
                }
            }
        }
    }
}

fn scan<S: Score>(
    space: &Space,
    ev: &Evaluator<S>,
    start: u64,
    end: u64,
    keep_all: bool,
) -> Partial<S> {
    let mut out = Partial::empty();
    if start >= end {
        return out;
    }
    let n = space.hats as u8;
    let (mut t1, mut t2) = space.decode(start);
    let mut score = ev.score(&t1, &t2);
    let mut index = start;
    loop {
        out.offer(index, &score, keep_all);
        index += 1;
        if index == end {
            return out;
        }
        for d in 0..space.digits() {
            let (who, m) = space.digit(d);
            let cur = match who {
                Some(Player::Two) => t2[m],
                _ => t1[m],
            };
            let next = if cur == n { 1 } else { cur + 1 };
            match who {
                Some(Player::One) => {
                    score += &ev.delta(&t1, &t2, Player::One, m, next);
                    t1[m] = next;
                }
                Some(Player::Two) => {
                    score += &ev.delta(&t1, &t2, Player::Two, m, next);
                    t2[m] = next;
                }
                None => {
                    score += &ev.delta(&t1, &t2, Player::One, m, next);
                    t1[m] = next;
                    score += &ev.delta(&t1, &t2, Player::Two, m, next);
                    t2[m] = next;
                }
            }
            if next != 1 {
                break;
            }
        }
    }
}

/// Splits `[lo, hi)` into contiguous pieces and merges them in order.
fn scan_parallel<S: Score>(
    pool: &rayon::ThreadPool,
    workers: usize,
    space: &Space,
    ev: &Evaluator<S>,
    lo: u64,
    hi: u64,
    keep_all: bool,
) -> Partial<S> {
    let pieces = (workers as u64 * 8).clamp(1, (hi - lo).max(1));
    let step = (hi - lo).div_ceil(pieces);
    let ranges: Vec<(u64, u64)> = (0..pieces)
        .map(|i| (lo + i * step, (lo + (i + 1) * step).min(hi)))
        .filter(|(a, b)| a < b)
        .collect();
    let parts: Vec<Partial<S>> = pool.install(|| {
        ranges
            .par_iter()
            .map(|&(a, b)| scan(space, ev, a, b, keep_all))
            .collect()
    });
    let mut acc = Partial::empty();
    for p in parts {
        acc.merge(p);
    }
    acc
}

pub fn exhaustive_pairs(cfg: &SearchConfig) -> Result<SearchReport> {
    cfg.validate()?;
    if cfg.hats > PAIR_MAX_HATS {
        return Err(HatError::SearchSpaceTooLarge {
            hats: cfg.hats,
            space: space_size(cfg.hats, false),
        });
    }
    exhaustive(cfg, false)
}

pub fn exhaustive_symmetric(cfg: &SearchConfig) -> Result<SearchReport> {
    cfg.validate()?;
    if cfg.hats > SYMMETRIC_MAX_HATS {
        return Err(HatError::SearchSpaceTooLarge {
            hats: cfg.hats,
            space: space_size(cfg.hats, true),
        });
    }
    if cfg.hats > SYMMETRIC_UNCHECKPOINTED && cfg.checkpoint.is_none() {
        return Err(HatError::CheckpointRequired(format!(
            "the symmetric scan at {} hats ({} tables)",
            cfg.hats,
            space_size(cfg.hats, true)
        )));
    }
    exhaustive(cfg, true)
}

fn exhaustive(cfg: &SearchConfig, symmetric: bool) -> Result<SearchReport> {
    let weights = Weights::new(cfg.hats, &cfg.p);
    if weights.fits_i128() {
        run::<i128>(cfg, symmetric, &weights)
    } else {
        run::<BigInt>(cfg, symmetric, &weights)
    }
}

fn run<S: Score>(cfg: &SearchConfig, symmetric: bool, weights: &Weights) -> Result<SearchReport> {
    let started = Instant::now();
    let space = Space::new(cfg.hats, symmetric);
    let ev = Evaluator::<S>::new(cfg.hats, weights);
    let keep_all = cfg.hats <= CLASS_MAX_HATS;
    let pool = thread_pool(cfg.workers);
    let mut cfg_hash_mode = cfg.clone();
    cfg_hash_mode.mode = SearchMode::Exhaustive;
    cfg_hash_mode.symmetric = symmetric;
    let hash = cfg_hash_mode.config_hash();

    let mut acc = Partial::<S>::empty();
    let mut cursor = 0u64;
    if let Some(opts) = &cfg.checkpoint {
        if let Some(cp) = Checkpoint::load(&opts.path, &hash)? {
            cursor = cp.cursor;
            acc = restore(&cp, &space, weights)?;
        }
    }
    let chunk = cfg
        .checkpoint
        .as_ref()
        .map_or(space.total, |o| o.interval.max(1));
    while cursor < space.total {
        let hi = (cursor + chunk).min(space.total);
        acc.merge(scan_parallel(
            &pool,
            cfg.workers,
            &space,
            &ev,
            cursor,
            hi,
            keep_all,
        ));
        cursor = hi;
        if let Some(opts) = &cfg.checkpoint {
            save(&opts.path, &hash, cursor, &space, weights, &acc)?;
            if opts.stop_after.is_some_and(|s| cursor >= s) && cursor < space.total {
                return Err(HatError::Interrupted { cursor });
            }
        }
    }

    let best = acc.best.expect("the space is never empty");
    let witnesses: Vec<FinitePair> = acc.witnesses.iter().map(|&i| space.pair(i)).collect();
    let class_count = keep_all.then(|| {
        acc.optimal
            .iter()
            .map(|&i| {
                canonical_form(&space.pair(i))
                    .expect("within the canonicalization limit")
                    .serialized()
            })
            .collect::<BTreeSet<_>>()
            .len()
    });
    Ok(SearchReport {
        best_value: weights.value(&best.to_big()),
        best_win_counts: evaluate_pair(&witnesses[0]),
        optimum_count: Some(acc.count * space.multiplicity()),
        class_count,
        witnesses,
        iterations: space.total,
        converged_restarts: None,
        wall_time: elapsed(started),
    })
}

fn save<S: Score>(
    path: &std::path::Path,
    hash: &str,
    cursor: u64,
    space: &Space,
    weights: &Weights,
    acc: &Partial<S>,
) -> Result<()> {
    Checkpoint {
        config_hash: hash.to_string(),
        cursor,
        total: space.total,
        best_value: acc
            .best
            .as_ref()
            .map(|b| rational_to_string(&weights.value(&b.to_big()))),
        best_pair: acc
            .witnesses
            .first()
            .map(|&i| PairFile::from_pair(&space.pair(i))),
        rng_state: None,
        optimum_count: acc.count * space.multiplicity(),
        iterations: cursor,
        witness_indices: acc.witnesses.clone(),
        optimal_indices: acc.optimal.clone(),
        witnesses: Vec::new(),
        best_win_counts: Vec::new(),
        converged: 0,
    }
    .store(path)
}

fn restore<S: Score>(cp: &Checkpoint, space: &Space, weights: &Weights) -> Result<Partial<S>> {
    let corrupt = || HatError::invalid("checkpoint contents are inconsistent");
    if cp.total != space.total || cp.cursor > space.total {
        return Err(corrupt());
    }
    let best = match &cp.best_value {
        None => None,
        Some(v) => {
            let score = weights.score_of(&parse_rational(v)?).ok_or_else(corrupt)?;
            Some(S::from_big(&score).ok_or_else(corrupt)?)
        }
    };
    Ok(Partial {
        best,
        count: cp.optimum_count / space.multiplicity(),
        witnesses: cp.witness_indices.clone(),
        optimal: cp.optimal_indices.clone(),
    })
}
