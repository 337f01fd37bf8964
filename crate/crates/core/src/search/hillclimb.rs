//! First-improvement hill climbing over single-entry mutations.
//!
//! Restart `r` draws its starting tables from a ChaCha8 generator seeded
//! with `seed ^ r`. Moves are scanned cyclically, resuming after the last
//! accepted one; a restart has converged once a full pass over the
//! neighbourhood finds nothing strictly better. Entries at monochromatic
//! inputs are left out of the neighbourhood since they cannot change the
//! score.

use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::checkpoint::Checkpoint;
use super::objective::{apply_count_delta, Evaluator, Score, Weights};
use super::{elapsed, thread_pool, SearchConfig, SearchReport, MAX_WITNESSES};
use crate::error::{HatError, Result};
use crate::exact::rational::{parse_rational, rational_to_string};
use crate::game::{self, FinitePair, FiniteStrategy, PairFile, Player, WinCountVector};

#[derive(Clone, Debug)]
struct Climb<S> {
    score: S,
    pair: FinitePair,
    counts: Vec<u64>,
    iterations: u64,
    converged: bool,
}

fn climb<S: Score>(cfg: &SearchConfig, ev: &Evaluator<S>, restart: u32) -> Climb<S> {
    let n = cfg.hats;
    let size = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ restart as u64);
    let mut random_table = || {
        (0..size)
            .map(|_| rng.gen_range(1..=n as u8))
            .collect::<Vec<u8>>()
    };
    let mut t1 = random_table();
    let mut t2 = if cfg.symmetric {
        t1.clone()
    } else {
        random_table()
    };

    let free: Vec<usize> = (0..size)
        .filter(|&m| !game::is_monochromatic(n, m))
        .collect();
    let slots: &[Option<Player>] = if cfg.symmetric {
        &[None]
    } else {
        &[Some(Player::One), Some(Player::Two)]
    };
    let alternatives = n - 1;
    let neighbourhood = slots.len() * free.len() * alternatives;

    let mut counts = {
        let pair = to_pair(n, &t1, &t2);
        game::evaluate_pair(&pair).counts().to_vec()
    };
    let mut score = ev.score_from_counts(&counts);
    let mut iterations = 0u64;
    let mut since_improvement = 0usize;
    let mut pos = 0usize;
    let converged = loop {
        if since_improvement >= neighbourhood {
            break true;
        }
        if iterations >= cfg.max_iterations {
            break false;
        }
        let slot = slots[pos / (free.len() * alternatives)];
        let m = free[(pos / alternatives) % free.len()];
        let offset = pos % alternatives + 1;
        pos = (pos + 1) % neighbourhood;
        iterations += 1;

        let cur = match slot {
            Some(Player::Two) => t2[m],
            _ => t1[m],
        };
        let new = ((cur as usize - 1 + offset) % n) as u8 + 1;
        let mut delta = S::zero();
        match slot {
            Some(player) => delta += &ev.delta(&t1, &t2, player, m, new),
            None => {
                delta += &ev.delta(&t1, &t2, Player::One, m, new);
                let old = t1[m];
                t1[m] = new;
                delta += &ev.delta(&t1, &t2, Player::Two, m, new);
                t1[m] = old;
            }
        }
        let zero = S::zero();
        let improving = delta > zero;
        if improving || (cfg.sideways_moves && delta == zero) {
            match slot {
                Some(Player::One) => {
                    apply_count_delta(&t1, &t2, Player::One, m, new, &mut counts);
                    t1[m] = new;
                }
                Some(Player::Two) => {
                    apply_count_delta(&t1, &t2, Player::Two, m, new, &mut counts);
                    t2[m] = new;
                }
                None => {
                    apply_count_delta(&t1, &t2, Player::One, m, new, &mut counts);
                    t1[m] = new;
                    apply_count_delta(&t1, &t2, Player::Two, m, new, &mut counts);
                    t2[m] = new;
                }
            }
            score += &delta;
        }
        if improving {
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
    };
    Climb {
        score,
        pair: to_pair(n, &t1, &t2),
        counts,
        iterations,
        converged,
    }
}

fn to_pair(n: usize, t1: &[u8], t2: &[u8]) -> FinitePair {
    FinitePair::new(
        FiniteStrategy::new(n, t1.to_vec()).expect("valid table"),
        FiniteStrategy::new(n, t2.to_vec()).expect("valid table"),
    )
    .expect("equal sizes")
}

/// Best restarts so far, ordered by score then lexicographic witness.
struct Tally<S> {
    best: Option<S>,
    witnesses: Vec<(FinitePair, Vec<u64>)>,
    iterations: u64,
    converged: u32,
}

impl<S: Score> Tally<S> {
    fn add(&mut self, c: Climb<S>) {
        self.iterations += c.iterations;
        self.converged += c.converged as u32;
        match self.best.as_ref().map(|b| c.score.cmp(b)) {
            Some(std::cmp::Ordering::Less) => return,
            Some(std::cmp::Ordering::Equal) => {}
            _ => {
                self.best = Some(c.score.clone());
                self.witnesses.clear();
            }
        }
        if !self.witnesses.iter().any(|(p, _)| p == &c.pair) {
            self.witnesses.push((c.pair, c.counts));
            self.witnesses.sort_by_cached_key(|w| w.0.serialized());
            self.witnesses.truncate(MAX_WITNESSES);
        }
    }
}

pub fn hill_climb(cfg: &SearchConfig) -> Result<SearchReport> {
    cfg.validate()?;
    if cfg.restarts == 0 {
        return Err(HatError::invalid(
            "hill climbing needs at least one restart",
        ));
    }
    let weights = Weights::new(cfg.hats, &cfg.p);
    if weights.fits_i128() {
        run::<i128>(cfg, &weights)
    } else {
        run::<BigInt>(cfg, &weights)
    }
}

fn run<S: Score>(cfg: &SearchConfig, weights: &Weights) -> Result<SearchReport> {
    let started = Instant::now();
    let mut hcfg = cfg.clone();
    hcfg.mode = super::SearchMode::HillClimb;
    let hash = hcfg.config_hash();
    let ev = Evaluator::<S>::new(cfg.hats, weights);
    let pool = thread_pool(cfg.workers);
    let total = cfg.restarts as u64;

    let mut tally = Tally::<S> {
        best: None,
        witnesses: Vec::new(),
        iterations: 0,
        converged: 0,
    };
    let mut cursor = 0u64;
    if let Some(opts) = &cfg.checkpoint {
        if let Some(cp) = Checkpoint::load(&opts.path, &hash)? {
            cursor = cp.cursor;
            tally = restore(&cp, cfg.hats, weights)?;
        }
    }
    let chunk = cfg.checkpoint.as_ref().map_or(total, |o| o.interval.max(1));
    while cursor < total {
        let hi = (cursor + chunk).min(total);
        let climbs: Vec<Climb<S>> = pool.install(|| {
            (cursor..hi)
                .into_par_iter()
                .map(|r| climb(cfg, &ev, r as u32))
                .collect()
        });
        for c in climbs {
            tally.add(c);
        }
        cursor = hi;
        if let Some(opts) = &cfg.checkpoint {
            save(&opts.path, &hash, cursor, total, cfg.seed, weights, &tally)?;
            if opts.stop_after.is_some_and(|s| cursor >= s) && cursor < total {
                return Err(HatError::Interrupted { cursor });
            }
        }
    }

    let best = tally.best.expect("at least one restart");
    let counts = tally.witnesses[0].1.clone();
    Ok(SearchReport {
        best_value: weights.value(&best.to_big()),
        best_win_counts: WinCountVector::new(cfg.hats, counts)?,
        optimum_count: None,
        class_count: None,
        witnesses: tally.witnesses.into_iter().map(|(p, _)| p).collect(),
        iterations: tally.iterations,
        converged_restarts: Some(tally.converged),
        wall_time: elapsed(started),
    })
}

fn save<S: Score>(
    path: &std::path::Path,
    hash: &str,
    cursor: u64,
    total: u64,
    seed: u64,
    weights: &Weights,
    tally: &Tally<S>,
) -> Result<()> {
    Checkpoint {
        config_hash: hash.to_string(),
        cursor,
        total,
        best_value: tally
            .best
            .as_ref()
            .map(|b| rational_to_string(&weights.value(&b.to_big()))),
        best_pair: tally.witnesses.first().map(|(p, _)| PairFile::from_pair(p)),
        rng_state: (cursor < total).then_some(seed ^ cursor),
        optimum_count: 0,
        iterations: tally.iterations,
        witness_indices: Vec::new(),
        optimal_indices: Vec::new(),
        witnesses: tally
            .witnesses
            .iter()
            .map(|(p, _)| PairFile::from_pair(p))
            .collect(),
        best_win_counts: tally
            .witnesses
            .first()
            .map(|(_, c)| c.clone())
            .unwrap_or_default(),
        converged: tally.converged,
    }
    .store(path)
}

fn restore<S: Score>(cp: &Checkpoint, hats: usize, weights: &Weights) -> Result<Tally<S>> {
    let corrupt = || HatError::invalid("checkpoint contents are inconsistent");
    let best = match &cp.best_value {
        None => None,
        Some(v) => {
            let score = weights.score_of(&parse_rational(v)?).ok_or_else(corrupt)?;
            Some(S::from_big(&score).ok_or_else(corrupt)?)
        }
    };
    let mut witnesses = Vec::new();
    for (i, w) in cp.witnesses.iter().enumerate() {
        let pair = w.to_pair()?;
        if pair.hats() != hats {
            return Err(corrupt());
        }
        // only the first witness carries stored counts; the rest are recomputed on demand
        let counts = if i == 0 {
            cp.best_win_counts.clone()
        } else {
            game::evaluate_pair(&pair).counts().to_vec()
        };
        witnesses.push((pair, counts));
    }
    Ok(Tally {
        best,
        witnesses,
        iterations: cp.iterations,
        converged: cp.converged,
    })
}
