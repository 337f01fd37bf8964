//! Seeded simulation of block machines and finite pairs.
//!
//! Trial `i` draws every hat from `ChaCha8Rng::seed_from_u64(seed)` moved
//! to stream `i`, so results do not depend on how trials are spread over
//! threads. Tallies are integers and are summed in any order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HatError, Result};
use crate::game::FinitePair;
use crate::machine::{BlockAction, BlockMachine, MachinePair};

pub const DEFAULT_MAX_BLOCKS: u64 = 10_000;

/// Colours of the two picked hats, player 1 first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EventCounts {
    pub ww: u64,
    pub wb: u64,
    pub bw: u64,
    pub bb: u64,
    pub unresolved: u64,
}

impl EventCounts {
    fn merge(mut self, o: EventCounts) -> Self {
        self.ww += o.ww;
        self.wb += o.wb;
        self.bw += o.bw;
        self.bb += o.bb;
        self.unresolved += o.unresolved;
        self
    }

    fn record(&mut self, pick1_white: bool, pick2_white: bool) {
        match (pick1_white, pick2_white) {
            (true, true) => self.ww += 1,
            (true, false) => self.wb += 1,
            (false, true) => self.bw += 1,
            (false, false) => self.bb += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.ww + self.wb + self.bw + self.bb + self.unresolved
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationReport {
    pub p: f64,
    pub trials: u64,
    pub wins: u64,
    pub unresolved: u64,
    /// `wins / trials`; unresolved trials count as losses.
    pub estimate: f64,
    pub stderr: f64,
    pub event_counts: EventCounts,
    pub seed: u64,
    /// Block cap for machines; absent for finite pairs.
    pub max_blocks: Option<u64>,
}

impl SimulationReport {
    fn new(p: f64, trials: u64, seed: u64, max_blocks: Option<u64>, events: EventCounts) -> Self {
        let estimate = events.ww as f64 / trials as f64;
        SimulationReport {
            p,
            trials,
            wins: events.ww,
            unresolved: events.unresolved,
            estimate,
            stderr: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
            event_counts: events,
            seed,
            max_blocks,
        }
    }

    /// Fraction of trials where player 1 picked a white hat.
    pub fn player1_white_rate(&self) -> f64 {
        (self.event_counts.ww + self.event_counts.wb) as f64 / self.trials as f64
    }
}

fn check(p: f64, trials: u64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(HatError::ProbabilityOutOfRange(p.to_string()));
    }
    if trials == 0 {
        return Err(HatError::invalid("at least one trial is needed"));
    }
    Ok(())
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn run_trials(trials: u64, one: impl Fn(u64, &mut EventCounts) + Sync) -> EventCounts {
    (0..trials)
        .into_par_iter()
        .fold(EventCounts::default, |mut acc, i| {
            one(i, &mut acc);
            acc
        })
        .reduce(EventCounts::default, EventCounts::merge)
}

/// Hat `i` of a stack is white when bit `i` is set.
struct Stack(Vec<bool>);

impl Stack {
    fn extend_to(&mut self, len: usize, p: f64, rng: &mut ChaCha8Rng) {
        while self.0.len() < len {
            self.0.push(rng.gen::<f64>() < p);
        }
    }

    fn block(&self, start: usize, m: usize) -> u8 {
        (0..m).fold(0, |acc, i| acc | (self.0[start + i] as u8) << i)
    }
}

fn decide(machine: &BlockMachine, partner: &Stack, start: usize) -> Option<usize> {
    match machine.action(partner.block(start, machine.block_size())) {
        BlockAction::Commit(t) => Some(start + t as usize - 1),
        BlockAction::Recurse => None,
    }
}

pub fn simulate_machine_pair(
    mp: &MachinePair,
    p: f64,
    trials: u64,
    seed: u64,
    max_blocks: u64,
) -> Result<SimulationReport> {
    check(p, trials)?;
    if max_blocks == 0 {
        return Err(HatError::invalid("max_blocks must be at least 1"));
    }
    let m = mp.block_size();
    let shift = mp.player1().shift();
    let events = run_trials(trials, |i, acc| {
        let mut rng = trial_rng(seed, i);
        let mut s1 = Stack(Vec::new());
        let mut s2 = Stack(Vec::new());
        let (mut pick1, mut pick2) = (None, None);
        for k in 0..max_blocks as usize {
            let start = k * shift;
            s1.extend_to(start + m, p, &mut rng);
            s2.extend_to(start + m, p, &mut rng);
            if pick1.is_none() {
                pick1 = decide(mp.player1(), &s2, start);
            }
            if pick2.is_none() {
                pick2 = decide(mp.player2(), &s1, start);
            }
            if pick1.is_some() && pick2.is_some() {
                break;
            }
        }
        match (pick1, pick2) {
            (Some(h1), Some(h2)) => acc.record(s1.0[h1], s2.0[h2]),
            _ => acc.unresolved += 1,
        }
    });
    Ok(SimulationReport::new(
        p,
        trials,
        seed,
        Some(max_blocks),
        events,
    ))
}

pub fn simulate_finite_pair(
    pair: &FinitePair,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    check(p, trials)?;
    let n = pair.hats();
    let t1 = pair.player1().table();
    let t2 = pair.player2().table();
    let events = run_trials(trials, |i, acc| {
        let mut rng = trial_rng(seed, i);
        let mut draw = || {
            (0..n).fold(0usize, |acc, j| {
                acc | ((rng.gen::<f64>() < p) as usize) << j
            })
        };
        let x1 = draw();
        let x2 = draw();
        let h1 = t1[x2] - 1;
        let h2 = t2[x1] - 1;
        acc.record((x1 >> h1) & 1 == 1, (x2 >> h2) & 1 == 1);
    });
    Ok(SimulationReport::new(p, trials, seed, None, events))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{table1_strategy, FiniteStrategy};
    use crate::machine::{builtin_machine, Builtin};

    #[test]
    fn all_black_never_resolves() {
        let r = simulate_machine_pair(&builtin_machine(Builtin::S1), 0.0, 50, 1, 20).unwrap();
        assert_eq!(r.wins, 0);
        assert_eq!(r.unresolved, 50);
        assert_eq!(r.event_counts.total(), 50);
    }

    #[test]
    fn all_white_always_wins() {
        let pair = FinitePair::symmetric(FiniteStrategy::constant(3, 1).unwrap());
        let r = simulate_finite_pair(&pair, 1.0, 100, 3).unwrap();
        assert_eq!(r.wins, 100);
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let mp = builtin_machine(Builtin::S1);
        let a = simulate_machine_pair(&mp, 0.5, 20_000, 42, 100).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let b = pool.install(|| simulate_machine_pair(&mp, 0.5, 20_000, 42, 100).unwrap());
        assert_eq!(a, b);
        let c = simulate_machine_pair(&mp, 0.5, 20_000, 43, 100).unwrap();
        assert_ne!(a.event_counts, c.event_counts);
    }

    #[test]
    fn table1_estimate_is_close() {
        let pair = FinitePair::symmetric(table1_strategy());
        let r = simulate_finite_pair(&pair, 0.5, 100_000, 7).unwrap();
        assert!((r.estimate - 22.0 / 64.0).abs() < 5.0 * r.stderr);
        assert!((r.player1_white_rate() - 0.5).abs() < 0.01);
    }

    #[test]
    fn rejects_bad_arguments() {
        let mp = builtin_machine(Builtin::S1);
        assert!(simulate_machine_pair(&mp, 1.5, 10, 0, 10).is_err());
        assert!(simulate_machine_pair(&mp, 0.5, 0, 0, 10).is_err());
        assert!(simulate_machine_pair(&mp, 0.5, 10, 0, 0).is_err());
    }
}
