//! Integer objective for finite pairs at a fixed rational `p = a/b`.
//!
//! A winning configuration pair with `w` white hats contributes
//! `a^w (b-a)^(2n-w)`; the win probability is the sum divided by `b^(2n)`.

use std::ops::{AddAssign, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::game::{FinitePair, Player, WinCountVector};

pub(crate) trait Score:
    Clone
    + Ord
    + Send
    + Sync
    + Zero
    + std::fmt::Debug
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + 'static
{
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl Score for i128 {
    fn from_big(b: &BigInt) -> Option<Self> {
        b.to_i128()
    }

    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Score for BigInt {
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }

    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Weights for `p`, plus the common denominator `b^(2n)`.
pub(crate) struct Weights {
    pub big: Vec<BigInt>,
    pub denominator: BigInt,
}

impl Weights {
    pub fn new(hats: usize, p: &BigRational) -> Self {
        let a = p.numer().clone();
        let b = p.denom().clone();
        let c = &b - &a;
        let big = (0..=2 * hats)
            .map(|w| num_traits::pow(a.clone(), w) * num_traits::pow(c.clone(), 2 * hats - w))
            .collect();
        Weights {
            big,
            denominator: num_traits::pow(b, 2 * hats),
        }
    }

    /// Whether every partial sum fits in an `i128`.
    pub fn fits_i128(&self) -> bool {
        self.denominator.bits() < 126
    }

    pub fn value(&self, score: &BigInt) -> BigRational {
        BigRational::new(score.clone(), self.denominator.clone())
    }

    /// Inverse of [`Weights::value`]; `None` when `v` is not a reachable score.
    pub fn score_of(&self, v: &BigRational) -> Option<BigInt> {
        let s = v * BigRational::from_integer(self.denominator.clone());
        (s.is_integer() && !s.is_negative()).then(|| s.to_integer())
    }
}

/// Scores table pairs given as raw `1..=n` entries.
pub(crate) struct Evaluator<S> {
    popcount: Vec<u8>,
    weights: Vec<S>,
}

impl<S: Score> Evaluator<S> {
    pub fn new(hats: usize, weights: &Weights) -> Self {
        Evaluator {
            popcount: (0..1usize << hats).map(|m| m.count_ones() as u8).collect(),
            weights: weights
                .big
                .iter()
                .map(|w| S::from_big(w).expect("weights checked to fit"))
                .collect(),
        }
    }

    pub fn score(&self, t1: &[u8], t2: &[u8]) -> S {
        let mut total = S::zero();
        for (x1, &c2) in t2.iter().enumerate() {
            let h2 = c2 - 1;
            for (x2, &c1) in t1.iter().enumerate() {
                if (x1 >> (c1 - 1)) & 1 == 1 && (x2 >> h2) & 1 == 1 {
                    total += &self.weights[(self.popcount[x1] + self.popcount[x2]) as usize];
                }
            }
        }
        total
    }

    pub fn score_from_counts(&self, counts: &[u64]) -> S {
        let mut total = S::zero();
        for (w, &c) in counts.iter().enumerate() {
            let term = self.weights[w].to_big() * BigInt::from(c);
            total += &S::from_big(&term).expect("scores fit by construction");
        }
        total
    }

    /// Change in score when `player` rewrites their entry at `mask` to `new`.
    pub fn delta(&self, t1: &[u8], t2: &[u8], player: Player, mask: usize, new: u8) -> S {
        let mut d = S::zero();
        changed_wins(t1, t2, player, mask, new, |w, gained| {
            let w = &self.weights[w];
            if gained {
                d += w;
            } else {
                d -= w;
            }
        });
        d
    }
}

/// Calls `f(white_count, gained)` for every configuration pair whose
/// outcome flips when `player`'s entry at `mask` becomes `new`.
fn changed_wins(
    t1: &[u8],
    t2: &[u8],
    player: Player,
    mask: usize,
    new: u8,
    mut f: impl FnMut(usize, bool),
) {
    let (own_table, other_table) = match player {
        Player::One => (t1, t2),
        Player::Two => (t2, t1),
    };
    let old = own_table[mask];
    if old == new {
        return;
    }
    let (old_bit, new_bit) = (old - 1, new - 1);
    let seen_white = mask.count_ones() as usize;
    // `mask` is the partner's configuration; `own` ranges over this player's
    for (own, &partner_choice) in other_table.iter().enumerate() {
        if (mask >> (partner_choice - 1)) & 1 == 0 {
            continue;
        }
        let before = (own >> old_bit) & 1 == 1;
        let after = (own >> new_bit) & 1 == 1;
        if before != after {
            f(own.count_ones() as usize + seen_white, after);
        }
    }
}

/// Win counts after `player` rewrites their entry at `input_mask` to
/// `new_choice`, touching only the `2^n` affected configuration pairs.
pub fn delta_evaluate(
    pair: &FinitePair,
    counts: &WinCountVector,
    player: Player,
    input_mask: usize,
    new_choice: u8,
) -> crate::Result<WinCountVector> {
    let n = pair.hats();
    if new_choice == 0 || new_choice as usize > n {
        return Err(crate::HatError::invalid(format!(
            "choice {new_choice} is not a hat index in 1..={n}"
        )));
    }
    if input_mask >= 1 << n {
        return Err(crate::HatError::invalid(format!(
            "input mask {input_mask} out of range"
        )));
    }
    if counts.hats() != n {
        return Err(crate::HatError::SizeMismatch {
            expected: n,
            found: counts.hats(),
        });
    }
    let mut out = counts.counts().to_vec();
    changed_wins(
        pair.player1().table(),
        pair.player2().table(),
        player,
        input_mask,
        new_choice,
        |w, gained| {
            if gained {
                out[w] += 1;
            } else {
                out[w] -= 1;
            }
        },
    );
    WinCountVector::new(n, out)
}

/// Win counts of raw tables, updated alongside the score during climbs.
pub(crate) fn apply_count_delta(
    t1: &[u8],
    t2: &[u8],
    player: Player,
    mask: usize,
    new: u8,
    counts: &mut [u64],
) {
    changed_wins(t1, t2, player, mask, new, |w, gained| {
        if gained {
            counts[w] += 1;
        } else {
            counts[w] -= 1;
        }
    });
}
