//! Finite hat games: configurations, strategy tables and exact win counts.
//!
//! A configuration of `n` hats is an `n`-bit mask with bit `j - 1` set when
//! hat `j` is white. A strategy maps the partner's configuration to one of
//! the player's own hats, numbered from 1.

mod equivalence;
mod file;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{HatError, Result};
use crate::exact::rational::check_probability;
use crate::exact::IntPolynomial;

pub use equivalence::{
    canonical_form, canonical_form_up_to_swap, dual_finite, relabel_pair, swap_players,
    Permutation, CANONICAL_MAX_HATS,
};
pub use file::PairFile;

/// Largest supported stack height for finite games.
pub const MAX_HATS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HatConfig {
    hats: usize,
    mask: u32,
}

impl HatConfig {
    pub fn new(hats: usize, mask: u32) -> Result<Self> {
        check_hats(hats)?;
        if (mask as u64) >= 1u64 << hats {
            return Err(HatError::invalid(format!(
                "mask {mask} does not fit in {hats} hats"
            )));
        }
        Ok(HatConfig { hats, mask })
    }

    pub fn hats(&self) -> usize {
        self.hats
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    /// Whether hat `j` (1-based) is white.
    pub fn is_white(&self, j: usize) -> bool {
        (self.mask >> (j - 1)) & 1 == 1
    }

    pub fn white_count(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_monochromatic(&self) -> bool {
        is_monochromatic(self.hats, self.mask as usize)
    }
}

pub(crate) fn check_hats(hats: usize) -> Result<()> {
    if hats == 0 || hats > MAX_HATS {
        return Err(HatError::invalid(format!(
            "hat count must be between 1 and {MAX_HATS}, got {hats}"
        )));
    }
    Ok(())
}

pub(crate) fn is_monochromatic(hats: usize, mask: usize) -> bool {
    mask == 0 || mask == (1 << hats) - 1
}

/// Lookup table from the partner's configuration mask to an own hat index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteStrategy {
    hats: usize,
    table: Vec<u8>,
}

impl FiniteStrategy {
    pub fn new(hats: usize, table: Vec<u8>) -> Result<Self> {
        check_hats(hats)?;
        if table.len() != 1 << hats {
            return Err(HatError::SizeMismatch {
                expected: 1 << hats,
                found: table.len(),
            });
        }
        if let Some(bad) = table.iter().find(|&&t| t == 0 || t as usize > hats) {
            return Err(HatError::invalid(format!(
                "table entry {bad} is not a hat index in 1..={hats}"
            )));
        }
        Ok(FiniteStrategy { hats, table })
    }

    /// Always points at the same hat.
    pub fn constant(hats: usize, choice: u8) -> Result<Self> {
        Self::new(hats, vec![choice; 1 << hats])
    }

    pub fn hats(&self) -> usize {
        self.hats
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    /// Own hat index chosen when the partner shows `mask`.
    pub fn choice(&self, mask: usize) -> u8 {
        self.table[mask]
    }

    #[cfg(test)]
    pub(crate) fn set_choice(&mut self, mask: usize, choice: u8) {
        debug_assert!(choice >= 1 && choice as usize <= self.hats);
        self.table[mask] = choice;
    }

    /// Rewrites the entries at the all-black and all-white inputs to hat 1.
    pub fn normalize_dont_care(&mut self) {
        let full = (1 << self.hats) - 1;
        self.table[0] = 1;
        self.table[full] = 1;
    }

    /// Probability that this player points at a white hat when every hat is
    /// white with probability `p`, by enumeration over both stacks.
    pub fn pick_white_probability(&self, p: &BigRational) -> BigRational {
        let n = self.hats;
        let q = BigRational::one() - p;
        let weight = |mask: usize| -> BigRational {
            let w = mask.count_ones() as usize;
            num_traits::pow(p.clone(), w) * num_traits::pow(q.clone(), n - w)
        };
        let mut total = BigRational::zero();
        for other in 0..1usize << n {
            let hat = self.table[other] as usize - 1;
            for own in 0..1usize << n {
                if (own >> hat) & 1 == 1 {
                    total += weight(own) * weight(other);
                }
            }
        }
        total
    }
}

/// Strategies for both players on stacks of equal height.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinitePair {
    player1: FiniteStrategy,
    player2: FiniteStrategy,
}

impl FinitePair {
    pub fn new(player1: FiniteStrategy, player2: FiniteStrategy) -> Result<Self> {
        if player1.hats != player2.hats {
            return Err(HatError::SizeMismatch {
                expected: player1.hats,
                found: player2.hats,
            });
        }
        Ok(FinitePair { player1, player2 })
    }

    /// Both players use the same table.
    pub fn symmetric(strategy: FiniteStrategy) -> Self {
        FinitePair {
            player2: strategy.clone(),
            player1: strategy,
        }
    }

    pub fn hats(&self) -> usize {
        self.player1.hats
    }

    pub fn player1(&self) -> &FiniteStrategy {
        &self.player1
    }

    pub fn player2(&self) -> &FiniteStrategy {
        &self.player2
    }

    #[cfg(test)]
    pub(crate) fn player_mut(&mut self, player: Player) -> &mut FiniteStrategy {
        match player {
            Player::One => &mut self.player1,
            Player::Two => &mut self.player2,
        }
    }

    pub fn player(&self, player: Player) -> &FiniteStrategy {
        match player {
            Player::One => &self.player1,
            Player::Two => &self.player2,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.player1 == self.player2
    }

    pub fn normalize_dont_care(&mut self) {
        self.player1.normalize_dont_care();
        self.player2.normalize_dont_care();
    }

    /// Both tables concatenated, the key for lexicographic comparisons.
    pub fn serialized(&self) -> Vec<u8> {
        let mut out = self.player1.table.clone();
        out.extend_from_slice(&self.player2.table);
        out
    }

    /// Whether configuration pair `(x1, x2)` is a win.
    pub fn wins(&self, x1: usize, x2: usize) -> bool {
        let h1 = self.player1.table[x2] - 1;
        let h2 = self.player2.table[x1] - 1;
        (x1 >> h1) & 1 == 1 && (x2 >> h2) & 1 == 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

/// `counts[w]` is the number of winning configuration pairs with `w` white
/// hats in total, so that `V(p) = Σ counts[w] p^w (1-p)^(2n-w)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WinCountVector {
    hats: usize,
    counts: Vec<u64>,
}

impl WinCountVector {
    pub fn new(hats: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != 2 * hats + 1 {
            return Err(HatError::SizeMismatch {
                expected: 2 * hats + 1,
                found: counts.len(),
            });
        }
        Ok(WinCountVector { hats, counts })
    }

    pub fn zeros(hats: usize) -> Self {
        WinCountVector {
            hats,
            counts: vec![0; 2 * hats + 1],
        }
    }

    pub fn hats(&self) -> usize {
        self.hats
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn value_at(&self, p: &BigRational) -> BigRational {
        let q = BigRational::one() - p;
        let m = 2 * self.hats;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(w, &c)| {
                BigRational::from_integer(BigInt::from(c))
                    * num_traits::pow(p.clone(), w)
                    * num_traits::pow(q.clone(), m - w)
            })
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Expanded win polynomial in `p`.
    pub fn polynomial(&self) -> IntPolynomial {
        let m = 2 * self.hats;
        let q = IntPolynomial::one_minus_var();
        let mut acc = IntPolynomial::zero();
        for (w, &c) in self.counts.iter().enumerate() {
            if c != 0 {
                let term = &IntPolynomial::monomial(c, w) * &q.pow((m - w) as u32);
                acc = &acc + &term;
            }
        }
        acc
    }
}

/// Counts winning configuration pairs by full enumeration of all
/// `2^n × 2^n` pairs.
pub fn evaluate_pair(pair: &FinitePair) -> WinCountVector {
    let n = pair.hats();
    let size = 1usize << n;
    let mut counts = vec![0u64; 2 * n + 1];
    let t1 = &pair.player1.table;
    let t2 = &pair.player2.table;
    for x1 in 0..size {
        let h2 = t2[x1] - 1;
        let w1 = x1.count_ones() as usize;
        for (x2, &c1) in t1.iter().enumerate() {
            if (x1 >> (c1 - 1)) & 1 == 1 && (x2 >> h2) & 1 == 1 {
                counts[w1 + x2.count_ones() as usize] += 1;
            }
        }
    }
    WinCountVector { hats: n, counts }
}

/// Exact win probability at `p`.
pub fn win_probability(pair: &FinitePair, p: &BigRational) -> Result<BigRational> {
    check_probability(p)?;
    Ok(evaluate_pair(pair).value_at(p))
}

pub fn win_polynomial(pair: &FinitePair) -> IntPolynomial {
    evaluate_pair(pair).polynomial()
}

/// The optimal three-hat table with "any" entries fixed to hat 1.
pub fn table1_strategy() -> FiniteStrategy {
    FiniteStrategy::new(3, vec![1, 1, 3, 1, 2, 2, 3, 1]).expect("valid table")
}

/// The three-hat table underlying the fourth block strategy.
pub fn table7_strategy() -> FiniteStrategy {
    FiniteStrategy::new(3, vec![1, 2, 1, 1, 3, 2, 3, 1]).expect("valid table")
}
