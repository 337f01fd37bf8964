//! Transformations that preserve (or predictably transform) win rates:
//! colour duality, hat renumbering, player exchange, and the canonical
//! representative of a renumbering class.

use super::{FinitePair, FiniteStrategy};
use crate::error::{HatError, Result};

/// Largest hat count for which [`canonical_form`] scans all `n!²` relabelings.
pub const CANONICAL_MAX_HATS: usize = 4;

/// Bijection on hat positions `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    // 0-based images
    images: Vec<u8>,
}

impl Permutation {
    /// Builds a permutation from 1-based images, `images[j-1] = σ(j)`.
    pub fn new(images: &[u8]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in images {
            if i == 0 || i as usize > n || seen[i as usize - 1] {
                return Err(HatError::invalid(format!(
                    "{images:?} is not a permutation of 1..={n}"
                )));
            }
            seen[i as usize - 1] = true;
        }
        Ok(Permutation {
            images: images.iter().map(|&i| i - 1).collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u8).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    /// `σ(j)` for a 1-based position.
    pub fn apply(&self, j: u8) -> u8 {
        self.images[j as usize - 1] + 1
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.images.len()];
        for (j, &i) in self.images.iter().enumerate() {
            inv[i as usize] = j as u8;
        }
        Permutation { images: inv }
    }

    /// Image of a white-hat set given as a mask.
    pub fn apply_mask(&self, mask: usize) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|(j, _)| (mask >> j) & 1 == 1)
            .fold(0, |acc, (_, &i)| acc | 1 << i)
    }

    /// All `n!` permutations in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut cur: Vec<u8> = (0..n as u8).collect();
        let mut out = vec![Permutation {
            images: cur.clone(),
        }];
        loop {
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                return out;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
            out.push(Permutation {
                images: cur.clone(),
            });
        }
    }
}

/// Swaps the roles of white and black in the observed configuration.
pub fn dual_finite(s: &FiniteStrategy) -> FiniteStrategy {
    let full = (1usize << s.hats) - 1;
    FiniteStrategy {
        hats: s.hats,
        table: (0..=full).map(|m| s.table[full ^ m]).collect(),
    }
}

/// Renumbers player 1's hats by `s1` and player 2's by `s2`:
/// `f1'(S) = s1(f1(s2⁻¹(S)))` and `f2'(S) = s2(f2(s1⁻¹(S)))`.
pub fn relabel_pair(pair: &FinitePair, s1: &Permutation, s2: &Permutation) -> Result<FinitePair> {
    let n = pair.hats();
    for s in [s1, s2] {
        if s.size() != n {
            return Err(HatError::SizeMismatch {
                expected: n,
                found: s.size(),
            });
        }
    }
    Ok(relabel_unchecked(pair, s1, s2))
}

fn relabel_unchecked(pair: &FinitePair, s1: &Permutation, s2: &Permutation) -> FinitePair {
    let n = pair.hats();
    let s1_inv = s1.inverse();
    let s2_inv = s2.inverse();
    let map = |f: &FiniteStrategy, own: &Permutation, other_inv: &Permutation| FiniteStrategy {
        hats: n,
        table: (0..1usize << n)
            .map(|m| own.apply(f.table[other_inv.apply_mask(m)]))
            .collect(),
    };
    FinitePair {
        player1: map(&pair.player1, s1, &s2_inv),
        player2: map(&pair.player2, s2, &s1_inv),
    }
}

pub fn swap_players(pair: &FinitePair) -> FinitePair {
    FinitePair {
        player1: pair.player2.clone(),
        player2: pair.player1.clone(),
    }
}

/// Lexicographically smallest don't-care-normalized pair among all hat
/// renumberings of `pair`. Two pairs are equivalent under renumbering and
/// don't-care rewrites exactly when their canonical forms agree.
pub fn canonical_form(pair: &FinitePair) -> Result<FinitePair> {
    let n = pair.hats();
    if n > CANONICAL_MAX_HATS {
        return Err(HatError::CanonicalizationLimit {
            hats: n,
            max: CANONICAL_MAX_HATS,
        });
    }
    let perms = Permutation::all(n);
    let mut base = pair.clone();
    base.normalize_dont_care();
    let mut best: Option<FinitePair> = None;
    for s1 in &perms {
        for s2 in &perms {
            let mut cand = relabel_unchecked(&base, s1, s2);
            cand.normalize_dont_care();
            if best
                .as_ref()
                .is_none_or(|b| cand.serialized() < b.serialized())
            {
                best = Some(cand);
            }
        }
    }
    Ok(best.expect("at least the identity relabeling"))
}

/// [`canonical_form`] with player exchange added to the equivalence.
pub fn canonical_form_up_to_swap(pair: &FinitePair) -> Result<FinitePair> {
    let a = canonical_form(pair)?;
    let b = canonical_form(&swap_players(pair))?;
    Ok(if b.serialized() < a.serialized() {
        b
    } else {
        a
    })
}
