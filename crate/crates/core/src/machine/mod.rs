//! Block strategies for infinite hat stacks.
//!
//! A block machine reads the partner's hats `m` at a time. On each block it
//! either commits to one of the player's own hats inside the aligned block
//! or moves on to the next block, shifted by `m - o` hats where `o` is the
//! overlap between consecutive blocks.

mod file;
mod renewal;

use std::fmt;
use std::str::FromStr;

use crate::error::{HatError, Result};
use crate::game::{self, FinitePair, FiniteStrategy};

pub use file::MachineFile;
pub use renewal::{
    build_renewal_system, continuation_ratios, derive_closed_form, tail_bound, ClosedForm,
    Constraint, JointState, RenewalSystem, SoloState, Unknown,
};

pub const MAX_BLOCK_SIZE: usize = 4;

/// Colours of `len` consecutive hats; bit `i` is set when position `i + 1`
/// is white.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockPattern {
    len: u8,
    mask: u8,
}

impl BlockPattern {
    pub fn new(len: usize, mask: u8) -> Result<Self> {
        if !(1..=MAX_BLOCK_SIZE).contains(&len) || (mask as usize) >= 1 << len {
            return Err(HatError::invalid(format!(
                "bad block pattern {mask} of length {len}"
            )));
        }
        Ok(BlockPattern {
            len: len as u8,
            mask,
        })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn mask(&self) -> u8 {
        self.mask
    }

    pub fn is_white(&self, position: usize) -> bool {
        (self.mask >> (position - 1)) & 1 == 1
    }

    pub fn complement(&self) -> Self {
        BlockPattern {
            len: self.len,
            mask: !self.mask & ((1u16 << self.len) - 1) as u8,
        }
    }
}

/// `"WWB"`, position 1 leftmost.
impl fmt::Display for BlockPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.len() {
            f.write_str(if self.is_white(i) { "W" } else { "B" })?;
        }
        Ok(())
    }
}

impl FromStr for BlockPattern {
    type Err = HatError;

    fn from_str(s: &str) -> Result<Self> {
        let mut mask = 0u8;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                'W' | 'w' => mask |= 1 << i,
                'B' | 'b' => {}
                _ => {
                    return Err(HatError::invalid(format!(
                        "bad colour {ch:?} in pattern {s:?}"
                    )))
                }
            }
            if i >= MAX_BLOCK_SIZE {
                return Err(HatError::invalid(format!(
                    "pattern {s:?} is longer than {MAX_BLOCK_SIZE}"
                )));
            }
        }
        BlockPattern::new(s.chars().count(), mask)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockAction {
    /// Point at own hat `t` (1-based) of the current block.
    Commit(u8),
    /// Move on to the next block.
    Recurse,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockMachine {
    block_size: usize,
    overlap: usize,
    table: Vec<BlockAction>,
}

impl BlockMachine {
    /// `table[mask]` is the action for the partner block with pattern `mask`.
    pub fn new(block_size: usize, overlap: usize, table: Vec<BlockAction>) -> Result<Self> {
        if !(1..=MAX_BLOCK_SIZE).contains(&block_size) {
            return Err(HatError::invalid(format!(
                "block size must be in 1..={MAX_BLOCK_SIZE}, got {block_size}"
            )));
        }
        if overlap > 1 || overlap >= block_size {
            return Err(HatError::invalid(format!(
                "overlap must be 0 or 1 and smaller than the block size, got {overlap}"
            )));
        }
        if table.len() != 1 << block_size {
            return Err(HatError::SizeMismatch {
                expected: 1 << block_size,
                found: table.len(),
            });
        }
        for a in &table {
            if let BlockAction::Commit(t) = a {
                if *t == 0 || *t as usize > block_size {
                    return Err(HatError::invalid(format!(
                        "commit index {t} outside block of size {block_size}"
                    )));
                }
            }
        }
        if !table.iter().any(|a| matches!(a, BlockAction::Commit(_))) {
            return Err(HatError::NonCommitting);
        }
        Ok(BlockMachine {
            block_size,
            overlap,
            table,
        })
    }

    /// Recurse on monochromatic blocks, otherwise commit as the finite table does.
    pub fn from_finite(strategy: &FiniteStrategy, overlap: usize) -> Result<Self> {
        let m = strategy.hats();
        let table = (0..1usize << m)
            .map(|mask| {
                if game::is_monochromatic(m, mask) {
                    BlockAction::Recurse
                } else {
                    BlockAction::Commit(strategy.choice(mask))
                }
            })
            .collect();
        Self::new(m, overlap, table)
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    /// Hats advanced per recursion.
    pub fn shift(&self) -> usize {
        self.block_size - self.overlap
    }

    pub fn table(&self) -> &[BlockAction] {
        &self.table
    }

    pub fn action(&self, pattern: u8) -> BlockAction {
        self.table[pattern as usize]
    }

    /// Colour-swapped machine: reacts to a pattern as this one reacts to its complement.
    pub fn dual(&self) -> Self {
        let full = (1usize << self.block_size) - 1;
        BlockMachine {
            block_size: self.block_size,
            overlap: self.overlap,
            table: (0..=full).map(|m| self.table[full ^ m]).collect(),
        }
    }

    /// Own hat index (1-based) chosen on `n` partner hats given by `mask`,
    /// falling back to hat 1 when every complete block says recurse.
    pub fn choice_on(&self, n: usize, mask: u32) -> u8 {
        let m = self.block_size;
        let block_mask = (1u32 << m) - 1;
        let mut start = 0;
        while start + m <= n {
            let pattern = ((mask >> start) & block_mask) as u8;
            if let BlockAction::Commit(t) = self.action(pattern) {
                return (start + t as usize) as u8;
            }
            start += self.shift();
        }
        1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MachinePair {
    player1: BlockMachine,
    player2: BlockMachine,
}

impl MachinePair {
    pub fn new(player1: BlockMachine, player2: BlockMachine) -> Result<Self> {
        if player1.block_size != player2.block_size || player1.overlap != player2.overlap {
            return Err(HatError::invalid(
                "both machines of a pair need the same block size and overlap",
            ));
        }
        Ok(MachinePair { player1, player2 })
    }

    pub fn symmetric(machine: BlockMachine) -> Self {
        MachinePair {
            player2: machine.clone(),
            player1: machine,
        }
    }

    pub fn player1(&self) -> &BlockMachine {
        &self.player1
    }

    pub fn player2(&self) -> &BlockMachine {
        &self.player2
    }

    pub fn block_size(&self) -> usize {
        self.player1.block_size
    }

    pub fn overlap(&self) -> usize {
        self.player1.overlap
    }

    pub fn is_symmetric(&self) -> bool {
        self.player1 == self.player2
    }
}

/// Strategies with a known closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    S1,
    S2,
    S3,
    S4,
    FirstWhite,
    FirstBlack,
}

impl Builtin {
    pub const ALL: [Builtin; 6] = [
        Builtin::S1,
        Builtin::S2,
        Builtin::S3,
        Builtin::S4,
        Builtin::FirstWhite,
        Builtin::FirstBlack,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::S1 => "S1",
            Builtin::S2 => "S2",
            Builtin::S3 => "S3",
            Builtin::S4 => "S4",
            Builtin::FirstWhite => "FIRST_WHITE",
            Builtin::FirstBlack => "FIRST_BLACK",
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = HatError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "s1" => Ok(Builtin::S1),
            "s2" => Ok(Builtin::S2),
            "s3" => Ok(Builtin::S3),
            "s4" => Ok(Builtin::S4),
            "first-white" => Ok(Builtin::FirstWhite),
            "first-black" => Ok(Builtin::FirstBlack),
            _ => Err(HatError::UnknownStrategy(s.to_string())),
        }
    }
}

pub fn builtin_machine(name: Builtin) -> MachinePair {
    let machine = match name {
        Builtin::S1 => BlockMachine::from_finite(&game::table1_strategy(), 1),
        Builtin::S2 => BlockMachine::from_finite(&game::table1_strategy(), 0),
        Builtin::S3 => BlockMachine::from_finite(&game::table1_strategy(), 1).map(|m| m.dual()),
        Builtin::S4 => BlockMachine::from_finite(&game::table7_strategy(), 1),
        Builtin::FirstWhite => {
            BlockMachine::new(1, 0, vec![BlockAction::Recurse, BlockAction::Commit(1)])
        }
        Builtin::FirstBlack => {
            BlockMachine::new(1, 0, vec![BlockAction::Commit(1), BlockAction::Recurse])
        }
    };
    MachinePair::symmetric(machine.expect("builtin tables are valid"))
}

pub fn dual_machine(mp: &MachinePair) -> MachinePair {
    MachinePair {
        player1: mp.player1.dual(),
        player2: mp.player2.dual(),
    }
}

/// Finite strategy pair that runs both machines on the first `n` hats.
pub fn truncate_to_finite(mp: &MachinePair, n: usize) -> Result<FinitePair> {
    if n < mp.block_size() {
        return Err(HatError::invalid(format!(
            "cannot truncate to {n} hats, fewer than the block size {}",
            mp.block_size()
        )));
    }
    game::check_hats(n)?;
    let unroll = |m: &BlockMachine| {
        FiniteStrategy::new(n, (0..1u32 << n).map(|x| m.choice_on(n, x)).collect())
    };
    FinitePair::new(unroll(&mp.player1)?, unroll(&mp.player2)?)
}
