//! Renewal equations for a pair of block machines.
//!
//! Unknowns are win probabilities from a round boundary. A joint state
//! records what is already known about the first hat of each player's
//! current block (only non-trivial when blocks overlap). A solo state is
//! entered once the partner has committed: the remaining player keeps
//! reading blocks and only their own hat matters.

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{BlockAction, BlockMachine, MachinePair};
use crate::error::{HatError, Result};
use crate::exact::rational::rational_to_string;
use crate::exact::{solve_linear_system, IntPolynomial, LinearSystem, RationalFunction};
use crate::game::Player;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    Free,
    White,
    Black,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::Free => "F",
            Constraint::White => "W",
            Constraint::Black => "B",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointState {
    pub player1: Constraint,
    pub player2: Constraint,
}

impl fmt::Display for JointState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J({},{})", self.player1, self.player2)
    }
}

/// Solo continuation for `player`; `own` constrains their next block's
/// first hat, `other` the partner's.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SoloState {
    pub player: Player,
    pub own: Constraint,
    pub other: Constraint,
}

impl fmt::Display for SoloState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.player {
            Player::One => 1,
            Player::Two => 2,
        };
        write!(f, "U{k}({},{})", self.own, self.other)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Unknown {
    Joint(JointState),
    Solo(SoloState),
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unknown::Joint(j) => j.fmt(f),
            Unknown::Solo(s) => s.fmt(f),
        }
    }
}

/// `x_i = constant_i + Σ coeff_ij x_j` for every reachable unknown.
#[derive(Clone, Debug)]
pub struct RenewalSystem {
    unknowns: Vec<Unknown>,
    rows: Vec<Row>,
}

#[derive(Clone, Debug, Default)]
struct Row {
    constant: IntPolynomial,
    coeffs: Vec<(usize, IntPolynomial)>,
    // probability that both players recurse (joint rows only)
    both_recurse: IntPolynomial,
}

impl Row {
    fn add(&mut self, col: usize, w: IntPolynomial) {
        match self.coeffs.iter_mut().find(|(c, _)| *c == col) {
            Some((_, acc)) => *acc = &*acc + &w,
            None => self.coeffs.push((col, w)),
        }
    }
}

impl RenewalSystem {
    pub fn unknowns(&self) -> &[Unknown] {
        &self.unknowns
    }

    pub fn size(&self) -> usize {
        self.unknowns.len()
    }

    pub fn joint_states(&self) -> impl Iterator<Item = JointState> + '_ {
        self.unknowns.iter().filter_map(|u| match u {
            Unknown::Joint(j) => Some(*j),
            Unknown::Solo(_) => None,
        })
    }

    pub fn solo_states(&self) -> impl Iterator<Item = SoloState> + '_ {
        self.unknowns.iter().filter_map(|u| match u {
            Unknown::Solo(s) => Some(*s),
            Unknown::Joint(_) => None,
        })
    }

    /// `(I - C) x = constant` as a linear system over rational functions.
    pub fn linear_system(&self) -> Result<LinearSystem> {
        let n = self.size();
        let mut matrix = vec![vec![RationalFunction::zero(); n]; n];
        let mut rhs = Vec::with_capacity(n);
        for (i, row) in self.rows.iter().enumerate() {
            let mut diag = IntPolynomial::one();
            for (j, c) in &row.coeffs {
                if *j == i {
                    diag = &diag - c;
                } else {
                    matrix[i][*j] = RationalFunction::from_poly(-c);
                }
            }
            matrix[i][i] = RationalFunction::from_poly(diag);
            rhs.push(RationalFunction::from_poly(row.constant.clone()));
        }
        LinearSystem::new(matrix, rhs)
    }

    /// Per joint state, the probability that both players recurse in one round.
    pub fn continuation_ratios(&self) -> Vec<(JointState, RationalFunction)> {
        self.unknowns
            .iter()
            .zip(&self.rows)
            .filter_map(|(u, row)| match u {
                Unknown::Joint(j) => {
                    Some((*j, RationalFunction::from_poly(row.both_recurse.clone())))
                }
                Unknown::Solo(_) => None,
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ClosedForm {
    pub value: RationalFunction,
    pub system_size: usize,
    pub continuation_ratios: Vec<(JointState, RationalFunction)>,
    pub joint_values: Vec<(JointState, RationalFunction)>,
    pub solo_values: Vec<(SoloState, RationalFunction)>,
}

impl ClosedForm {
    /// Largest continuation ratio over the reachable joint states at `p`.
    pub fn continuation_ratio_at(&self, p: &BigRational) -> Result<BigRational> {
        max_ratio(&self.continuation_ratios, p)
    }
}

fn max_ratio(ratios: &[(JointState, RationalFunction)], p: &BigRational) -> Result<BigRational> {
    let mut best = BigRational::zero();
    for (_, r) in ratios {
        let v = r.eval(p)?;
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

fn color(bit: bool) -> Constraint {
    if bit {
        Constraint::White
    } else {
        Constraint::Black
    }
}

/// Blocks of length `m` whose first hat agrees with `first`, with the
/// probability weight of their unconstrained hats.
fn blocks(m: usize, first: Constraint) -> Vec<(u8, IntPolynomial)> {
    let p = IntPolynomial::var();
    let q = IntPolynomial::one_minus_var();
    (0..1u8 << m)
        .filter(|&b| match first {
            Constraint::Free => true,
            Constraint::White => b & 1 == 1,
            Constraint::Black => b & 1 == 0,
        })
        .map(|b| {
            let start = if first == Constraint::Free { 0 } else { 1 };
            let whites = (start..m).filter(|i| (b >> i) & 1 == 1).count() as u32;
            let blacks = (m - start) as u32 - whites;
            (b, &p.pow(whites) * &q.pow(blacks))
        })
        .collect()
}

struct Builder<'a> {
    m: usize,
    o: usize,
    machines: [&'a BlockMachine; 2],
    index: HashMap<Unknown, usize>,
    unknowns: Vec<Unknown>,
}

impl Builder<'_> {
    fn id(&mut self, u: Unknown) -> usize {
        if let Some(&i) = self.index.get(&u) {
            return i;
        }
        let i = self.unknowns.len();
        self.index.insert(u, i);
        self.unknowns.push(u);
        i
    }

    fn last(&self, block: u8) -> Constraint {
        if self.o == 0 {
            Constraint::Free
        } else {
            color((block >> (self.m - 1)) & 1 == 1)
        }
    }

    fn white_at(block: u8, t: u8) -> bool {
        (block >> (t - 1)) & 1 == 1
    }

    fn machine(&self, player: Player) -> &BlockMachine {
        match player {
            Player::One => self.machines[0],
            Player::Two => self.machines[1],
        }
    }

    fn joint_row(&mut self, s: JointState) -> Row {
        let mut row = Row::default();
        for (b1, w1) in blocks(self.m, s.player1) {
            for (b2, w2) in blocks(self.m, s.player2) {
                let w = &w1 * &w2;
                let a1 = self.machines[0].action(b2);
                let a2 = self.machines[1].action(b1);
                match (a1, a2) {
                    (BlockAction::Commit(t1), BlockAction::Commit(t2)) => {
                        if Self::white_at(b1, t1) && Self::white_at(b2, t2) {
                            row.constant = &row.constant + &w;
                        }
                    }
                    (BlockAction::Commit(t1), BlockAction::Recurse) => {
                        if Self::white_at(b1, t1) {
                            let u = self.solo(Player::Two, self.last(b2), self.last(b1));
                            row.add(u, w);
                        }
                    }
                    (BlockAction::Recurse, BlockAction::Commit(t2)) => {
                        if Self::white_at(b2, t2) {
                            let u = self.solo(Player::One, self.last(b1), self.last(b2));
                            row.add(u, w);
                        }
                    }
                    (BlockAction::Recurse, BlockAction::Recurse) => {
                        row.both_recurse = &row.both_recurse + &w;
                        let next = JointState {
                            player1: self.last(b1),
                            player2: self.last(b2),
                        };
                        let u = self.id(Unknown::Joint(next));
                        row.add(u, w);
                    }
                }
            }
        }
        row
    }

    fn solo(&mut self, player: Player, own: Constraint, other: Constraint) -> usize {
        self.id(Unknown::Solo(SoloState { player, own, other }))
    }

    fn solo_row(&mut self, s: SoloState) -> Row {
        let mut row = Row::default();
        let p = IntPolynomial::var();
        let q = IntPolynomial::one_minus_var();
        for (b, w) in blocks(self.m, s.other) {
            match self.machine(s.player).action(b) {
                BlockAction::Commit(t) => {
                    if (t as usize) <= self.o {
                        if s.own == Constraint::White {
                            row.constant = &row.constant + &w;
                        }
                    } else {
                        row.constant = &row.constant + &(&w * &p);
                    }
                }
                BlockAction::Recurse => {
                    let next_other = self.last(b);
                    if self.o == 0 {
                        let u = self.solo(s.player, Constraint::Free, Constraint::Free);
                        row.add(u, w);
                    } else {
                        let uw = self.solo(s.player, Constraint::White, next_other);
                        let ub = self.solo(s.player, Constraint::Black, next_other);
                        row.add(uw, &w * &p);
                        row.add(ub, &w * &q);
                    }
                }
            }
        }
        row
    }
}

/// Reachable unknowns and their equations, starting from the free joint state.
pub fn build_renewal_system(mp: &MachinePair) -> Result<RenewalSystem> {
    for m in [mp.player1(), mp.player2()] {
        if !m
            .table()
            .iter()
            .any(|a| matches!(a, BlockAction::Commit(_)))
        {
            return Err(HatError::NonCommitting);
        }
    }
    let mut b = Builder {
        m: mp.block_size(),
        o: mp.overlap(),
        machines: [mp.player1(), mp.player2()],
        index: HashMap::new(),
        unknowns: Vec::new(),
    };
    b.id(Unknown::Joint(JointState {
        player1: Constraint::Free,
        player2: Constraint::Free,
    }));
    let mut rows = Vec::new();
    while rows.len() < b.unknowns.len() {
        let row = match b.unknowns[rows.len()] {
            Unknown::Joint(s) => b.joint_row(s),
            Unknown::Solo(s) => b.solo_row(s),
        };
        rows.push(row);
    }
    Ok(RenewalSystem {
        unknowns: b.unknowns,
        rows,
    })
}

pub fn derive_closed_form(mp: &MachinePair) -> Result<ClosedForm> {
    let system = build_renewal_system(mp)?;
    let solution = solve_linear_system(&system.linear_system()?)?;
    let mut joint_values = Vec::new();
    let mut solo_values = Vec::new();
    for (u, v) in system.unknowns.iter().zip(&solution) {
        match u {
            Unknown::Joint(j) => joint_values.push((*j, v.clone())),
            Unknown::Solo(s) => solo_values.push((*s, v.clone())),
        }
    }
    Ok(ClosedForm {
        value: solution[0].clone(),
        system_size: system.size(),
        continuation_ratios: system.continuation_ratios(),
        joint_values,
        solo_values,
    })
}

pub fn continuation_ratios(mp: &MachinePair) -> Result<Vec<(JointState, RationalFunction)>> {
    Ok(build_renewal_system(mp)?.continuation_ratios())
}

/// `r(p)^k`, with `r` the largest per-round probability that both players
/// recurse. Bounds the gap between the closed form and the truncation to
/// `m + k(m - o)` hats.
pub fn tail_bound(mp: &MachinePair, p: &BigRational, rounds: u32) -> Result<BigRational> {
    if p <= &BigRational::zero() || p >= &BigRational::one() {
        return Err(HatError::DegenerateProbability(rational_to_string(p)));
    }
    let r = max_ratio(&continuation_ratios(mp)?, p)?;
    Ok(num_traits::pow(r, rounds as usize))
}
