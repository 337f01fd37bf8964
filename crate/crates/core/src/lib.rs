//! Exact analysis of Levine's two-player cooperative hat game.
//!
//! Each player wears an infinite stack of hats, each white with probability
//! `p`, sees only the partner's stack, and points at one of their own hats.
//! The pair wins when both chosen hats are white. This crate evaluates
//! finite strategy tables exactly, derives closed-form win rates for
//! block strategies on infinite stacks, searches strategy spaces, computes
//! upper and lower bounds, and simulates everything as a cross-check.

pub mod bounds;
pub mod error;
pub mod exact;
pub mod game;
pub mod machine;
pub mod monte_carlo;
pub mod search;

pub use error::{HatError, Result};
