//! Nonrepetitive games: Ann's randomized strategies against deterministic
//! adversaries, the entropy-compression logs that make her choices
//! recoverable, and the walk counting / generating-function analysis behind
//! the growth bounds.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod census;
pub mod codec;
pub mod engine;
pub mod error;
pub mod gf;
pub mod sequence;
pub mod strategy;

pub use codec::{
    decode_erase_log, decode_search_log, encode_erase_log, encode_search_log, validate_log,
    ReducedGameLog, TypedSearchLog, Violation,
};
pub use engine::{
    extract_heights, play_erase_game, simulate_nonrep_search, Game, GameConfig, GameKind, GameRun,
    MoveRecord, Mover, TransitionType,
};
pub use error::{DecodeError, Error, Result};
pub use sequence::{GameSequence, RepetitionReport, Symbol};
pub use strategy::{Adversary, BenStrategy, ChoiceSource, RandomSource, ScriptedBen};
