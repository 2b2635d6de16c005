//! Entropy-compression logs.
//!
//! A run is compressed into its height differences plus the final word. For
//! a fixed deterministic Ben the compression is injective on Ann's choices:
//! the decoders rebuild every introduced symbol backwards from the final word
//! and then replay the game forwards, asking Ben's strategy for his moves.
//!
//! * Erase game ([`ReducedGameLog`]): differences of every move with the
//!   zeros (Ben's size-1 repetitions) dropped.
//! * Nonrep search ([`TypedSearchLog`]): halved differences of the heights
//!   in front of Ann's moves, plus the transition type wherever the halved
//!   difference is `<= -2`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::engine::{
    classify_transitions, extract_heights, height_differences, Game, GameKind, GameRun, Mover,
    TransitionType,
};
use crate::error::{DecodeError, Error, Result};
use crate::sequence::{GameSequence, Symbol};
use crate::strategy::Adversary;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedGameLog {
    pub differences: Vec<i64>,
    pub final_word: GameSequence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedSearchLog {
    /// `d_1 = 1`, `d_{j+1} = (h'_{j+1} - h'_j) / 2`.
    pub differences: Vec<i64>,
    /// 1-based index into `differences` -> type 1..=4.
    pub types: BTreeMap<usize, TransitionType>,
    pub final_word: GameSequence,
}

/// Which structural condition a log breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// More entries than the move budget allows.
    Length,
    /// An entry outside the allowed step set.
    StepSet,
    /// A prefix sum below 1.
    PrefixFloor,
    /// A type recorded where `d > -2`, missing where `d <= -2`, or out of range.
    TypeDomain,
    /// The final word cannot close the height sequence.
    FinalLength,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    /// 1-based index of the offending entry (0 for whole-log conditions).
    pub index: usize,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {}: {}", self.condition, self.index, self.detail)
    }
}

/// Borrowed view over either log kind.
#[derive(Debug, Clone, Copy)]
pub enum LogRef<'a> {
    Erase(&'a ReducedGameLog),
    Search(&'a TypedSearchLog),
}

impl<'a> From<&'a ReducedGameLog> for LogRef<'a> {
    fn from(log: &'a ReducedGameLog) -> Self {
        LogRef::Erase(log)
    }
}

impl<'a> From<&'a TypedSearchLog> for LogRef<'a> {
    fn from(log: &'a TypedSearchLog) -> Self {
        LogRef::Search(log)
    }
}

/// Every structural violation of the log; empty iff the log is well formed.
pub fn validate_log<'a>(log: impl Into<LogRef<'a>>) -> Vec<Violation> {
    match log.into() {
        LogRef::Erase(l) => l.violations(None),
        LogRef::Search(l) => l.violations(),
    }
}

fn prefix_floor(differences: &[i64], out: &mut Vec<Violation>) -> i64 {
    let mut sum = 0i64;
    for (i, &d) in differences.iter().enumerate() {
        sum += d;
        if sum < 1 {
            out.push(Violation {
                condition: Condition::PrefixFloor,
                index: i + 1,
                detail: format!("prefix sum {sum} < 1"),
            });
        }
    }
    sum
}

impl ReducedGameLog {
    /// Violations of the step set, the prefix floor and, given the move budget
    /// `2M`, the length bound.
    pub fn violations(&self, total_moves: Option<usize>) -> Vec<Violation> {
        let mut out = Vec::new();
        if let Some(budget) = total_moves {
            if self.differences.len() > budget {
                out.push(Violation {
                    condition: Condition::Length,
                    index: 0,
                    detail: format!("{} entries for {budget} moves", self.differences.len()),
                });
            }
        }
        for (i, &d) in self.differences.iter().enumerate() {
            if !(d == 1 || d <= -3) {
                out.push(Violation {
                    condition: Condition::StepSet,
                    index: i + 1,
                    detail: format!("{d} is not in {{1, -3, -4, ...}}"),
                });
            }
        }
        let sum = prefix_floor(&self.differences, &mut out);
        if sum != self.final_word.len() as i64 {
            out.push(Violation {
                condition: Condition::FinalLength,
                index: 0,
                detail: format!("differences sum to {sum}, final word has length {}", self.final_word.len()),
            });
        }
        out
    }
}

impl TypedSearchLog {
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, &d) in self.differences.iter().enumerate() {
            if d > 1 || (i == 0 && d != 1) {
                out.push(Violation {
                    condition: Condition::StepSet,
                    index: i + 1,
                    detail: format!("{d} is not allowed here"),
                });
            }
            let typed = self.types.get(&(i + 1));
            match (d <= -2, typed) {
                (true, None) => out.push(Violation {
                    condition: Condition::TypeDomain,
                    index: i + 1,
                    detail: format!("d = {d} needs a type"),
                }),
                (false, Some(t)) => out.push(Violation {
                    condition: Condition::TypeDomain,
                    index: i + 1,
                    detail: format!("d = {d} carries type {}", t.code()),
                }),
                (true, Some(TransitionType::Clean)) => out.push(Violation {
                    condition: Condition::TypeDomain,
                    index: i + 1,
                    detail: "type 0 cannot be recorded".into(),
                }),
                _ => {}
            }
        }
        for &j in self.types.keys() {
            if j == 0 || j > self.differences.len() {
                out.push(Violation {
                    condition: Condition::TypeDomain,
                    index: j,
                    detail: "type index outside the difference sequence".into(),
                });
            }
        }
        let sum = prefix_floor(&self.differences, &mut out);
        if self.differences.is_empty() {
            if !self.final_word.is_empty() {
                out.push(Violation {
                    condition: Condition::FinalLength,
                    index: 0,
                    detail: "an empty log must end with an empty word".into(),
                });
            }
        } else {
            // height in front of Ann's last move
            let last_ann = 2 * (sum - 1);
            let fin = self.final_word.len() as i64;
            if fin > last_ann + 1 || fin == last_ann {
                out.push(Violation {
                    condition: Condition::FinalLength,
                    index: 0,
                    detail: format!("final length {fin} cannot follow height {last_ann}"),
                });
            }
        }
        out
    }
}

/// Differences of every move, zeros removed, paired with the final word.
pub fn encode_erase_log(run: &GameRun) -> Result<ReducedGameLog> {
    if run.config.kind != GameKind::Erase {
        return Err(Error::Config("encode_erase_log needs an erase-game run".into()));
    }
    let differences = height_differences(&extract_heights(run))
        .into_iter()
        .filter(|&d| d != 0)
        .collect();
    Ok(ReducedGameLog {
        differences,
        final_word: run.final_word.clone(),
    })
}

/// Rebuilds Ann's choices from a reduced log and Ben's (deterministic) strategy.
pub fn decode_erase_log<B: Adversary + ?Sized>(
    log: &ReducedGameLog,
    ben: &mut B,
) -> Result<Vec<Symbol>> {
    let violations = log.violations(None);
    if !violations.is_empty() {
        return Err(DecodeError::InvalidLog(violations).into());
    }
    // good symbols x_1..x_m, rebuilt backwards
    let steps: Vec<(i64, i64)> = {
        let mut h = 0i64;
        log.differences
            .iter()
            .map(|&d| {
                let step = (h, h + d);
                h += d;
                step
            })
            .collect()
    };
    let good = unwind(log.final_word.symbols(), &steps)?;

    let alphabet = log.final_word.alphabet_size();
    let mut game = Game::new(GameKind::Erase, alphabet)?;
    let mut next = 0;
    while next < good.len() {
        let before = game.word().len() as i64;
        let move_index = game.moves().len() + 1;
        let replay_err = |reason: String| Error::from(DecodeError::Replay { move_index, reason });
        let x = good[next];
        match game.whose_turn() {
            Mover::Ann => {
                game.apply(Mover::Ann, x).map_err(|e| replay_err(format!("{e}")))?;
            }
            Mover::Ben => {
                let b = ben.choose(&game.ben_view())?;
                if Some(b) == game.word().last() {
                    // bad move: size-1 repetition, no entry in the reduced log
                    game.apply(Mover::Ben, b).map_err(|e| replay_err(format!("{e}")))?;
                    continue;
                }
                if b != x {
                    return Err(replay_err(format!("Ben plays {b}, log needs {x}")));
                }
                game.apply(Mover::Ben, b).map_err(|e| replay_err(format!("{e}")))?;
            }
        }
        let d = game.word().len() as i64 - before;
        if d != log.differences[next] {
            return Err(replay_err(format!(
                "height changes by {d}, log records {}",
                log.differences[next]
            )));
        }
        next += 1;
    }
    if game.word() != &log.final_word {
        return Err(DecodeError::Replay {
            move_index: game.moves().len(),
            reason: "replayed final word differs from the log".into(),
        }
        .into());
    }
    Ok(game.ann_choices().to_vec())
}

/// Halved Ann-to-Ann height differences, transition types and the final word.
pub fn encode_search_log(run: &GameRun) -> Result<TypedSearchLog> {
    if run.config.kind != GameKind::Nonrep {
        return Err(Error::Config("encode_search_log needs a nonrep search run".into()));
    }
    let mut ann_heights = Vec::new();
    let mut h = 0usize;
    for m in &run.moves {
        if m.mover == Mover::Ann {
            if !h.is_multiple_of(2) {
                return Err(Error::Protocol(format!(
                    "Ann moved at odd height {h} (move {})",
                    m.move_index
                )));
            }
            ann_heights.push(h as i64);
        }
        h = m.height_after;
    }
    let transitions = classify_transitions(run)?;
    let mut differences = Vec::with_capacity(ann_heights.len());
    let mut types = BTreeMap::new();
    if !ann_heights.is_empty() {
        differences.push(1);
    }
    for (j, w) in ann_heights.windows(2).enumerate() {
        let d = (w[1] - w[0]) / 2;
        let t = transitions[j];
        let consistent = match d {
            1 => t == TransitionType::Clean,
            -1 => t == TransitionType::BenOdd,
            d if d <= -2 => t != TransitionType::Clean,
            _ => false,
        };
        if !consistent {
            return Err(Error::Protocol(format!(
                "transition {} of type {} cannot change the height by {}",
                j + 1,
                t.code(),
                2 * d
            )));
        }
        differences.push(d);
        if d <= -2 {
            types.insert(j + 2, t);
        }
    }
    Ok(TypedSearchLog {
        differences,
        types,
        final_word: run.final_word.clone(),
    })
}

/// Expands a typed search log into (height before, height after) for every move.
pub fn expand_search_heights(log: &TypedSearchLog) -> Result<Vec<(i64, i64)>> {
    let violations = log.violations();
    if !violations.is_empty() {
        return Err(DecodeError::InvalidLog(violations).into());
    }
    let mut steps = Vec::new();
    let mut h = 0i64;
    for (i, &d) in log.differences.iter().enumerate().skip(1) {
        let t = match d {
            1 => TransitionType::Clean,
            -1 => TransitionType::BenOdd,
            _ => log.types[&(i + 1)],
        };
        let mut before = h;
        for after in t.heights(h, d) {
            steps.push((before, after));
            before = after;
        }
        h += 2 * d;
    }
    if !log.differences.is_empty() {
        steps.push((h, log.final_word.len() as i64));
    }
    for (i, &(before, after)) in steps.iter().enumerate() {
        let drop = before + 1 - after;
        if after < 0 || drop < 0 || drop == 1 {
            return Err(DecodeError::Backward {
                step: i + 1,
                reason: format!("impossible height step {before} -> {after}"),
            }
            .into());
        }
    }
    Ok(steps)
}

/// Rebuilds Ann's choices from a typed search log and Ben's (deterministic) strategy.
pub fn decode_search_log<B: Adversary + ?Sized>(
    log: &TypedSearchLog,
    ben: &mut B,
) -> Result<Vec<Symbol>> {
    let steps = expand_search_heights(log)?;
    let introduced = unwind(log.final_word.symbols(), &steps)?;

    let mut game = Game::new(GameKind::Nonrep, log.final_word.alphabet_size())?;
    for (i, (&x, &(_, after))) in introduced.iter().zip(&steps).enumerate() {
        let move_index = i + 1;
        let replay_err = |reason: String| Error::from(DecodeError::Replay { move_index, reason });
        match game.whose_turn() {
            Mover::Ann => {
                game.apply(Mover::Ann, x).map_err(|e| replay_err(format!("{e}")))?;
            }
            Mover::Ben => {
                let b = ben.choose(&game.ben_view())?;
                if b != x {
                    return Err(replay_err(format!("Ben plays {b}, log needs {x}")));
                }
                game.apply(Mover::Ben, b).map_err(|e| replay_err(format!("{e}")))?;
            }
        }
        if game.word().len() as i64 != after {
            return Err(replay_err(format!(
                "height {} after the move, log expects {after}",
                game.word().len()
            )));
        }
    }
    if game.moves().last().map(|m| m.mover) != Some(Mover::Ann) && !steps.is_empty() {
        return Err(DecodeError::Replay {
            move_index: steps.len(),
            reason: "the last move of a search log must be Ann's".into(),
        }
        .into());
    }
    if game.ann_choices().len() != log.differences.len() {
        return Err(DecodeError::Replay {
            move_index: steps.len(),
            reason: format!(
                "replay has {} Ann moves, log has {}",
                game.ann_choices().len(),
                log.differences.len()
            ),
        }
        .into());
    }
    if game.word() != &log.final_word {
        return Err(DecodeError::Replay {
            move_index: steps.len(),
            reason: "replayed final word differs from the log".into(),
        }
        .into());
    }
    Ok(game.ann_choices().to_vec())
}

// Backward pass: given the final word and the (before, after) height of every
// move, recover the symbol each move introduced. A move that dropped the
// height erased the second half of a repetition of size `before + 1 - after`;
// the first half is still at the end of the word, so copying it back restores
// the word in front of the move.
fn unwind(final_word: &[Symbol], steps: &[(i64, i64)]) -> Result<Vec<Symbol>> {
    let mut word: Vec<Symbol> = final_word.to_vec();
    let mut introduced = Vec::with_capacity(steps.len());
    for (i, &(before, after)) in steps.iter().enumerate().rev() {
        let backward_err = |reason: String| Error::from(DecodeError::Backward { step: i + 1, reason });
        let l = word.len();
        if l as i64 != after {
            return Err(backward_err(format!("word has length {l}, expected {after}")));
        }
        let x = *word
            .last()
            .ok_or_else(|| backward_err("empty word".into()))?;
        let h = (before + 1 - after) as usize;
        if h == 0 {
            word.pop();
        } else {
            if h > l {
                return Err(backward_err(format!("repetition of size {h} exceeds length {l}")));
            }
            word.extend_from_within(l - h..l - 1);
        }
        introduced.push(x);
    }
    if !word.is_empty() {
        return Err(DecodeError::Backward {
            step: 0,
            reason: format!("{} symbols left before the first move", word.len()),
        }
        .into());
    }
    introduced.reverse();
    Ok(introduced)
}
