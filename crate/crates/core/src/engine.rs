//! Instrumented simulation of the erase-repetition game and of the
//! backtracking search for the nonrepetitive game.
//!
//! Both are driven by [`Game`], a move-by-move state machine. The two games
//! differ in three places:
//!
//! | | erase | nonrep search |
//! |---|---|---|
//! | erased repetitions | size >= 1 | size >= 2 |
//! | Ann to move | odd move index | even word length |
//! | Ben's history | every move played | moves behind the current word |
//!
//! In the search a repetition rewinds the game to the state before the
//! repeated block, so the "real" game Ben plays in is the branch that built
//! the current word; his strategy sees that branch and nothing else.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::sequence::{GameSequence, RepetitionReport, Symbol};
use crate::strategy::{
    ann_candidates, Adversary, BenStrategy, BenView, ChoiceSource, RandomSource,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameKind {
    /// Every repetition is erased; strict turn alternation.
    Erase,
    /// Repetitions of size >= 2 are backtracked; turn by word-length parity.
    Nonrep,
}

impl GameKind {
    /// Smallest repetition size that triggers an erase/backtrack.
    pub fn min_repetition(self) -> usize {
        match self {
            GameKind::Erase => 1,
            GameKind::Nonrep => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GameKind::Erase => "erase",
            GameKind::Nonrep => "nonrep",
        }
    }

    /// Smallest alphabet for which Ann always has a candidate.
    pub fn min_alphabet(self) -> u32 {
        match self {
            GameKind::Erase => 4,
            GameKind::Nonrep => 3,
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "erase" => Ok(GameKind::Erase),
            "nonrep" | "search" => Ok(GameKind::Nonrep),
            _ => Err(Error::UnknownToken(s.to_string())),
        }
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mover {
    #[default]
    Ann,
    Ben,
}

impl Mover {
    pub fn tag(self) -> &'static str {
        match self {
            Mover::Ann => "A",
            Mover::Ben => "B",
        }
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct MoveRecord {
    /// 1-based position of the move in the run.
    pub move_index: usize,
    pub mover: Mover,
    pub symbol: Symbol,
    /// Size of the erased repetition, 0 if none.
    pub repetition_size: usize,
    /// Word length after the move and its erasure.
    pub height_after: usize,
}

/// Result of a single move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveOutcome {
    pub record: MoveRecord,
    pub repetition: Option<RepetitionReport>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameConfig {
    pub kind: GameKind,
    pub alphabet_size: u32,
    /// Total moves (erase game) or Ann's draws (nonrep search).
    pub budget: usize,
    pub ben: String,
    pub seed: Option<u64>,
}

/// A complete instrumented play.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameRun {
    pub config: GameConfig,
    pub moves: Vec<MoveRecord>,
    pub ann_choices: Vec<Symbol>,
    pub final_word: GameSequence,
}

/// Move-by-move game state shared by the simulators, the decoders and live sessions.
#[derive(Debug, Clone)]
pub struct Game {
    kind: GameKind,
    seq: GameSequence,
    moves: Vec<MoveRecord>,
    // nonrep only: records of the moves that placed the current word
    branch: Vec<MoveRecord>,
    ann_choices: Vec<Symbol>,
}

impl Game {
    pub fn new(kind: GameKind, alphabet_size: u32) -> Result<Self> {
        if alphabet_size < kind.min_alphabet() {
            return Err(Error::Config(format!(
                "the {kind} game needs at least {} symbols, got {alphabet_size}",
                kind.min_alphabet()
            )));
        }
        Ok(Game {
            kind,
            seq: GameSequence::new(alphabet_size)?,
            moves: Vec::new(),
            branch: Vec::new(),
            ann_choices: Vec::new(),
        })
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn word(&self) -> &GameSequence {
        &self.seq
    }

    pub fn moves(&self) -> &[MoveRecord] {
        &self.moves
    }

    pub fn ann_choices(&self) -> &[Symbol] {
        &self.ann_choices
    }

    pub fn whose_turn(&self) -> Mover {
        let even = match self.kind {
            GameKind::Erase => self.moves.len().is_multiple_of(2),
            GameKind::Nonrep => self.seq.len().is_multiple_of(2),
        };
        if even {
            Mover::Ann
        } else {
            Mover::Ben
        }
    }

    /// The history Ben's strategy is allowed to depend on.
    pub fn ben_history(&self) -> &[MoveRecord] {
        match self.kind {
            GameKind::Erase => &self.moves,
            GameKind::Nonrep => &self.branch,
        }
    }

    pub fn ben_view(&self) -> BenView<'_> {
        BenView {
            kind: self.kind,
            history: self.ben_history(),
            seq: &self.seq,
        }
    }

    pub fn ann_candidates(&self) -> Result<Vec<Symbol>> {
        ann_candidates(self.kind, &self.seq)
    }

    /// Plays `symbol` for `mover`. Ann's symbol must be one of her candidates.
    pub fn apply(&mut self, mover: Mover, symbol: Symbol) -> Result<MoveOutcome> {
        if mover != self.whose_turn() {
            return Err(Error::Protocol(format!(
                "it is {:?}'s turn, not {mover:?}'s",
                self.whose_turn()
            )));
        }
        let symbol = self.seq.check(symbol)?;
        if mover == Mover::Ann && !self.ann_candidates()?.contains(&symbol) {
            return Err(Error::Protocol(format!(
                "symbol {symbol} is excluded by Ann's strategy"
            )));
        }
        let repetition = self
            .seq
            .append_and_reduce(symbol, self.kind.min_repetition())?;
        let record = MoveRecord {
            move_index: self.moves.len() + 1,
            mover,
            symbol,
            repetition_size: repetition.map_or(0, |r| r.size),
            height_after: self.seq.len(),
        };
        self.moves.push(record);
        if mover == Mover::Ann {
            self.ann_choices.push(symbol);
        }
        if self.kind == GameKind::Nonrep {
            if repetition.is_none() {
                self.branch.push(record);
            } else {
                self.branch.truncate(self.seq.len());
            }
        }
        Ok(MoveOutcome { record, repetition })
    }

    pub fn ann_move<S: ChoiceSource + ?Sized>(&mut self, src: &mut S) -> Result<MoveOutcome> {
        if self.whose_turn() != Mover::Ann {
            return Err(Error::Protocol("it is not Ann's turn".into()));
        }
        let candidates = self.ann_candidates()?;
        let s = src.pick(&candidates);
        self.apply(Mover::Ann, s)
    }

    pub fn ben_move<B: Adversary + ?Sized>(&mut self, ben: &mut B) -> Result<MoveOutcome> {
        if self.whose_turn() != Mover::Ben {
            return Err(Error::Protocol("it is not Ben's turn".into()));
        }
        let s = ben.choose(&self.ben_view())?;
        self.apply(Mover::Ben, s)
    }

    pub fn into_run(self, config: GameConfig) -> GameRun {
        GameRun {
            config,
            moves: self.moves,
            ann_choices: self.ann_choices,
            final_word: self.seq,
        }
    }
}

/// Plays `total_moves` alternating moves of the erase game, Ann first.
pub fn play_erase_game(
    alphabet_size: u32,
    total_moves: usize,
    ben: BenStrategy,
    seed: u64,
) -> Result<GameRun> {
    let mut rng = RandomSource::new(seed);
    let mut ben = ben;
    let mut run = play_erase_game_with(alphabet_size, total_moves, &mut ben, &mut rng)?;
    run.config.seed = Some(seed);
    Ok(run)
}

pub fn play_erase_game_with<B, S>(
    alphabet_size: u32,
    total_moves: usize,
    ben: &mut B,
    src: &mut S,
) -> Result<GameRun>
where
    B: Adversary + ?Sized,
    S: ChoiceSource + ?Sized,
{
    if !total_moves.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "the erase game is played for an even number of moves, got {total_moves}"
        )));
    }
    let mut game = Game::new(GameKind::Erase, alphabet_size)?;
    while game.moves().len() < total_moves {
        match game.whose_turn() {
            Mover::Ann => game.ann_move(src)?,
            Mover::Ben => game.ben_move(ben)?,
        };
    }
    Ok(game.into_run(GameConfig {
        kind: GameKind::Erase,
        alphabet_size,
        budget: total_moves,
        ben: ben.label(),
        seed: None,
    }))
}

/// Runs the backtracking search until Ann has made `ann_budget` draws.
///
/// The run ends with Ann's last draw (and its erasure); no trailing Ben move is simulated.
pub fn simulate_nonrep_search(
    alphabet_size: u32,
    ann_budget: usize,
    ben: BenStrategy,
    seed: u64,
) -> Result<GameRun> {
    let mut rng = RandomSource::new(seed);
    let mut ben = ben;
    let mut run = simulate_nonrep_search_with(alphabet_size, ann_budget, &mut ben, &mut rng)?;
    run.config.seed = Some(seed);
    Ok(run)
}

pub fn simulate_nonrep_search_with<B, S>(
    alphabet_size: u32,
    ann_budget: usize,
    ben: &mut B,
    src: &mut S,
) -> Result<GameRun>
where
    B: Adversary + ?Sized,
    S: ChoiceSource + ?Sized,
{
    let mut game = Game::new(GameKind::Nonrep, alphabet_size)?;
    while game.ann_choices().len() < ann_budget {
        match game.whose_turn() {
            Mover::Ann => game.ann_move(src)?,
            Mover::Ben => game.ben_move(ben)?,
        };
    }
    Ok(game.into_run(GameConfig {
        kind: GameKind::Nonrep,
        alphabet_size,
        budget: ann_budget,
        ben: ben.label(),
        seed: None,
    }))
}

/// Word length after each move.
pub fn extract_heights(run: &GameRun) -> Vec<usize> {
    run.moves.iter().map(|m| m.height_after).collect()
}

/// `d_1 = h_1`, `d_j = h_j - h_{j-1}`; the first move always gives `d_1 = 1`.
pub fn height_differences(heights: &[usize]) -> Vec<i64> {
    let mut prev = 0i64;
    heights
        .iter()
        .map(|&h| {
            let d = h as i64 - prev;
            prev = h as i64;
            d
        })
        .collect()
}

/// Shape of the search between two consecutive Ann moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransitionType {
    /// Ann and then Ben append without repetition.
    Clean = 0,
    /// Ann closes an odd repetition (>= 5) and moves again.
    AnnOdd = 1,
    /// Ann closes an even repetition (>= 6), Ben appends cleanly.
    AnnEven = 2,
    /// Ann appends cleanly, Ben closes an even repetition (>= 6).
    BenEven = 3,
    /// Ann appends cleanly, Ben closes an odd repetition (>= 5), then appends cleanly.
    BenOdd = 4,
}

impl TransitionType {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(TransitionType::Clean),
            1 => Some(TransitionType::AnnOdd),
            2 => Some(TransitionType::AnnEven),
            3 => Some(TransitionType::BenEven),
            4 => Some(TransitionType::BenOdd),
            _ => None,
        }
    }

    /// Number of moves in the transition (Ann's move included).
    pub fn span(self) -> usize {
        match self {
            TransitionType::AnnOdd => 1,
            TransitionType::Clean | TransitionType::AnnEven | TransitionType::BenEven => 2,
            TransitionType::BenOdd => 3,
        }
    }

    /// Heights after each move of the transition, starting from Ann's
    /// height `start` and ending at `start + 2 * d`.
    pub fn heights(self, start: i64, d: i64) -> Vec<i64> {
        let end = start + 2 * d;
        match self {
            TransitionType::Clean => alloc::vec![start + 1, start + 2],
            TransitionType::AnnOdd => alloc::vec![end],
            TransitionType::AnnEven => alloc::vec![end - 1, end],
            TransitionType::BenEven => alloc::vec![start + 1, end],
            TransitionType::BenOdd => alloc::vec![start + 1, end - 1, end],
        }
    }
}

/// Classifies the moves between one Ann move (inclusive) and the next (exclusive).
pub fn classify_transition(segment: &[MoveRecord]) -> Result<TransitionType> {
    let rep = |m: &MoveRecord| m.repetition_size;
    let shape: Vec<(Mover, usize)> = segment.iter().map(|m| (m.mover, rep(m))).collect();
    use Mover::{Ann, Ben};
    let t = match shape.as_slice() {
        [(Ann, 0), (Ben, 0)] => Some(TransitionType::Clean),
        [(Ann, a)] if *a >= 5 && a % 2 == 1 => Some(TransitionType::AnnOdd),
        [(Ann, a), (Ben, 0)] if *a >= 6 && a % 2 == 0 => Some(TransitionType::AnnEven),
        [(Ann, 0), (Ben, b)] if *b >= 6 && b % 2 == 0 => Some(TransitionType::BenEven),
        [(Ann, 0), (Ben, b), (Ben, 0)] if *b >= 5 && b % 2 == 1 => Some(TransitionType::BenOdd),
        _ => None,
    };
    t.ok_or_else(|| {
        Error::Protocol(format!(
            "unclassifiable transition starting at move {}: {:?}",
            segment.first().map_or(0, |m| m.move_index),
            shape
        ))
    })
}

/// Splits a search run at Ann's moves and classifies every complete transition.
///
/// The segment opened by Ann's last move has no successor and is not classified.
pub fn classify_transitions(run: &GameRun) -> Result<Vec<TransitionType>> {
    if run.config.kind != GameKind::Nonrep {
        return Err(Error::Config("transitions exist only in the nonrep search".into()));
    }
    let ann_positions: Vec<usize> = run
        .moves
        .iter()
        .enumerate()
        .filter(|(_, m)| m.mover == Mover::Ann)
        .map(|(i, _)| i)
        .collect();
    if run.moves.first().map(|m| m.mover) == Some(Mover::Ben) {
        return Err(Error::Protocol("search must open with Ann".into()));
    }
    ann_positions
        .windows(2)
        .map(|w| classify_transition(&run.moves[w[0]..w[1]]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::ScriptedBen;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn mimic_two_moves() {
        let run = play_erase_game(8, 2, BenStrategy::Mimic, 11).unwrap();
        assert_eq!(run.moves.len(), 2);
        assert_eq!(run.moves[1].symbol, run.moves[0].symbol);
        assert_eq!(run.moves[1].repetition_size, 1);
        assert_eq!(extract_heights(&run), vec![1, 1]);
        assert_eq!(height_differences(&extract_heights(&run)), vec![1, 0]);
        assert_eq!(run.final_word.symbols(), &[run.ann_choices[0]]);
    }

    #[test]
    fn erase_alternates_and_counts_ann() {
        for ben in BenStrategy::ALL {
            let run = play_erase_game(8, 200, ben, 5).unwrap();
            assert_eq!(run.ann_choices.len(), 100);
            for m in &run.moves {
                let expect = if m.move_index % 2 == 1 { Mover::Ann } else { Mover::Ben };
                assert_eq!(m.mover, expect);
            }
            assert!(run.final_word.is_valid(1));
        }
    }

    #[test]
    fn erase_config_errors() {
        assert!(matches!(play_erase_game(3, 2, BenStrategy::Mimic, 0), Err(Error::Config(_))));
        assert!(matches!(play_erase_game(8, 3, BenStrategy::Mimic, 0), Err(Error::Config(_))));
        assert!(matches!(simulate_nonrep_search(2, 3, BenStrategy::Mimic, 0), Err(Error::Config(_))));
    }

    #[test]
    fn greedy_erase_run_has_no_small_repetitions() {
        let run = play_erase_game(8, 2000, BenStrategy::GreedyRepeater, 2024).unwrap();
        assert!(run.moves.iter().all(|m| matches!(m.repetition_size, 0 | 1) || m.repetition_size >= 4));
        assert!(run.moves.iter().any(|m| m.repetition_size == 1));
    }

    #[test]
    fn search_single_draw() {
        let run = simulate_nonrep_search(6, 1, BenStrategy::HashDet, 1).unwrap();
        assert_eq!(run.moves.len(), 1);
        assert_eq!(run.moves[0].mover, Mover::Ann);
        assert_eq!(extract_heights(&run), vec![1]);
    }

    #[test]
    fn search_turns_follow_parity() {
        for ben in BenStrategy::ALL {
            let run = simulate_nonrep_search(6, 300, ben, 9).unwrap();
            assert_eq!(run.ann_choices.len(), 300);
            assert_eq!(run.moves.last().unwrap().mover, Mover::Ann);
            let mut prev = 0;
            for m in &run.moves {
                let expect = if prev % 2 == 0 { Mover::Ann } else { Mover::Ben };
                assert_eq!(m.mover, expect);
                assert_eq!(m.height_after, prev + 1 - m.repetition_size);
                assert!(m.repetition_size == 0 || m.repetition_size >= 5);
                prev = m.height_after;
            }
            assert!(run.final_word.is_valid(2));
            classify_transitions(&run).unwrap();
        }
    }

    #[test]
    fn mimic_search_backtracks_only_large() {
        let run = simulate_nonrep_search(6, 1000, BenStrategy::Mimic, 77).unwrap();
        assert!(run.moves.iter().all(|m| m.repetition_size == 0 || m.repetition_size >= 5));
    }

    #[test]
    fn ben_never_moves_three_times_in_a_row() {
        let run = simulate_nonrep_search(6, 1000, BenStrategy::HashDet, 4).unwrap();
        let mut streak = 0;
        for m in &run.moves {
            streak = if m.mover == Mover::Ben { streak + 1 } else { 0 };
            assert!(streak < 3);
        }
    }

    #[test]
    fn transition_heights_match_types() {
        assert_eq!(TransitionType::Clean.heights(4, 1), vec![5, 6]);
        assert_eq!(TransitionType::BenOdd.heights(6, -1), vec![7, 3, 4]);
        assert_eq!(TransitionType::AnnOdd.heights(8, -2), vec![4]);
        assert_eq!(TransitionType::AnnEven.heights(10, -2), vec![5, 6]);
        assert_eq!(TransitionType::BenEven.heights(10, -2), vec![11, 6]);
    }

    #[test]
    fn scripted_apply_checks_turns() {
        let mut g = Game::new(GameKind::Erase, 8).unwrap();
        assert!(matches!(g.apply(Mover::Ben, Symbol::new(0)), Err(Error::Protocol(_))));
        g.apply(Mover::Ann, Symbol::new(3)).unwrap();
        // Ann may not repeat one of the last three
        let mut h = g.clone();
        h.apply(Mover::Ben, Symbol::new(4)).unwrap();
        assert!(matches!(h.apply(Mover::Ann, Symbol::new(3)), Err(Error::Protocol(_))));
        let out = g.apply(Mover::Ben, Symbol::new(3)).unwrap();
        assert_eq!(out.repetition.unwrap().size, 1);
        assert_eq!(g.word().len(), 1);
        assert!(matches!(g.apply(Mover::Ann, Symbol::new(9)), Err(Error::SymbolOutOfRange { .. })));
    }

    #[test]
    fn scripted_ben_drives_search() {
        let mut ben = ScriptedBen::new(vec![Symbol::new(1); 10]);
        let mut rng = RandomSource::new(0);
        let run = simulate_nonrep_search_with(6, 3, &mut ben, &mut rng).unwrap();
        assert_eq!(run.config.ben, "scripted");
        assert_eq!(run.ann_choices.len(), 3);
        let ben_moves: Vec<_> = run.moves.iter().filter(|m| m.mover == Mover::Ben).collect();
        assert!(ben_moves.iter().all(|m| m.symbol == Symbol::new(1)));
    }
}
