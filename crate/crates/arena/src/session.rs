//! Live games where a human plays Ben against Ann's randomized strategy.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex as StdMutex};

use serde::{Deserialize, Serialize};
use thue_arena_core::{
    Error as CoreError, Game, GameConfig, GameKind, Mover, RandomSource, Symbol,
};
use thue_arena_core::engine::MoveOutcome;
use tokio::sync::{broadcast, Mutex};

use crate::formats::GameRunJson;

/// Label stored as Ben's name in exported runs.
pub const HUMAN: &str = "human";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    AwaitingHuman,
    AwaitingEngine,
    Finished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lengths {
    pub word: usize,
    pub moves: usize,
    pub ann_moves: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    Appended {
        id: u64,
        move_index: usize,
        mover: String,
        symbol: u32,
    },
    /// Erase game: the second copy of a repeated block was removed.
    Erased { id: u64, size: usize, start_index: usize },
    /// Nonrep search: the game rewound to an earlier word.
    Backtracked {
        id: u64,
        to_length: usize,
        size: usize,
        start_index: usize,
    },
    State {
        id: u64,
        word: Vec<u32>,
        whose_turn: Option<String>,
        status: Status,
        lengths: Lengths,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SessionError {
    UnknownSession(String),
    Finished,
    OutOfTurn(String),
    SymbolOutOfRange { symbol: u32, alphabet_size: u32 },
    InvalidConfig(String),
    /// The engine produced a state the theory rules out.
    Invariant(String),
}

impl SessionError {
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::UnknownSession(_) => "unknown_session",
            SessionError::Finished => "session_finished",
            SessionError::OutOfTurn(_) => "out_of_turn",
            SessionError::SymbolOutOfRange { .. } => "symbol_out_of_range",
            SessionError::InvalidConfig(_) => "invalid_config",
            SessionError::Invariant(_) => "invariant_violation",
        }
    }
}

impl fmt::Display for SessionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SessionError::UnknownSession(id) => write!(f, "unknown session {id}"),
            SessionError::Finished => f.write_str("session finished"),
            SessionError::OutOfTurn(m) => write!(f, "out of turn: {m}"),
            SessionError::SymbolOutOfRange { symbol, alphabet_size } => {
                write!(f, "symbol {symbol} is outside 0..{alphabet_size}")
            }
            SessionError::InvalidConfig(m) => write!(f, "invalid configuration: {m}"),
            SessionError::Invariant(m) => write!(f, "invariant violated: {m}"),
        }
    }
}

impl std::error::Error for SessionError {}

impl From<CoreError> for SessionError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::SymbolOutOfRange { value, alphabet_size } => SessionError::SymbolOutOfRange {
                symbol: value,
                alphabet_size,
            },
            CoreError::Config(m) => SessionError::InvalidConfig(m),
            CoreError::Protocol(m) => SessionError::OutOfTurn(m),
            other => SessionError::Invariant(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SessionConfig {
    #[serde(serialize_with = "kind_name")]
    pub game: GameKind,
    pub symbols: u32,
    pub seed: u64,
    /// Total moves (erase) or Ann draws (nonrep) after which the session ends.
    pub budget: Option<usize>,
}

fn kind_name<S: serde::Serializer>(k: &GameKind, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(k.name())
}

#[derive(Debug, Clone, Serialize)]
pub struct Snapshot {
    pub id: String,
    pub config: SessionConfig,
    pub status: Status,
    pub word: Vec<u32>,
    pub whose_turn: Option<String>,
    pub lengths: Lengths,
}

pub struct Session {
    id: String,
    config: SessionConfig,
    game: Game,
    rng: RandomSource,
    status: Status,
    human_moves: Vec<Symbol>,
    next_event: u64,
    tx: broadcast::Sender<Event>,
}

impl fmt::Debug for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Session")
            .field("id", &self.id)
            .field("config", &self.config)
            .field("status", &self.status)
            .finish()
    }
}

impl Session {
    /// New session with Ann's opening already played.
    pub fn create(id: String, config: SessionConfig) -> Result<(Session, Vec<Event>), SessionError> {
        let game = Game::new(config.game, config.symbols)?;
        if config.game == GameKind::Erase && config.budget.is_some_and(|b| b % 2 != 0) {
            return Err(SessionError::InvalidConfig("erase budget must be even".into()));
        }
        let (tx, _) = broadcast::channel(1024);
        let mut s = Session {
            id,
            config,
            game,
            rng: RandomSource::new(config.seed),
            status: Status::AwaitingEngine,
            human_moves: Vec::new(),
            next_event: 0,
            tx,
        };
        let mut events = Vec::new();
        s.run_engine(&mut events)?;
        Ok((s, events))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> SessionConfig {
        self.config
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn human_moves(&self) -> &[Symbol] {
        &self.human_moves
    }

    pub fn subscribe(&self) -> broadcast::Receiver<Event> {
        self.tx.subscribe()
    }

    fn whose_turn(&self) -> Option<String> {
        (self.status != Status::Finished).then(|| self.game.whose_turn().tag().to_string())
    }

    fn lengths(&self) -> Lengths {
        Lengths {
            word: self.game.word().len(),
            moves: self.game.moves().len(),
            ann_moves: self.game.ann_choices().len(),
        }
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            id: self.id.clone(),
            config: self.config,
            status: self.status,
            word: self.game.word().values().collect(),
            whose_turn: self.whose_turn(),
            lengths: self.lengths(),
        }
    }

    fn emit(&mut self, events: &mut Vec<Event>, make: impl FnOnce(u64) -> Event) {
        let e = make(self.next_event);
        self.next_event += 1;
        // nobody listening is fine
        let _ = self.tx.send(e.clone());
        events.push(e);
    }

    fn state_event(&mut self, events: &mut Vec<Event>) {
        let word = self.game.word().values().collect();
        let whose_turn = self.whose_turn();
        let (status, lengths) = (self.status, self.lengths());
        self.emit(events, |id| Event::State {
            id,
            word,
            whose_turn,
            status,
            lengths,
        });
    }

    fn budget_spent(&self) -> bool {
        match (self.config.budget, self.config.game) {
            (Some(b), GameKind::Erase) => self.game.moves().len() >= b,
            (Some(b), GameKind::Nonrep) => self.game.ann_choices().len() >= b,
            (None, _) => false,
        }
    }

    fn record(&mut self, outcome: MoveOutcome, events: &mut Vec<Event>) -> Result<(), SessionError> {
        let r = outcome.record;
        self.emit(events, |id| Event::Appended {
            id,
            move_index: r.move_index,
            mover: r.mover.tag().to_string(),
            symbol: r.symbol.value(),
        });
        if let Some(rep) = outcome.repetition {
            let to_length = self.game.word().len();
            match self.config.game {
                GameKind::Erase => self.emit(events, |id| Event::Erased {
                    id,
                    size: rep.size,
                    start_index: rep.start_index,
                }),
                GameKind::Nonrep => self.emit(events, |id| Event::Backtracked {
                    id,
                    to_length,
                    size: rep.size,
                    start_index: rep.start_index,
                }),
            }
        }
        self.check_invariants(r.repetition_size)
    }

    fn check_invariants(&self, size: usize) -> Result<(), SessionError> {
        let forbidden = match self.config.game {
            GameKind::Erase => matches!(size, 2 | 3),
            GameKind::Nonrep => matches!(size, 2..=4),
        };
        if forbidden {
            return Err(SessionError::Invariant(format!("repetition of size {size}")));
        }
        let min = self.config.game.min_repetition();
        if !self.game.word().is_valid(min) {
            return Err(SessionError::Invariant("word holds a repetition".into()));
        }
        Ok(())
    }

    // Ann moves until the human is due or the budget is spent.
    fn run_engine(&mut self, events: &mut Vec<Event>) -> Result<(), SessionError> {
        self.status = Status::AwaitingEngine;
        while !self.budget_spent() && self.game.whose_turn() == Mover::Ann {
            let outcome = self.game.ann_move(&mut self.rng)?;
            self.record(outcome, events)?;
        }
        self.status = if self.budget_spent() {
            Status::Finished
        } else {
            Status::AwaitingHuman
        };
        self.state_event(events);
        Ok(())
    }

    /// Applies the human's Ben move and Ann's replies; returns the events in order.
    pub fn submit(&mut self, symbol: u32, mover: Option<&str>) -> Result<Vec<Event>, SessionError> {
        if self.status == Status::Finished {
            return Err(SessionError::Finished);
        }
        if let Some(m) = mover {
            if m != Mover::Ben.tag() {
                return Err(SessionError::OutOfTurn(format!("the human plays Ben (\"B\"), not {m:?}")));
            }
        }
        if self.game.whose_turn() != Mover::Ben {
            return Err(SessionError::OutOfTurn("Ann is to move".into()));
        }
        let symbol = self.game.word().check(Symbol::new(symbol))?;
        let mut events = Vec::new();
        let outcome = self.game.apply(Mover::Ben, symbol)?;
        self.human_moves.push(symbol);
        self.record(outcome, &mut events)?;
        self.run_engine(&mut events)?;
        Ok(events)
    }

    /// Ends the session and exports the run in the simulator's format.
    pub fn finish(&mut self) -> GameRunJson {
        if self.status != Status::Finished {
            self.status = Status::Finished;
            let mut sink = Vec::new();
            self.state_event(&mut sink);
        }
        self.export()
    }

    pub fn export(&self) -> GameRunJson {
        let budget = match self.config.game {
            GameKind::Erase => self.game.moves().len(),
            GameKind::Nonrep => self.game.ann_choices().len(),
        };
        let run = self.game.clone().into_run(GameConfig {
            kind: self.config.game,
            alphabet_size: self.config.symbols,
            budget,
            ben: HUMAN.to_string(),
            seed: Some(self.config.seed),
        });
        GameRunJson::from(&run)
    }
}

/// All live sessions. Each session has its own lock, so moves on one session
/// are serialized while different sessions proceed independently.
#[derive(Debug, Default, Clone)]
pub struct SessionStore {
    sessions: Arc<StdMutex<HashMap<String, Arc<Mutex<Session>>>>>,
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn create(&self, config: SessionConfig) -> Result<(Snapshot, Vec<Event>), SessionError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let (session, events) = Session::create(id.clone(), config)?;
        let snap = session.snapshot();
        self.sessions
            .lock()
            .expect("session map poisoned")
            .insert(id, Arc::new(Mutex::new(session)));
        Ok((snap, events))
    }

    pub fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, SessionError> {
        self.sessions
            .lock()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().expect("session map poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(game: GameKind, symbols: u32) -> SessionConfig {
        SessionConfig {
            game,
            symbols,
            seed: 1,
            budget: None,
        }
    }

    #[test]
    fn opens_with_ann() {
        for (game, c) in [(GameKind::Erase, 8), (GameKind::Nonrep, 6)] {
            let (s, events) = Session::create("x".into(), config(game, c)).unwrap();
            assert_eq!(s.snapshot().word.len(), 1);
            assert_eq!(s.status(), Status::AwaitingHuman);
            assert!(matches!(events.last(), Some(Event::State { .. })));
        }
        let err = Session::create("x".into(), config(GameKind::Erase, 3)).unwrap_err();
        assert_eq!(err.code(), "invalid_config");
    }

    #[test]
    fn mimic_erases_size_one() {
        let (mut s, _) = Session::create("x".into(), config(GameKind::Erase, 8)).unwrap();
        let last = *s.snapshot().word.last().unwrap();
        let events = s.submit(last, None).unwrap();
        assert!(events.iter().any(|e| matches!(e, Event::Erased { size: 1, .. })));
    }

    #[test]
    fn error_codes() {
        let (mut s, _) = Session::create("x".into(), config(GameKind::Nonrep, 6)).unwrap();
        assert_eq!(s.submit(6, None).unwrap_err().code(), "symbol_out_of_range");
        assert_eq!(s.submit(0, Some("A")).unwrap_err().code(), "out_of_turn");
        s.finish();
        assert_eq!(s.submit(0, None).unwrap_err().code(), "session_finished");
        assert_eq!(s.submit(0, None).unwrap_err().to_string(), "session finished");
    }

    #[test]
    fn nonrep_parity() {
        let (mut s, _) = Session::create("x".into(), config(GameKind::Nonrep, 6)).unwrap();
        for k in 0..30u32 {
            s.submit(k % 6, None).unwrap();
            let snap = s.snapshot();
            assert_eq!(snap.word.len() % 2 == 0, snap.whose_turn.as_deref() == Some("A"));
            assert_eq!(snap.whose_turn.as_deref(), Some("B"));
        }
    }

    #[test]
    fn budget_finishes() {
        let cfg = SessionConfig {
            budget: Some(4),
            ..config(GameKind::Erase, 8)
        };
        let (mut s, _) = Session::create("x".into(), cfg).unwrap();
        s.submit(0, None).unwrap();
        s.submit(1, None).unwrap();
        assert_eq!(s.status(), Status::Finished);
        assert_eq!(s.export().moves.len(), 4);
    }
}
