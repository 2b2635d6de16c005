//! Seeded batches of games with a per-run invariant scan.

use std::collections::BTreeMap;

use serde::Serialize;
use thue_arena_core::engine::classify_transitions;
use thue_arena_core::strategy::derive_seed;
use thue_arena_core::{
    encode_erase_log, encode_search_log, extract_heights, play_erase_game, simulate_nonrep_search,
    BenStrategy, GameKind, GameRun, Mover,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSpec {
    pub game: GameKind,
    pub symbols: u32,
    /// Total moves (erase) or Ann draws (nonrep).
    pub budget: usize,
    pub ben: BenStrategy,
    pub seed: u64,
}

impl RunSpec {
    pub fn run_seed(&self, index: usize) -> u64 {
        derive_seed(self.seed, index as u64)
    }

    pub fn play(&self, index: usize) -> thue_arena_core::Result<GameRun> {
        let seed = self.run_seed(index);
        match self.game {
            GameKind::Erase => play_erase_game(self.symbols, self.budget, self.ben, seed),
            GameKind::Nonrep => simulate_nonrep_search(self.symbols, self.budget, self.ben, seed),
        }
    }
}

/// Every invariant the theory promises for a finished run; empty when all hold.
pub fn scan_run(run: &GameRun) -> Vec<String> {
    let mut out = Vec::new();
    match run.config.kind {
        GameKind::Erase => scan_erase(run, &mut out),
        GameKind::Nonrep => scan_nonrep(run, &mut out),
    }
    out
}

fn scan_erase(run: &GameRun, out: &mut Vec<String>) {
    for m in &run.moves {
        if matches!(m.repetition_size, 2 | 3) {
            out.push(format!("move {}: repetition of size {}", m.move_index, m.repetition_size));
        }
        if m.height_after == 0 {
            out.push(format!("move {}: empty word", m.move_index));
        }
    }
    let heights = extract_heights(run);
    let mut prev = 0i64;
    for (j, &h) in heights.iter().enumerate() {
        let d = h as i64 - prev;
        prev = h as i64;
        if !(d == 1 || d == 0 || d <= -3) {
            out.push(format!("difference {d} at move {}", j + 1));
        }
    }
    if run.moves.len() != run.config.budget {
        out.push(format!("{} moves, budget {}", run.moves.len(), run.config.budget));
    }
    match encode_erase_log(run) {
        Ok(log) => out.extend(log.violations(Some(run.moves.len())).iter().map(|v| format!("log: {v}"))),
        Err(e) => out.push(format!("encode: {e}")),
    }
}

fn scan_nonrep(run: &GameRun, out: &mut Vec<String>) {
    let mut ben_streak = 0;
    for m in &run.moves {
        if m.repetition_size != 0 && m.repetition_size < 5 {
            out.push(format!("move {}: backtrack of size {}", m.move_index, m.repetition_size));
        }
        if m.mover == Mover::Ben {
            ben_streak += 1;
            if ben_streak == 3 {
                out.push(format!("move {}: third Ben move in a row", m.move_index));
            }
        } else {
            ben_streak = 0;
        }
    }
    if let Err(e) = classify_transitions(run) {
        out.push(format!("transition: {e}"));
    }
    if run.ann_choices.len() != run.config.budget {
        out.push(format!("{} Ann draws, budget {}", run.ann_choices.len(), run.config.budget));
    }
    if !run.final_word.is_valid(2) {
        out.push("final word has a repetition".to_string());
    }
    match encode_search_log(run) {
        Ok(log) => out.extend(log.violations().iter().map(|v| format!("log: {v}"))),
        Err(e) => out.push(format!("encode: {e}")),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub index: usize,
    pub seed: u64,
    pub moves: usize,
    pub final_length: usize,
    /// Erased/backtracked repetition sizes and how often each occurred.
    pub repetition_sizes: BTreeMap<usize, usize>,
    pub violations: Vec<String>,
}

impl RunSummary {
    pub fn new(index: usize, run: &GameRun) -> Self {
        let mut repetition_sizes = BTreeMap::new();
        for m in run.moves.iter().filter(|m| m.repetition_size > 0) {
            *repetition_sizes.entry(m.repetition_size).or_insert(0) += 1;
        }
        RunSummary {
            index,
            seed: run.config.seed.unwrap_or_default(),
            moves: run.moves.len(),
            final_length: run.final_word.len(),
            repetition_sizes,
            violations: scan_run(run),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Aggregate {
    pub runs: usize,
    pub mean_final_length: f64,
    pub min_final_length: usize,
    pub max_final_length: usize,
    pub violations: usize,
    pub repetition_sizes: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatchReport {
    pub game: String,
    pub symbols: u32,
    pub budget: usize,
    pub ben: String,
    pub seed: u64,
    pub aggregate: Aggregate,
    pub runs: Vec<RunSummary>,
}

/// Plays runs `0..runs`; summaries come back in run-index order.
pub fn run_batch(spec: &RunSpec, runs: usize) -> thue_arena_core::Result<BatchReport> {
    let mut summaries = Vec::with_capacity(runs);
    for index in 0..runs {
        let run = spec.play(index)?;
        summaries.push(RunSummary::new(index, &run));
    }
    Ok(BatchReport {
        game: spec.game.name().to_string(),
        symbols: spec.symbols,
        budget: spec.budget,
        ben: spec.ben.name().to_string(),
        seed: spec.seed,
        aggregate: aggregate(&summaries),
        runs: summaries,
    })
}

pub fn aggregate(runs: &[RunSummary]) -> Aggregate {
    if runs.is_empty() {
        return Aggregate::default();
    }
    let mut agg = Aggregate {
        runs: runs.len(),
        min_final_length: usize::MAX,
        ..Aggregate::default()
    };
    let mut total = 0usize;
    for r in runs {
        total += r.final_length;
        agg.min_final_length = agg.min_final_length.min(r.final_length);
        agg.max_final_length = agg.max_final_length.max(r.final_length);
        agg.violations += r.violations.len();
        for (&size, &n) in &r.repetition_sizes {
            *agg.repetition_sizes.entry(size).or_insert(0) += n;
        }
    }
    agg.mean_final_length = total as f64 / runs.len() as f64;
    agg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_batch() {
        let spec = RunSpec {
            game: GameKind::Erase,
            symbols: 8,
            budget: 10,
            ben: BenStrategy::Mimic,
            seed: 1,
        };
        let report = run_batch(&spec, 0).unwrap();
        assert!(report.runs.is_empty());
        assert_eq!(report.aggregate.runs, 0);
    }

    #[test]
    fn deterministic_and_clean() {
        let spec = RunSpec {
            game: GameKind::Nonrep,
            symbols: 6,
            budget: 200,
            ben: BenStrategy::GreedyRepeater,
            seed: 7,
        };
        let a = run_batch(&spec, 5).unwrap();
        let b = run_batch(&spec, 5).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.aggregate.violations, 0);
        assert!(a.aggregate.repetition_sizes.keys().all(|&s| s >= 5));
    }

    #[test]
    fn scan_flags_bad_run() {
        let spec = RunSpec {
            game: GameKind::Erase,
            symbols: 8,
            budget: 40,
            ben: BenStrategy::Cyclic,
            seed: 3,
        };
        let mut run = spec.play(0).unwrap();
        assert!(scan_run(&run).is_empty());
        run.moves[5].repetition_size = 2;
        assert!(!scan_run(&run).is_empty());
    }
}
