//! Ann's randomized strategies, the deterministic Ben suite and the randomness contract.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{GameKind, MoveRecord};
use crate::error::{Error, Result};
use crate::sequence::{GameSequence, Symbol};

/// Anything that can resolve one of Ann's random choices.
///
/// Candidate lists are always non-empty and sorted ascending, so a source that
/// returns `candidates[i]` for a reproducible `i` yields reproducible games.
pub trait ChoiceSource {
    fn pick(&mut self, candidates: &[Symbol]) -> Symbol;
}

/// Seeded deterministic generator; one `uniform_pick` is one draw.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
    draws: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            draws: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn uniform_pick(&mut self, candidates: &[Symbol]) -> Option<Symbol> {
        if candidates.is_empty() {
            return None;
        }
        self.draws += 1;
        Some(candidates[self.rng.gen_range(0..candidates.len())])
    }
}

impl ChoiceSource for RandomSource {
    fn pick(&mut self, candidates: &[Symbol]) -> Symbol {
        self.uniform_pick(candidates).expect("candidate list is never empty")
    }
}

/// Replays a fixed list of candidate indices; used to enumerate every choice sequence.
#[derive(Debug, Clone, Default)]
pub struct IndexedChoices {
    indices: Vec<usize>,
    next: usize,
    /// Candidate-list sizes seen so far, in order.
    pub widths: Vec<usize>,
}

impl IndexedChoices {
    pub fn new(indices: Vec<usize>) -> Self {
        IndexedChoices {
            indices,
            next: 0,
            widths: Vec::new(),
        }
    }
}

impl ChoiceSource for IndexedChoices {
    fn pick(&mut self, candidates: &[Symbol]) -> Symbol {
        self.widths.push(candidates.len());
        let i = self.indices.get(self.next).copied().unwrap_or(0);
        self.next += 1;
        candidates[i.min(candidates.len() - 1)]
    }
}

/// Per-run seed derived from a batch seed, independent of execution order.
pub fn derive_seed(master_seed: u64, run_index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(run_index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn complement(alphabet_size: u32, excluded: &[Symbol]) -> Vec<Symbol> {
    (0..alphabet_size)
        .map(Symbol::new)
        .filter(|s| !excluded.contains(s))
        .collect()
}

/// The symbols Ann must avoid in the erase game: the last (up to) three.
pub fn ann_erase_exclusions(seq: &GameSequence) -> Vec<Symbol> {
    let mut out: Vec<Symbol> = seq.symbols().iter().rev().take(3).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Sorted candidate list for Ann in the erase game.
pub fn ann_erase_candidates(seq: &GameSequence) -> Result<Vec<Symbol>> {
    let candidates = complement(seq.alphabet_size(), &ann_erase_exclusions(seq));
    if candidates.is_empty() {
        return Err(Error::Config(format!(
            "no symbol of an alphabet of size {} differs from the last three",
            seq.alphabet_size()
        )));
    }
    Ok(candidates)
}

pub fn ann_erase_choice(seq: &GameSequence, src: &mut impl ChoiceSource) -> Result<Symbol> {
    let candidates = ann_erase_candidates(seq)?;
    Ok(src.pick(&candidates))
}

/// Ann's exclusion rules for the nonrepetitive game, evaluated on whatever
/// word is given. With `m - 1 = len`:
///
/// 1. exclude `s[m-2]`;
/// 2. if `s[m-1] = s[m-4]`, exclude `s[m-3]`;
/// 3. if exactly one symbol is excluded so far, exclude `s[m-4]`.
///
/// Rules that reach before the start of the word are skipped.
pub fn nonrep_exclusion_rules(seq: &GameSequence) -> Vec<Symbol> {
    // s[m-k] is the k-th symbol from the end
    let back = |k| seq.nth_from_end(k);
    let mut out: Vec<Symbol> = Vec::with_capacity(2);
    if let Some(s) = back(2) {
        out.push(s);
    }
    if let (Some(a), Some(b), Some(s)) = (back(1), back(4), back(3)) {
        if a == b && !out.contains(&s) {
            out.push(s);
        }
    }
    if out.len() == 1 {
        if let Some(s) = back(4) {
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    out.sort_unstable();
    out
}

/// [`nonrep_exclusion_rules`] restricted to Ann's turns (even word length).
pub fn ann_nonrep_exclusions(seq: &GameSequence) -> Result<Vec<Symbol>> {
    if !seq.len().is_multiple_of(2) {
        return Err(Error::Protocol(format!(
            "Ann moves only on even-length words, got length {}",
            seq.len()
        )));
    }
    Ok(nonrep_exclusion_rules(seq))
}

pub fn ann_nonrep_candidates(seq: &GameSequence) -> Result<Vec<Symbol>> {
    let candidates = complement(seq.alphabet_size(), &ann_nonrep_exclusions(seq)?);
    if candidates.is_empty() {
        return Err(Error::Config(format!(
            "every symbol of an alphabet of size {} is excluded",
            seq.alphabet_size()
        )));
    }
    Ok(candidates)
}

pub fn ann_nonrep_choice(seq: &GameSequence, src: &mut impl ChoiceSource) -> Result<Symbol> {
    let candidates = ann_nonrep_candidates(seq)?;
    Ok(src.pick(&candidates))
}

/// Ann's candidate list for the given game.
pub fn ann_candidates(kind: GameKind, seq: &GameSequence) -> Result<Vec<Symbol>> {
    match kind {
        GameKind::Erase => ann_erase_candidates(seq),
        GameKind::Nonrep => ann_nonrep_candidates(seq),
    }
}

/// What Ben gets to look at before choosing.
#[derive(Debug, Clone, Copy)]
pub struct BenView<'a> {
    pub kind: GameKind,
    /// Moves of the game so far. In the nonrepetitive search this is the
    /// branch that produced the current word, i.e. the real game's history.
    pub history: &'a [MoveRecord],
    pub seq: &'a GameSequence,
}

/// A player in Ben's seat.
pub trait Adversary {
    fn choose(&mut self, view: &BenView<'_>) -> Result<Symbol>;

    /// Label stored in run configurations.
    fn label(&self) -> String;
}

/// The built-in deterministic Ben strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BenStrategy {
    /// Copy the last symbol (0 on an empty word).
    Mimic,
    /// Number of moves so far, modulo `C`.
    Cyclic,
    /// Smallest symbol whose append creates the largest suffix repetition.
    GreedyRepeater,
    /// Smallest symbol outside Ann's current exclusion set.
    AntiAnn,
    /// Stable hash of (history length, word) reduced into `[0, C)`.
    HashDet,
}

impl BenStrategy {
    pub const ALL: [BenStrategy; 5] = [
        BenStrategy::Mimic,
        BenStrategy::Cyclic,
        BenStrategy::GreedyRepeater,
        BenStrategy::AntiAnn,
        BenStrategy::HashDet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenStrategy::Mimic => "mimic",
            BenStrategy::Cyclic => "cyclic",
            BenStrategy::GreedyRepeater => "greedy_repeater",
            BenStrategy::AntiAnn => "anti_ann",
            BenStrategy::HashDet => "hash_det",
        }
    }

    pub fn choose(self, kind: GameKind, history: &[MoveRecord], seq: &GameSequence) -> Symbol {
        let c = seq.alphabet_size();
        match self {
            BenStrategy::Mimic => seq.last().unwrap_or(Symbol::new(0)),
            BenStrategy::Cyclic => Symbol::new((history.len() as u64 % c as u64) as u32),
            BenStrategy::GreedyRepeater => {
                let mut best = (0usize, Symbol::new(0));
                for s in (0..c).map(Symbol::new) {
                    let size = seq.largest_repetition_if_appended(s).map_or(0, |r| r.size);
                    if size > best.0 {
                        best = (size, s);
                    }
                }
                best.1
            }
            BenStrategy::AntiAnn => {
                let excluded = match kind {
                    GameKind::Erase => ann_erase_exclusions(seq),
                    GameKind::Nonrep => nonrep_exclusion_rules(seq),
                };
                (0..c)
                    .map(Symbol::new)
                    .find(|s| !excluded.contains(s))
                    .unwrap_or(Symbol::new(0))
            }
            BenStrategy::HashDet => {
                let h = seq.fingerprint() ^ splitmix64(history.len() as u64);
                Symbol::new((splitmix64(h) % c as u64) as u32)
            }
        }
    }
}

impl Adversary for BenStrategy {
    fn choose(&mut self, view: &BenView<'_>) -> Result<Symbol> {
        Ok(BenStrategy::choose(*self, view.kind, view.history, view.seq))
    }

    fn label(&self) -> String {
        self.name().to_string()
    }
}

impl fmt::Display for BenStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenStrategy::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::UnknownToken(s.to_string()))
    }
}

/// Convenience wrapper matching the strategy-by-name entry point.
pub fn ben_choose(
    name: &str,
    kind: GameKind,
    history: &[MoveRecord],
    seq: &GameSequence,
) -> Result<Symbol> {
    Ok(name.parse::<BenStrategy>()?.choose(kind, history, seq))
}

/// Ben playing a fixed list of symbols, one per Ben move.
#[derive(Debug, Clone)]
pub struct ScriptedBen {
    symbols: Vec<Symbol>,
    next: usize,
    label: String,
}

impl ScriptedBen {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        ScriptedBen {
            symbols,
            next: 0,
            label: "scripted".to_string(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn remaining(&self) -> usize {
        self.symbols.len() - self.next
    }
}

impl Adversary for ScriptedBen {
    fn choose(&mut self, _view: &BenView<'_>) -> Result<Symbol> {
        let s = self
            .symbols
            .get(self.next)
            .copied()
            .ok_or_else(|| Error::Protocol("scripted Ben ran out of moves".to_string()))?;
        self.next += 1;
        Ok(s)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn word(c: u32, v: &[u32]) -> GameSequence {
        GameSequence::from_values(c, v.iter().copied()).unwrap()
    }

    fn syms(v: &[u32]) -> Vec<Symbol> {
        v.iter().copied().map(Symbol::new).collect()
    }

    #[test]
    fn erase_candidates() {
        assert_eq!(ann_erase_candidates(&word(8, &[])).unwrap(), syms(&[0, 1, 2, 3, 4, 5, 6, 7]));
        assert_eq!(ann_erase_candidates(&word(8, &[5, 6, 7])).unwrap(), syms(&[0, 1, 2, 3, 4]));
        assert_eq!(ann_erase_candidates(&word(8, &[1, 2, 1])).unwrap().len(), 6);
        assert!(matches!(ann_erase_candidates(&word(3, &[0, 1, 2])), Err(Error::Config(_))));
    }

    #[test]
    fn nonrep_exclusion_examples() {
        assert_eq!(ann_nonrep_exclusions(&word(6, &[0, 1, 2, 0])).unwrap(), syms(&[1, 2]));
        assert_eq!(ann_nonrep_exclusions(&word(6, &[0, 1, 2, 3])).unwrap(), syms(&[0, 2]));
        assert_eq!(ann_nonrep_exclusions(&word(6, &[])).unwrap(), syms(&[]));
        assert_eq!(ann_nonrep_exclusions(&word(6, &[3, 5])).unwrap(), syms(&[3]));
        assert!(matches!(ann_nonrep_exclusions(&word(6, &[1])), Err(Error::Protocol(_))));
    }

    #[test]
    fn nonrep_rule_three_may_leave_one_exclusion() {
        // s[m-2] = s[m-4] = 1, rule (ii) inactive
        assert_eq!(ann_nonrep_exclusions(&word(6, &[1, 2, 1, 3])).unwrap(), syms(&[1]));
    }

    #[test]
    fn nonrep_candidates() {
        assert_eq!(ann_nonrep_candidates(&word(6, &[])).unwrap(), syms(&[0, 1, 2, 3, 4, 5]));
        assert_eq!(ann_nonrep_candidates(&word(6, &[0, 1, 2, 0])).unwrap(), syms(&[0, 3, 4, 5]));
        assert_eq!(ann_nonrep_candidates(&word(6, &[0, 1, 2, 3])).unwrap(), syms(&[1, 3, 4, 5]));
        assert!(matches!(ann_nonrep_candidates(&word(2, &[0, 1, 1, 0])), Err(Error::Config(_))));
    }

    #[test]
    fn ben_examples() {
        let k = GameKind::Erase;
        assert_eq!(BenStrategy::Mimic.choose(k, &[], &word(6, &[4])), Symbol::new(4));
        assert_eq!(BenStrategy::Mimic.choose(k, &[], &word(6, &[])), Symbol::new(0));
        let history = vec![MoveRecord::default(); 3];
        assert_eq!(BenStrategy::Cyclic.choose(k, &history, &word(6, &[1])), Symbol::new(3));
        assert_eq!(ben_choose("cyclic", k, &history, &word(6, &[1])).unwrap(), Symbol::new(3));
        assert!(matches!(ben_choose("random", k, &history, &word(6, &[1])), Err(Error::UnknownToken(_))));
    }

    #[test]
    fn greedy_prefers_largest_repetition() {
        // appending 1 closes 0 1 0 1 (h=2); appending 0 closes only h=1
        let w = word(3, &[0, 1, 0]);
        assert_eq!(BenStrategy::GreedyRepeater.choose(GameKind::Nonrep, &[], &w), Symbol::new(1));
        // nothing repeats on an empty word: smallest symbol
        assert_eq!(BenStrategy::GreedyRepeater.choose(GameKind::Erase, &[], &word(3, &[])), Symbol::new(0));
    }

    #[test]
    fn anti_ann_avoids_exclusions() {
        assert_eq!(BenStrategy::AntiAnn.choose(GameKind::Erase, &[], &word(8, &[0, 2, 1])), Symbol::new(3));
        assert_eq!(BenStrategy::AntiAnn.choose(GameKind::Nonrep, &[], &word(6, &[0, 1, 2])), Symbol::new(0));
    }

    #[test]
    fn strategy_names_round_trip() {
        for b in BenStrategy::ALL {
            assert_eq!(b.name().parse::<BenStrategy>().unwrap(), b);
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let cands = syms(&[0, 1, 2, 3, 4]);
        let mut a = RandomSource::new(42);
        let mut b = RandomSource::new(42);
        let xs: Vec<_> = (0..64).map(|_| a.pick(&cands)).collect();
        let ys: Vec<_> = (0..64).map(|_| b.pick(&cands)).collect();
        assert_eq!(xs, ys);
        assert_eq!(a.draws(), 64);
        assert_ne!(derive_seed(7, 0), derive_seed(7, 1));
    }

    #[test]
    fn uniform_pick_is_roughly_uniform() {
        let cands = syms(&[0, 1, 2, 3, 4]);
        let mut rng = RandomSource::new(3);
        let mut counts = [0u32; 5];
        for _ in 0..50_000 {
            counts[rng.pick(&cands).index()] += 1;
        }
        for c in counts {
            // expectation 10_000, sd ~ 90
            assert!((9_500..10_500).contains(&c), "{counts:?}");
        }
    }

    #[test]
    fn rule_one_exclusion_blocks_size_two() {
        // appending s[m-2] and then s[m-1] closes a size-2 repetition
        let mut w = word(6, &[4, 0, 1, 2]);
        let e = ann_nonrep_exclusions(&w).unwrap();
        assert!(e.contains(&Symbol::new(1)));
        w.append_and_reduce(Symbol::new(1), 1).unwrap();
        let rep = w.repetition_if_appended(Symbol::new(2), 1).unwrap();
        assert!(rep.size <= 2);
    }
}
