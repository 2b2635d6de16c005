//! Words over a finite alphabet, suffix-repetition detection and the erase rule.
//!
//! A repetition of size `h` is a factor `xx` with `|x| = h`. Both games only
//! ever append to the end of the word, so the only repetitions that can appear
//! after a move are suffixes of the new word. [`GameSequence`] indexes the
//! positions of every symbol pair so that a suffix scan only visits the
//! half-lengths `h` whose block ends with the same two symbols as the word.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A letter of the alphabet `{0, .., C-1}`.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(u32);

impl Symbol {
    pub const fn new(value: u32) -> Self {
        Symbol(value)
    }

    pub const fn value(self) -> u32 {
        self.0
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for Symbol {
    fn from(v: u32) -> Self {
        Symbol(v)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A repetition `x_1..x_h x_1..x_h` ending at the last position of a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepetitionReport {
    /// Half-length `h` of the repeated block.
    pub size: usize,
    /// 0-based index where the first copy of the block starts.
    pub start_index: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Scan {
    Smallest,
    Largest,
}

/// The word built during a game.
#[derive(Clone)]
pub struct GameSequence {
    alphabet_size: u32,
    symbols: Vec<Symbol>,
    // positions[c] lists, in increasing order, every index holding symbol c.
    positions: Vec<Vec<u32>>,
    // pairs[a * C + b] lists every index i with w[i-1] = a and w[i] = b;
    // left empty (and unused) for large alphabets
    pairs: Vec<Vec<u32>>,
    // prefix_hash[i]: FNV-1a of the first i + 1 symbols (little-endian u32s)
    prefix_hash: Vec<u64>,
}

const MAX_PAIR_INDEXED_ALPHABET: u32 = 256;

const FNV_BASIS: u64 = 0xcbf2_9ce4_8422_2325;

fn fnv1a(mut h: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

impl GameSequence {
    pub fn new(alphabet_size: u32) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::Config("alphabet size must be at least 1".into()));
        }
        Ok(Self::empty_like(alphabet_size))
    }

    fn empty_like(alphabet_size: u32) -> Self {
        let pair_slots = if alphabet_size <= MAX_PAIR_INDEXED_ALPHABET {
            (alphabet_size * alphabet_size) as usize
        } else {
            0
        };
        GameSequence {
            alphabet_size,
            symbols: Vec::new(),
            positions: vec![Vec::new(); alphabet_size as usize],
            pairs: vec![Vec::new(); pair_slots],
            prefix_hash: Vec::new(),
        }
    }

    /// Builds a word from raw values, checking every value against the alphabet.
    pub fn from_values<I>(alphabet_size: u32, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = u32>,
    {
        let mut seq = Self::new(alphabet_size)?;
        for v in values {
            let s = seq.check(Symbol(v))?;
            seq.push(s);
        }
        Ok(seq)
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn values(&self) -> impl Iterator<Item = u32> + '_ {
        self.symbols.iter().map(|s| s.0)
    }

    pub fn last(&self) -> Option<Symbol> {
        self.symbols.last().copied()
    }

    /// The symbol `k` places from the end (`nth_from_end(1)` is the last one).
    pub fn nth_from_end(&self, k: usize) -> Option<Symbol> {
        if k == 0 || k > self.symbols.len() {
            None
        } else {
            Some(self.symbols[self.symbols.len() - k])
        }
    }

    pub fn check(&self, s: Symbol) -> Result<Symbol> {
        if s.0 < self.alphabet_size {
            Ok(s)
        } else {
            Err(Error::SymbolOutOfRange {
                value: s.0,
                alphabet_size: self.alphabet_size,
            })
        }
    }

    /// Smallest `h >= min_size` such that the word ends with a repetition of size `h`.
    pub fn find_suffix_repetition(&self, min_size: usize) -> Option<RepetitionReport> {
        let last = self.last()?;
        self.scan(self.len() - 1, last, min_size, Scan::Smallest)
    }

    /// The repetition [`Self::append_and_reduce`] would erase if `s` were appended.
    pub fn repetition_if_appended(&self, s: Symbol, min_size: usize) -> Option<RepetitionReport> {
        if s.0 >= self.alphabet_size {
            return None;
        }
        self.scan(self.len(), s, min_size, Scan::Smallest)
    }

    /// Largest suffix repetition (of any size) that appending `s` would create.
    pub fn largest_repetition_if_appended(&self, s: Symbol) -> Option<RepetitionReport> {
        if s.0 >= self.alphabet_size {
            return None;
        }
        self.scan(self.len(), s, 1, Scan::Largest)
    }

    /// Appends `s` and, if the result ends with a repetition of size at least
    /// `min_size`, erases the second copy of the smallest such block.
    ///
    /// Returns the erased repetition, if any. The erased word is a prefix of
    /// the word before the append, so no further repetition can remain.
    pub fn append_and_reduce(
        &mut self,
        s: Symbol,
        min_size: usize,
    ) -> Result<Option<RepetitionReport>> {
        let s = self.check(s)?;
        let old_len = self.len();
        let rep = self.scan(old_len, s, min_size.max(1), Scan::Smallest);
        self.push(s);
        if let Some(r) = rep {
            self.truncate(old_len + 1 - r.size);
            debug_assert!(self.len() <= old_len);
        }
        Ok(rep)
    }

    /// True iff no factor of the word is a repetition of size `>= min_size`.
    pub fn is_valid(&self, min_size: usize) -> bool {
        // every square ends somewhere, so checking suffixes while rebuilding suffices
        let mut w = Self::empty_like(self.alphabet_size);
        for &s in &self.symbols {
            if w.repetition_if_appended(s, min_size).is_some() {
                return false;
            }
            w.push(s);
        }
        true
    }

    /// Drops everything from index `len` on.
    pub fn truncate(&mut self, len: usize) {
        while self.symbols.len() > len {
            let s = self.symbols.pop().expect("non-empty");
            self.positions[s.index()].pop();
            if let (Some(&a), false) = (self.symbols.last(), self.pairs.is_empty()) {
                let slot = self.pair_slot(a, s);
                self.pairs[slot].pop();
            }
            self.prefix_hash.pop();
        }
    }

    /// FNV-1a over the symbols as little-endian `u32`s, kept up to date on
    /// every append and erase.
    pub fn fingerprint(&self) -> u64 {
        self.prefix_hash.last().copied().unwrap_or(FNV_BASIS)
    }

    fn push(&mut self, s: Symbol) {
        self.positions[s.index()].push(self.symbols.len() as u32);
        if let (Some(&a), false) = (self.symbols.last(), self.pairs.is_empty()) {
            let slot = self.pair_slot(a, s);
            self.pairs[slot].push(self.symbols.len() as u32);
        }
        self.prefix_hash.push(fnv1a(self.fingerprint(), &s.value().to_le_bytes()));
        self.symbols.push(s);
    }

    fn pair_slot(&self, a: Symbol, b: Symbol) -> usize {
        a.index() * self.alphabet_size as usize + b.index()
    }

    // Looks for repetitions at the end of `symbols[..prefix_len] + [c]`.
    fn scan(&self, prefix_len: usize, c: Symbol, min_size: usize, mode: Scan) -> Option<RepetitionReport> {
        if self.pairs.is_empty() || prefix_len == 0 {
            return self.scan_by_symbol(prefix_len, c, min_size, mode);
        }
        let min_size = min_size.max(1);
        let n = prefix_len + 1;
        let w = &self.symbols;
        let last = w[prefix_len - 1];
        let mut best = None;
        if min_size == 1 && last == c {
            let rep = RepetitionReport {
                size: 1,
                start_index: prefix_len - 1,
            };
            match mode {
                Scan::Smallest => return Some(rep),
                Scan::Largest => best = Some(rep),
            }
        }
        // h >= 2: the block ends with (last, c), so w[p-1] = last and w[p] = c for p = n-1-h
        for &p in self.pairs[self.pair_slot(last, c)].iter().rev() {
            let p = p as usize;
            if p >= prefix_len {
                continue;
            }
            let h = prefix_len - p;
            if 2 * h > n {
                break;
            }
            if h < min_size.max(2) {
                continue;
            }
            let first = n - 2 * h;
            let matches = (0..h - 2).rev().all(|k| w[first + k] == w[first + h + k]);
            if matches {
                let rep = RepetitionReport {
                    size: h,
                    start_index: first,
                };
                match mode {
                    Scan::Smallest => return Some(rep),
                    Scan::Largest => best = Some(rep),
                }
            }
        }
        best
    }

    fn scan_by_symbol(&self, prefix_len: usize, c: Symbol, min_size: usize, mode: Scan) -> Option<RepetitionReport> {
        let min_size = min_size.max(1);
        let n = prefix_len + 1;
        let w = &self.symbols;
        let mut best = None;
        for &p in self.positions[c.index()].iter().rev() {
            let p = p as usize;
            if p >= prefix_len {
                continue;
            }
            let h = prefix_len - p;
            if 2 * h > n {
                break;
            }
            if h < min_size {
                continue;
            }
            // u[n-2h+k] == u[n-h+k] for k < h-1; k = h-1 holds since w[p] == c.
            let first = n - 2 * h;
            let matches = (0..h - 1).rev().all(|k| w[first + k] == w[first + h + k]);
            if matches {
                let rep = RepetitionReport {
                    size: h,
                    start_index: first,
                };
                match mode {
                    Scan::Smallest => return Some(rep),
                    Scan::Largest => best = Some(rep),
                }
            }
        }
        best
    }
}

/// Slice-level validity scan: no factor `xx` with `|x| >= min_size`.
pub fn is_valid(symbols: &[Symbol], min_size: usize) -> bool {
    let min_size = min_size.max(1);
    for end in 1..=symbols.len() {
        let prefix = &symbols[..end];
        for h in min_size..=end / 2 {
            if prefix[end - 2 * h..end - h] == prefix[end - h..] {
                return false;
            }
        }
    }
    true
}

impl PartialEq for GameSequence {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet_size == other.alphabet_size && self.symbols == other.symbols
    }
}

impl Eq for GameSequence {}

impl fmt::Debug for GameSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GameSequence")
            .field("alphabet_size", &self.alphabet_size)
            .field("symbols", &self.symbols.iter().map(|s| s.0).collect::<Vec<_>>())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(c: u32, v: &[u32]) -> GameSequence {
        GameSequence::from_values(c, v.iter().copied()).unwrap()
    }

    // Direct O(n^2) oracle over every half-length.
    fn brute_suffix(v: &[u32], min: usize) -> Option<(usize, usize)> {
        let n = v.len();
        (min.max(1)..=n / 2).find(|&h| v[n - 2 * h..n - h] == v[n - h..]).map(|h| (h, n - 2 * h))
    }

    #[test]
    fn suffix_repetition_examples() {
        // a b c b c
        let r = word(3, &[0, 1, 2, 1, 2]).find_suffix_repetition(1).unwrap();
        assert_eq!((r.size, r.start_index), (2, 1));
        assert_eq!(word(3, &[]).find_suffix_repetition(1), None);
        let r = word(2, &[0, 0]).find_suffix_repetition(1).unwrap();
        assert_eq!((r.size, r.start_index), (1, 0));
        let r = word(2, &[0, 1, 0, 1, 0, 1]).find_suffix_repetition(2).unwrap();
        assert_eq!((r.size, r.start_index), (2, 2));
        assert_eq!(brute_suffix(&[0, 1, 0, 1, 0, 1], 2), Some((2, 2)));
    }

    #[test]
    fn append_examples() {
        let mut w = word(3, &[0, 1, 2, 1]);
        let r = w.append_and_reduce(Symbol(2), 1).unwrap().unwrap();
        assert_eq!(r.size, 2);
        assert_eq!(w, word(3, &[0, 1, 2]));

        let mut w = word(2, &[]);
        assert_eq!(w.append_and_reduce(Symbol(0), 1).unwrap(), None);
        assert_eq!(w, word(2, &[0]));

        let mut w = word(2, &[0]);
        assert_eq!(w.append_and_reduce(Symbol(0), 2).unwrap(), None);
        assert_eq!(w, word(2, &[0, 0]));
    }

    #[test]
    fn append_rejects_out_of_range() {
        let mut w = word(3, &[0]);
        assert_eq!(
            w.append_and_reduce(Symbol(3), 1),
            Err(Error::SymbolOutOfRange {
                value: 3,
                alphabet_size: 3
            })
        );
        assert_eq!(w.len(), 1);
        assert!(GameSequence::from_values(2, [0, 2]).is_err());
        assert!(GameSequence::new(0).is_err());
    }

    #[test]
    fn validity_examples() {
        assert!(word(3, &[0, 1, 2, 0, 1]).is_valid(1));
        assert!(!word(3, &[0, 1, 0, 1, 2]).is_valid(2));
        assert!(word(2, &[0, 0, 1]).is_valid(2));
        assert!(!word(2, &[0, 0, 1]).is_valid(1));
    }

    #[test]
    fn largest_and_smallest_differ() {
        // appending 0 closes 00; appending 1 closes 001 001
        let w = word(2, &[1, 0, 0, 1, 0, 0]);
        let small = w.repetition_if_appended(Symbol(0), 1).unwrap();
        assert_eq!(small.size, 1);
        let big = w.largest_repetition_if_appended(Symbol(1)).unwrap();
        assert_eq!(big.size, 3);
        assert_eq!(big.start_index, 1);
    }

    #[test]
    fn truncate_keeps_index_consistent() {
        let mut w = word(3, &[0, 1, 2, 0, 1]);
        w.truncate(2);
        assert_eq!(w, word(3, &[0, 1]));
        // index must no longer see the dropped 0 at position 3
        assert_eq!(w.repetition_if_appended(Symbol(0), 1), None);
        assert_eq!(w.repetition_if_appended(Symbol(1), 1).unwrap().size, 1);
        assert_eq!(w.fingerprint(), word(3, &[0, 1]).fingerprint());
        assert_ne!(w.fingerprint(), word(3, &[1, 0]).fingerprint());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn scan_matches_brute_force(v in proptest::collection::vec(0u32..3, 0..40), min in 1usize..4) {
                let w = word(3, &v);
                let got = w.find_suffix_repetition(min).map(|r| (r.size, r.start_index));
                prop_assert_eq!(got, brute_suffix(&v, min));
            }

            #[test]
            fn unindexed_scan_matches_brute_force(v in proptest::collection::vec(0u32..3, 0..40), min in 1usize..4) {
                let w = GameSequence::from_values(1000, v.iter().copied()).unwrap();
                let got = w.find_suffix_repetition(min).map(|r| (r.size, r.start_index));
                prop_assert_eq!(got, brute_suffix(&v, min));
            }

            #[test]
            fn reduction_preserves_validity(v in proptest::collection::vec(0u32..4, 0..80), min in 1usize..3) {
                let mut w = GameSequence::new(4).unwrap();
                for x in v {
                    let before = w.len();
                    let rep = w.append_and_reduce(Symbol(x), min).unwrap();
                    let erased = rep.map_or(0, |r| r.size);
                    prop_assert_eq!(w.len(), before + 1 - erased);
                    prop_assert!(is_valid(w.symbols(), min));
                }
            }

            #[test]
            fn indexed_validity_matches_slice_scan(v in proptest::collection::vec(0u32..3, 0..40), min in 1usize..4) {
                let w = word(3, &v);
                prop_assert_eq!(w.is_valid(min), is_valid(w.symbols(), min));
            }

            #[test]
            fn largest_is_maximal(v in proptest::collection::vec(0u32..3, 0..30), c in 0u32..3) {
                let w = word(3, &v);
                let mut u = v.clone();
                u.push(c);
                let n = u.len();
                let all: Vec<usize> = (1..=n / 2).filter(|&h| u[n - 2 * h..n - h] == u[n - h..]).collect();
                prop_assert_eq!(w.largest_repetition_if_appended(Symbol(c)).map(|r| r.size), all.last().copied());
                prop_assert_eq!(w.repetition_if_appended(Symbol(c), 1).map(|r| r.size), all.first().copied());
            }
        }
    }
}
