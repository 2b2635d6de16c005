//! Counting game walks and typed search walks.
//!
//! A walk is a sequence of integer steps whose prefix sums stay `>= 1` and
//! whose total is the target (1 for the walks the generating functions
//! count). Up-steps are always `+1`; the allowed down-steps and their
//! multiplicities are given by a [`WalkSpec`].

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Weighted step set of a walk family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkSpec {
    pub name: &'static str,
    /// Down-steps of magnitude `k` with their own weight, e.g. `(1, 1)` for a plain `-1`.
    pub explicit_drops: Vec<(u64, u32)>,
    /// Every drop of magnitude `>= tail_from` is allowed with weight `tail_weight`.
    pub tail_from: u64,
    pub tail_weight: u32,
    /// Lowest allowed prefix sum.
    pub floor: i64,
    pub target: i64,
}

impl WalkSpec {
    /// Game walks: steps `1, -3, -4, ...`, each with weight 1.
    pub fn erase() -> Self {
        WalkSpec {
            name: "erase",
            explicit_drops: Vec::new(),
            tail_from: 3,
            tail_weight: 1,
            floor: 1,
            target: 1,
        }
    }

    /// Typed search walks: `1` and `-1` untyped, `-2, -3, ...` with 4 types each.
    pub fn search() -> Self {
        WalkSpec {
            name: "search",
            explicit_drops: vec![(1, 1)],
            tail_from: 2,
            tail_weight: 4,
            floor: 1,
            target: 1,
        }
    }

    pub fn with_target(mut self, target: i64) -> Self {
        self.target = target;
        self
    }

    /// Multiplicity of a step; 0 when the step is not allowed.
    pub fn weight(&self, step: i64) -> u32 {
        match step {
            1 => 1,
            s if s >= 0 => 0,
            s => {
                let k = s.unsigned_abs();
                if let Some(&(_, w)) = self.explicit_drops.iter().find(|(m, _)| *m == k) {
                    w
                } else if k >= self.tail_from {
                    self.tail_weight
                } else {
                    0
                }
            }
        }
    }
}

/// `counts[m - 1] = T_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusTable {
    pub counts: Vec<BigUint>,
}

impl CensusTable {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `T_m` for `m >= 1`.
    pub fn get(&self, m: usize) -> Option<&BigUint> {
        m.checked_sub(1).and_then(|i| self.counts.get(i))
    }

    /// `T_m^(1/m)`, or 0 when `T_m = 0`.
    pub fn root(&self, m: usize) -> f64 {
        match self.get(m) {
            Some(t) if !t.is_zero() => libm::exp(ln_biguint(t) / m as f64),
            _ => 0.0,
        }
    }
}

/// Natural log of a positive big integer, from its top 64 bits.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return libm::log(x.to_u64().unwrap_or(0) as f64);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX) as f64;
    libm::log(top) + shift as f64 * core::f64::consts::LN_2
}

/// Largest length the brute-force enumerator accepts.
pub const BRUTE_FORCE_MAX_LENGTH: usize = 18;

/// Counts walks of length `m` by listing every one of them, typed drops
/// enumerated as separate walks.
pub fn count_walks_bruteforce(spec: &WalkSpec, m: usize) -> Result<BigUint> {
    if m > BRUTE_FORCE_MAX_LENGTH {
        return Err(Error::TooLarge(format!(
            "brute force is limited to length {BRUTE_FORCE_MAX_LENGTH}, got {m}; use the DP census"
        )));
    }
    fn go(spec: &WalkSpec, left: usize, sum: i64, count: &mut u64) {
        if left == 0 {
            if sum == spec.target {
                *count += 1;
            }
            return;
        }
        // a walk can climb at most `left` more
        if sum + (left as i64) < spec.target {
            return;
        }
        go(spec, left - 1, sum + 1, count);
        for k in 1..=(sum - spec.floor) {
            for _ in 0..spec.weight(-k) {
                go(spec, left - 1, sum - k, count);
            }
        }
    }
    if m == 0 {
        return Ok(BigUint::zero());
    }
    let mut count = 0u64;
    // the empty prefix sits at height 0, below the floor
    go(spec, m, 0, &mut count);
    Ok(BigUint::from(count))
}

// Weighted counts of prefixes by height, one row per length.
fn dp_rows(spec: &WalkSpec, m_max: usize, mut visit: impl FnMut(usize, &[BigUint])) {
    let floor = spec.floor.max(1) as usize;
    let mut row: Vec<BigUint> = vec![BigUint::one()];
    for len in 1..=m_max {
        let mut next = vec![BigUint::zero(); len + 1];
        // suffix[h] = sum of row[h..]
        let mut suffix = vec![BigUint::zero(); row.len() + 1];
        for h in (0..row.len()).rev() {
            suffix[h] = &suffix[h + 1] + &row[h];
        }
        for (h, slot) in next.iter_mut().enumerate().skip(floor) {
            if h >= 1 && h - 1 < row.len() {
                *slot += &row[h - 1];
            }
            for &(k, w) in &spec.explicit_drops {
                let from = h + k as usize;
                if from < row.len() && w > 0 {
                    *slot += &row[from] * w;
                }
            }
            let from = h + spec.tail_from as usize;
            if from < row.len() && spec.tail_weight > 0 {
                // explicit drops inside the tail were already counted above
                let mut tail = suffix[from].clone();
                for &(k, _) in &spec.explicit_drops {
                    let at = h + k as usize;
                    if k >= spec.tail_from && at < row.len() {
                        tail -= &row[at];
                    }
                }
                *slot += tail * spec.tail_weight;
            }
        }
        visit(len, &next);
        row = next;
    }
}

/// `T_1..T_{m_max}` by dynamic programming over (length, height).
pub fn count_walks_dp(spec: &WalkSpec, m_max: usize) -> CensusTable {
    let target = spec.target;
    let mut counts = Vec::with_capacity(m_max);
    dp_rows(spec, m_max, |_, row| {
        let t = usize::try_from(target)
            .ok()
            .and_then(|k| row.get(k).cloned())
            .unwrap_or_default();
        counts.push(t);
    });
    CensusTable { counts }
}

/// Walks of length `m` ending at total `k`.
pub fn count_walks_with_sum(spec: &WalkSpec, m: usize, k: i64) -> BigUint {
    count_walks_dp(&spec.clone().with_target(k), m)
        .get(m)
        .cloned()
        .unwrap_or_default()
}

/// `T_1..T_{m_max}` from the last-step decomposition: a walk of length
/// `m > 1` ending with drop `-k` splits uniquely into `k + 1` consecutive
/// walks of total length `m - 1`.
///
/// Only valid for target 1.
pub fn count_walks_by_decomposition(spec: &WalkSpec, m_max: usize) -> CensusTable {
    // powers[j][n]: ordered j-tuples of walks with total length n (powers[0] unused)
    let mut powers: Vec<Vec<BigUint>> = vec![vec![BigUint::zero(); m_max + 1]; m_max + 1];
    let mut t = vec![BigUint::zero(); m_max + 1];
    for m in 1..=m_max {
        let n = m - 1;
        // fill powers[j][n] for j >= 2 from entries shorter than m
        for j in 2..=n {
            let mut acc = BigUint::zero();
            for i in 1..=n.saturating_sub(j - 1) {
                if !t[i].is_zero() && !powers[j - 1][n - i].is_zero() {
                    acc += &t[i] * &powers[j - 1][n - i];
                }
            }
            powers[j][n] = acc;
        }
        let mut tm = if m == 1 { BigUint::one() } else { BigUint::zero() };
        for j in 2..=n {
            let w = spec.weight(1 - j as i64);
            if w > 0 {
                tm += &powers[j][n] * w;
            }
        }
        t[m] = tm.clone();
        powers[1][m] = tm;
    }
    CensusTable {
        counts: t.into_iter().skip(1).collect(),
    }
}
