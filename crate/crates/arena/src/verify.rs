//! The verification suites behind `verify`: each returns one [`Check`].

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use anyhow::anyhow;
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};
use thue_arena_core::census::{
    count_walks_bruteforce, count_walks_by_decomposition, count_walks_dp, WalkSpec,
};
use thue_arena_core::gf::{self, Bound, Equation};
use thue_arena_core::strategy::ChoiceSource;
use thue_arena_core::{
    decode_erase_log, decode_search_log, encode_erase_log, encode_search_log, BenStrategy,
    GameKind, GameRun, Symbol,
};
use thue_arena_core::engine::{play_erase_game_with, simulate_nonrep_search_with};

use crate::batch::{scan_run, RunSpec};
use crate::formats::{discriminant_report, LogJson};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

impl Check {
    fn new(name: &str, passed: bool, detail: Value) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", if self.passed { "PASS" } else { "FAIL" }, self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Roundtrip,
    Invariants,
    Census,
    Gf,
    All,
}

impl FromStr for Which {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        Ok(match s {
            "roundtrip" => Which::Roundtrip,
            "invariants" => Which::Invariants,
            "census" => Which::Census,
            "gf" => Which::Gf,
            "all" => Which::All,
            _ => return Err(anyhow!("unknown check set {s:?}")),
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub erase_symbols: u32,
    pub nonrep_symbols: u32,
    /// Total moves per erase game.
    pub moves: usize,
    /// Ann draws per nonrep search.
    pub ann_budget: usize,
    pub invariant_runs: usize,
    pub roundtrip_runs: usize,
    pub play_runs: usize,
    /// Census lengths checked three ways.
    pub max_length: usize,
    /// DP length for the growth-rate estimate.
    pub growth_length: usize,
    pub series_order: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            erase_symbols: 8,
            nonrep_symbols: 6,
            moves: 2000,
            ann_budget: 1000,
            invariant_runs: 10_000,
            roundtrip_runs: 1000,
            play_runs: 100,
            max_length: 16,
            growth_length: 400,
            series_order: 40,
        }
    }
}

impl VerifyConfig {
    fn spec(&self, game: GameKind, ben: BenStrategy) -> RunSpec {
        match game {
            GameKind::Erase => RunSpec {
                game,
                symbols: self.erase_symbols,
                budget: self.moves,
                ben,
                seed: self.seed,
            },
            GameKind::Nonrep => RunSpec {
                game,
                symbols: self.nonrep_symbols,
                budget: self.ann_budget,
                ben,
                seed: self.seed,
            },
        }
    }
}

pub fn run_checks(which: Which, cfg: &VerifyConfig) -> Vec<Check> {
    let mut out = Vec::new();
    if matches!(which, Which::Invariants | Which::All) {
        out.push(invariants(GameKind::Erase, cfg));
        out.push(invariants(GameKind::Nonrep, cfg));
    }
    if matches!(which, Which::Roundtrip | Which::All) {
        out.push(roundtrip(cfg));
        out.push(injectivity());
    }
    if matches!(which, Which::Census | Which::All) {
        out.push(census(cfg.max_length));
        out.push(growth(cfg.growth_length));
    }
    if matches!(which, Which::Gf | Which::All) {
        out.push(generating_functions(cfg.series_order));
    }
    if matches!(which, Which::Invariants | Which::All) {
        out.push(growth_of_play(cfg));
    }
    out
}

/// Every run of every Ben is scanned; the check passes iff nothing is flagged.
pub fn invariants(game: GameKind, cfg: &VerifyConfig) -> Check {
    let mut per_ben = Vec::new();
    let mut passed = true;
    for ben in BenStrategy::ALL {
        let spec = cfg.spec(game, ben);
        let mut violations = 0usize;
        let mut first = None;
        let mut total_len = 0usize;
        for i in 0..cfg.invariant_runs {
            match spec.play(i) {
                Ok(run) => {
                    total_len += run.final_word.len();
                    let v = scan_run(&run);
                    if first.is_none() && !v.is_empty() {
                        first = Some(format!("run {i}: {}", v[0]));
                    }
                    violations += v.len();
                }
                Err(e) => {
                    violations += 1;
                    first.get_or_insert(format!("run {i}: {e}"));
                }
            }
        }
        passed &= violations == 0;
        per_ben.push(json!({
            "ben": ben.name(),
            "runs": cfg.invariant_runs,
            "violations": violations,
            "first_violation": first,
            "mean_final_length": total_len as f64 / cfg.invariant_runs.max(1) as f64,
        }));
    }
    Check::new(&format!("invariants/{}", game.name()), passed, json!(per_ben))
}

fn roundtrip_one(run: &GameRun, ben: BenStrategy) -> Result<(), String> {
    let mut fresh = ben;
    let decoded = match run.config.kind {
        GameKind::Erase => {
            let log = encode_erase_log(run).map_err(|e| e.to_string())?;
            decode_erase_log(&log, &mut fresh)
        }
        GameKind::Nonrep => {
            let log = encode_search_log(run).map_err(|e| e.to_string())?;
            decode_search_log(&log, &mut fresh)
        }
    }
    .map_err(|e| e.to_string())?;
    if decoded == run.ann_choices {
        Ok(())
    } else {
        Err("decoded choices differ".to_string())
    }
}

/// `decode(encode(run), ben) == run.ann_choices` for seeded batches.
pub fn roundtrip(cfg: &VerifyConfig) -> Check {
    let mut rows = Vec::new();
    let mut passed = true;
    for game in [GameKind::Erase, GameKind::Nonrep] {
        for ben in BenStrategy::ALL {
            let spec = cfg.spec(game, ben);
            let mut failures = 0usize;
            let mut first = None;
            for i in 0..cfg.roundtrip_runs {
                let res = spec.play(i).map_err(|e| e.to_string()).and_then(|run| roundtrip_one(&run, ben));
                if let Err(e) = res {
                    failures += 1;
                    first.get_or_insert(format!("run {i}: {e}"));
                }
            }
            passed &= failures == 0;
            rows.push(json!({
                "game": game.name(),
                "ben": ben.name(),
                "runs": cfg.roundtrip_runs,
                "failures": failures,
                "first_failure": first,
            }));
        }
    }
    Check::new("roundtrip", passed, json!(rows))
}

/// Ann's chooser for enumeration: candidate `indices[k]` at her `k`-th draw,
/// optionally restricted to symbols below `limit`.
struct Enumerated {
    indices: Vec<usize>,
    next: usize,
    widths: Vec<usize>,
    limit: Option<u32>,
}

impl ChoiceSource for Enumerated {
    fn pick(&mut self, candidates: &[Symbol]) -> Symbol {
        let allowed: Vec<Symbol> = match self.limit {
            Some(l) => candidates.iter().copied().filter(|s| s.value() < l).collect(),
            None => candidates.to_vec(),
        };
        self.widths.push(allowed.len());
        let i = self.indices.get(self.next).copied().unwrap_or(0);
        self.next += 1;
        allowed[i]
    }
}

/// Result of enumerating every Ann choice sequence for one (game, Ben, M).
#[derive(Debug, Clone, Serialize)]
pub struct Enumeration {
    pub game: String,
    pub ben: String,
    pub ann_draws: usize,
    pub sequences: usize,
    pub distinct_logs: usize,
    pub decode_failures: usize,
}

impl Enumeration {
    pub fn injective(&self) -> bool {
        self.sequences == self.distinct_logs && self.decode_failures == 0
    }
}

/// Plays every Ann choice sequence with `ann_draws` draws and collects the logs.
pub fn enumerate_choices(
    game: GameKind,
    symbols: u32,
    limit: Option<u32>,
    ann_draws: usize,
    ben: BenStrategy,
) -> anyhow::Result<Enumeration> {
    let mut indices: Vec<usize> = Vec::new();
    let mut logs = HashSet::new();
    let mut sequences = 0usize;
    let mut decode_failures = 0usize;
    loop {
        let mut src = Enumerated {
            indices: indices.clone(),
            next: 0,
            widths: Vec::new(),
            limit,
        };
        let mut b = ben;
        let run = match game {
            GameKind::Erase => play_erase_game_with(symbols, 2 * ann_draws, &mut b, &mut src)?,
            GameKind::Nonrep => simulate_nonrep_search_with(symbols, ann_draws, &mut b, &mut src)?,
        };
        let key = match game {
            GameKind::Erase => serde_json::to_string(&LogJson::from(&encode_erase_log(&run)?))?,
            GameKind::Nonrep => serde_json::to_string(&LogJson::from(&encode_search_log(&run)?))?,
        };
        if roundtrip_one(&run, ben).is_err() {
            decode_failures += 1;
        }
        logs.insert(key);
        sequences += 1;

        let widths = src.widths;
        indices.resize(widths.len(), 0);
        match (0..widths.len()).rev().find(|&k| indices[k] + 1 < widths[k]) {
            Some(k) => {
                indices.truncate(k + 1);
                indices[k] += 1;
            }
            None => break,
        }
    }
    Ok(Enumeration {
        game: game.name().to_string(),
        ben: ben.name().to_string(),
        ann_draws,
        sequences,
        distinct_logs: logs.len(),
        decode_failures,
    })
}

/// Exhaustive injectivity: erase game with C = 8 and Ann limited to the first
/// four symbols for M <= 4; nonrep search with C = 6 for M <= 3.
pub fn injectivity() -> Check {
    let mut rows = Vec::new();
    let mut passed = true;
    let plans = [(GameKind::Erase, 8, Some(4), 4), (GameKind::Nonrep, 6, None, 3)];
    for (game, symbols, limit, max_draws) in plans {
        for ben in BenStrategy::ALL {
            for m in 1..=max_draws {
                match enumerate_choices(game, symbols, limit, m, ben) {
                    Ok(e) => {
                        passed &= e.injective();
                        rows.push(serde_json::to_value(&e).unwrap_or(Value::Null));
                    }
                    Err(err) => {
                        passed = false;
                        rows.push(json!({"game": game.name(), "ben": ben.name(), "ann_draws": m, "error": err.to_string()}));
                    }
                }
            }
        }
    }
    Check::new("injectivity", passed, json!(rows))
}

fn family(eq: Equation) -> WalkSpec {
    match eq {
        Equation::Erase => WalkSpec::erase(),
        Equation::Search => WalkSpec::search(),
    }
}

/// Brute force, DP, decomposition, and series coefficients agree for `m <= max_length`.
pub fn census(max_length: usize) -> Check {
    let mut rows = Vec::new();
    let mut passed = true;
    for eq in Equation::ALL {
        let spec = family(eq);
        let dp = count_walks_dp(&spec, max_length);
        let dec = count_walks_by_decomposition(&spec, max_length);
        let series = gf::solve_series(eq, max_length.max(1)).and_then(|s| s.integer_coefficients());
        let mut mismatches = Vec::new();
        for m in 1..=max_length {
            let brute = count_walks_bruteforce(&spec, m).ok();
            let d = dp.get(m).cloned();
            let c = dec.get(m).cloned();
            let s = series
                .as_ref()
                .ok()
                .and_then(|v| v.get(m).cloned())
                .and_then(|x| x.to_biguint());
            let agree = brute.is_some() && brute == d && d == c && c == s;
            if !agree {
                mismatches.push(json!({"m": m, "brute": brute.map(|x| x.to_string()), "dp": d.map(|x| x.to_string())}));
            }
        }
        let spots: &[(usize, u32)] = match eq {
            Equation::Erase => &[(5, 1), (6, 1)],
            Equation::Search => &[(3, 1), (4, 4)],
        };
        let spots_ok = spots
            .iter()
            .all(|&(m, v)| count_walks_bruteforce(&spec, m).ok() == Some(BigUint::from(v)));
        passed &= mismatches.is_empty() && spots_ok;
        rows.push(json!({
            "family": eq.name(),
            "max_length": max_length,
            "counts": dp.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "mismatches": mismatches,
            "spot_values_ok": spots_ok,
        }));
    }
    Check::new("census", passed, json!(rows))
}

/// Tail growth of the DP tables against the reciprocal reference roots, 2% tolerance.
pub fn growth(m_max: usize) -> Check {
    let mut rows = Vec::new();
    let mut passed = true;
    for eq in Equation::ALL {
        let table = count_walks_dp(&family(eq), m_max);
        let target = 1.0 / gf::reference_root(eq);
        match gf::growth_rate_estimate(&table) {
            Ok(est) => {
                let rel = (est - target).abs() / target;
                passed &= rel <= 0.02;
                rows.push(json!({"family": eq.name(), "m_max": m_max, "estimate": est, "target": target, "relative_error": rel}));
            }
            Err(e) => {
                passed = false;
                rows.push(json!({"family": eq.name(), "error": e.to_string()}));
            }
        }
    }
    Check::new("growth", passed, json!(rows))
}

/// Discriminants, their unique positive roots, the certified bounds, and `P(z, t(z)) = 0`.
pub fn generating_functions(order: usize) -> Check {
    let mut rows = Vec::new();
    let mut passed = true;
    for (eq, bound) in [(Equation::Erase, Bound::GtInvSqrt5), (Equation::Search, Bound::GtQuarter)] {
        let row = (|| -> anyhow::Result<Value> {
            let (report, disc) = discriminant_report(eq, 1e-9)?;
            let unique = report.roots.len() == 1 && report.roots[0].simple;
            let close = unique && (report.roots[0].approx - gf::reference_root(eq)).abs() <= 5e-4;
            let certified = gf::certify_bound(&disc, &bound)?;
            let series = gf::solve_series(eq, order)?;
            let vanishes = gf::substitute(&gf::defining_polynomial(eq), &series).is_zero();
            let census = count_walks_dp(&family(eq), order);
            let coeffs = series.integer_coefficients()?;
            let agrees = (1..=order).all(|m| coeffs[m].to_biguint().as_ref() == census.get(m));
            let ok = report.scalar.is_some() && unique && close && certified && vanishes && agrees;
            Ok(json!({
                "ok": ok,
                "report": report,
                "bound": bound.name(),
                "certified": certified,
                "series_order": order,
                "substitution_vanishes": vanishes,
                "series_matches_census": agrees,
            }))
        })();
        match row {
            Ok(v) => {
                passed &= v["ok"] == json!(true);
                rows.push(v);
            }
            Err(e) => {
                passed = false;
                rows.push(json!({"equation": eq.name(), "error": e.to_string()}));
            }
        }
    }
    Check::new("gf", passed, json!(rows))
}

/// Mean final length floors: erase above a tenth of the moves, nonrep above 100.
pub fn growth_of_play(cfg: &VerifyConfig) -> Check {
    let mut rows = Vec::new();
    let mut passed = true;
    for game in [GameKind::Erase, GameKind::Nonrep] {
        let floor = match game {
            GameKind::Erase => 0.1 * cfg.moves as f64,
            GameKind::Nonrep => 100.0,
        };
        for ben in BenStrategy::ALL {
            let spec = cfg.spec(game, ben);
            let mut total = 0usize;
            let mut errors = 0usize;
            for i in 0..cfg.play_runs {
                match spec.play(i) {
                    Ok(run) => total += run.final_word.len(),
                    Err(_) => errors += 1,
                }
            }
            let mean = total as f64 / cfg.play_runs.max(1) as f64;
            let ok = errors == 0 && mean > floor;
            passed &= ok;
            rows.push(json!({"game": game.name(), "ben": ben.name(), "runs": cfg.play_runs, "mean_final_length": mean, "floor": floor, "ok": ok}));
        }
    }
    Check::new("growth_of_play", passed, json!(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts_every_sequence() {
        // nonrep, one draw from the empty word: all six symbols
        let e = enumerate_choices(GameKind::Nonrep, 6, None, 1, BenStrategy::Mimic).unwrap();
        assert_eq!(e.sequences, 6);
        assert!(e.injective());
        // erase restricted to four symbols, one draw: four choices
        let e = enumerate_choices(GameKind::Erase, 8, Some(4), 1, BenStrategy::Cyclic).unwrap();
        assert_eq!(e.sequences, 4);
        assert!(e.injective());
    }

    #[test]
    fn small_suites_pass() {
        let cfg = VerifyConfig {
            invariant_runs: 3,
            roundtrip_runs: 3,
            play_runs: 3,
            moves: 200,
            ann_budget: 100,
            ..VerifyConfig::default()
        };
        let checks = run_checks(Which::Roundtrip, &cfg);
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        assert!(invariants(GameKind::Nonrep, &cfg).passed);
        assert!(census(10).passed);
        assert!(generating_functions(20).passed);
    }

    #[test]
    fn which_parses() {
        assert_eq!("gf".parse::<Which>().unwrap(), Which::Gf);
        assert!("everything".parse::<Which>().is_err());
    }
}
