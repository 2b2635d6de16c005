//! JSON and CSV shapes for words, runs, logs, census tables, and roots.

use std::collections::BTreeMap;
use std::io::Write;

use anyhow::{anyhow, Context};
use serde::{Deserialize, Serialize};
use thue_arena_core::census::CensusTable;
use thue_arena_core::gf::{self, roots::to_f64, Equation, IntPolynomial, RootInterval};
use thue_arena_core::{
    GameConfig, GameKind, GameRun, GameSequence, MoveRecord, Mover, ReducedGameLog, Symbol,
    TransitionType, TypedSearchLog,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordJson {
    pub alphabet_size: u32,
    pub symbols: Vec<u32>,
}

impl From<&GameSequence> for WordJson {
    fn from(w: &GameSequence) -> Self {
        WordJson {
            alphabet_size: w.alphabet_size(),
            symbols: w.values().collect(),
        }
    }
}

impl TryFrom<&WordJson> for GameSequence {
    type Error = thue_arena_core::Error;

    fn try_from(w: &WordJson) -> Result<Self, Self::Error> {
        GameSequence::from_values(w.alphabet_size, w.symbols.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub game: String,
    pub symbols: u32,
    /// Total moves (erase) or Ann draws (nonrep).
    pub budget: usize,
    pub ben: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveJson {
    pub i: usize,
    pub mover: String,
    pub sym: u32,
    pub rep: usize,
    pub h: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRunJson {
    pub config: ConfigJson,
    pub moves: Vec<MoveJson>,
    pub ann_choices: Vec<u32>,
    #[serde(rename = "final")]
    pub final_word: Vec<u32>,
}

impl From<&GameRun> for GameRunJson {
    fn from(run: &GameRun) -> Self {
        let c = &run.config;
        GameRunJson {
            config: ConfigJson {
                game: c.kind.name().to_string(),
                symbols: c.alphabet_size,
                budget: c.budget,
                ben: c.ben.clone(),
                seed: c.seed,
            },
            moves: run
                .moves
                .iter()
                .map(|m| MoveJson {
                    i: m.move_index,
                    mover: m.mover.tag().to_string(),
                    sym: m.symbol.value(),
                    rep: m.repetition_size,
                    h: m.height_after,
                })
                .collect(),
            ann_choices: run.ann_choices.iter().map(|s| s.value()).collect(),
            final_word: run.final_word.values().collect(),
        }
    }
}

impl TryFrom<&GameRunJson> for GameRun {
    type Error = anyhow::Error;

    fn try_from(j: &GameRunJson) -> anyhow::Result<Self> {
        let kind: GameKind = j.config.game.parse()?;
        let moves = j
            .moves
            .iter()
            .map(|m| {
                let mover = match m.mover.as_str() {
                    "A" => Mover::Ann,
                    "B" => Mover::Ben,
                    other => return Err(anyhow!("unknown mover {other:?} at move {}", m.i)),
                };
                Ok(MoveRecord {
                    move_index: m.i,
                    mover,
                    symbol: Symbol::new(m.sym),
                    repetition_size: m.rep,
                    height_after: m.h,
                })
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        Ok(GameRun {
            config: GameConfig {
                kind,
                alphabet_size: j.config.symbols,
                budget: j.config.budget,
                ben: j.config.ben.clone(),
                seed: j.config.seed,
            },
            moves,
            ann_choices: j.ann_choices.iter().map(|&v| Symbol::new(v)).collect(),
            final_word: GameSequence::from_values(j.config.symbols, j.final_word.iter().copied())?,
        })
    }
}

/// `{"d":[...],"types":{"j":t},"final":[...]}`; erase logs have no `types`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogJson {
    pub d: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub types: Option<BTreeMap<String, u8>>,
    #[serde(rename = "final")]
    pub final_word: Vec<u32>,
}

impl From<&ReducedGameLog> for LogJson {
    fn from(log: &ReducedGameLog) -> Self {
        LogJson {
            d: log.differences.clone(),
            types: None,
            final_word: log.final_word.values().collect(),
        }
    }
}

impl From<&TypedSearchLog> for LogJson {
    fn from(log: &TypedSearchLog) -> Self {
        LogJson {
            d: log.differences.clone(),
            types: Some(log.types.iter().map(|(j, t)| (j.to_string(), t.code())).collect()),
            final_word: log.final_word.values().collect(),
        }
    }
}

impl LogJson {
    /// The final word does not record the alphabet, so the caller supplies it.
    pub fn to_erase_log(&self, alphabet_size: u32) -> anyhow::Result<ReducedGameLog> {
        if self.types.is_some() {
            return Err(anyhow!("erase logs carry no types"));
        }
        Ok(ReducedGameLog {
            differences: self.d.clone(),
            final_word: GameSequence::from_values(alphabet_size, self.final_word.iter().copied())?,
        })
    }

    pub fn to_search_log(&self, alphabet_size: u32) -> anyhow::Result<TypedSearchLog> {
        let mut types = BTreeMap::new();
        for (j, &t) in self.types.iter().flatten() {
            let j: usize = j.parse().with_context(|| format!("type key {j:?}"))?;
            let t = TransitionType::from_code(t).ok_or_else(|| anyhow!("unknown type {t}"))?;
            types.insert(j, t);
        }
        Ok(TypedSearchLog {
            differences: self.d.clone(),
            types,
            final_word: GameSequence::from_values(alphabet_size, self.final_word.iter().copied())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub m: usize,
    /// Decimal string; counts outgrow every fixed-width integer.
    #[serde(rename = "T_m")]
    pub count: String,
    #[serde(rename = "T_m^(1/m)")]
    pub root: f64,
}

pub fn census_rows(table: &CensusTable) -> Vec<CensusRow> {
    (1..=table.len())
        .map(|m| CensusRow {
            m,
            count: table.get(m).expect("in range").to_string(),
            root: table.root(m),
        })
        .collect()
}

pub fn write_census_csv<W: Write>(table: &CensusTable, out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in census_rows(table) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootJson {
    /// Exact isolating interval `(lo, hi]` as rational strings.
    pub lo: String,
    pub hi: String,
    pub approx: f64,
    pub simple: bool,
}

impl From<&RootInterval> for RootJson {
    fn from(r: &RootInterval) -> Self {
        RootJson {
            lo: r.lo.to_string(),
            hi: r.hi.to_string(),
            approx: r.approx,
            simple: r.simple,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantJson {
    pub equation: String,
    pub defining_polynomial: String,
    pub discriminant: String,
    /// Power of `z` split off before comparing with the reference polynomial.
    pub z_power: usize,
    pub reference: String,
    /// `discriminant / z^z_power = scalar * reference`, when such a scalar exists.
    pub scalar: Option<String>,
    pub roots: Vec<RootJson>,
    pub reciprocal_root: Option<f64>,
}

/// Everything reported about one equation's discriminant.
pub fn discriminant_report(eq: Equation, eps: f64) -> anyhow::Result<(DiscriminantJson, IntPolynomial)> {
    let p = gf::defining_polynomial(eq);
    let d = gf::discriminant_wrt_t(&p)?;
    let (z_power, rest) = d.split_monomial();
    let reference = gf::reference_discriminant(eq);
    let scalar = rest.scalar_ratio(&reference).map(|s| s.to_string());
    let roots = gf::isolate_positive_roots(&d, eps)?;
    let reciprocal_root = match roots.as_slice() {
        [r] => Some(1.0 / to_f64(&((&r.lo + &r.hi) / num_rational::BigRational::from_integer(2.into())))),
        _ => None,
    };
    Ok((
        DiscriminantJson {
            equation: eq.name().to_string(),
            defining_polynomial: p.to_string(),
            discriminant: d.to_string(),
            z_power,
            reference: reference.to_string(),
            scalar,
            roots: roots.iter().map(RootJson::from).collect(),
            reciprocal_root,
        },
        d,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use thue_arena_core::{encode_search_log, play_erase_game, simulate_nonrep_search, BenStrategy};

    #[test]
    fn run_json_field_names() {
        let run = play_erase_game(8, 2, BenStrategy::Mimic, 3).unwrap();
        let v = serde_json::to_value(GameRunJson::from(&run)).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        assert_eq!(keys, ["ann_choices", "config", "final", "moves"]);
        let m = &v["moves"][1];
        assert_eq!(m["mover"], "B");
        assert_eq!(m["rep"], 1);
        assert_eq!(m["h"], 1);
        assert_eq!(m["i"], 2);
    }

    #[test]
    fn run_json_round_trip() {
        let run = simulate_nonrep_search(6, 50, BenStrategy::HashDet, 9).unwrap();
        let j = GameRunJson::from(&run);
        let text = serde_json::to_string(&j).unwrap();
        let back: GameRunJson = serde_json::from_str(&text).unwrap();
        assert_eq!(GameRun::try_from(&back).unwrap(), run);
    }

    #[test]
    fn log_json_shapes() {
        let run = simulate_nonrep_search(6, 200, BenStrategy::GreedyRepeater, 1).unwrap();
        let log = encode_search_log(&run).unwrap();
        let j = LogJson::from(&log);
        assert_eq!(j.to_search_log(6).unwrap(), log);
        let erase = ReducedGameLog {
            differences: vec![1, 1],
            final_word: GameSequence::from_values(8, [0, 1]).unwrap(),
        };
        let text = serde_json::to_string(&LogJson::from(&erase)).unwrap();
        assert_eq!(text, r#"{"d":[1,1],"final":[0,1]}"#);
    }

    #[test]
    fn census_csv_header() {
        let table = thue_arena_core::census::count_walks_dp(&thue_arena_core::census::WalkSpec::search(), 4);
        let mut buf = Vec::new();
        write_census_csv(&table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("m,T_m,T_m^(1/m)\n1,1,1"));
        assert!(text.contains("\n4,4,"));
    }
}
