//! Command-line interface.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::net::SocketAddr;
use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use thue_arena_core::census::{count_walks_dp, WalkSpec};
use thue_arena_core::gf::{self, Equation};
use thue_arena_core::{
    decode_erase_log, decode_search_log, encode_erase_log, encode_search_log, BenStrategy,
    GameKind, GameRun,
};

use crate::batch::{run_batch, RunSpec};
use crate::formats::{census_rows, discriminant_report, write_census_csv, GameRunJson, LogJson};
use crate::server::{default_symbols, serve, AppState};
use crate::verify::{run_checks, VerifyConfig, Which};

/// Decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("bad seed {s:?}: {e}"))
}

fn parse_game(s: &str) -> Result<GameKind, String> {
    s.parse().map_err(|_| format!("unknown game {s:?} (erase | nonrep)"))
}

fn parse_equation(s: &str) -> Result<Equation, String> {
    s.parse().map_err(|_| format!("unknown game {s:?} (erase | search)"))
}

fn parse_ben(s: &str) -> Result<BenStrategy, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_which(s: &str) -> Result<Which, String> {
    s.parse().map_err(|e| format!("{e}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "thue-arena", version, about = "Nonrepetitive games: simulation, verification, and play")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play a seeded batch and report per-run summaries.
    Simulate {
        #[arg(long, value_parser = parse_game, default_value = "erase")]
        game: GameKind,
        /// Alphabet size (default 8 for erase, 6 for nonrep).
        #[arg(long)]
        symbols: Option<u32>,
        /// Total moves per erase game.
        #[arg(long, default_value_t = 2000)]
        moves: usize,
        /// Ann draws per nonrep search.
        #[arg(long, default_value_t = 1000)]
        ann_budget: usize,
        #[arg(long, value_parser = parse_ben, default_value = "mimic")]
        ben: BenStrategy,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[arg(long, env = "THUE_ARENA_SEED", value_parser = parse_seed, default_value = "0")]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write every run as `run-<index>.json` into this directory.
        #[arg(long)]
        dump_runs: Option<PathBuf>,
    },
    /// Run verification suites; exits nonzero if any check fails.
    Verify {
        #[arg(long, value_parser = parse_which, default_value = "all")]
        which: Which,
        /// Runs per Ben for the invariant and round-trip suites.
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, default_value_t = 100)]
        play_runs: usize,
        #[arg(long, default_value_t = 2000)]
        moves: usize,
        #[arg(long, default_value_t = 1000)]
        ann_budget: usize,
        #[arg(long, default_value_t = 16)]
        max_length: usize,
        #[arg(long, default_value_t = 400)]
        growth_length: usize,
        #[arg(long, default_value_t = 40)]
        order: usize,
        #[arg(long, env = "THUE_ARENA_SEED", value_parser = parse_seed, default_value = "0")]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Walk counts T_1..T_m by dynamic programming.
    Count {
        #[arg(long, value_parser = parse_equation)]
        game: Equation,
        #[arg(long, default_value_t = 16)]
        max_length: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Power-series solution of the walk equation.
    Series {
        #[arg(long, value_parser = parse_equation)]
        game: Equation,
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
    /// Discriminant of the defining polynomial and its positive roots.
    Discriminant {
        #[arg(long, value_parser = parse_equation)]
        game: Equation,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Encode a run file (as written by `simulate --dump-runs`) into its log.
    Encode {
        #[arg(long)]
        run: PathBuf,
    },
    /// Recover Ann's choices from a log file and Ben's strategy.
    Decode {
        #[arg(long)]
        log: PathBuf,
        #[arg(long, value_parser = parse_game)]
        game: GameKind,
        #[arg(long)]
        symbols: Option<u32>,
        #[arg(long, value_parser = parse_ben)]
        ben: BenStrategy,
    },
    /// Serve the HTTP/WebSocket play API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Write each ended session's run here as JSON.
        #[arg(long)]
        export_dir: Option<PathBuf>,
    },
}

fn open_out(out: &Option<PathBuf>) -> anyhow::Result<Option<BufWriter<File>>> {
    out.as_ref()
        .map(|p| File::create(p).map(BufWriter::new).with_context(|| format!("creating {}", p.display())))
        .transpose()
}

/// Runs a parsed command; returns the process exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> anyhow::Result<i32> {
    match cli.command {
        Command::Simulate {
            game,
            symbols,
            moves,
            ann_budget,
            ben,
            runs,
            seed,
            format,
            out,
            dump_runs,
        } => {
            let spec = RunSpec {
                game,
                symbols: symbols.unwrap_or_else(|| default_symbols(game)),
                budget: match game {
                    GameKind::Erase => moves,
                    GameKind::Nonrep => ann_budget,
                },
                ben,
                seed,
            };
            if let Some(dir) = &dump_runs {
                std::fs::create_dir_all(dir)?;
                for i in 0..runs {
                    let run = spec.play(i)?;
                    let path = dir.join(format!("run-{i}.json"));
                    std::fs::write(&path, serde_json::to_string(&GameRunJson::from(&run))?)?;
                }
            }
            let report = run_batch(&spec, runs)?;
            let mut file = open_out(&out)?;
            let w: &mut dyn Write = match file.as_mut() {
                Some(f) => f,
                None => stdout,
            };
            match format {
                Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&report)?)?,
                Format::Csv | Format::Text => {
                    let mut cw = csv::Writer::from_writer(&mut *w);
                    cw.write_record(["index", "seed", "moves", "final_length", "violations", "repetition_sizes"])?;
                    for r in &report.runs {
                        let sizes: Vec<String> =
                            r.repetition_sizes.iter().map(|(s, n)| format!("{s}:{n}")).collect();
                        cw.write_record([
                            r.index.to_string(),
                            r.seed.to_string(),
                            r.moves.to_string(),
                            r.final_length.to_string(),
                            r.violations.len().to_string(),
                            sizes.join(" "),
                        ])?;
                    }
                    cw.flush()?;
                }
            }
            let a = &report.aggregate;
            writeln!(
                stderr,
                "{} runs, mean final length {:.2}, {} violations",
                a.runs, a.mean_final_length, a.violations
            )?;
            Ok(if a.violations == 0 { 0 } else { 1 })
        }
        Command::Verify {
            which,
            runs,
            play_runs,
            moves,
            ann_budget,
            max_length,
            growth_length,
            order,
            seed,
            out,
        } => {
            let defaults = VerifyConfig::default();
            let cfg = VerifyConfig {
                seed,
                moves,
                ann_budget,
                invariant_runs: runs.unwrap_or(defaults.invariant_runs),
                roundtrip_runs: runs.unwrap_or(defaults.roundtrip_runs),
                play_runs,
                max_length,
                growth_length,
                series_order: order,
                ..defaults
            };
            let checks = run_checks(which, &cfg);
            let mut file = open_out(&out)?;
            let w: &mut dyn Write = match file.as_mut() {
                Some(f) => f,
                None => stdout,
            };
            for c in &checks {
                writeln!(w, "{}", serde_json::to_string(c)?)?;
                writeln!(stderr, "{c}")?;
            }
            Ok(if checks.iter().all(|c| c.passed) { 0 } else { 1 })
        }
        Command::Count {
            game,
            max_length,
            format,
            out,
        } => {
            let spec = match game {
                Equation::Erase => WalkSpec::erase(),
                Equation::Search => WalkSpec::search(),
            };
            let table = count_walks_dp(&spec, max_length);
            let mut file = open_out(&out)?;
            let w: &mut dyn Write = match file.as_mut() {
                Some(f) => f,
                None => stdout,
            };
            match format {
                Format::Text => {
                    let counts: Vec<String> = table.counts.iter().map(|c| c.to_string()).collect();
                    writeln!(w, "{}", counts.join(","))?;
                }
                Format::Csv => write_census_csv(&table, w)?,
                Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&census_rows(&table))?)?,
            }
            Ok(0)
        }
        Command::Series { game, order } => {
            let s = gf::solve_series(game, order)?;
            writeln!(stdout, "{}", s.to_text())?;
            Ok(0)
        }
        Command::Discriminant { game, eps, format } => {
            let (report, _) = discriminant_report(game, eps)?;
            match format {
                Format::Json => writeln!(stdout, "{}", serde_json::to_string_pretty(&report)?)?,
                Format::Text | Format::Csv => {
                    writeln!(stdout, "P(z, t) = {}", report.defining_polynomial)?;
                    writeln!(stdout, "discriminant = {}", report.discriminant)?;
                    match &report.scalar {
                        Some(c) => writeln!(
                            stdout,
                            "  = {c} * z^{} * ({})",
                            report.z_power, report.reference
                        )?,
                        None => writeln!(stdout, "  differs from {} by more than a scalar", report.reference)?,
                    }
                    for r in &report.roots {
                        writeln!(
                            stdout,
                            "root {:.12} in ({}, {}]{}",
                            r.approx,
                            r.lo,
                            r.hi,
                            if r.simple { "" } else { " (repeated)" }
                        )?;
                    }
                }
            }
            Ok(0)
        }
        Command::Encode { run } => {
            let text = std::fs::read_to_string(&run).with_context(|| format!("reading {}", run.display()))?;
            let j: GameRunJson = serde_json::from_str(&text)?;
            let run = GameRun::try_from(&j)?;
            let log = match run.config.kind {
                GameKind::Erase => LogJson::from(&encode_erase_log(&run)?),
                GameKind::Nonrep => LogJson::from(&encode_search_log(&run)?),
            };
            writeln!(stdout, "{}", serde_json::to_string(&log)?)?;
            Ok(0)
        }
        Command::Decode {
            log,
            game,
            symbols,
            ben,
        } => {
            let text = std::fs::read_to_string(&log).with_context(|| format!("reading {}", log.display()))?;
            let j: LogJson = serde_json::from_str(&text)?;
            let c = symbols.unwrap_or_else(|| default_symbols(game));
            let mut ben = ben;
            let choices = match game {
                GameKind::Erase => decode_erase_log(&j.to_erase_log(c)?, &mut ben),
                GameKind::Nonrep => decode_search_log(&j.to_search_log(c)?, &mut ben),
            }
            .map_err(|e| anyhow!("decode failed: {e}"))?;
            let values: Vec<u32> = choices.iter().map(|s| s.value()).collect();
            writeln!(stdout, "{}", serde_json::to_string(&values)?)?;
            Ok(0)
        }
        Command::Serve { addr, export_dir } => {
            if let Some(dir) = &export_dir {
                std::fs::create_dir_all(dir)?;
            }
            let state = AppState {
                export_dir,
                ..AppState::default()
            };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(serve(addr, state))?;
            Ok(0)
        }
    }
}

/// Parses `args` and runs; errors become exit code 2 with a message on stderr.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            2
        }
    }
}
