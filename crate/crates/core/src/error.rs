use core::fmt;

use alloc::string::String;

/// Errors raised by the game engines, strategies and codecs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A symbol was outside `[0, alphabet_size)`.
    SymbolOutOfRange { value: u32, alphabet_size: u32 },
    /// The game configuration cannot be played (alphabet too small, odd budget, ...).
    Config(String),
    /// An operation was called in a state where the rules forbid it.
    Protocol(String),
    /// A strategy name or other token was not recognised.
    UnknownToken(String),
    /// A log could not be decoded back into a run.
    Decode(DecodeError),
    /// An enumeration exceeded its size guard.
    TooLarge(String),
    /// An analytic precondition failed.
    Analysis(String),
}

/// Why a log failed to decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeError {
    /// The log violates one of its structural conditions.
    InvalidLog(alloc::vec::Vec<crate::codec::Violation>),
    /// The backward pass ran out of symbols or left a non-empty prefix.
    Backward { step: usize, reason: String },
    /// The forward replay disagreed with the log at the given move (1-based).
    Replay { move_index: usize, reason: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SymbolOutOfRange {
                value,
                alphabet_size,
            } => write!(f, "symbol {value} outside alphabet of size {alphabet_size}"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Protocol(msg) => write!(f, "protocol error: {msg}"),
            Error::UnknownToken(tok) => write!(f, "unknown token `{tok}`"),
            Error::Decode(e) => write!(f, "decode error: {e}"),
            Error::TooLarge(msg) => write!(f, "refused: {msg}"),
            Error::Analysis(msg) => write!(f, "analysis error: {msg}"),
        }
    }
}

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeError::InvalidLog(violations) => {
                write!(f, "invalid log")?;
                for v in violations {
                    write!(f, "; {v}")?;
                }
                Ok(())
            }
            DecodeError::Backward { step, reason } => {
                write!(f, "backward pass failed at step {step}: {reason}")
            }
            DecodeError::Replay { move_index, reason } => {
                write!(f, "replay mismatch at move {move_index}: {reason}")
            }
        }
    }
}

impl core::error::Error for Error {}
impl core::error::Error for DecodeError {}

impl From<DecodeError> for Error {
    fn from(e: DecodeError) -> Self {
        Error::Decode(e)
    }
}

pub type Result<T> = core::result::Result<T, Error>;
