//! File formats, batch simulation, verification suites, the play service,
//! and the command-line front end built on `thue-arena-core`.

pub mod batch;
pub mod cli;
pub mod formats;
pub mod server;
pub mod session;
pub mod verify;

pub use thue_arena_core as core;
