//! Verification and benchmark harness for `mtd_core`.
//!
//! Three commands share one configuration format: `verify` runs the invariant
//! suite against the oracle, `bench` emits per-instance node counts as CSV
//! with a summary block, and `trace` lists the passes of a single MTD search.

pub mod bench;
pub mod config;
pub mod instance;
pub mod pool;
pub mod run;
pub mod trace;
pub mod verify;

use mtd_core::game::GameError;
use mtd_core::mtd::MtdError;
use mtd_core::oracle::OracleError;
use thiserror::Error;

pub use bench::{bench, BenchReport, BenchRow};
pub use config::{Algorithm, BenchConfig, ConfigError};
pub use trace::trace;
pub use verify::{verify, verify_with, Law, VerifyReport, Violation};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid instance: {0}")]
    Game(#[from] GameError),
    #[error("search failed: {0}")]
    Search(#[from] MtdError),
    #[error("{instance}: {source}")]
    Oracle {
        instance: String,
        #[source]
        source: OracleError,
    },
    #[error("value mismatch on {instance}: {detail}")]
    ValueMismatch { instance: String, detail: String },
}

impl BenchError {
    /// Process exit status: 2 for bad input, 1 for anything the search got wrong.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) | BenchError::Game(_) => 2,
            _ => 1,
        }
    }
}
