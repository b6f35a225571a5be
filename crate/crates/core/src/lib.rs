//! Deterministic parallel kernelization toolkit.
//!
//! Instances are immutable snapshots; reduction rules are expressed as
//! scan/commit passes that are executed in deterministic rounds by the
//! [`engine`]. Rounds and scan work are counted as machine-independent
//! proxies for parallel depth and total work. Every kernelizer is a pure
//! `instance -> outcome` function whose output is identical for any number
//! of workers.

pub mod backdoor;
pub mod cover;
pub mod engine;
pub mod fvs;
pub mod gen;
pub mod graph;
pub mod lpm;
pub mod mcvp;
pub mod oracle;
pub mod outcome;
pub mod plc;
pub mod structural;
pub mod verify;

pub use engine::RoundStats;
pub use graph::{Instance, MultiGraph, VertexId, VertexSet};
pub use outcome::{Answer, KernelOutcome, TraceRecord};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input.
    #[error("input error: {0}")]
    Input(String),
    /// Text-format parse failure, annotated with a 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// Two verdicts of one pass touched the same element incompatibly.
    #[error("commit conflict in pass '{pass}': {msg}")]
    CommitConflict { pass: String, msg: String },
    /// The round budget ran out while changes were still pending.
    #[error("round budget exhausted after {} rounds", stats.rounds)]
    BudgetExceeded {
        stats: RoundStats,
        partial: Box<Instance>,
    },
    /// A desk-scale oracle was asked for an instance beyond its limit.
    #[error("oracle '{oracle}' refused: instance size {actual} exceeds limit {limit}")]
    OracleRefused {
        oracle: &'static str,
        limit: usize,
        actual: usize,
    },
    /// An internal postcondition failed (a bug, not a user error).
    #[error("contract violation: {0}")]
    ContractViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Runs `f` on a dedicated rayon pool with `workers` threads.
///
/// All parallel scans inside the toolkit pick up the installed pool, so this
/// is the one knob that controls parallelism. Results are guaranteed to be
/// identical for every worker count; tests compare 1 against many.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to build worker pool");
    pool.install(f)
}
