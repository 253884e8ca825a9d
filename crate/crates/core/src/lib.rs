//! Zero-window minimax search.
//!
//! This crate implements the MTD family of search drivers (MTD(f), MTD(+inf),
//! MTD(-inf) and a bisecting variant) on top of a fail-soft alpha-beta that
//! keeps its results in a transposition table. Plain alpha-beta and NegaScout
//! are provided as baselines, and [`oracle`] is a brute-force minimax used as
//! ground truth in tests and in the benchmark harness.
//!
//! Values are always reported from the point of view of the MAX player.
//!
//! ```
//! use mtd_core::game::{GameModel, SyntheticTree, SyntheticTreeSpec};
//! use mtd_core::mtd::{mtd, PivotPolicy};
//! use mtd_core::oracle;
//! use mtd_core::tt::{TranspositionTable, TtConfig};
//!
//! let spec = SyntheticTreeSpec { branching: 3, depth: 4, seed: 9, ..Default::default() };
//! let tree = SyntheticTree::new(spec).unwrap();
//! let root = tree.root();
//! let mut table = TranspositionTable::new(TtConfig::default());
//!
//! let outcome = mtd(&tree, &root, 0, 4, &PivotPolicy::default(), &mut table).unwrap();
//! assert_eq!(outcome.value, oracle::minimax(&tree, &root, 4).unwrap());
//! ```

pub mod game;
pub mod mtd;
pub mod oracle;
pub mod search;
pub mod tt;

mod mix;

pub use game::{GameModel, Move, NodeKind};
pub use mtd::{iterative_deepening, mtd, GuessPolicy, MtdOutcome, PivotKind, PivotPolicy};
pub use search::{SearchStats, Window};
pub use tt::{Bounds, TranspositionTable, TtConfig};

/// A minimax score in evaluation grains.
pub type Value = i32;

/// Largest magnitude any evaluation may take.
pub const VAL_MAX: Value = 1 << 20;

/// Sentinel lying strictly outside every evaluation.
pub const INF: Value = 1 << 30;
