//! Fixed-capacity transposition table holding a lower/upper bound pair per
//! position and search depth.

use thiserror::Error;

use crate::game::Move;
use crate::{Value, INF};

/// An interval `[lower, upper]` known to contain a minimax value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bounds {
    pub lower: Value,
    pub upper: Value,
}

impl Bounds {
    pub const UNBOUNDED: Bounds = Bounds {
        lower: -INF,
        upper: INF,
    };

    pub fn exact(v: Value) -> Self {
        Self { lower: v, upper: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, v: Value) -> bool {
        self.lower <= v && v <= self.upper
    }

    /// Narrows the interval with new information. A bound that would cross
    /// the opposite one replaces the interval on that side.
    pub fn tighten(&mut self, update: BoundUpdate) {
        match update {
            BoundUpdate::Lower(v) => {
                self.lower = self.lower.max(v);
                if self.lower > self.upper {
                    self.upper = INF;
                }
            }
            BoundUpdate::Upper(v) => {
                self.upper = self.upper.min(v);
                if self.upper < self.lower {
                    self.lower = -INF;
                }
            }
            BoundUpdate::Exact(v) => *self = Bounds::exact(v),
        }
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Self::UNBOUNDED
    }
}

/// The result of a search relative to its window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundUpdate {
    /// Failed high: value >= v.
    Lower(Value),
    /// Failed low: value <= v.
    Upper(Value),
    Exact(Value),
}

/// When stored bounds may answer a probe at a given remaining depth.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DepthMatch {
    /// Only bounds stored at exactly the probe depth. Sound for fixed-depth search.
    #[default]
    Exact,
    /// Bounds stored at the probe depth or deeper, as most game programs do.
    /// Results then may differ from fixed-depth minimax.
    AtLeast,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TtError {
    #[error("log2_slots {0} outside {min}..={max}", min = TtConfig::MIN_LOG2_SLOTS, max = TtConfig::MAX_LOG2_SLOTS)]
    Capacity(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TtConfig {
    pub log2_slots: u32,
    /// Whether depth-0 (leaf) results are stored.
    pub store_leaves: bool,
    pub depth_match: DepthMatch,
}

impl TtConfig {
    pub const MIN_LOG2_SLOTS: u32 = 10;
    pub const MAX_LOG2_SLOTS: u32 = 28;

    pub fn with_log2_slots(log2_slots: u32) -> Result<Self, TtError> {
        if !(Self::MIN_LOG2_SLOTS..=Self::MAX_LOG2_SLOTS).contains(&log2_slots) {
            return Err(TtError::Capacity(log2_slots));
        }
        Ok(Self {
            log2_slots,
            ..Self::default()
        })
    }

    pub fn capacity(&self) -> usize {
        1 << self.log2_slots
    }
}

impl Default for TtConfig {
    fn default() -> Self {
        Self {
            log2_slots: 20,
            store_leaves: true,
            depth_match: DepthMatch::Exact,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TtEntry {
    pub key: u64,
    /// Remaining search depth the bounds were computed for.
    pub depth: u32,
    pub bounds: Bounds,
    pub best_move: Option<Move>,
}

/// A key match. `bounds` is `None` when the stored depth does not answer the probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TtProbe {
    pub bounds: Option<Bounds>,
    pub best_move: Option<Move>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StoreOutcome {
    /// Same key and depth: bounds tightened in place.
    Updated,
    /// Slot was empty.
    Inserted,
    /// A different (key, depth) was evicted.
    Replaced,
    /// Slot kept its deeper entry; nothing written.
    Rejected,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TtStats {
    pub probes: u64,
    pub hits: u64,
    pub depth_mismatches: u64,
    pub stores: u64,
    pub replacements: u64,
    pub rejected: u64,
}

/// Single-entry slots indexed by `key mod capacity`, depth-preferred replacement.
///
/// Slots are packed into three words and stamped with the table's generation;
/// [`clear`](Self::clear) just starts a new generation, so reusing a table is
/// free while allocating a new one costs a page fault per touched page.
#[derive(Clone, Debug)]
pub struct TranspositionTable {
    config: TtConfig,
    slots: Vec<[u64; 3]>,
    generation: u64,
    stats: TtStats,
}

/// Deepest remaining depth a slot can record.
pub const MAX_STORED_DEPTH: u32 = (1 << 24) - 1;

const HAS_MOVE: u64 = 1;
const GEN_SHIFT: u32 = 24;
const GEN_MASK: u64 = 0xffff;
const DEPTH_SHIFT: u32 = 40;

fn pack(e: &TtEntry, generation: u64) -> [u64; 3] {
    let bounds = (u64::from(e.bounds.lower as u32) << 32) | u64::from(e.bounds.upper as u32);
    let mv = e.best_move.map_or(0, |m| (u64::from(m.0) << 8) | HAS_MOVE);
    [e.key, bounds, (u64::from(e.depth) << DEPTH_SHIFT) | (generation << GEN_SHIFT) | mv]
}

fn unpack(w: &[u64; 3], generation: u64) -> Option<TtEntry> {
    if (w[2] >> GEN_SHIFT) & GEN_MASK != generation {
        return None;
    }
    Some(TtEntry {
        key: w[0],
        depth: (w[2] >> DEPTH_SHIFT) as u32,
        bounds: Bounds {
            lower: (w[1] >> 32) as u32 as Value,
            upper: w[1] as u32 as Value,
        },
        best_move: (w[2] & HAS_MOVE != 0).then(|| Move((w[2] >> 8) as u16)),
    })
}

impl TranspositionTable {
    pub fn new(config: TtConfig) -> Self {
        Self {
            slots: vec![[0; 3]; config.capacity()],
            config,
            generation: 1,
            stats: TtStats::default(),
        }
    }

    pub fn config(&self) -> &TtConfig {
        &self.config
    }

    pub fn stats(&self) -> &TtStats {
        &self.stats
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    /// Number of occupied slots.
    pub fn occupancy(&self) -> usize {
        self.slots.iter().filter(|w| unpack(w, self.generation).is_some()).count()
    }

    fn index(&self, key: u64) -> usize {
        (key & (self.slots.len() as u64 - 1)) as usize
    }

    pub fn entry(&self, key: u64) -> Option<TtEntry> {
        unpack(&self.slots[self.index(key)], self.generation).filter(|e| e.key == key)
    }

    pub fn probe(&mut self, key: u64, depth: u32) -> Option<TtProbe> {
        self.stats.probes += 1;
        let entry = self.entry(key)?;
        let usable = match self.config.depth_match {
            DepthMatch::Exact => entry.depth == depth,
            DepthMatch::AtLeast => entry.depth >= depth,
        };
        if usable {
            self.stats.hits += 1;
        } else {
            self.stats.depth_mismatches += 1;
        }
        Some(TtProbe {
            bounds: usable.then_some(entry.bounds),
            best_move: entry.best_move,
        })
    }

    /// # Panics
    /// If `depth` exceeds [`MAX_STORED_DEPTH`].
    pub fn store(&mut self, key: u64, depth: u32, update: BoundUpdate, best_move: Option<Move>) -> StoreOutcome {
        assert!(depth <= MAX_STORED_DEPTH, "depth {depth} too deep to store");
        self.stats.stores += 1;
        let idx = self.index(key);
        let outcome = match unpack(&self.slots[idx], self.generation) {
            Some(mut e) if e.key == key && e.depth == depth => {
                e.bounds.tighten(update);
                if best_move.is_some() {
                    e.best_move = best_move;
                }
                self.slots[idx] = pack(&e, self.generation);
                return StoreOutcome::Updated;
            }
            Some(e) if e.depth > depth => StoreOutcome::Rejected,
            Some(_) => StoreOutcome::Replaced,
            None => StoreOutcome::Inserted,
        };
        match outcome {
            StoreOutcome::Rejected => self.stats.rejected += 1,
            _ => {
                if outcome == StoreOutcome::Replaced {
                    self.stats.replacements += 1;
                }
                let mut bounds = Bounds::UNBOUNDED;
                bounds.tighten(update);
                let e = TtEntry {
                    key,
                    depth,
                    bounds,
                    best_move,
                };
                self.slots[idx] = pack(&e, self.generation);
            }
        }
        outcome
    }

    /// Empties the table and resets its statistics.
    pub fn clear(&mut self) {
        self.generation += 1;
        if self.generation > GEN_MASK {
            self.slots.fill([0; 3]);
            self.generation = 1;
        }
        self.stats = TtStats::default();
    }
}
