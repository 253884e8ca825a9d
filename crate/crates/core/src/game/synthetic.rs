use std::fmt;
use std::str::FromStr;

use super::{GameError, GameModel, Move, NodeKind};
use crate::mix::{finalize, mix3, unit};
use crate::{Value, VAL_MAX};

/// Upper limit on the number of nodes a synthetic tree may materialize.
pub const MAX_SYNTHETIC_NODES: u64 = 1 << 24;

const STREAM_DELTA: u64 = 1;
const STREAM_ORDER: u64 = 2;
const STREAM_PLACE: u64 = 3;
const STREAM_KEY: u64 = 4;

/// Parameters of a deterministic uniform game tree.
///
/// Every node carries a static value: the root scores 0 and each edge adds a
/// delta drawn from a hash of `(seed, node)`, so shallow evaluations
/// correlate with deep ones the way a real evaluation function does.
/// Values are clamped to `[-value_span, value_span]`.
///
/// `ordering_quality` is the probability that, at an internal node, the child
/// with the best full-depth value is generated first. Otherwise it is placed
/// uniformly among the remaining slots.
///
/// `parity_offset` adds `+offset` to evaluations at odd plies and `-offset`
/// at even plies, producing odd/even oscillation across search depths.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticTreeSpec {
    pub branching: u32,
    pub depth: u32,
    pub seed: u64,
    pub value_span: Value,
    pub ordering_quality: f64,
    pub parity_offset: Value,
}

impl Default for SyntheticTreeSpec {
    fn default() -> Self {
        Self {
            branching: 2,
            depth: 4,
            seed: 0,
            value_span: 100,
            ordering_quality: 0.5,
            parity_offset: 0,
        }
    }
}

impl SyntheticTreeSpec {
    /// Total number of nodes, or `None` on overflow.
    pub fn node_count(&self) -> Option<u64> {
        let b = u64::from(self.branching);
        let mut total: u64 = 0;
        let mut level: u64 = 1;
        for _ in 0..=self.depth {
            total = total.checked_add(level)?;
            level = level.checked_mul(b)?;
        }
        Some(total)
    }

    pub fn validate(&self) -> Result<(), GameError> {
        let bad = |msg: String| Err(GameError::InvalidSpec(msg));
        if self.branching == 0 || self.branching > 255 {
            return bad(format!("branching {} outside 1..=255", self.branching));
        }
        match self.node_count() {
            Some(n) if n <= MAX_SYNTHETIC_NODES => {}
            _ => {
                return bad(format!(
                    "branching {} depth {} exceeds {} nodes",
                    self.branching, self.depth, MAX_SYNTHETIC_NODES
                ))
            }
        }
        if self.value_span < 0 {
            return bad(format!("negative value_span {}", self.value_span));
        }
        if i64::from(self.value_span) + i64::from(self.parity_offset).abs() > i64::from(VAL_MAX) {
            return bad("value_span + |parity_offset| exceeds VAL_MAX".to_string());
        }
        if !(0.0..=1.0).contains(&self.ordering_quality) {
            return bad(format!("ordering_quality {} outside [0, 1]", self.ordering_quality));
        }
        Ok(())
    }
}

impl fmt::Display for SyntheticTreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "branching={}", self.branching)?;
        writeln!(f, "depth={}", self.depth)?;
        writeln!(f, "seed={}", self.seed)?;
        writeln!(f, "value_span={}", self.value_span)?;
        writeln!(f, "ordering_quality={}", self.ordering_quality)?;
        writeln!(f, "parity_offset={}", self.parity_offset)
    }
}

impl FromStr for SyntheticTreeSpec {
    type Err = GameError;

    /// Parses `key=value` lines. Blank lines and `#` comments are skipped;
    /// missing keys keep their defaults.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut spec = SyntheticTreeSpec::default();
        for (idx, raw) in s.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| GameError::Config { line: line_no, reason };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let bad_value = |_| err(format!("bad value {value:?} for {key}"));
            match key {
                "branching" => spec.branching = value.parse().map_err(bad_value)?,
                "depth" => spec.depth = value.parse().map_err(bad_value)?,
                "seed" => spec.seed = value.parse().map_err(bad_value)?,
                "value_span" => spec.value_span = value.parse().map_err(bad_value)?,
                "ordering_quality" => {
                    spec.ordering_quality = value
                        .parse()
                        .map_err(|_| err(format!("bad value {value:?} for {key}")))?
                }
                "parity_offset" => spec.parity_offset = value.parse().map_err(bad_value)?,
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// A node of a [`SyntheticTree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SyntheticPosition {
    node: u32,
    ply: u32,
}

impl SyntheticPosition {
    /// Breadth-first index of the node in its tree (by generation slot).
    pub fn node(&self) -> u32 {
        self.node
    }
}

/// A fully materialized synthetic tree.
///
/// Nodes are laid out breadth-first so that the children of node `i` occupy
/// `b*i + 1 .. b*i + b`; `order` maps a move index to one of those slots.
#[derive(Clone, Debug)]
pub struct SyntheticTree {
    spec: SyntheticTreeSpec,
    values: Vec<Value>,
    order: Vec<u8>,
    key_salt: u64,
}

impl SyntheticTree {
    pub fn new(spec: SyntheticTreeSpec) -> Result<Self, GameError> {
        spec.validate()?;
        let b = spec.branching as usize;
        let depth = spec.depth as usize;
        let total = spec.node_count().expect("validated") as usize;

        // level_start[l] = index of the first node at level l
        let mut level_start = Vec::with_capacity(depth + 2);
        let mut start = 0usize;
        let mut width = 1usize;
        for _ in 0..=depth {
            level_start.push(start);
            start += width;
            width *= b;
        }
        level_start.push(start);
        let internal = level_start[depth];

        let span = spec.value_span;
        let step = if depth == 0 {
            0
        } else {
            (span + depth as Value - 1) / depth as Value
        };
        let mut values = vec![0 as Value; total];
        for i in 1..total {
            let parent = (i - 1) / b;
            let delta = if step == 0 {
                0
            } else {
                let r = mix3(spec.seed, STREAM_DELTA, i as u64) % (2 * step as u64 + 1);
                r as Value - step
            };
            values[i] = (values[parent] + delta).clamp(-span, span);
        }

        // Full-depth minimax of every node, used only to choose the move order.
        let parity = |ply: usize| -> Value {
            if ply % 2 == 1 {
                spec.parity_offset
            } else {
                -spec.parity_offset
            }
        };
        let mut solved = vec![0 as Value; total];
        for i in internal..total {
            solved[i] = values[i] + parity(depth);
        }
        let mut order = vec![0u8; internal * b];
        let mut natural: Vec<u8> = Vec::with_capacity(b);
        for level in (0..depth).rev() {
            let maximizing = level % 2 == 0;
            for i in level_start[level]..level_start[level + 1] {
                let first_child = b * i + 1;
                let kids = &solved[first_child..first_child + b];
                let mut best = 0usize;
                for (j, &v) in kids.iter().enumerate() {
                    if (maximizing && v > kids[best]) || (!maximizing && v < kids[best]) {
                        best = j;
                    }
                }
                solved[i] = kids[best];

                natural.clear();
                natural.extend((0..b).map(|j| j as u8));
                if b > 1 {
                    let slot = if unit(mix3(spec.seed, STREAM_ORDER, i as u64)) < spec.ordering_quality {
                        0
                    } else {
                        1 + (mix3(spec.seed, STREAM_PLACE, i as u64) % (b as u64 - 1)) as usize
                    };
                    let moved = natural.remove(best);
                    natural.insert(slot, moved);
                }
                order[i * b..(i + 1) * b].copy_from_slice(&natural);
            }
        }

        let key_salt = finalize(spec.seed ^ STREAM_KEY.wrapping_mul(0xa076_1d64_78bd_642f));
        Ok(Self {
            spec,
            values,
            order,
            key_salt,
        })
    }

    pub fn spec(&self) -> &SyntheticTreeSpec {
        &self.spec
    }

    pub fn root(&self) -> SyntheticPosition {
        SyntheticPosition { node: 0, ply: 0 }
    }

    /// Number of materialized nodes.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl GameModel for SyntheticTree {
    type Position = SyntheticPosition;

    fn kind(&self, pos: &SyntheticPosition) -> NodeKind {
        if pos.ply % 2 == 0 {
            NodeKind::Max
        } else {
            NodeKind::Min
        }
    }

    fn is_terminal(&self, pos: &SyntheticPosition) -> bool {
        pos.ply >= self.spec.depth
    }

    fn moves(&self, pos: &SyntheticPosition) -> Vec<Move> {
        if self.is_terminal(pos) {
            return Vec::new();
        }
        (0..self.spec.branching as u16).map(Move).collect()
    }

    fn play(&self, pos: &SyntheticPosition, mv: Move) -> SyntheticPosition {
        let b = self.spec.branching as usize;
        assert!(
            !self.is_terminal(pos) && (mv.0 as usize) < b,
            "illegal synthetic move {mv} at ply {}",
            pos.ply
        );
        let i = pos.node as usize;
        let slot = self.order[i * b + mv.0 as usize] as usize;
        SyntheticPosition {
            node: (b * i + 1 + slot) as u32,
            ply: pos.ply + 1,
        }
    }

    fn evaluate(&self, pos: &SyntheticPosition) -> Value {
        let offset = if pos.ply % 2 == 1 {
            self.spec.parity_offset
        } else {
            -self.spec.parity_offset
        };
        self.values[pos.node as usize] + offset
    }

    fn key(&self, pos: &SyntheticPosition) -> u64 {
        finalize(u64::from(pos.node) ^ self.key_salt)
    }

    fn ply(&self, pos: &SyntheticPosition) -> u32 {
        pos.ply
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    fn tree(branching: u32, depth: u32, seed: u64) -> SyntheticTree {
        SyntheticTree::new(SyntheticTreeSpec {
            branching,
            depth,
            seed,
            ..Default::default()
        })
        .unwrap()
    }

    fn leaves(t: &SyntheticTree, pos: SyntheticPosition, out: &mut Vec<Value>) {
        if t.is_terminal(&pos) {
            out.push(t.evaluate(&pos));
            return;
        }
        for (_, child) in t.children(&pos).unwrap() {
            leaves(t, child, out);
        }
    }

    #[test]
    fn root_children_count_and_kind() {
        let t = tree(2, 2, 1);
        let kids = t.children(&t.root()).unwrap();
        assert_eq!(kids.len(), 2);
        assert!(kids.iter().all(|(_, c)| t.kind(c) == NodeKind::Min));
    }

    #[test]
    fn children_are_deterministic() {
        let t = tree(3, 1, 7);
        let a = t.children(&t.root()).unwrap();
        let b = t.children(&t.root()).unwrap();
        assert_eq!(a, b);
        let again = tree(3, 1, 7);
        assert_eq!(a, again.children(&again.root()).unwrap());
    }

    #[test]
    fn terminal_has_no_children() {
        let t = tree(2, 1, 3);
        let (_, leaf) = t.children(&t.root()).unwrap()[0];
        assert_eq!(t.children(&leaf), Err(GameError::TerminalPosition));
        assert!(t.moves(&leaf).is_empty());
    }

    #[test]
    fn keys_distinct_within_tree() {
        let t = tree(3, 5, 11);
        let mut seen = HashSet::new();
        let mut stack = vec![t.root()];
        while let Some(p) = stack.pop() {
            assert!(seen.insert(t.key(&p)));
            if !t.is_terminal(&p) {
                stack.extend(t.children(&p).unwrap().into_iter().map(|(_, c)| c));
            }
        }
        assert_eq!(seen.len(), t.len());
    }

    #[test]
    fn leaf_values_respect_span() {
        let t = tree(4, 5, 5);
        let mut out = Vec::new();
        leaves(&t, t.root(), &mut out);
        assert_eq!(out.len(), 4usize.pow(5));
        assert!(out.iter().all(|v| v.abs() <= 100));
        // not all equal
        assert!(out.iter().any(|&v| v != out[0]));
    }

    #[test]
    fn perfect_ordering_puts_best_first() {
        let t = SyntheticTree::new(SyntheticTreeSpec {
            branching: 3,
            depth: 4,
            seed: 2,
            ordering_quality: 1.0,
            ..Default::default()
        })
        .unwrap();
        fn value(t: &SyntheticTree, p: &SyntheticPosition) -> Value {
            if t.is_terminal(p) {
                return t.evaluate(p);
            }
            let vals = t.children(p).unwrap().into_iter().map(|(_, c)| value(t, &c));
            match t.kind(p) {
                NodeKind::Max => vals.max().unwrap(),
                NodeKind::Min => vals.min().unwrap(),
            }
        }
        let mut stack = vec![t.root()];
        while let Some(p) = stack.pop() {
            if t.is_terminal(&p) {
                continue;
            }
            let kids = t.children(&p).unwrap();
            let first = value(&t, &kids[0].1);
            assert_eq!(first, value(&t, &p));
            stack.extend(kids.into_iter().map(|(_, c)| c));
        }
    }

    #[test]
    fn config_round_trip() {
        let spec = SyntheticTreeSpec {
            branching: 5,
            depth: 3,
            seed: u64::MAX,
            value_span: 1234,
            ordering_quality: 0.9,
            parity_offset: -7,
        };
        let parsed: SyntheticTreeSpec = spec.to_string().parse().unwrap();
        assert_eq!(parsed, spec);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            "branching=2\nwidth=3".parse::<SyntheticTreeSpec>(),
            Err(GameError::Config { line: 2, .. })
        ));
        assert!(matches!(
            "depth two".parse::<SyntheticTreeSpec>(),
            Err(GameError::Config { line: 1, .. })
        ));
        assert!(matches!(
            "ordering_quality=1.5".parse::<SyntheticTreeSpec>(),
            Err(GameError::InvalidSpec(_))
        ));
        assert!("# comment\n\nseed=3\n".parse::<SyntheticTreeSpec>().is_ok());
    }

    #[test]
    fn rejects_oversized_trees() {
        let spec = SyntheticTreeSpec {
            branching: 10,
            depth: 9,
            ..Default::default()
        };
        assert!(matches!(SyntheticTree::new(spec), Err(GameError::InvalidSpec(_))));
    }

    #[test]
    fn parity_offset_shifts_by_ply() {
        let base = tree(2, 3, 4);
        let shifted = SyntheticTree::new(SyntheticTreeSpec {
            branching: 2,
            depth: 3,
            seed: 4,
            parity_offset: 10,
            ..Default::default()
        })
        .unwrap();
        let r = base.root();
        assert_eq!(shifted.evaluate(&r), base.evaluate(&r) - 10);
        let (_, c) = base.children(&r).unwrap()[0];
        assert_eq!(shifted.evaluate(&c), base.evaluate(&c) + 10);
    }
}
