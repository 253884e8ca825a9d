//! Brute-force fixed-depth minimax: no pruning, no memory.
//!
//! Ground truth for every value, bound and best-move check. It shares no code
//! with the searchers beyond the [`GameModel`] it walks.

use thiserror::Error;

use crate::game::{GameModel, Move, NodeKind};
use crate::Value;

/// Maximum number of leaves a single oracle call will enumerate.
pub const LEAF_GUARD: u64 = 10_000_000;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle refused: more than {limit} leaves")]
    GuardExceeded { limit: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundDirection {
    /// `g` claims to be an upper bound: value <= g.
    Upper,
    /// `g` claims to be a lower bound: value >= g.
    Lower,
}

pub fn minimax<G: GameModel>(model: &G, pos: &G::Position, depth: u32) -> Result<Value, OracleError> {
    let mut leaves = 0u64;
    enumerate(model, pos, depth, &mut leaves, LEAF_GUARD)
}

/// Whether `g` is a valid bound on the fixed-depth minimax value.
pub fn check_bound<G: GameModel>(
    model: &G,
    pos: &G::Position,
    depth: u32,
    g: Value,
    direction: BoundDirection,
) -> Result<bool, OracleError> {
    let v = minimax(model, pos, depth)?;
    Ok(match direction {
        BoundDirection::Upper => v <= g,
        BoundDirection::Lower => v >= g,
    })
}

/// Minimax value of every child, in generation order, at `depth - 1`.
pub fn child_values<G: GameModel>(
    model: &G,
    pos: &G::Position,
    depth: u32,
) -> Result<Vec<(Move, Value)>, OracleError> {
    let mut leaves = 0u64;
    let mut out = Vec::new();
    for mv in model.moves(pos) {
        let child = model.play(pos, mv);
        out.push((mv, enumerate(model, &child, depth.saturating_sub(1), &mut leaves, LEAF_GUARD)?));
    }
    Ok(out)
}

/// Smallest and largest static evaluation over all positions within `depth` plies.
///
/// Every value a fail-soft search of up to `depth` can return lies in this range.
pub fn value_range<G: GameModel>(model: &G, pos: &G::Position, depth: u32) -> Result<(Value, Value), OracleError> {
    let mut leaves = 0u64;
    let mut range = (Value::MAX, Value::MIN);
    walk_range(model, pos, depth, &mut leaves, &mut range)?;
    Ok(range)
}

fn walk_range<G: GameModel>(
    model: &G,
    pos: &G::Position,
    depth: u32,
    leaves: &mut u64,
    range: &mut (Value, Value),
) -> Result<(), OracleError> {
    let v = model.evaluate(pos);
    range.0 = range.0.min(v);
    range.1 = range.1.max(v);
    if depth == 0 || model.is_terminal(pos) {
        *leaves += 1;
        if *leaves > LEAF_GUARD {
            return Err(OracleError::GuardExceeded { limit: LEAF_GUARD });
        }
        return Ok(());
    }
    for mv in model.moves(pos) {
        walk_range(model, &model.play(pos, mv), depth - 1, leaves, range)?;
    }
    Ok(())
}

fn enumerate<G: GameModel>(
    model: &G,
    pos: &G::Position,
    depth: u32,
    leaves: &mut u64,
    limit: u64,
) -> Result<Value, OracleError> {
    if depth == 0 || model.is_terminal(pos) {
        *leaves += 1;
        if *leaves > limit {
            return Err(OracleError::GuardExceeded { limit });
        }
        return Ok(model.evaluate(pos));
    }
    let mut values = Vec::new();
    for mv in model.moves(pos) {
        values.push(enumerate(model, &model.play(pos, mv), depth - 1, leaves, limit)?);
    }
    let best = match model.kind(pos) {
        NodeKind::Max => values.into_iter().max(),
        NodeKind::Min => values.into_iter().min(),
    };
    Ok(best.expect("non-terminal positions have moves"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{SyntheticTree, SyntheticTreeSpec};
    use crate::INF;

    #[test]
    fn depth_zero_is_evaluate() {
        let t = SyntheticTree::new(SyntheticTreeSpec::default()).unwrap();
        let (_, c) = t.children(&t.root()).unwrap()[1];
        assert_eq!(minimax(&t, &c, 0).unwrap(), t.evaluate(&c));
    }

    #[test]
    fn range_covers_every_depth() {
        let t = SyntheticTree::new(SyntheticTreeSpec::default()).unwrap();
        let r = t.root();
        let (lo, hi) = value_range(&t, &r, 4).unwrap();
        for d in 0..=4 {
            let v = minimax(&t, &r, d).unwrap();
            assert!(lo <= v && v <= hi);
        }
        assert_eq!(value_range(&t, &r, 0).unwrap(), (t.evaluate(&r), t.evaluate(&r)));
    }

    /// Lazily generated uniform tree of any size.
    struct Wide;

    impl GameModel for Wide {
        type Position = (u64, u32);
        fn kind(&self, p: &(u64, u32)) -> NodeKind {
            if p.1 % 2 == 0 {
                NodeKind::Max
            } else {
                NodeKind::Min
            }
        }
        fn is_terminal(&self, _: &(u64, u32)) -> bool {
            false
        }
        fn moves(&self, _: &(u64, u32)) -> Vec<Move> {
            (0..10).map(Move).collect()
        }
        fn play(&self, p: &(u64, u32), mv: Move) -> (u64, u32) {
            (p.0 * 10 + u64::from(mv.0), p.1 + 1)
        }
        fn evaluate(&self, p: &(u64, u32)) -> Value {
            (p.0 % 7) as Value
        }
        fn key(&self, p: &(u64, u32)) -> u64 {
            p.0
        }
        fn ply(&self, p: &(u64, u32)) -> u32 {
            p.1
        }
    }

    #[test]
    fn guard_refuses_megasearch() {
        assert!(minimax(&Wide, &(0, 0), 5).is_ok());
        assert_eq!(
            minimax(&Wide, &(0, 0), 8),
            Err(OracleError::GuardExceeded { limit: LEAF_GUARD })
        );
    }

    #[test]
    fn sentinel_is_never_a_lower_bound_violation() {
        let t = SyntheticTree::new(SyntheticTreeSpec::default()).unwrap();
        let r = t.root();
        assert!(check_bound(&t, &r, 4, -INF, BoundDirection::Lower).unwrap());
        assert!(!check_bound(&t, &r, 4, -INF, BoundDirection::Upper).unwrap());
    }
}
