//! The rules interface searched by every algorithm, plus two concrete models.

use std::fmt;

use thiserror::Error;

use crate::Value;

mod connect4;
mod synthetic;

pub use connect4::{Connect4, Connect4Position, C4_HEIGHT, C4_WIDTH};
pub use synthetic::{SyntheticPosition, SyntheticTree, SyntheticTreeSpec, MAX_SYNTHETIC_NODES};

/// Which player is to move. Children always have the opposite kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Max,
    Min,
}

impl NodeKind {
    pub fn opposite(self) -> Self {
        match self {
            NodeKind::Max => NodeKind::Min,
            NodeKind::Min => NodeKind::Max,
        }
    }

    /// +1 for MAX, -1 for MIN. Converts MAX-relative scores to side-to-move scores.
    pub fn sign(self) -> Value {
        match self {
            NodeKind::Max => 1,
            NodeKind::Min => -1,
        }
    }
}

/// Game-specific move identifier: a child index for synthetic trees, a
/// column for Connect-Four.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move(pub u16);

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("terminal position has no children")]
    TerminalPosition,
    #[error("illegal move {0}")]
    IllegalMove(Move),
    #[error("invalid synthetic tree spec: {0}")]
    InvalidSpec(String),
    #[error("malformed config line {line}: {reason}")]
    Config { line: usize, reason: String },
}

/// Rules of a two-player zero-sum game with perfect information.
///
/// Implementations are immutable; positions are values and [`play`](Self::play)
/// returns a fresh position.
pub trait GameModel {
    type Position: Clone;

    fn kind(&self, pos: &Self::Position) -> NodeKind;

    fn is_terminal(&self, pos: &Self::Position) -> bool;

    /// Legal moves in generation order. Empty exactly when the position is terminal.
    fn moves(&self, pos: &Self::Position) -> Vec<Move>;

    fn play(&self, pos: &Self::Position, mv: Move) -> Self::Position;

    /// Static score from MAX's point of view, in `[-VAL_MAX, VAL_MAX]`.
    fn evaluate(&self, pos: &Self::Position) -> Value;

    /// 64-bit key, a pure function of the game content and side to move.
    fn key(&self, pos: &Self::Position) -> u64;

    /// Plies since the model's root.
    fn ply(&self, pos: &Self::Position) -> u32;

    /// Ordered children of a non-terminal position.
    fn children(&self, pos: &Self::Position) -> Result<Vec<(Move, Self::Position)>, GameError> {
        if self.is_terminal(pos) {
            return Err(GameError::TerminalPosition);
        }
        Ok(self
            .moves(pos)
            .into_iter()
            .map(|mv| (mv, self.play(pos, mv)))
            .collect())
    }
}
