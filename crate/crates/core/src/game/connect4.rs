use std::fmt;

use super::{GameError, GameModel, Move, NodeKind};
use crate::mix::SplitMix64;
use crate::{Value, VAL_MAX};

pub const C4_WIDTH: usize = 5;
pub const C4_HEIGHT: usize = 4;

// One sentinel bit on top of every column keeps shifted alignments from wrapping.
const STRIDE: usize = C4_HEIGHT + 1;
const CELLS: usize = C4_WIDTH * C4_HEIGHT;
const MOVE_ORDER: [u16; C4_WIDTH] = [2, 1, 3, 0, 4];
const WINDOW_WEIGHT: [Value; 4] = [0, 1, 4, 16];
const ZOBRIST_SEED: u64 = 0x5eed_c0de_0c4f_0001;

fn bit(col: usize, row: usize) -> u64 {
    1 << (col * STRIDE + row)
}

fn bottom(col: usize) -> u64 {
    bit(col, 0)
}

fn top(col: usize) -> u64 {
    bit(col, C4_HEIGHT - 1)
}

fn column_mask(col: usize) -> u64 {
    ((1 << C4_HEIGHT) - 1) << (col * STRIDE)
}

fn square(b: u64) -> usize {
    let idx = b.trailing_zeros() as usize;
    (idx / STRIDE) * C4_HEIGHT + idx % STRIDE
}

fn aligned(stones: u64) -> bool {
    // vertical, horizontal, and both diagonals
    for shift in [1, STRIDE, STRIDE - 1, STRIDE + 1] {
        let m = stones & (stones >> shift);
        if m & (m >> (2 * shift)) != 0 {
            return true;
        }
    }
    false
}

/// A Connect-Four position. Player 0 moves first and is the MAX player.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Connect4Position {
    stones: [u64; 2],
    mask: u64,
    plies: u32,
    winner: Option<u8>,
    key: u64,
}

impl Connect4Position {
    pub fn plies(&self) -> u32 {
        self.plies
    }

    pub fn winner(&self) -> Option<u8> {
        self.winner
    }

    /// Player to move: 0 or 1.
    pub fn to_move(&self) -> u8 {
        (self.plies % 2) as u8
    }

    pub fn can_play(&self, col: usize) -> bool {
        col < C4_WIDTH && self.mask & top(col) == 0
    }

    /// Stone at `(col, row)`, row 0 at the bottom.
    pub fn cell(&self, col: usize, row: usize) -> Option<u8> {
        let b = bit(col, row);
        (0..2u8).find(|&p| self.stones[p as usize] & b != 0)
    }
}

impl fmt::Display for Connect4Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in (0..C4_HEIGHT).rev() {
            for col in 0..C4_WIDTH {
                let c = match self.cell(col, row) {
                    Some(0) => 'X',
                    Some(_) => 'O',
                    None => '.',
                };
                write!(f, "{c}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Connect-Four on a 5x4 board.
///
/// Keys are Zobrist hashes: one random code per (square, player) plus a
/// side-to-move code, updated incrementally by [`play`](GameModel::play)
/// and [`unplay`](Connect4::unplay).
#[derive(Clone, Debug)]
pub struct Connect4 {
    codes: [[u64; 2]; CELLS],
    side_code: u64,
    windows: Vec<u64>,
}

impl Default for Connect4 {
    fn default() -> Self {
        Self::new()
    }
}

impl Connect4 {
    pub fn new() -> Self {
        let mut rng = SplitMix64::new(ZOBRIST_SEED);
        let mut codes = [[0u64; 2]; CELLS];
        for pair in codes.iter_mut() {
            pair[0] = rng.next_u64();
            pair[1] = rng.next_u64();
        }
        let side_code = rng.next_u64();

        let mut windows = Vec::new();
        let dirs: [(isize, isize); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];
        for col in 0..C4_WIDTH as isize {
            for row in 0..C4_HEIGHT as isize {
                for (dc, dr) in dirs {
                    let (ec, er) = (col + 3 * dc, row + 3 * dr);
                    if !(0..C4_WIDTH as isize).contains(&ec) || !(0..C4_HEIGHT as isize).contains(&er) {
                        continue;
                    }
                    let w = (0..4)
                        .map(|k| bit((col + k * dc) as usize, (row + k * dr) as usize))
                        .fold(0, |acc, b| acc | b);
                    windows.push(w);
                }
            }
        }
        Self {
            codes,
            side_code,
            windows,
        }
    }

    pub fn start(&self) -> Connect4Position {
        Connect4Position {
            stones: [0, 0],
            mask: 0,
            plies: 0,
            winner: None,
            key: 0,
        }
    }

    /// Builds a position from a string of 1-based column digits, e.g. `"3321"`.
    pub fn from_moves(&self, moves: &str) -> Result<Connect4Position, GameError> {
        let mut pos = self.start();
        for ch in moves.chars() {
            let col = ch
                .to_digit(10)
                .and_then(|d| (d as usize).checked_sub(1))
                .ok_or(GameError::IllegalMove(Move(u16::MAX)))?;
            let mv = Move(col as u16);
            if self.is_terminal(&pos) || !pos.can_play(col) {
                return Err(GameError::IllegalMove(mv));
            }
            pos = self.play(&pos, mv);
        }
        Ok(pos)
    }

    /// Removes the top stone of `col`, which must belong to the player who moved last.
    pub fn unplay(&self, pos: &Connect4Position, mv: Move) -> Result<Connect4Position, GameError> {
        let col = mv.0 as usize;
        if pos.plies == 0 || col >= C4_WIDTH {
            return Err(GameError::IllegalMove(mv));
        }
        let in_col = pos.mask & column_mask(col);
        if in_col == 0 {
            return Err(GameError::IllegalMove(mv));
        }
        let b = 1u64 << (63 - in_col.leading_zeros());
        let mover = ((pos.plies - 1) % 2) as usize;
        if pos.stones[mover] & b == 0 {
            return Err(GameError::IllegalMove(mv));
        }
        let mut next = *pos;
        next.stones[mover] &= !b;
        next.mask &= !b;
        next.plies -= 1;
        next.winner = None;
        next.key ^= self.codes[square(b)][mover] ^ self.side_code;
        Ok(next)
    }

    /// Key recomputed from scratch; always equal to the incremental key.
    pub fn full_key(&self, pos: &Connect4Position) -> u64 {
        let mut key = if pos.plies % 2 == 1 { self.side_code } else { 0 };
        for (player, &stones) in pos.stones.iter().enumerate() {
            let mut rest = stones;
            while rest != 0 {
                let b = rest & rest.wrapping_neg();
                key ^= self.codes[square(b)][player];
                rest &= rest - 1;
            }
        }
        key
    }

    /// Plays `plies` uniformly random moves from the start position.
    /// Returns `None` if the game ends on or before the last of them.
    pub fn random_position(&self, seed: u64, plies: u32) -> Option<Connect4Position> {
        let mut rng = SplitMix64::new(seed);
        let mut pos = self.start();
        for _ in 0..plies {
            let moves = self.moves(&pos);
            if moves.is_empty() {
                return None;
            }
            let mv = moves[(rng.next_u64() % moves.len() as u64) as usize];
            pos = self.play(&pos, mv);
        }
        (!self.is_terminal(&pos)).then_some(pos)
    }

    fn heuristic(&self, pos: &Connect4Position) -> Value {
        let [max_stones, min_stones] = pos.stones;
        self.windows
            .iter()
            .map(|&w| {
                let a = (max_stones & w).count_ones() as usize;
                let b = (min_stones & w).count_ones() as usize;
                match (a, b) {
                    (0, 0) => 0,
                    (a, 0) => WINDOW_WEIGHT[a.min(3)],
                    (0, b) => -WINDOW_WEIGHT[b.min(3)],
                    _ => 0,
                }
            })
            .sum()
    }
}

impl GameModel for Connect4 {
    type Position = Connect4Position;

    fn kind(&self, pos: &Connect4Position) -> NodeKind {
        if pos.plies % 2 == 0 {
            NodeKind::Max
        } else {
            NodeKind::Min
        }
    }

    fn is_terminal(&self, pos: &Connect4Position) -> bool {
        pos.winner.is_some() || pos.plies as usize == CELLS
    }

    fn moves(&self, pos: &Connect4Position) -> Vec<Move> {
        if self.is_terminal(pos) {
            return Vec::new();
        }
        MOVE_ORDER
            .iter()
            .copied()
            .filter(|&c| pos.can_play(c as usize))
            .map(Move)
            .collect()
    }

    fn play(&self, pos: &Connect4Position, mv: Move) -> Connect4Position {
        let col = mv.0 as usize;
        assert!(
            !self.is_terminal(pos) && pos.can_play(col),
            "illegal Connect-Four move {mv}"
        );
        let b = (pos.mask + bottom(col)) & column_mask(col);
        let mover = (pos.plies % 2) as usize;
        let mut next = *pos;
        next.stones[mover] |= b;
        next.mask |= b;
        next.plies += 1;
        next.key ^= self.codes[square(b)][mover] ^ self.side_code;
        if aligned(next.stones[mover]) {
            next.winner = Some(mover as u8);
        }
        next
    }

    fn evaluate(&self, pos: &Connect4Position) -> Value {
        let win = VAL_MAX - pos.plies as Value;
        match pos.winner {
            Some(0) => win,
            Some(_) => -win,
            None if pos.plies as usize == CELLS => 0,
            None => self.heuristic(pos),
        }
    }

    fn key(&self, pos: &Connect4Position) -> u64 {
        pos.key
    }

    fn ply(&self, pos: &Connect4Position) -> u32 {
        pos.plies
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;

    #[test]
    fn seventeen_windows() {
        assert_eq!(Connect4::new().windows.len(), 17);
    }

    #[test]
    fn transposition_same_key() {
        let g = Connect4::new();
        let a = g.from_moves("1234").unwrap();
        let b = g.from_moves("3214").unwrap();
        assert_eq!(a, b);
        assert_eq!(g.key(&a), g.key(&b));
    }

    #[test]
    fn side_to_move_changes_key() {
        let g = Connect4::new();
        let p = g.from_moves("12").unwrap();
        let mut other = p;
        other.plies += 1;
        assert_ne!(g.full_key(&p), g.full_key(&other));
    }

    #[test]
    fn play_then_unplay_restores_key() {
        let g = Connect4::new();
        let p = g.from_moves("3324").unwrap();
        for mv in g.moves(&p) {
            let child = g.play(&p, mv);
            let back = g.unplay(&child, mv).unwrap();
            assert_eq!(back, p);
            assert_eq!(g.key(&back), g.key(&p));
        }
    }

    #[test]
    fn incremental_matches_full_key() {
        let g = Connect4::new();
        for seed in 0..200 {
            if let Some(p) = g.random_position(seed, (seed % 15) as u32) {
                assert_eq!(g.key(&p), g.full_key(&p));
            }
        }
    }

    #[test]
    fn detects_wins_in_every_direction() {
        let g = Connect4::new();
        // horizontal: X plays 1,2,3,4 on the bottom row
        let p = g.from_moves("1122334").unwrap();
        assert_eq!(p.winner(), Some(0));
        assert_eq!(g.evaluate(&p), VAL_MAX - 7);
        // vertical for O
        let p = g.from_moves("12123232").unwrap();
        assert_eq!(p.winner(), Some(1));
        assert_eq!(g.evaluate(&p), -(VAL_MAX - 8));
        // rising diagonal for X: (1,0) (2,1) (3,2) (4,3)
        let p = g.from_moves("12234334544").unwrap();
        assert_eq!(p.winner(), Some(0), "\n{p}");
        // falling diagonal for X: (5,0) (4,1) (3,2) (2,3)
        let p = g.from_moves("54432332122").unwrap();
        assert_eq!(p.winner(), Some(0), "\n{p}");
        assert!(g.moves(&p).is_empty());
    }

    #[test]
    fn no_wrap_across_columns() {
        let g = Connect4::new();
        // X holds col 1 rows 2-3 and col 2 rows 0-1: adjacent in bit order only
        // if the sentinel row were missing
        let p = g.from_moves("2121131").unwrap();
        assert_eq!(p.winner(), None, "\n{p}");
    }

    #[test]
    fn drawn_board_scores_zero() {
        let g = Connect4::new();
        // search for a random full board without a winner
        let draw = (0..5000u64)
            .filter_map(|s| {
                let mut rng = SplitMix64::new(s);
                let mut p = g.start();
                while !g.is_terminal(&p) {
                    let m = g.moves(&p);
                    p = g.play(&p, m[(rng.next_u64() % m.len() as u64) as usize]);
                }
                (p.winner().is_none()).then_some(p)
            })
            .next()
            .expect("some random game is drawn");
        assert_eq!(draw.plies(), 20);
        assert_eq!(g.evaluate(&draw), 0);
    }

    #[test]
    fn forced_single_move() {
        let g = Connect4::new();
        let found = (0..20000u64).find_map(|s| {
            let mut rng = SplitMix64::new(s);
            let mut p = g.start();
            while !g.is_terminal(&p) {
                let m = g.moves(&p);
                if m.len() == 1 {
                    return Some(p);
                }
                p = g.play(&p, m[(rng.next_u64() % m.len() as u64) as usize]);
            }
            None
        });
        let p = found.expect("a position with one legal move");
        assert_eq!(g.children(&p).unwrap().len(), 1);
    }

    #[test]
    fn no_accidental_key_collisions() {
        let g = Connect4::new();
        let mut seen: HashMap<u64, Connect4Position> = HashMap::new();
        let mut seed = 0u64;
        while seen.len() < 10_000 {
            let plies = (seed % 19) as u32;
            if let Some(p) = g.random_position(seed, plies) {
                if let Some(prev) = seen.insert(g.key(&p), p) {
                    assert_eq!(prev, p, "distinct positions share a key");
                }
            }
            seed += 1;
        }
    }

    #[test]
    fn illegal_moves_rejected() {
        let g = Connect4::new();
        assert!(g.from_moves("11111").is_err());
        assert!(g.from_moves("6").is_err());
        assert!(g.unplay(&g.start(), Move(0)).is_err());
        let p = g.from_moves("12").unwrap();
        // top of column 1 (index 0) belongs to X, but O moved last
        assert!(g.unplay(&p, Move(0)).is_err());
    }
}
