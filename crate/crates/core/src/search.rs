//! Instrumented tree walkers.
//!
//! All three are fail-soft where their reference pseudocode is: the returned
//! `g` may lie outside the window, and then bounds the minimax value:
//!
//! * `g <= alpha`: the value is at most `g` (failed low),
//! * `g >= beta`:  the value is at least `g` (failed high),
//! * otherwise `g` is the exact value.
//!
//! NegaScout follows Reinefeld's formulation, which clamps fail-low results
//! to `alpha`; its bounds are valid but can be looser.

use std::ops::{AddAssign, Sub};
use std::time::Instant;

use thiserror::Error;

use crate::game::{GameModel, Move, NodeKind};
use crate::tt::{BoundUpdate, StoreOutcome, TranspositionTable};
use crate::{Value, INF};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum WindowError {
    #[error("empty window: alpha {alpha} >= beta {beta}")]
    Empty { alpha: Value, beta: Value },
}

/// An open search window `(alpha, beta)` with `alpha < beta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub alpha: Value,
    pub beta: Value,
}

impl Window {
    pub const FULL: Window = Window {
        alpha: -INF,
        beta: INF,
    };

    pub fn new(alpha: Value, beta: Value) -> Result<Self, WindowError> {
        if alpha >= beta {
            return Err(WindowError::Empty { alpha, beta });
        }
        Ok(Self { alpha, beta })
    }

    /// The zero-size window `(beta - 1, beta)` that tests `value >= beta`.
    pub fn null(beta: Value) -> Self {
        Self {
            alpha: beta - 1,
            beta,
        }
    }

    fn negated(self) -> Self {
        Self {
            alpha: -self.beta,
            beta: -self.alpha,
        }
    }
}

/// Counters shared by every algorithm. `passes` is filled by drivers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SearchStats {
    pub nodes_visited: u64,
    pub leaves_evaluated: u64,
    pub tt_probes: u64,
    pub tt_hits: u64,
    pub tt_cutoffs: u64,
    pub tt_stores: u64,
    pub tt_replacements: u64,
    pub tt_depth_mismatches: u64,
    /// NegaScout re-searches after a null-window fail high.
    pub researches: u64,
    pub passes: u64,
}

impl AddAssign for SearchStats {
    fn add_assign(&mut self, o: Self) {
        self.nodes_visited += o.nodes_visited;
        self.leaves_evaluated += o.leaves_evaluated;
        self.tt_probes += o.tt_probes;
        self.tt_hits += o.tt_hits;
        self.tt_cutoffs += o.tt_cutoffs;
        self.tt_stores += o.tt_stores;
        self.tt_replacements += o.tt_replacements;
        self.tt_depth_mismatches += o.tt_depth_mismatches;
        self.researches += o.researches;
        self.passes += o.passes;
    }
}

impl Sub for SearchStats {
    type Output = SearchStats;

    fn sub(self, o: Self) -> Self {
        Self {
            nodes_visited: self.nodes_visited - o.nodes_visited,
            leaves_evaluated: self.leaves_evaluated - o.leaves_evaluated,
            tt_probes: self.tt_probes - o.tt_probes,
            tt_hits: self.tt_hits - o.tt_hits,
            tt_cutoffs: self.tt_cutoffs - o.tt_cutoffs,
            tt_stores: self.tt_stores - o.tt_stores,
            tt_replacements: self.tt_replacements - o.tt_replacements,
            tt_depth_mismatches: self.tt_depth_mismatches - o.tt_depth_mismatches,
            researches: self.researches - o.researches,
            passes: self.passes - o.passes,
        }
    }
}

/// Limit on the work a search may do before aborting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Budget {
    #[default]
    Unlimited,
    /// Abort once more than this many nodes have been visited.
    Nodes(u64),
    /// Wall-clock deadline, polled every 1024 nodes. Not reproducible.
    Deadline(Instant),
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("search budget exhausted")]
pub struct Aborted;

/// Per-search mutable state: counters and budget.
#[derive(Clone, Debug, Default)]
pub struct SearchContext {
    pub stats: SearchStats,
    budget: Budget,
}

impl SearchContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_budget(budget: Budget) -> Self {
        Self {
            stats: SearchStats::default(),
            budget,
        }
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    /// True when the budget leaves no room for further work.
    pub fn exhausted(&self) -> bool {
        match self.budget {
            Budget::Unlimited => false,
            Budget::Nodes(n) => self.stats.nodes_visited >= n,
            Budget::Deadline(t) => Instant::now() >= t,
        }
    }

    #[inline]
    pub(crate) fn enter(&mut self) -> Result<(), Aborted> {
        self.stats.nodes_visited += 1;
        match self.budget {
            Budget::Unlimited => Ok(()),
            Budget::Nodes(n) if self.stats.nodes_visited > n => Err(Aborted),
            Budget::Deadline(t) if self.stats.nodes_visited % 1024 == 0 && Instant::now() >= t => Err(Aborted),
            _ => Ok(()),
        }
    }

    pub(crate) fn record_store(&mut self, outcome: StoreOutcome) {
        self.stats.tt_stores += 1;
        if outcome == StoreOutcome::Replaced {
            self.stats.tt_replacements += 1;
        }
    }
}

/// Value of a root search plus the move that produced it, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootResult {
    pub value: Value,
    pub best_move: Option<Move>,
}

/// Converged value, root move and counters of one complete search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub value: Value,
    pub best_move: Option<Move>,
    pub stats: SearchStats,
}

/// A windowed search the drivers can issue repeatedly.
///
/// Memory-free implementations ignore `table`.
pub trait BoundSearch {
    fn search<G: GameModel>(
        &mut self,
        model: &G,
        pos: &G::Position,
        window: Window,
        depth: u32,
        table: &mut TranspositionTable,
        ctx: &mut SearchContext,
    ) -> Result<RootResult, Aborted>;
}

/// Textbook alpha-beta without memory.
#[derive(Clone, Copy, Debug, Default)]
pub struct AlphaBeta;

/// Fail-soft alpha-beta that stores and retrieves bounds in the table.
#[derive(Clone, Copy, Debug, Default)]
pub struct AlphaBetaWithMemory;

/// Reinefeld's NegaScout, optionally with a transposition table.
#[derive(Clone, Copy, Debug, Default)]
pub struct NegaScout {
    pub memory: bool,
}

impl BoundSearch for AlphaBeta {
    fn search<G: GameModel>(
        &mut self,
        model: &G,
        pos: &G::Position,
        window: Window,
        depth: u32,
        _table: &mut TranspositionTable,
        ctx: &mut SearchContext,
    ) -> Result<RootResult, Aborted> {
        let (value, best_move) = plain(model, pos, window.alpha, window.beta, depth, ctx)?;
        Ok(RootResult { value, best_move })
    }
}

impl BoundSearch for AlphaBetaWithMemory {
    fn search<G: GameModel>(
        &mut self,
        model: &G,
        pos: &G::Position,
        window: Window,
        depth: u32,
        table: &mut TranspositionTable,
        ctx: &mut SearchContext,
    ) -> Result<RootResult, Aborted> {
        let (value, best_move) = with_memory(model, pos, window.alpha, window.beta, depth, table, ctx)?;
        Ok(RootResult { value, best_move })
    }
}

impl BoundSearch for NegaScout {
    fn search<G: GameModel>(
        &mut self,
        model: &G,
        pos: &G::Position,
        window: Window,
        depth: u32,
        table: &mut TranspositionTable,
        ctx: &mut SearchContext,
    ) -> Result<RootResult, Aborted> {
        let sign = model.kind(pos).sign();
        let w = if sign == 1 { window } else { window.negated() };
        let table = self.memory.then_some(table);
        let (value, best_move) = negascout_node(model, pos, w.alpha, w.beta, depth, table, ctx)?;
        Ok(RootResult {
            value: sign * value,
            best_move,
        })
    }
}

fn run<S: BoundSearch, G: GameModel>(
    mut searcher: S,
    model: &G,
    pos: &G::Position,
    window: Window,
    depth: u32,
    table: &mut TranspositionTable,
    stats: &mut SearchStats,
) -> Value {
    let mut ctx = SearchContext::new();
    let r = searcher
        .search(model, pos, window, depth, table, &mut ctx)
        .expect("unlimited budget never aborts");
    *stats += ctx.stats;
    r.value
}

/// Fail-soft alpha-beta without memory.
pub fn alphabeta_plain<G: GameModel>(
    model: &G,
    pos: &G::Position,
    window: Window,
    depth: u32,
    stats: &mut SearchStats,
) -> Value {
    let mut ctx = SearchContext::new();
    let (v, _) = plain(model, pos, window.alpha, window.beta, depth, &mut ctx).expect("unlimited budget never aborts");
    *stats += ctx.stats;
    v
}

/// Fail-soft alpha-beta backed by `table`.
pub fn alphabeta_with_memory<G: GameModel>(
    model: &G,
    pos: &G::Position,
    window: Window,
    depth: u32,
    table: &mut TranspositionTable,
    stats: &mut SearchStats,
) -> Value {
    run(AlphaBetaWithMemory, model, pos, window, depth, table, stats)
}

/// Memory-free NegaScout; `window` and result are from MAX's point of view.
pub fn negascout<G: GameModel>(
    model: &G,
    pos: &G::Position,
    window: Window,
    depth: u32,
    stats: &mut SearchStats,
) -> Value {
    let sign = model.kind(pos).sign();
    let w = if sign == 1 { window } else { window.negated() };
    let mut ctx = SearchContext::new();
    let (v, _) = negascout_node(model, pos, w.alpha, w.beta, depth, None, &mut ctx).expect("unlimited budget never aborts");
    *stats += ctx.stats;
    sign * v
}

/// NegaScout that probes and stores bounds in `table`.
pub fn negascout_with_memory<G: GameModel>(
    model: &G,
    pos: &G::Position,
    window: Window,
    depth: u32,
    table: &mut TranspositionTable,
    stats: &mut SearchStats,
) -> Value {
    run(NegaScout { memory: true }, model, pos, window, depth, table, stats)
}

/// Runs `searcher` once with the full window.
pub fn full_window_search<S: BoundSearch, G: GameModel>(
    searcher: &mut S,
    model: &G,
    pos: &G::Position,
    depth: u32,
    table: &mut TranspositionTable,
) -> SearchOutcome {
    let mut ctx = SearchContext::new();
    let r = searcher
        .search(model, pos, Window::FULL, depth, table, &mut ctx)
        .expect("unlimited budget never aborts");
    SearchOutcome {
        value: r.value,
        best_move: r.best_move,
        stats: ctx.stats,
    }
}

#[inline]
fn is_leaf<G: GameModel>(model: &G, pos: &G::Position, depth: u32) -> bool {
    depth == 0 || model.is_terminal(pos)
}

fn plain<G: GameModel>(
    model: &G,
    pos: &G::Position,
    alpha: Value,
    beta: Value,
    depth: u32,
    ctx: &mut SearchContext,
) -> Result<(Value, Option<Move>), Aborted> {
    ctx.enter()?;
    if is_leaf(model, pos, depth) {
        ctx.stats.leaves_evaluated += 1;
        return Ok((model.evaluate(pos), None));
    }
    let mut best = None;
    let g = match model.kind(pos) {
        NodeKind::Max => {
            let mut g = -INF;
            let mut a = alpha;
            for mv in model.moves(pos) {
                if g >= beta {
                    break;
                }
                let (v, _) = plain(model, &model.play(pos, mv), a, beta, depth - 1, ctx)?;
                if v > g {
                    g = v;
                    best = Some(mv);
                }
                a = a.max(g);
            }
            g
        }
        NodeKind::Min => {
            let mut g = INF;
            let mut b = beta;
            for mv in model.moves(pos) {
                if g <= alpha {
                    break;
                }
                let (v, _) = plain(model, &model.play(pos, mv), alpha, b, depth - 1, ctx)?;
                if v < g {
                    g = v;
                    best = Some(mv);
                }
                b = b.min(g);
            }
            g
        }
    };
    Ok((g, best))
}

fn hoist(moves: &mut [Move], hint: Option<Move>) {
    if let Some(h) = hint {
        if let Some(i) = moves.iter().position(|&m| m == h) {
            moves[..=i].rotate_right(1);
        }
    }
}

fn with_memory<G: GameModel>(
    model: &G,
    pos: &G::Position,
    mut alpha: Value,
    mut beta: Value,
    depth: u32,
    table: &mut TranspositionTable,
    ctx: &mut SearchContext,
) -> Result<(Value, Option<Move>), Aborted> {
    ctx.enter()?;
    let leaf = is_leaf(model, pos, depth);
    let use_table = !leaf || table.config().store_leaves;
    let key = model.key(pos);
    let mut hint = None;

    if use_table {
        ctx.stats.tt_probes += 1;
        if let Some(probe) = table.probe(key, depth) {
            hint = probe.best_move;
            match probe.bounds {
                Some(b) => {
                    ctx.stats.tt_hits += 1;
                    if b.lower >= beta || b.is_exact() {
                        ctx.stats.tt_cutoffs += 1;
                        return Ok((b.lower, hint));
                    }
                    if b.upper <= alpha {
                        ctx.stats.tt_cutoffs += 1;
                        return Ok((b.upper, hint));
                    }
                    alpha = alpha.max(b.lower);
                    beta = beta.min(b.upper);
                }
                None => ctx.stats.tt_depth_mismatches += 1,
            }
        }
    }

    let mut best = None;
    let g = if leaf {
        ctx.stats.leaves_evaluated += 1;
        model.evaluate(pos)
    } else {
        let mut moves = model.moves(pos);
        hoist(&mut moves, hint);
        match model.kind(pos) {
            NodeKind::Max => {
                let mut g = -INF;
                let mut a = alpha;
                for mv in moves {
                    if g >= beta {
                        break;
                    }
                    let (v, _) = with_memory(model, &model.play(pos, mv), a, beta, depth - 1, table, ctx)?;
                    if v > g {
                        g = v;
                        best = Some(mv);
                    }
                    a = a.max(g);
                }
                g
            }
            NodeKind::Min => {
                let mut g = INF;
                let mut b = beta;
                for mv in moves {
                    if g <= alpha {
                        break;
                    }
                    let (v, _) = with_memory(model, &model.play(pos, mv), alpha, b, depth - 1, table, ctx)?;
                    if v < g {
                        g = v;
                        best = Some(mv);
                    }
                    b = b.min(g);
                }
                g
            }
        }
    };

    // A move is only worth remembering if it beat the window for the side to move.
    let improved = match model.kind(pos) {
        NodeKind::Max => g > alpha,
        NodeKind::Min => g < beta,
    };
    let best = best.filter(|_| improved);
    if use_table {
        let update = if leaf {
            BoundUpdate::Exact(g)
        } else if g <= alpha {
            BoundUpdate::Upper(g)
        } else if g >= beta {
            BoundUpdate::Lower(g)
        } else {
            BoundUpdate::Exact(g)
        };
        let outcome = table.store(key, depth, update, best);
        ctx.record_store(outcome);
    }
    Ok((g, best))
}

/// Side-to-move bound update converted to MAX's point of view.
fn to_max_view(update: BoundUpdate, sign: Value) -> BoundUpdate {
    if sign == 1 {
        return update;
    }
    match update {
        BoundUpdate::Lower(v) => BoundUpdate::Upper(-v),
        BoundUpdate::Upper(v) => BoundUpdate::Lower(-v),
        BoundUpdate::Exact(v) => BoundUpdate::Exact(-v),
    }
}

// Negamax form: values are from the side to move's point of view.
fn negascout_node<G: GameModel>(
    model: &G,
    pos: &G::Position,
    mut alpha: Value,
    mut beta: Value,
    depth: u32,
    mut table: Option<&mut TranspositionTable>,
    ctx: &mut SearchContext,
) -> Result<(Value, Option<Move>), Aborted> {
    ctx.enter()?;
    let sign = model.kind(pos).sign();
    let leaf = is_leaf(model, pos, depth);
    let key = model.key(pos);
    let mut hint = None;
    let use_table = table
        .as_deref()
        .is_some_and(|t| !leaf || t.config().store_leaves);

    if use_table {
        let t = table.as_deref_mut().expect("checked above");
        ctx.stats.tt_probes += 1;
        if let Some(probe) = t.probe(key, depth) {
            hint = probe.best_move;
            match probe.bounds {
                Some(b) => {
                    ctx.stats.tt_hits += 1;
                    let (lower, upper) = if sign == 1 {
                        (b.lower, b.upper)
                    } else {
                        (-b.upper, -b.lower)
                    };
                    if lower >= beta || lower == upper {
                        ctx.stats.tt_cutoffs += 1;
                        return Ok((lower, hint));
                    }
                    if upper <= alpha {
                        ctx.stats.tt_cutoffs += 1;
                        return Ok((upper, hint));
                    }
                    alpha = alpha.max(lower);
                    beta = beta.min(upper);
                }
                None => ctx.stats.tt_depth_mismatches += 1,
            }
        }
    }

    if leaf {
        ctx.stats.leaves_evaluated += 1;
        let v = sign * model.evaluate(pos);
        if use_table {
            let t = table.as_deref_mut().expect("checked above");
            let outcome = t.store(key, depth, to_max_view(BoundUpdate::Exact(v), sign), None);
            ctx.record_store(outcome);
        }
        return Ok((v, None));
    }

    let mut moves = model.moves(pos);
    if use_table {
        hoist(&mut moves, hint);
    }
    let mut a = alpha;
    let mut b = beta;
    let mut best = None;
    for (i, mv) in moves.into_iter().enumerate() {
        let child = model.play(pos, mv);
        let (r, _) = negascout_node(model, &child, -b, -a, depth - 1, table.as_deref_mut(), ctx)?;
        let t = -r;
        let before = a;
        // Null-window results one ply above the leaves are already exact.
        if t > a && t < beta && i > 0 && depth >= 2 {
            ctx.stats.researches += 1;
            let (r, _) = negascout_node(model, &child, -beta, -t, depth - 1, table.as_deref_mut(), ctx)?;
            a = -r;
        }
        a = a.max(t);
        if a > before {
            best = Some(mv);
        }
        if a >= beta {
            break;
        }
        b = a + 1;
    }

    if use_table {
        let update = if a <= alpha {
            BoundUpdate::Upper(a)
        } else if a >= beta {
            BoundUpdate::Lower(a)
        } else {
            BoundUpdate::Exact(a)
        };
        let t = table.as_deref_mut().expect("checked above");
        let outcome = t.store(key, depth, to_max_view(update, sign), best);
        ctx.record_store(outcome);
    }
    Ok((a, best))
}
