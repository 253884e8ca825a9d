//! MTD drivers: minimax search as a sequence of zero-window tests.
//!
//! Each pass asks the memory-enhanced alpha-beta whether the root value is at
//! least some pivot `beta`. A fail high raises the lower bound, a fail low
//! lowers the upper bound, and the loop stops when the two meet. The
//! transposition table makes the repeated passes cheap.

use std::collections::HashMap;

use thiserror::Error;

use crate::game::{GameModel, Move, NodeKind};
use crate::search::{
    Aborted, AlphaBetaWithMemory, BoundSearch, Budget, RootResult, SearchContext, SearchStats, Window,
};
use crate::tt::{BoundUpdate, Bounds, TranspositionTable};
use crate::{Value, INF};

/// How each pass chooses its pivot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PivotKind {
    /// Test just above the last bound: `beta = g + 1` after a fail high, `g` after a fail low.
    #[default]
    MtdF,
    /// MTD(f) seeded with `+INF`: descends from above, one upper bound at a time.
    PlusInf,
    /// MTD(f) seeded with `-INF`: ascends from below.
    MinusInf,
    /// Bisects the interval once both bounds are finite (rounding toward the lower bound).
    Bisect,
}

/// Pivot rule plus an optional step bonus that enlarges steps in the
/// current search direction every `bonus_period` passes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PivotPolicy {
    pub kind: PivotKind,
    pub step_bonus: Value,
    pub bonus_period: u32,
}

impl Default for PivotPolicy {
    fn default() -> Self {
        Self::new(PivotKind::MtdF)
    }
}

impl PivotPolicy {
    pub fn new(kind: PivotKind) -> Self {
        Self {
            kind,
            step_bonus: 0,
            bonus_period: 2,
        }
    }

    pub fn with_bonus(mut self, step_bonus: Value, bonus_period: u32) -> Self {
        self.step_bonus = step_bonus.max(0);
        self.bonus_period = bonus_period.max(1);
        self
    }

    /// The first guess actually used for a requested one.
    pub fn seed(&self, f: Value) -> Value {
        match self.kind {
            PivotKind::PlusInf => INF,
            PivotKind::MinusInf => -INF,
            PivotKind::MtdF | PivotKind::Bisect => f,
        }
    }
}

/// Source of each iteration's first guess under iterative deepening.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum GuessPolicy {
    Zero,
    #[default]
    PreviousIteration,
    /// Value from two iterations back; damps odd/even oscillation.
    TwoPliesAgo,
}

/// One zero-window pass as seen at the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PassRecord {
    /// 1-based.
    pub index: u64,
    pub beta: Value,
    pub g: Value,
    /// Root interval after this pass.
    pub bounds: Bounds,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MtdOutcome {
    pub value: Value,
    pub best_move: Option<Move>,
    pub passes: u64,
    pub final_bounds: Bounds,
    pub stats: SearchStats,
    pub depth: u32,
    pub first_guess: Value,
    pub trace: Vec<PassRecord>,
}

impl MtdOutcome {
    pub fn converged(&self) -> bool {
        self.final_bounds.lower >= self.final_bounds.upper
    }
}

/// Root move of a converged search. Playing it reaches a child whose
/// `depth - 1` minimax value equals the root value.
pub fn best_move_of(outcome: &MtdOutcome) -> Option<Move> {
    outcome.best_move
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum MtdError {
    #[error("MTD needs depth >= 1")]
    ZeroDepth,
    #[error("first guess {0} outside [-INF, INF]")]
    GuessOutOfRange(Value),
    #[error("no convergence after {0} passes")]
    NonConvergence(u64),
    #[error(transparent)]
    Aborted(#[from] Aborted),
}

const WATCHDOG_PASSES: u64 = 2 * INF as u64;

struct PivotState {
    policy: PivotPolicy,
    boosted_up: Option<bool>,
    corrective: bool,
}

impl PivotState {
    fn new(policy: PivotPolicy) -> Self {
        Self {
            policy,
            boosted_up: None,
            corrective: false,
        }
    }

    fn next(&mut self, g: Value, lower: Value, upper: Value, pass: u64) -> Value {
        let plain = match self.policy.kind {
            PivotKind::Bisect if lower > -INF && upper < INF => lower + ((upper - lower) / 2).max(1),
            _ => {
                if g == lower {
                    g + 1
                } else {
                    g
                }
            }
        };
        self.boosted_up = None;
        let bonus = self.policy.step_bonus;
        let due = pass >= 2 && pass % u64::from(self.policy.bonus_period) == 0;
        if bonus > 0 && due && !self.corrective {
            let up = g == lower;
            let boosted = if up { plain + bonus } else { plain - bonus };
            let boosted = boosted.clamp(lower + 1, upper);
            if boosted != plain {
                self.boosted_up = Some(up);
                return boosted;
            }
        }
        self.corrective = false;
        plain
    }

    fn observe(&mut self, beta: Value, g: Value) {
        if let Some(up) = self.boosted_up {
            // overshoot: the boosted test landed on the far side of the value
            if (g >= beta) != up {
                self.corrective = true;
            }
        }
    }
}

/// An MTD driver over a bound searcher, alpha-beta with memory by default.
#[derive(Debug)]
pub struct Mtd<S = AlphaBetaWithMemory> {
    pub policy: PivotPolicy,
    /// Search the root's children from the driver, sorted by their last results.
    pub root_unroll: bool,
    /// Passes after which a search gives up with [`MtdError::NonConvergence`].
    pub max_passes: u64,
    searcher: S,
    root_scores: HashMap<Move, Value>,
    root_key: Option<u64>,
}

impl Mtd<AlphaBetaWithMemory> {
    pub fn new(policy: PivotPolicy) -> Self {
        Self::with_searcher(policy, AlphaBetaWithMemory)
    }
}

impl<S: BoundSearch> Mtd<S> {
    pub fn with_searcher(policy: PivotPolicy, searcher: S) -> Self {
        Self {
            policy,
            root_unroll: false,
            max_passes: WATCHDOG_PASSES,
            searcher,
            root_scores: HashMap::new(),
            root_key: None,
        }
    }

    pub fn root_unroll(mut self, on: bool) -> Self {
        self.root_unroll = on;
        self
    }

    /// Lowers the pass watchdog. A correct search never needs more than
    /// twice the number of distinct values it can return, plus two.
    pub fn max_passes(mut self, passes: u64) -> Self {
        self.max_passes = passes.max(2);
        self
    }

    /// One MTD search at fixed `depth` starting from `first_guess`.
    pub fn run<G: GameModel>(
        &mut self,
        model: &G,
        root: &G::Position,
        first_guess: Value,
        depth: u32,
        table: &mut TranspositionTable,
        ctx: &mut SearchContext,
    ) -> Result<MtdOutcome, MtdError> {
        if depth == 0 {
            return Err(MtdError::ZeroDepth);
        }
        if !(-INF..=INF).contains(&first_guess) {
            return Err(MtdError::GuessOutOfRange(first_guess));
        }
        let start = ctx.stats;
        let maximizing = model.kind(root) == NodeKind::Max;
        let seed = self.policy.seed(first_guess);
        let mut pivots = PivotState::new(self.policy);
        let mut g = seed;
        let mut lower = -INF;
        let mut upper = INF;
        let mut best_move = None;
        let mut trace = Vec::new();
        let mut passes = 0u64;

        loop {
            let beta = pivots.next(g, lower, upper, passes + 1);
            let before = ctx.stats.nodes_visited;
            let r = self.pass(model, root, beta, depth, table, ctx)?;
            passes += 1;
            g = r.value;
            let failed_high = g >= beta;
            if failed_high {
                lower = g;
            } else {
                upper = g;
            }
            // the side to move learns its move from passes that went its way
            if failed_high == maximizing && r.best_move.is_some() {
                best_move = r.best_move;
            }
            pivots.observe(beta, g);
            trace.push(PassRecord {
                index: passes,
                beta,
                g,
                bounds: Bounds { lower, upper },
                nodes: ctx.stats.nodes_visited - before,
            });
            if lower >= upper {
                break;
            }
            if passes >= self.max_passes {
                return Err(MtdError::NonConvergence(passes));
            }
        }

        ctx.stats.passes += passes;
        Ok(MtdOutcome {
            value: g,
            best_move,
            passes,
            final_bounds: Bounds { lower, upper },
            stats: ctx.stats - start,
            depth,
            first_guess: seed,
            trace,
        })
    }

    /// Iterative deepening over `1..=max_depth`, seeding each iteration per `guess`.
    ///
    /// Stops early once `ctx`'s budget is spent; an iteration interrupted by
    /// the budget is discarded.
    pub fn deepen<G: GameModel>(
        &mut self,
        model: &G,
        root: &G::Position,
        max_depth: u32,
        guess: GuessPolicy,
        table: &mut TranspositionTable,
        ctx: &mut SearchContext,
    ) -> Result<DeepeningOutcome, MtdError> {
        if max_depth == 0 {
            return Err(MtdError::ZeroDepth);
        }
        let start = ctx.stats;
        let mut values: Vec<Value> = Vec::new();
        let mut iterations = Vec::new();
        let mut completed = None;
        for depth in 1..=max_depth {
            let f = first_guess(guess, &values);
            match self.run(model, root, f, depth, table, ctx) {
                Ok(outcome) => {
                    values.push(outcome.value);
                    iterations.push(IterationSummary::of(&outcome));
                    completed = Some(outcome);
                }
                Err(MtdError::Aborted(_)) => break,
                Err(e) => return Err(e),
            }
            if ctx.exhausted() {
                break;
            }
        }
        Ok(DeepeningOutcome {
            completed_depth: completed.as_ref().map_or(0, |o| o.depth),
            completed,
            iterations,
            stats: ctx.stats - start,
        })
    }

    fn pass<G: GameModel>(
        &mut self,
        model: &G,
        root: &G::Position,
        beta: Value,
        depth: u32,
        table: &mut TranspositionTable,
        ctx: &mut SearchContext,
    ) -> Result<RootResult, Aborted> {
        let window = Window::null(beta);
        if !self.root_unroll || model.is_terminal(root) {
            return self.searcher.search(model, root, window, depth, table, ctx);
        }
        self.unrolled_pass(model, root, window, depth, table, ctx)
    }

    fn unrolled_pass<G: GameModel>(
        &mut self,
        model: &G,
        root: &G::Position,
        window: Window,
        depth: u32,
        table: &mut TranspositionTable,
        ctx: &mut SearchContext,
    ) -> Result<RootResult, Aborted> {
        let key = model.key(root);
        if self.root_key != Some(key) {
            self.root_scores.clear();
            self.root_key = Some(key);
        }
        ctx.enter()?;
        let (mut alpha, mut beta) = (window.alpha, window.beta);
        ctx.stats.tt_probes += 1;
        if let Some(probe) = table.probe(key, depth) {
            if let Some(b) = probe.bounds {
                ctx.stats.tt_hits += 1;
                if b.lower >= beta || b.is_exact() {
                    ctx.stats.tt_cutoffs += 1;
                    return Ok(RootResult {
                        value: b.lower,
                        best_move: probe.best_move,
                    });
                }
                if b.upper <= alpha {
                    ctx.stats.tt_cutoffs += 1;
                    return Ok(RootResult {
                        value: b.upper,
                        best_move: probe.best_move,
                    });
                }
                alpha = alpha.max(b.lower);
                beta = beta.min(b.upper);
            } else {
                ctx.stats.tt_depth_mismatches += 1;
            }
        }

        let maximizing = model.kind(root) == NodeKind::Max;
        let mut moves = model.moves(root);
        // best first: unscored moves keep generation order after the scored ones
        moves.sort_by_key(|mv| match self.root_scores.get(mv) {
            Some(&v) if maximizing => (0, -v),
            Some(&v) => (0, v),
            None => (1, 0),
        });

        let mut g = if maximizing { -INF } else { INF };
        let mut best = None;
        for mv in moves {
            if (maximizing && g >= beta) || (!maximizing && g <= alpha) {
                break;
            }
            let child_window = if maximizing {
                Window {
                    alpha: alpha.max(g),
                    beta,
                }
            } else {
                Window {
                    alpha,
                    beta: beta.min(g),
                }
            };
            let child = model.play(root, mv);
            let v = self.searcher.search(model, &child, child_window, depth - 1, table, ctx)?.value;
            self.root_scores.insert(mv, v);
            if (maximizing && v > g) || (!maximizing && v < g) {
                g = v;
                best = Some(mv);
            }
        }

        let improved = if maximizing { g > alpha } else { g < beta };
        let best = best.filter(|_| improved);
        let update = if g <= alpha {
            BoundUpdate::Upper(g)
        } else if g >= beta {
            BoundUpdate::Lower(g)
        } else {
            BoundUpdate::Exact(g)
        };
        let outcome = table.store(key, depth, update, best);
        ctx.record_store(outcome);
        Ok(RootResult {
            value: g,
            best_move: best,
        })
    }
}

fn first_guess(policy: GuessPolicy, values: &[Value]) -> Value {
    match (policy, values) {
        (GuessPolicy::Zero, _) | (_, []) => 0,
        (GuessPolicy::TwoPliesAgo, [.., two_ago, _]) => *two_ago,
        (_, [.., last]) => *last,
    }
}

/// MTD search of `root` at `depth` with a fresh counter set.
pub fn mtd<G: GameModel>(
    model: &G,
    root: &G::Position,
    first_guess: Value,
    depth: u32,
    policy: &PivotPolicy,
    table: &mut TranspositionTable,
) -> Result<MtdOutcome, MtdError> {
    let mut ctx = SearchContext::new();
    Mtd::new(*policy).run(model, root, first_guess, depth, table, &mut ctx)
}

/// Summary of one completed deepening iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IterationSummary {
    pub depth: u32,
    pub first_guess: Value,
    pub value: Value,
    pub passes: u64,
    pub best_move: Option<Move>,
    pub stats: SearchStats,
}

impl IterationSummary {
    fn of(o: &MtdOutcome) -> Self {
        Self {
            depth: o.depth,
            first_guess: o.first_guess,
            value: o.value,
            passes: o.passes,
            best_move: o.best_move,
            stats: o.stats,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeepeningOutcome {
    /// Deepest fully completed iteration; `None` if the budget ran out during depth 1.
    pub completed: Option<MtdOutcome>,
    pub completed_depth: u32,
    pub iterations: Vec<IterationSummary>,
    /// Cumulative over all iterations, including an aborted last one.
    pub stats: SearchStats,
}

/// Iterative-deepening MTD with a deterministic node budget.
pub fn iterative_deepening<G: GameModel>(
    model: &G,
    root: &G::Position,
    max_depth: u32,
    budget: Budget,
    guess: GuessPolicy,
    policy: &PivotPolicy,
    table: &mut TranspositionTable,
) -> Result<DeepeningOutcome, MtdError> {
    let mut ctx = SearchContext::with_budget(budget);
    Mtd::new(*policy).deepen(model, root, max_depth, guess, table, &mut ctx)
}

/// Iterative deepening where each iteration is a single full-window search.
///
/// The baseline the MTD drivers are compared against.
pub fn deepen_full_window<S: BoundSearch, G: GameModel>(
    searcher: &mut S,
    model: &G,
    root: &G::Position,
    max_depth: u32,
    budget: Budget,
    table: &mut TranspositionTable,
) -> DeepeningOutcome {
    let mut ctx = SearchContext::with_budget(budget);
    let mut iterations = Vec::new();
    let mut completed = None;
    for depth in 1..=max_depth.max(1) {
        let before = ctx.stats;
        let Ok(r) = searcher.search(model, root, Window::FULL, depth, table, &mut ctx) else {
            break;
        };
        ctx.stats.passes += 1;
        let outcome = MtdOutcome {
            value: r.value,
            best_move: r.best_move,
            passes: 1,
            final_bounds: Bounds::exact(r.value),
            stats: ctx.stats - before,
            depth,
            first_guess: 0,
            trace: Vec::new(),
        };
        iterations.push(IterationSummary::of(&outcome));
        completed = Some(outcome);
        if ctx.exhausted() {
            break;
        }
    }
    DeepeningOutcome {
        completed_depth: completed.as_ref().map_or(0, |o| o.depth),
        completed,
        iterations,
        stats: ctx.stats,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guess_selection() {
        assert_eq!(first_guess(GuessPolicy::Zero, &[5, 6]), 0);
        assert_eq!(first_guess(GuessPolicy::PreviousIteration, &[]), 0);
        assert_eq!(first_guess(GuessPolicy::PreviousIteration, &[5, 6]), 6);
        assert_eq!(first_guess(GuessPolicy::TwoPliesAgo, &[5]), 5);
        assert_eq!(first_guess(GuessPolicy::TwoPliesAgo, &[5, 6, 7]), 6);
    }

    #[test]
    fn mtdf_pivot_rule() {
        let mut p = PivotState::new(PivotPolicy::default());
        assert_eq!(p.next(3, -INF, INF, 1), 3);
        assert_eq!(p.next(3, 3, INF, 2), 4);
        assert_eq!(p.next(-INF, -INF, INF, 1), -INF + 1);
        assert_eq!(p.next(INF, -INF, INF, 1), INF);
    }

    #[test]
    fn bisect_pivot_rounds_toward_lower() {
        let mut p = PivotState::new(PivotPolicy::new(PivotKind::Bisect));
        assert_eq!(p.next(0, 0, 10, 3), 5);
        assert_eq!(p.next(0, 0, 3, 3), 1);
        assert_eq!(p.next(0, 0, 1, 3), 1);
        // one infinite side: MTD(f) rule
        assert_eq!(p.next(7, -INF, 7, 2), 7);
    }

    #[test]
    fn bonus_then_corrective_pass() {
        let mut p = PivotState::new(PivotPolicy::default().with_bonus(10, 2));
        // pass 2 searching upward from lower = 0
        let beta = p.next(0, 0, INF, 2);
        assert_eq!(beta, 11);
        // overshoot: fails low at 4
        p.observe(beta, 4);
        // pass 4 would be due for a bonus, but the corrective pass comes first
        assert_eq!(p.next(4, 0, 4, 4), 4);
        p.observe(4, 4);
        assert_eq!(p.next(4, 4, INF, 6), 15);
    }

    #[test]
    fn bonus_is_clamped_inside_interval() {
        let mut p = PivotState::new(PivotPolicy::default().with_bonus(100, 1));
        assert_eq!(p.next(0, 0, 20, 2), 20);
        assert_eq!(p.next(20, -5, 20, 3), -4);
    }

    #[test]
    fn policy_seeds() {
        assert_eq!(PivotPolicy::new(PivotKind::PlusInf).seed(3), INF);
        assert_eq!(PivotPolicy::new(PivotKind::MinusInf).seed(3), -INF);
        assert_eq!(PivotPolicy::new(PivotKind::Bisect).seed(3), 3);
    }
}
