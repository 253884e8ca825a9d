//! One algorithm on one instance under iterative deepening.

use mtd_core::game::GameModel;
use mtd_core::mtd::{deepen_full_window, DeepeningOutcome, Mtd, MtdError};
use mtd_core::search::{AlphaBeta, AlphaBetaWithMemory, Budget, NegaScout, SearchContext};
use mtd_core::{PivotPolicy, TranspositionTable};

use crate::config::{Algorithm, BenchConfig};

pub fn budget(cfg: &BenchConfig) -> Budget {
    cfg.node_budget.map_or(Budget::Unlimited, Budget::Nodes)
}

/// Pivot policy of an MTD algorithm, with the configured step bonus.
pub fn pivot_policy(cfg: &BenchConfig, alg: Algorithm) -> Option<PivotPolicy> {
    alg.pivot()
        .map(|k| PivotPolicy::new(k).with_bonus(cfg.step_bonus, cfg.bonus_period))
}

/// Deepens `1..=depth`; every algorithm owns a fresh `table`.
pub fn run_algorithm<G: GameModel>(
    alg: Algorithm,
    model: &G,
    root: &G::Position,
    depth: u32,
    cfg: &BenchConfig,
    table: &mut TranspositionTable,
) -> Result<DeepeningOutcome, MtdError> {
    let budget = budget(cfg);
    if let Some(policy) = pivot_policy(cfg, alg) {
        let mut ctx = SearchContext::with_budget(budget);
        return Mtd::new(policy).deepen(model, root, depth, cfg.guess, table, &mut ctx);
    }
    Ok(match alg {
        Algorithm::AlphabetaPlain => deepen_full_window(&mut AlphaBeta, model, root, depth, budget, table),
        Algorithm::AlphabetaTt => deepen_full_window(&mut AlphaBetaWithMemory, model, root, depth, budget, table),
        Algorithm::Negascout => deepen_full_window(&mut NegaScout { memory: false }, model, root, depth, budget, table),
        Algorithm::NegascoutTt => deepen_full_window(&mut NegaScout { memory: true }, model, root, depth, budget, table),
        _ => unreachable!("MTD algorithms handled above"),
    })
}
