//! `mtd-bench trace`: the pass-by-pass listing of one MTD search.

use std::fmt::Write as _;

use mtd_core::mtd::{Mtd, MtdOutcome};
use mtd_core::oracle;
use mtd_core::search::SearchContext;
use mtd_core::{PivotPolicy, TranspositionTable};

use crate::bench::bound;
use crate::config::{policy_name, BenchConfig, FirstGuess};
use crate::instance;
use crate::BenchError;

/// One line per pass, then a convergence line.
pub fn render_passes(o: &MtdOutcome) -> String {
    let mut s = String::from("pass,beta,g,lower,upper,nodes\n");
    for p in &o.trace {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            p.index,
            bound(p.beta),
            p.g,
            bound(p.bounds.lower),
            bound(p.bounds.upper),
            p.nodes
        );
    }
    let _ = writeln!(
        s,
        "converged value={} passes={} best_move={} nodes={}",
        o.value,
        o.passes,
        o.best_move.map_or_else(|| "-".to_string(), |m| m.to_string()),
        o.stats.nodes_visited
    );
    s
}

/// Traces the first instance of the suite at its depth.
pub fn trace(cfg: &BenchConfig) -> Result<String, BenchError> {
    cfg.validate()?;
    let inst = instance::suite(cfg)?.swap_remove(0);
    let id = inst.id();
    let built = inst.build()?;
    crate::with_model!(built, |g, root| {
        let f = match cfg.first_guess {
            FirstGuess::Value(v) => v,
            FirstGuess::Oracle => oracle::minimax(g, root, inst.depth).map_err(|source| BenchError::Oracle {
                instance: id.clone(),
                source,
            })?,
        };
        let policy = PivotPolicy::new(cfg.policy).with_bonus(cfg.step_bonus, cfg.bonus_period);
        let mut table = TranspositionTable::new(cfg.table_config(inst.node_estimate()));
        let out = Mtd::new(policy).run(g, root, f, inst.depth, &mut table, &mut SearchContext::new())?;
        Ok(format!(
            "# trace {id} {} depth={} first_guess={f}\n{}",
            policy_name(cfg.policy),
            inst.depth,
            render_passes(&out)
        ))
    })
}
