//! `mtd-bench bench`: node and leaf counts per (instance, algorithm).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use mtd_core::game::{GameModel, Move};
use mtd_core::mtd::DeepeningOutcome;
use mtd_core::oracle::{self, OracleError};
use mtd_core::{SearchStats, Value, INF};
use rayon::prelude::*;

use crate::config::{Algorithm, BenchConfig, Format};
use crate::instance::{self, Instance};
use crate::pool::TablePool;
use crate::run::run_algorithm;
use crate::BenchError;

/// One algorithm's deepening run on one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub instance: String,
    pub depth: u32,
    pub algorithm: Algorithm,
    pub value: Option<Value>,
    pub best_move: Option<Move>,
    pub completed_depth: u32,
    /// Passes of the deepest completed iteration.
    pub passes: u64,
    /// Summed over all iterations.
    pub stats: SearchStats,
}

pub const CSV_HEADER: &str = "instance,depth,algorithm,value,best_move,completed_depth,passes,\
nodes_visited,leaves_evaluated,tt_probes,tt_hits,tt_cutoffs,tt_stores,researches";

impl BenchRow {
    fn csv(&self) -> String {
        let s = &self.stats;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.instance,
            self.depth,
            self.algorithm,
            opt(self.value),
            opt(self.best_move.map(|m| m.0)),
            self.completed_depth,
            self.passes,
            s.nodes_visited,
            s.leaves_evaluated,
            s.tt_probes,
            s.tt_hits,
            s.tt_cutoffs,
            s.tt_stores,
            s.researches
        )
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(|| "-".to_string(), |v| v.to_string())
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub instances: usize,
    pub geomean_leaves: f64,
    pub geomean_nodes: f64,
    /// Geometric-mean leaves relative to the NegaScout baseline.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PassDistribution {
    pub algorithm: Algorithm,
    pub min: u64,
    pub median: u64,
    pub max: u64,
    /// Histogram: pass count -> instances.
    pub counts: BTreeMap<u64, usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub warnings: Vec<String>,
    /// Per-pass listings of the deepest MTD iterations, when requested.
    pub traces: Vec<String>,
}

impl BenchReport {
    /// `negascout_tt` when it ran, else `negascout`.
    pub fn baseline(&self) -> Option<Algorithm> {
        [Algorithm::NegascoutTt, Algorithm::Negascout]
            .into_iter()
            .find(|a| self.rows.iter().any(|r| r.algorithm == *a))
    }

    fn algorithms(&self) -> Vec<Algorithm> {
        let mut algs: Vec<Algorithm> = Vec::new();
        for r in &self.rows {
            if !algs.contains(&r.algorithm) {
                algs.push(r.algorithm);
            }
        }
        algs
    }

    pub fn summary(&self) -> Vec<AlgorithmSummary> {
        let gm = |alg: Algorithm, f: &dyn Fn(&BenchRow) -> u64| {
            let xs: Vec<f64> = self
                .rows
                .iter()
                .filter(|r| r.algorithm == alg)
                .map(|r| (f(r).max(1) as f64).ln())
                .collect();
            (xs.len(), (xs.iter().sum::<f64>() / xs.len().max(1) as f64).exp())
        };
        let base = self.baseline().map(|b| gm(b, &|r| r.stats.leaves_evaluated).1);
        self.algorithms()
            .into_iter()
            .map(|alg| {
                let (instances, geomean_leaves) = gm(alg, &|r| r.stats.leaves_evaluated);
                AlgorithmSummary {
                    algorithm: alg,
                    instances,
                    geomean_leaves,
                    geomean_nodes: gm(alg, &|r| r.stats.nodes_visited).1,
                    ratio: base.map(|b| geomean_leaves / b),
                }
            })
            .collect()
    }

    pub fn ratio(&self, alg: Algorithm) -> Option<f64> {
        self.summary().into_iter().find(|s| s.algorithm == alg).and_then(|s| s.ratio)
    }

    pub fn pass_distributions(&self) -> Vec<PassDistribution> {
        self.algorithms()
            .into_iter()
            .filter(|a| a.pivot().is_some())
            .filter_map(|alg| {
                let mut passes: Vec<u64> = self
                    .rows
                    .iter()
                    .filter(|r| r.algorithm == alg && r.value.is_some())
                    .map(|r| r.passes)
                    .collect();
                passes.sort_unstable();
                let mut counts = BTreeMap::new();
                for &p in &passes {
                    *counts.entry(p).or_default() += 1;
                }
                Some(PassDistribution {
                    algorithm: alg,
                    min: *passes.first()?,
                    median: passes[passes.len() / 2],
                    max: *passes.last()?,
                    counts,
                })
            })
            .collect()
    }

    /// Rows, a blank line, then the summary blocks.
    pub fn csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{CSV_HEADER}");
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.csv());
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "algorithm,instances,geomean_leaves,geomean_nodes,leaves_vs_baseline");
        for a in self.summary() {
            let _ = writeln!(
                s,
                "{},{},{:.2},{:.2},{}",
                a.algorithm,
                a.instances,
                a.geomean_leaves,
                a.geomean_nodes,
                a.ratio.map_or_else(|| "-".to_string(), |r| format!("{r:.4}"))
            );
        }
        let dists = self.pass_distributions();
        if !dists.is_empty() {
            let _ = writeln!(s);
            let _ = writeln!(s, "algorithm,passes_min,passes_median,passes_max,histogram");
            for d in dists {
                let hist: Vec<String> = d.counts.iter().map(|(p, n)| format!("{p}:{n}")).collect();
                let _ = writeln!(s, "{},{},{},{},{}", d.algorithm, d.min, d.median, d.max, hist.join(" "));
            }
            let _ = writeln!(s, "# passes counted in the deepest completed iteration of each instance");
        }
        for t in &self.traces {
            let _ = writeln!(s);
            s.push_str(t);
        }
        s
    }

    /// The same content as aligned columns.
    pub fn text(&self) -> String {
        let csv = self.csv();
        let mut out = String::new();
        for block in csv.split("\n\n") {
            let rows: Vec<Vec<&str>> = block
                .lines()
                .map(|l| if l.starts_with('#') { vec![l] } else { l.split(',').collect() })
                .collect();
            let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
            let widths: Vec<usize> = (0..cols)
                .map(|c| rows.iter().filter(|r| r.len() > 1).filter_map(|r| r.get(c)).map(|x| x.len()).max().unwrap_or(0))
                .collect();
            for r in &rows {
                let line: Vec<String> = r.iter().enumerate().map(|(i, x)| format!("{x:<w$}", w = widths[i])).collect();
                let _ = writeln!(out, "{}", line.join("  ").trim_end());
            }
            out.push('\n');
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Text => self.text(),
        }
    }
}

/// Runs every configured algorithm on every instance.
///
/// Instances are spread over worker threads, each with its own tables; rows
/// come back in instance order. Algorithms that completed the same depth
/// must agree on the value, or the whole run fails.
pub fn bench(cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    cfg.validate()?;
    let suite = instance::suite(cfg)?;
    let parts = suite
        .par_iter()
        .map_init(TablePool::default, |pool, inst| bench_instance(cfg, inst, pool))
        .collect::<Result<Vec<_>, BenchError>>()?;
    let mut report = BenchReport::default();
    for part in parts {
        match part {
            Part::Rows(rows, traces) => {
                report.rows.extend(rows);
                report.traces.extend(traces);
            }
            Part::Skipped(w) => report.warnings.push(w),
        }
    }
    Ok(report)
}

enum Part {
    Rows(Vec<BenchRow>, Vec<String>),
    Skipped(String),
}

fn bench_instance(cfg: &BenchConfig, inst: &Instance, pool: &TablePool) -> Result<Part, BenchError> {
    let built = inst.build()?;
    crate::with_model!(built, |g, root| bench_model(cfg, inst, g, root, pool))
}

fn bench_model<G: GameModel>(
    cfg: &BenchConfig,
    inst: &Instance,
    g: &G,
    root: &G::Position,
    pool: &TablePool,
) -> Result<Part, BenchError> {
    let id = inst.id();
    let mut rows = Vec::new();
    let mut traces = Vec::new();
    for &alg in &cfg.algorithms {
        let mut table = pool.lease(cfg.table_config(inst.node_estimate()));
        let out = run_algorithm(alg, g, root, inst.depth, cfg, &mut table)?;
        if cfg.verbose_trace && alg.pivot().is_some() {
            if let Some(t) = trace_block(&id, alg, &out) {
                traces.push(t);
            }
        }
        let done = out.completed.as_ref();
        rows.push(BenchRow {
            instance: id.clone(),
            depth: inst.depth,
            algorithm: alg,
            value: done.map(|o| o.value),
            best_move: done.and_then(|o| o.best_move),
            completed_depth: out.completed_depth,
            passes: done.map_or(0, |o| o.passes),
            stats: out.stats,
        });
    }

    let mut by_depth: BTreeMap<u32, (Algorithm, Value)> = BTreeMap::new();
    for r in &rows {
        let Some(v) = r.value else { continue };
        match by_depth.get(&r.completed_depth) {
            Some(&(first, w)) if w != v => {
                return Err(BenchError::ValueMismatch {
                    instance: id,
                    detail: format!("depth {}: {first} = {w}, {} = {v}", r.completed_depth, r.algorithm),
                });
            }
            Some(_) => {}
            None => {
                by_depth.insert(r.completed_depth, (r.algorithm, v));
            }
        }
    }

    if cfg.verify {
        for (&d, &(alg, v)) in &by_depth {
            match oracle::minimax(g, root, d) {
                Ok(truth) if truth == v => {}
                Ok(truth) => {
                    return Err(BenchError::ValueMismatch {
                        instance: id,
                        detail: format!("depth {d}: {alg} = {v}, oracle = {truth}"),
                    })
                }
                Err(e @ OracleError::GuardExceeded { .. }) => {
                    return Ok(Part::Skipped(format!("skipped {id}: {e}")));
                }
            }
        }
    }
    Ok(Part::Rows(rows, traces))
}

fn trace_block(id: &str, alg: Algorithm, out: &DeepeningOutcome) -> Option<String> {
    let done = out.completed.as_ref()?;
    let mut s = String::new();
    let _ = writeln!(s, "# trace {id} {alg} depth={} first_guess={}", done.depth, done.first_guess);
    s.push_str(&crate::trace::render_passes(done));
    Some(s)
}

pub(crate) fn bound(v: Value) -> String {
    match v {
        INF => "+inf".to_string(),
        v if v == -INF => "-inf".to_string(),
        v => v.to_string(),
    }
}
