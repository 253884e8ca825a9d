//! The invariant suite behind `mtd-bench verify`.
//!
//! Every instance is checked against the oracle; the bound searcher driving
//! the MTD runs is a type parameter so that broken variants can be plugged in
//! and shown to be caught.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use mtd_core::game::GameModel;
use mtd_core::mtd::{Mtd, MtdError};
use mtd_core::oracle::{self, OracleError};
use mtd_core::search::{
    alphabeta_plain, negascout, negascout_with_memory, AlphaBetaWithMemory, BoundSearch, SearchContext, SearchStats,
};
use mtd_core::{GuessPolicy, PivotKind, PivotPolicy, Value, Window, INF};
use rayon::prelude::*;

use crate::config::{guess_name, policy_name, BenchConfig};
use crate::instance::{self, Instance};
use crate::pool::TablePool;
use crate::BenchError;

const PIVOTS: [PivotKind; 4] = [PivotKind::MtdF, PivotKind::PlusInf, PivotKind::MinusInf, PivotKind::Bisect];
const GUESSES: [GuessPolicy; 3] = [GuessPolicy::Zero, GuessPolicy::PreviousIteration, GuessPolicy::TwoPliesAgo];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Law {
    ValueAgreement,
    ZeroWindowBound,
    Sandwich,
    TwoPass,
    CutoffMonotonicity,
    MemoryIdempotence,
    /// With an empty table and no transpositions, the memory search must
    /// return exactly the plain fail-soft value, not merely a valid bound.
    BoundTightness,
}

impl Law {
    pub const ALL: [Law; 7] = [
        Law::ValueAgreement,
        Law::ZeroWindowBound,
        Law::Sandwich,
        Law::TwoPass,
        Law::CutoffMonotonicity,
        Law::MemoryIdempotence,
        Law::BoundTightness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Law::ValueAgreement => "value_agreement",
            Law::ZeroWindowBound => "zero_window_bound",
            Law::Sandwich => "sandwich",
            Law::TwoPass => "two_pass",
            Law::CutoffMonotonicity => "cutoff_monotonicity",
            Law::MemoryIdempotence => "memory_idempotence",
            Law::BoundTightness => "bound_tightness",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub law: Law,
    pub instance: String,
    /// Config text that rebuilds the failing instance.
    pub replay: String,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub checks: u64,
    /// Instances contributing at least one check.
    pub instances: u64,
    pub violations: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub instances: usize,
    pub synthetic: usize,
    pub connect4: usize,
    /// Instances the oracle refused, with the reason.
    pub skipped: Vec<(String, String)>,
    pub tallies: BTreeMap<Law, Tally>,
    /// In instance order.
    pub violations: Vec<Violation>,
    /// Nodes visited by the deepening runs, summed; a cheap determinism fingerprint.
    pub nodes: u64,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn tally(&self, law: Law) -> Tally {
        self.tallies.get(&law).copied().unwrap_or_default()
    }

    pub fn first_counterexample(&self) -> Option<&Violation> {
        self.violations.first()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "instances={} synthetic={} connect4={} skipped={} nodes={}",
            self.instances,
            self.synthetic,
            self.connect4,
            self.skipped.len(),
            self.nodes
        );
        let _ = writeln!(s, "law,instances,checks,violations");
        for law in Law::ALL {
            let t = self.tally(law);
            let _ = writeln!(s, "{law},{},{},{}", t.instances, t.checks, t.violations);
        }
        for (id, why) in &self.skipped {
            let _ = writeln!(s, "# skipped {id}: {why}");
        }
        if let Some(v) = self.first_counterexample() {
            let _ = writeln!(s, "# first counterexample: {} on {}: {}", v.law, v.instance, v.detail);
            for line in v.replay.lines() {
                let _ = writeln!(s, "{line}");
            }
        }
        s
    }

    fn absorb(&mut self, part: InstanceReport) {
        self.instances += 1;
        if part.synthetic {
            self.synthetic += 1;
        } else {
            self.connect4 += 1;
        }
        if let Some(why) = part.skipped {
            self.skipped.push((part.id, why));
            return;
        }
        for (law, (checks, violations)) in part.counts {
            let t = self.tallies.entry(law).or_default();
            t.checks += checks;
            t.violations += violations;
            t.instances += u64::from(checks > 0);
        }
        self.violations.extend(part.violations);
        self.nodes += part.nodes;
    }
}

struct InstanceReport {
    id: String,
    synthetic: bool,
    skipped: Option<String>,
    counts: BTreeMap<Law, (u64, u64)>,
    violations: Vec<Violation>,
    nodes: u64,
}

struct Checker<'a> {
    inst: &'a Instance,
    report: InstanceReport,
}

impl Checker<'_> {
    /// Unwraps a driver result; a search that hit the pass cap is a violation.
    fn converged<T>(&mut self, what: impl FnOnce() -> String, r: Result<T, MtdError>) -> Result<Option<T>, Stop> {
        match r {
            Ok(t) => Ok(Some(t)),
            Err(MtdError::NonConvergence(n)) => {
                self.check(Law::ValueAgreement, false, || format!("{}: no convergence after {n} passes", what()));
                Ok(None)
            }
            Err(e) => Err(Stop::Search(e)),
        }
    }

    fn check(&mut self, law: Law, ok: bool, detail: impl FnOnce() -> String) {
        let c = self.report.counts.entry(law).or_default();
        c.0 += 1;
        if !ok {
            c.1 += 1;
            self.report.violations.push(Violation {
                law,
                instance: self.report.id.clone(),
                replay: self.inst.replay(),
                detail: detail(),
            });
        }
    }
}

/// Runs the suite with the standard memory search.
pub fn verify(cfg: &BenchConfig) -> Result<VerifyReport, BenchError> {
    verify_with(cfg, AlphaBetaWithMemory)
}

/// Runs the suite with `searcher` as the MTD drivers' bound search.
pub fn verify_with<S>(cfg: &BenchConfig, searcher: S) -> Result<VerifyReport, BenchError>
where
    S: BoundSearch + Clone + Send + Sync,
{
    cfg.validate()?;
    let suite = instance::suite(cfg)?;
    let parts = suite
        .par_iter()
        .map_init(TablePool::default, |pool, inst| check_instance(cfg, inst, searcher.clone(), pool))
        .collect::<Result<Vec<_>, BenchError>>()?;
    let mut report = VerifyReport::default();
    for part in parts {
        report.absorb(part);
    }
    Ok(report)
}

fn check_instance<S: BoundSearch + Clone>(
    cfg: &BenchConfig,
    inst: &Instance,
    searcher: S,
    pool: &TablePool,
) -> Result<InstanceReport, BenchError> {
    let mut c = Checker {
        inst,
        report: InstanceReport {
            id: inst.id(),
            synthetic: inst.is_synthetic(),
            skipped: None,
            counts: BTreeMap::new(),
            violations: Vec::new(),
            nodes: 0,
        },
    };
    let built = inst.build()?;
    let outcome = crate::with_model!(built, |g, root| laws(cfg, inst, g, root, searcher, pool, &mut c));
    match outcome {
        Ok(()) => {}
        Err(Stop::Oracle(e)) => c.report.skipped = Some(e.to_string()),
        Err(Stop::Search(e)) => return Err(e.into()),
    }
    Ok(c.report)
}

enum Stop {
    Oracle(OracleError),
    Search(MtdError),
}

impl From<OracleError> for Stop {
    fn from(e: OracleError) -> Self {
        Stop::Oracle(e)
    }
}

impl From<MtdError> for Stop {
    fn from(e: MtdError) -> Self {
        Stop::Search(e)
    }
}

fn laws<G: GameModel, S: BoundSearch + Clone>(
    cfg: &BenchConfig,
    inst: &Instance,
    g: &G,
    root: &G::Position,
    searcher: S,
    pool: &TablePool,
    c: &mut Checker<'_>,
) -> Result<(), Stop> {
    let depth = inst.depth;
    let truth = (1..=depth)
        .map(|d| oracle::minimax(g, root, d))
        .collect::<Result<Vec<Value>, _>>()?;
    let v = truth[depth as usize - 1];
    let tt_config = cfg.table_config(inst.node_estimate());
    let fresh = || pool.lease(tt_config);
    let policy = |k: PivotKind| PivotPolicy::new(k).with_bonus(cfg.step_bonus, cfg.bonus_period);
    // fail-soft results are always static values from the horizon, and each
    // pass moves one bound onto a new one, which caps the pass count
    let (lo, hi) = oracle::value_range(g, root, depth)?;
    let cap = 2 * (hi - lo) as u64 + 4;
    let driver = |p: PivotPolicy| Mtd::with_searcher(p, searcher.clone()).max_passes(cap);

    // value agreement: full-window searches at the horizon
    let mut stats = SearchStats::default();
    let full = [
        ("alphabeta_plain", alphabeta_plain(g, root, Window::FULL, depth, &mut stats)),
        ("negascout", negascout(g, root, Window::FULL, depth, &mut stats)),
        ("negascout_tt", negascout_with_memory(g, root, Window::FULL, depth, &mut fresh(), &mut stats)),
        ("memory_search", {
            let mut s = searcher.clone();
            s.search(g, root, Window::FULL, depth, &mut fresh(), &mut SearchContext::new())
                .expect("unlimited budget")
                .value
        }),
    ];
    for (name, got) in full {
        c.check(Law::ValueAgreement, got == v, || format!("{name} = {got}, oracle = {v}"));
    }

    // value agreement: every pivot rule under every first-guess policy, each iteration
    for kind in PIVOTS {
        for guess in GUESSES {
            let mut ctx = SearchContext::new();
            let run = driver(policy(kind)).deepen(g, root, depth, guess, &mut fresh(), &mut ctx);
            let label = || format!("{} / {}", policy_name(kind), guess_name(guess));
            let Some(out) = c.converged(label, run)? else { continue };
            c.report.nodes += out.stats.nodes_visited;
            let got: Vec<Value> = out.iterations.iter().map(|i| i.value).collect();
            c.check(Law::ValueAgreement, got == truth, || {
                format!("{} / {}: iterations {got:?}, oracle {truth:?}", policy_name(kind), guess_name(guess))
            });
        }
    }

    // sandwich and monotone bounds on every traced pass; memory idempotence on the warm table
    for kind in PIVOTS {
        let mut mtd = driver(policy(kind));
        let mut table = fresh();
        for d in 1..=depth {
            let f = if d == 1 { 0 } else { truth[d as usize - 2] };
            let run = mtd.run(g, root, f, d, &mut table, &mut SearchContext::new());
            let Some(out) = c.converged(|| format!("{} depth {d}", policy_name(kind)), run)? else { continue };
            let exact = truth[d as usize - 1];
            let (mut lower, mut upper) = (-INF, INF);
            for p in &out.trace {
                c.check(Law::BoundTightness, (lo..=hi).contains(&p.g), || {
                    format!("{} depth {d} pass {}: g = {} outside static values [{lo}, {hi}]", policy_name(kind), p.index, p.g)
                });
                let b = p.bounds;
                let moved = u32::from(b.lower != lower) + u32::from(b.upper != upper);
                let ok = b.lower <= exact && exact <= b.upper && b.lower >= lower && b.upper <= upper && moved == 1;
                c.check(Law::Sandwich, ok, || {
                    format!(
                        "{} depth {d} pass {}: bounds [{}, {}] after [{lower}, {upper}], oracle {exact}",
                        policy_name(kind),
                        p.index,
                        b.lower,
                        b.upper
                    )
                });
                lower = b.lower;
                upper = b.upper;
            }
        }
        // the same search again visits only the root once per pass
        let f = if depth == 1 { 0 } else { truth[depth as usize - 2] };
        let run = mtd.run(g, root, f, depth, &mut table, &mut SearchContext::new());
        let Some(repeat) = c.converged(|| format!("{} repeat", policy_name(kind)), run)? else { continue };
        c.check(Law::MemoryIdempotence, repeat.stats.nodes_visited == repeat.passes, || {
            format!(
                "{} repeat: {} nodes over {} passes",
                policy_name(kind),
                repeat.stats.nodes_visited,
                repeat.passes
            )
        });
    }
    let mut table = fresh();
    let mut s = searcher.clone();
    for window in [Window::FULL, Window::null(v)] {
        let first = s.search(g, root, window, depth, &mut table, &mut SearchContext::new()).expect("unlimited");
        let mut ctx = SearchContext::new();
        let second = s.search(g, root, window, depth, &mut table, &mut ctx).expect("unlimited");
        c.check(
            Law::MemoryIdempotence,
            ctx.stats.nodes_visited == 1 && second.value == first.value,
            || format!("repeat of ({}, {}) visited {} nodes", window.alpha, window.beta, ctx.stats.nodes_visited),
        );
    }

    // two-pass law: the right first guess needs one fail high and one fail low
    let run = driver(PivotPolicy::new(PivotKind::MtdF)).run(g, root, v, depth, &mut fresh(), &mut SearchContext::new());
    if let Some(out) = c.converged(|| format!("f = {v}"), run)? {
        c.check(Law::TwoPass, out.passes == 2 && out.value == v, || {
            format!("f = {v}: {} passes, value {}", out.passes, out.value)
        });
    }

    // zero-window bound law, and exact fail-soft values where they are determined
    // depends only on the instance itself, so a replayed instance sees the same betas
    let spread = 1 + (inst.seed() % 37) as Value;
    let mut warm_table = fresh();
    let warm_up = driver(PivotPolicy::default()).run(g, root, 0, depth, &mut warm_table, &mut SearchContext::new());
    c.converged(|| "warm-up from f = 0".to_string(), warm_up)?;
    for beta in [v - 1, v, v + 1, v - spread, v + spread, 0] {
        let window = Window::null(beta);
        for warm in [false, true] {
            let mut cold = fresh();
            let t = if warm { &mut warm_table } else { &mut cold };
            let got = s.search(g, root, window, depth, t, &mut SearchContext::new()).expect("unlimited").value;
            let ok = if got < beta { v <= got } else { v >= got };
            c.check(Law::ZeroWindowBound, ok, || {
                format!("beta {beta}: returned {got}, oracle {v} (warm table: {warm})")
            });
        }
        if inst.is_synthetic() {
            let plain = alphabeta_plain(g, root, window, depth, &mut SearchStats::default());
            let got = s.search(g, root, window, depth, &mut fresh(), &mut SearchContext::new()).expect("unlimited").value;
            c.check(Law::BoundTightness, got == plain, || {
                format!("beta {beta}: memory search returned {got}, plain fail-soft {plain}")
            });
        }
    }

    // narrower windows never visit more nodes (plain search, and memory search on trees)
    let windows = [
        Window::FULL,
        Window { alpha: v - 40, beta: v + 40 },
        Window { alpha: v - 3, beta: v + 4 },
        Window::null(v + 1),
    ];
    let plain_nodes: Vec<u64> = windows
        .iter()
        .map(|&w| {
            let mut st = SearchStats::default();
            alphabeta_plain(g, root, w, depth, &mut st);
            st.nodes_visited
        })
        .collect();
    c.check(Law::CutoffMonotonicity, plain_nodes.windows(2).all(|p| p[1] <= p[0]), || {
        format!("plain nodes for nested windows: {plain_nodes:?}")
    });
    if inst.is_synthetic() {
        let mem_nodes: Vec<u64> = windows
            .iter()
            .map(|&w| {
                let mut ctx = SearchContext::new();
                let _ = s.search(g, root, w, depth, &mut fresh(), &mut ctx);
                ctx.stats.nodes_visited
            })
            .collect();
        c.check(Law::CutoffMonotonicity, mem_nodes.windows(2).all(|p| p[1] <= p[0]), || {
            format!("memory-search nodes for nested windows: {mem_nodes:?}")
        });
    }
    Ok(())
}
