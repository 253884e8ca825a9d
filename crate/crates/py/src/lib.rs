//! Python bindings: game models, transposition tables and the search functions.
//!
//! Positions live inside the game objects; every search starts from the
//! game's current root. Values are from MAX's point of view.

use std::fmt::Display;

use mtd_core::game::{Connect4 as C4Model, Connect4Position, GameModel, SyntheticPosition, SyntheticTree as SynModel, SyntheticTreeSpec};
use mtd_core::mtd::{self as driver, MtdOutcome};
use mtd_core::search::{self, Budget, SearchStats};
use mtd_core::tt::DepthMatch;
use mtd_core::{oracle, GuessPolicy, PivotKind, PivotPolicy, TranspositionTable as Tt, TtConfig, Value, Window, INF, VAL_MAX};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(mtd_search, SearchError, PyException);

fn value_err(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn search_err(e: impl Display) -> PyErr {
    SearchError::new_err(e.to_string())
}

/// Complete uniform tree with seeded leaf values.
#[pyclass(module = "mtd_search", frozen)]
struct SyntheticTree {
    model: SynModel,
}

#[pymethods]
impl SyntheticTree {
    #[new]
    #[pyo3(signature = (branching, depth, seed=0, value_span=100, ordering_quality=0.5, parity_offset=0))]
    fn new(
        branching: u32,
        depth: u32,
        seed: u64,
        value_span: Value,
        ordering_quality: f64,
        parity_offset: Value,
    ) -> PyResult<Self> {
        let spec = SyntheticTreeSpec {
            branching,
            depth,
            seed,
            value_span,
            ordering_quality,
            parity_offset,
        };
        Ok(Self {
            model: SynModel::new(spec).map_err(value_err)?,
        })
    }

    #[getter]
    fn depth(&self) -> u32 {
        self.model.spec().depth
    }

    fn __len__(&self) -> usize {
        self.model.len()
    }

    fn __repr__(&self) -> String {
        format!("SyntheticTree({})", self.model.spec())
    }
}

/// A Connect-Four position on the 5x4 board.
#[pyclass(module = "mtd_search", frozen)]
struct Connect4 {
    model: C4Model,
    pos: Connect4Position,
}

#[pymethods]
impl Connect4 {
    /// `moves` is a string of 1-based column digits.
    #[new]
    #[pyo3(signature = (moves=""))]
    fn new(moves: &str) -> PyResult<Self> {
        let model = C4Model::new();
        let pos = model.from_moves(moves).map_err(value_err)?;
        Ok(Self { model, pos })
    }

    /// A position reached by `plies` seeded random moves, or None if the game ended first.
    #[staticmethod]
    fn random(seed: u64, plies: u32) -> Option<Self> {
        let model = C4Model::new();
        let pos = model.random_position(seed, plies)?;
        Some(Self { model, pos })
    }

    #[getter]
    fn plies(&self) -> u32 {
        self.pos.plies()
    }

    fn is_terminal(&self) -> bool {
        self.model.is_terminal(&self.pos)
    }

    fn moves(&self) -> Vec<u16> {
        self.model.moves(&self.pos).into_iter().map(|m| m.0).collect()
    }

    /// The position after dropping a stone in 0-based column `col`.
    fn play(&self, col: u16) -> PyResult<Self> {
        if !self.model.moves(&self.pos).iter().any(|m| m.0 == col) {
            return Err(value_err(format!("illegal move {col}")));
        }
        Ok(Self {
            model: self.model.clone(),
            pos: self.model.play(&self.pos, mtd_core::Move(col)),
        })
    }

    fn __str__(&self) -> String {
        self.pos.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Connect4(plies={})", self.pos.plies())
    }
}

/// Transposition table of `2**log2_slots` entries.
#[pyclass(module = "mtd_search")]
struct TranspositionTable {
    inner: Tt,
}

#[pymethods]
impl TranspositionTable {
    #[new]
    #[pyo3(signature = (log2_slots=20, store_leaves=true, accept_deeper=false))]
    fn new(log2_slots: u32, store_leaves: bool, accept_deeper: bool) -> PyResult<Self> {
        let mut config = TtConfig::with_log2_slots(log2_slots).map_err(value_err)?;
        config.store_leaves = store_leaves;
        if accept_deeper {
            config.depth_match = DepthMatch::AtLeast;
        }
        Ok(Self { inner: Tt::new(config) })
    }

    fn clear(&mut self) {
        self.inner.clear();
    }

    fn __len__(&self) -> usize {
        self.inner.occupancy()
    }

    #[getter]
    fn capacity(&self) -> usize {
        self.inner.capacity()
    }

    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = self.inner.stats();
        let d = PyDict::new(py);
        d.set_item("probes", s.probes)?;
        d.set_item("hits", s.hits)?;
        d.set_item("depth_mismatches", s.depth_mismatches)?;
        d.set_item("stores", s.stores)?;
        d.set_item("replacements", s.replacements)?;
        d.set_item("rejected", s.rejected)?;
        Ok(d)
    }
}

fn stats_dict<'py>(py: Python<'py>, s: &SearchStats) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("nodes_visited", s.nodes_visited)?;
    d.set_item("leaves_evaluated", s.leaves_evaluated)?;
    d.set_item("tt_probes", s.tt_probes)?;
    d.set_item("tt_hits", s.tt_hits)?;
    d.set_item("tt_cutoffs", s.tt_cutoffs)?;
    d.set_item("tt_stores", s.tt_stores)?;
    d.set_item("researches", s.researches)?;
    d.set_item("passes", s.passes)?;
    Ok(d)
}

/// Result of one MTD search.
#[pyclass(module = "mtd_search", frozen, get_all)]
struct MtdResult {
    value: Value,
    best_move: Option<u16>,
    passes: u64,
    lower: Value,
    upper: Value,
    depth: u32,
    first_guess: Value,
    /// `(beta, g, lower, upper, nodes)` per pass.
    trace: Vec<(Value, Value, Value, Value, u64)>,
    nodes_visited: u64,
    leaves_evaluated: u64,
}

impl MtdResult {
    fn of(o: &MtdOutcome) -> Self {
        Self {
            value: o.value,
            best_move: o.best_move.map(|m| m.0),
            passes: o.passes,
            lower: o.final_bounds.lower,
            upper: o.final_bounds.upper,
            depth: o.depth,
            first_guess: o.first_guess,
            trace: o
                .trace
                .iter()
                .map(|p| (p.beta, p.g, p.bounds.lower, p.bounds.upper, p.nodes))
                .collect(),
            nodes_visited: o.stats.nodes_visited,
            leaves_evaluated: o.stats.leaves_evaluated,
        }
    }
}

#[pymethods]
impl MtdResult {
    fn __repr__(&self) -> String {
        format!(
            "MtdResult(value={}, best_move={:?}, passes={}, depth={})",
            self.value, self.best_move, self.passes, self.depth
        )
    }
}

/// Borrowed game: a model plus the root to search from.
enum Game<'a> {
    Synthetic(&'a SynModel, SyntheticPosition),
    Connect4(&'a C4Model, &'a Connect4Position),
}

fn game<'a>(obj: &'a Bound<'_, PyAny>) -> PyResult<Game<'a>> {
    if let Ok(t) = obj.cast::<SyntheticTree>() {
        let t = t.get();
        return Ok(Game::Synthetic(&t.model, t.model.root()));
    }
    if let Ok(c) = obj.cast::<Connect4>() {
        let c = c.get();
        return Ok(Game::Connect4(&c.model, &c.pos));
    }
    Err(value_err("expected a SyntheticTree or Connect4"))
}

macro_rules! with_game {
    ($game:expr, |$g:ident, $root:ident| $body:expr) => {
        match $game {
            Game::Synthetic($g, ref $root) => $body,
            Game::Connect4($g, $root) => $body,
        }
    };
}

fn pivot(policy: &str) -> PyResult<PivotKind> {
    match policy {
        "mtd_f" => Ok(PivotKind::MtdF),
        "plus_inf" => Ok(PivotKind::PlusInf),
        "minus_inf" => Ok(PivotKind::MinusInf),
        "bisect" => Ok(PivotKind::Bisect),
        _ => Err(value_err(format!("unknown policy {policy:?}"))),
    }
}

fn guess_policy(guess: &str) -> PyResult<GuessPolicy> {
    match guess {
        "zero" => Ok(GuessPolicy::Zero),
        "previous_iteration" => Ok(GuessPolicy::PreviousIteration),
        "two_plies_ago" => Ok(GuessPolicy::TwoPliesAgo),
        _ => Err(value_err(format!("unknown guess policy {guess:?}"))),
    }
}

fn window(alpha: Value, beta: Value) -> PyResult<Window> {
    if alpha < -INF || beta > INF {
        return Err(value_err(format!("window ({alpha}, {beta}) outside [-INF, INF]")));
    }
    Window::new(alpha, beta).map_err(value_err)
}

/// Brute-force minimax value of the game's root at `depth`.
#[pyfunction]
fn minimax(py: Python<'_>, game_obj: &Bound<'_, PyAny>, depth: u32) -> PyResult<Value> {
    let gm = game(game_obj)?;
    py.detach(|| with_game!(gm, |g, root| oracle::minimax(g, root, depth)))
        .map_err(search_err)
}

/// Fail-soft alpha-beta; returns `(value, stats)`. Uses `table` when given.
#[pyfunction]
#[pyo3(signature = (game, depth, alpha=-INF, beta=INF, table=None))]
fn alphabeta<'py>(
    py: Python<'py>,
    game: &Bound<'py, PyAny>,
    depth: u32,
    alpha: Value,
    beta: Value,
    table: Option<PyRefMut<'py, TranspositionTable>>,
) -> PyResult<(Value, Bound<'py, PyDict>)> {
    let gm = self::game(game)?;
    let w = window(alpha, beta)?;
    let mut stats = SearchStats::default();
    let v = match table {
        Some(mut t) => with_game!(gm, |g, root| search::alphabeta_with_memory(g, root, w, depth, &mut t.inner, &mut stats)),
        None => with_game!(gm, |g, root| search::alphabeta_plain(g, root, w, depth, &mut stats)),
    };
    Ok((v, stats_dict(py, &stats)?))
}

/// NegaScout; returns `(value, stats)`. Uses `table` when given.
#[pyfunction]
#[pyo3(signature = (game, depth, alpha=-INF, beta=INF, table=None))]
fn negascout<'py>(
    py: Python<'py>,
    game: &Bound<'py, PyAny>,
    depth: u32,
    alpha: Value,
    beta: Value,
    table: Option<PyRefMut<'py, TranspositionTable>>,
) -> PyResult<(Value, Bound<'py, PyDict>)> {
    let gm = self::game(game)?;
    let w = window(alpha, beta)?;
    let mut stats = SearchStats::default();
    let v = match table {
        Some(mut t) => with_game!(gm, |g, root| search::negascout_with_memory(g, root, w, depth, &mut t.inner, &mut stats)),
        None => with_game!(gm, |g, root| search::negascout(g, root, w, depth, &mut stats)),
    };
    Ok((v, stats_dict(py, &stats)?))
}

fn table_or_default(table: Option<PyRefMut<'_, TranspositionTable>>) -> Result<impl std::ops::DerefMut<Target = Tt> + '_, PyErr> {
    enum T<'a> {
        Borrowed(PyRefMut<'a, TranspositionTable>),
        Owned(Box<Tt>),
    }
    impl std::ops::Deref for T<'_> {
        type Target = Tt;
        fn deref(&self) -> &Tt {
            match self {
                T::Borrowed(t) => &t.inner,
                T::Owned(t) => t,
            }
        }
    }
    impl std::ops::DerefMut for T<'_> {
        fn deref_mut(&mut self) -> &mut Tt {
            match self {
                T::Borrowed(t) => &mut t.inner,
                T::Owned(t) => t,
            }
        }
    }
    Ok(match table {
        Some(t) => T::Borrowed(t),
        None => T::Owned(Box::new(Tt::new(TtConfig::with_log2_slots(16).map_err(value_err)?))),
    })
}

/// One MTD search at fixed depth. A fresh 2**16-slot table is used when none is given.
#[pyfunction]
#[pyo3(signature = (game, depth, first_guess=0, policy="mtd_f", step_bonus=0, bonus_period=2, table=None))]
fn mtd(
    game: &Bound<'_, PyAny>,
    depth: u32,
    first_guess: Value,
    policy: &str,
    step_bonus: Value,
    bonus_period: u32,
    table: Option<PyRefMut<'_, TranspositionTable>>,
) -> PyResult<MtdResult> {
    let gm = self::game(game)?;
    let policy = PivotPolicy::new(pivot(policy)?).with_bonus(step_bonus, bonus_period);
    let mut t = table_or_default(table)?;
    let out = with_game!(gm, |g, root| driver::mtd(g, root, first_guess, depth, &policy, &mut t)).map_err(search_err)?;
    Ok(MtdResult::of(&out))
}

/// Iterative-deepening MTD up to `max_depth`.
///
/// Returns a dict with `completed_depth`, `result` (an MtdResult, or None),
/// `iterations` as `(depth, first_guess, value, passes)` tuples and `stats`.
#[pyfunction]
#[pyo3(signature = (game, max_depth, guess="previous_iteration", policy="mtd_f", node_budget=None, table=None))]
fn iterative_deepening<'py>(
    py: Python<'py>,
    game: &Bound<'py, PyAny>,
    max_depth: u32,
    guess: &str,
    policy: &str,
    node_budget: Option<u64>,
    table: Option<PyRefMut<'py, TranspositionTable>>,
) -> PyResult<Bound<'py, PyDict>> {
    let gm = self::game(game)?;
    let policy = PivotPolicy::new(pivot(policy)?);
    let guess = guess_policy(guess)?;
    let budget = node_budget.map_or(Budget::Unlimited, Budget::Nodes);
    let mut t = table_or_default(table)?;
    let out = with_game!(gm, |g, root| driver::iterative_deepening(g, root, max_depth, budget, guess, &policy, &mut t))
        .map_err(search_err)?;
    let d = PyDict::new(py);
    d.set_item("completed_depth", out.completed_depth)?;
    d.set_item("result", out.completed.as_ref().map(MtdResult::of))?;
    let iterations: Vec<_> = out.iterations.iter().map(|i| (i.depth, i.first_guess, i.value, i.passes)).collect();
    d.set_item("iterations", iterations)?;
    d.set_item("stats", stats_dict(py, &out.stats)?)?;
    Ok(d)
}

#[pymodule]
fn mtd_search(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("INF", INF)?;
    m.add("VAL_MAX", VAL_MAX)?;
    m.add("SearchError", m.py().get_type::<SearchError>())?;
    m.add_class::<SyntheticTree>()?;
    m.add_class::<Connect4>()?;
    m.add_class::<TranspositionTable>()?;
    m.add_class::<MtdResult>()?;
    m.add_function(wrap_pyfunction!(minimax, m)?)?;
    m.add_function(wrap_pyfunction!(alphabeta, m)?)?;
    m.add_function(wrap_pyfunction!(negascout, m)?)?;
    m.add_function(wrap_pyfunction!(mtd, m)?)?;
    m.add_function(wrap_pyfunction!(iterative_deepening, m)?)?;
    Ok(())
}
