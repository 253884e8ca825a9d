//! Harness configuration: `key=value` files, overridden by command-line flags.
//!
//! Flags and file keys share one parser, so every flag can also live in a
//! suite file (`--tt-log2-slots 16` is `tt_log2_slots=16`).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mtd_core::tt::TtConfig;
use mtd_core::{GuessPolicy, PivotKind, Value};
use thiserror::Error;

/// Directory searched for relative `--config` paths that do not exist as given.
pub const SUITE_DIR_ENV: &str = "MTD_SUITE_DIR";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error("{key}: {reason}")]
    Value { key: String, reason: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GameKind {
    Synthetic,
    Connect4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    AlphabetaPlain,
    AlphabetaTt,
    Negascout,
    NegascoutTt,
    MtdF,
    MtdPlusInf,
    MtdMinusInf,
    MtdBisect,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::AlphabetaPlain,
        Algorithm::AlphabetaTt,
        Algorithm::Negascout,
        Algorithm::NegascoutTt,
        Algorithm::MtdF,
        Algorithm::MtdPlusInf,
        Algorithm::MtdMinusInf,
        Algorithm::MtdBisect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::AlphabetaPlain => "alphabeta_plain",
            Algorithm::AlphabetaTt => "alphabeta_tt",
            Algorithm::Negascout => "negascout",
            Algorithm::NegascoutTt => "negascout_tt",
            Algorithm::MtdF => "mtd_f",
            Algorithm::MtdPlusInf => "mtd_plus_inf",
            Algorithm::MtdMinusInf => "mtd_minus_inf",
            Algorithm::MtdBisect => "mtd_bisect",
        }
    }

    /// Pivot rule for the MTD family, `None` for the full-window searches.
    pub fn pivot(self) -> Option<PivotKind> {
        match self {
            Algorithm::MtdF => Some(PivotKind::MtdF),
            Algorithm::MtdPlusInf => Some(PivotKind::PlusInf),
            Algorithm::MtdMinusInf => Some(PivotKind::MinusInf),
            Algorithm::MtdBisect => Some(PivotKind::Bisect),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

/// First guess for `trace`: a number, or the oracle's value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FirstGuess {
    Value(Value),
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Text,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub game: GameKind,
    /// Every combination of the list-valued keys becomes an instance group.
    pub branching: Vec<u32>,
    pub depth: Vec<u32>,
    pub ordering_quality: Vec<f64>,
    pub seeds: u64,
    pub seed_base: u64,
    pub value_span: Value,
    pub parity_offset: Value,
    /// Random opening length for Connect-Four instances.
    pub plies: u32,
    pub algorithms: Vec<Algorithm>,
    pub guess: GuessPolicy,
    pub policy: PivotKind,
    pub step_bonus: Value,
    pub bonus_period: u32,
    pub first_guess: FirstGuess,
    /// Upper limit; small instances get a smaller table.
    pub tt_log2_slots: u32,
    pub store_leaves: bool,
    pub node_budget: Option<u64>,
    pub verbose_trace: bool,
    /// Check every bench value against the oracle.
    pub verify: bool,
    pub format: Format,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            game: GameKind::Synthetic,
            branching: vec![4],
            depth: vec![6],
            ordering_quality: vec![0.9],
            seeds: 10,
            seed_base: 0,
            value_span: 100,
            parity_offset: 0,
            plies: 6,
            algorithms: vec![Algorithm::AlphabetaPlain, Algorithm::NegascoutTt, Algorithm::MtdF],
            guess: GuessPolicy::PreviousIteration,
            policy: PivotKind::MtdF,
            step_bonus: 0,
            bonus_period: 2,
            first_guess: FirstGuess::Value(0),
            tt_log2_slots: 20,
            store_leaves: true,
            node_budget: None,
            verbose_trace: false,
            verify: false,
            format: Format::Csv,
        }
    }
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError> {
    let mut out = Vec::new();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        // inclusive integer ranges like 2..8
        if let Some((a, b)) = part.split_once("..") {
            let (a, b): (u64, u64) = (num(key, a)?, num(key, b)?);
            for x in a..=b {
                out.push(num(key, &x.to_string())?);
            }
        } else {
            out.push(num(key, part)?);
        }
    }
    if out.is_empty() {
        return Err(bad(key, "empty list"));
    }
    Ok(out)
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.trim().parse().map_err(|_| bad(key, &format!("cannot parse {value:?}")))
}

fn bad(key: &str, reason: &str) -> ConfigError {
    ConfigError::Value {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

fn on_off(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "on" | "true" | "1" | "yes" => Ok(true),
        "off" | "false" | "0" | "no" => Ok(false),
        _ => Err(bad(key, "expected on/off")),
    }
}

pub fn parse_guess(s: &str) -> Result<GuessPolicy, String> {
    match s {
        "zero" => Ok(GuessPolicy::Zero),
        "previous" | "previous_iteration" => Ok(GuessPolicy::PreviousIteration),
        "two_plies_ago" => Ok(GuessPolicy::TwoPliesAgo),
        _ => Err(format!("unknown guess policy {s:?}")),
    }
}

pub fn guess_name(g: GuessPolicy) -> &'static str {
    match g {
        GuessPolicy::Zero => "zero",
        GuessPolicy::PreviousIteration => "previous_iteration",
        GuessPolicy::TwoPliesAgo => "two_plies_ago",
    }
}

pub fn parse_policy(s: &str) -> Result<PivotKind, String> {
    match s {
        "mtd_f" => Ok(PivotKind::MtdF),
        "plus_inf" | "mtd_plus_inf" => Ok(PivotKind::PlusInf),
        "minus_inf" | "mtd_minus_inf" => Ok(PivotKind::MinusInf),
        "bisect" | "mtd_bisect" => Ok(PivotKind::Bisect),
        _ => Err(format!("unknown pivot policy {s:?}")),
    }
}

pub fn policy_name(p: PivotKind) -> &'static str {
    match p {
        PivotKind::MtdF => "mtd_f",
        PivotKind::PlusInf => "plus_inf",
        PivotKind::MinusInf => "minus_inf",
        PivotKind::Bisect => "bisect",
    }
}

impl BenchConfig {
    /// Sets one key. Dashes and underscores are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim().replace('-', "_");
        let key = key.as_str();
        let value = value.trim();
        match key {
            "game" => {
                self.game = match value {
                    "synthetic" => GameKind::Synthetic,
                    "connect4" => GameKind::Connect4,
                    _ => return Err(bad(key, "expected synthetic or connect4")),
                }
            }
            "branching" => self.branching = list(key, value)?,
            "depth" => self.depth = list(key, value)?,
            "ordering_quality" => self.ordering_quality = list(key, value)?,
            "seeds" => self.seeds = num(key, value)?,
            "seed_base" => self.seed_base = num(key, value)?,
            "value_span" => self.value_span = num(key, value)?,
            "parity_offset" => self.parity_offset = num(key, value)?,
            "plies" => self.plies = num(key, value)?,
            "algorithms" => {
                let mut algs = Vec::new();
                for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    if name == "all" {
                        algs.extend(Algorithm::ALL);
                    } else {
                        algs.push(name.parse().map_err(|e: String| bad(key, &e))?);
                    }
                }
                if algs.is_empty() {
                    return Err(bad(key, "empty list"));
                }
                self.algorithms = algs;
            }
            "guess" => self.guess = parse_guess(value).map_err(|e| bad(key, &e))?,
            "policy" => self.policy = parse_policy(value).map_err(|e| bad(key, &e))?,
            "step_bonus" => self.step_bonus = num(key, value)?,
            "bonus_period" => self.bonus_period = num(key, value)?,
            "first_guess" => {
                self.first_guess = if value == "oracle" {
                    FirstGuess::Oracle
                } else {
                    FirstGuess::Value(num(key, value)?)
                }
            }
            "tt_log2_slots" => self.tt_log2_slots = num(key, value)?,
            "store_leaves" => self.store_leaves = on_off(key, value)?,
            "node_budget" => {
                self.node_budget = match value {
                    "" | "none" | "off" => None,
                    v => Some(num(key, v)?),
                }
            }
            "verbose_trace" => self.verbose_trace = on_off(key, value)?,
            "verify" => self.verify = on_off(key, value)?,
            "format" => {
                self.format = match value {
                    "csv" => Format::Csv,
                    "text" => Format::Text,
                    _ => return Err(bad(key, "expected csv or text")),
                }
            }
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Applies `key=value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let wrap = |e: ConfigError| ConfigError::Line {
                line: idx + 1,
                reason: e.to_string(),
            };
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Line {
                line: idx + 1,
                reason: format!("expected key=value, got {line:?}"),
            })?;
            self.set(k, v).map_err(wrap)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply_file(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let path = resolve(path);
        let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io { path, source })?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.depth.contains(&0) {
            return Err(bad("depth", "must be at least 1"));
        }
        if self.branching.iter().any(|&b| b < 2) {
            return Err(bad("branching", "must be at least 2"));
        }
        if self.ordering_quality.iter().any(|q| !(0.0..=1.0).contains(q)) {
            return Err(bad("ordering_quality", "outside [0, 1]"));
        }
        if self.seeds == 0 {
            return Err(bad("seeds", "must be at least 1"));
        }
        if self.bonus_period == 0 {
            return Err(bad("bonus_period", "must be at least 1"));
        }
        if self.step_bonus < 0 {
            return Err(bad("step_bonus", "must be non-negative"));
        }
        TtConfig::with_log2_slots(self.tt_log2_slots).map_err(|e| bad("tt_log2_slots", &e.to_string()))?;
        Ok(())
    }

    /// Table configuration for a search whose tree has at most `nodes` nodes.
    pub fn table_config(&self, nodes: Option<u64>) -> TtConfig {
        let needed = nodes.map_or(TtConfig::MAX_LOG2_SLOTS, |n| 64 - n.max(1).leading_zeros() + 1);
        let log2 = needed.clamp(TtConfig::MIN_LOG2_SLOTS, self.tt_log2_slots);
        TtConfig {
            store_leaves: self.store_leaves,
            ..TtConfig::with_log2_slots(log2).expect("validated range")
        }
    }
}

/// `path` as given if it exists, else under `$MTD_SUITE_DIR` when set.
pub fn resolve(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(SUITE_DIR_ENV) {
        Some(dir) => Path::new(&dir).join(path),
        None => path.to_path_buf(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        let cfg = BenchConfig::from_text("branching=2..5\ndepth = 3, 5\nordering_quality=0.5,1\n").unwrap();
        assert_eq!(cfg.branching, vec![2, 3, 4, 5]);
        assert_eq!(cfg.depth, vec![3, 5]);
        assert_eq!(cfg.ordering_quality, vec![0.5, 1.0]);
    }

    #[test]
    fn flags_spellings_match_keys() {
        let mut cfg = BenchConfig::default();
        cfg.set("tt-log2-slots", "12").unwrap();
        cfg.set("store-leaves", "off").unwrap();
        cfg.set("algorithms", "negascout_tt,mtd_f").unwrap();
        assert_eq!(cfg.tt_log2_slots, 12);
        assert!(!cfg.store_leaves);
        assert_eq!(cfg.algorithms, vec![Algorithm::NegascoutTt, Algorithm::MtdF]);
        cfg.set("algorithms", "all").unwrap();
        assert_eq!(cfg.algorithms.len(), 8);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = BenchConfig::from_text("# suite\ndepth=4\nbogus=1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Line { line: 3, .. }), "{err}");
        assert!(BenchConfig::from_text("depth=0").is_err());
        assert!(BenchConfig::from_text("tt_log2_slots=40").is_err());
        assert!(BenchConfig::from_text("guess=sometimes").is_err());
    }

    #[test]
    fn table_sized_to_tree() {
        let cfg = BenchConfig::default();
        assert_eq!(cfg.table_config(Some(100)).log2_slots, TtConfig::MIN_LOG2_SLOTS);
        assert_eq!(cfg.table_config(Some(87_381)).log2_slots, 18);
        assert_eq!(cfg.table_config(None).log2_slots, 20);
    }
}
