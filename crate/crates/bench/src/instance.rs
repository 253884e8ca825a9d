//! Test instances: synthetic trees and Connect-Four positions, built from a config.

use mtd_core::game::{Connect4, Connect4Position, GameError, SyntheticTree, SyntheticTreeSpec};

use crate::config::{BenchConfig, GameKind};

#[derive(Clone, Debug)]
pub enum InstanceKind {
    /// Trees are materialized on demand; a suite holds only their specs.
    Synthetic(SyntheticTreeSpec),
    Connect4 { seed: u64, plies: u32, position: Connect4Position },
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub index: usize,
    pub depth: u32,
    pub kind: InstanceKind,
}

/// An instance with its model built.
pub enum Built {
    Synthetic(SyntheticTree),
    Connect4(Connect4, Connect4Position),
}

/// Runs `$body` with `$g: &impl GameModel` and `$root: &Position` bound.
#[macro_export]
macro_rules! with_model {
    ($built:expr, |$g:ident, $root:ident| $body:expr) => {
        match $built {
            $crate::instance::Built::Synthetic(tree) => {
                let $g = &tree;
                let $root = &tree.root();
                $body
            }
            $crate::instance::Built::Connect4(game, pos) => {
                let $g = &game;
                let $root = &pos;
                $body
            }
        }
    };
}

impl Instance {
    pub fn id(&self) -> String {
        match &self.kind {
            InstanceKind::Synthetic(s) => format!(
                "syn-b{}-d{}-q{}-s{}",
                s.branching, s.depth, s.ordering_quality, s.seed
            ),
            InstanceKind::Connect4 { seed, plies, .. } => format!("c4-p{plies}-s{seed}"),
        }
    }

    pub fn seed(&self) -> u64 {
        match &self.kind {
            InstanceKind::Synthetic(s) => s.seed,
            InstanceKind::Connect4 { seed, .. } => *seed,
        }
    }

    pub fn is_synthetic(&self) -> bool {
        matches!(self.kind, InstanceKind::Synthetic(_))
    }

    /// Upper bound on distinct positions within the search horizon, if known.
    pub fn node_estimate(&self) -> Option<u64> {
        match &self.kind {
            InstanceKind::Synthetic(s) => s.node_count(),
            InstanceKind::Connect4 { .. } => {
                let mut total = 0u64;
                let mut level = 1u64;
                for _ in 0..=self.depth {
                    total = total.saturating_add(level);
                    level = level.saturating_mul(C4_BRANCHING);
                }
                Some(total)
            }
        }
    }

    pub fn build(&self) -> Result<Built, GameError> {
        Ok(match &self.kind {
            InstanceKind::Synthetic(spec) => Built::Synthetic(SyntheticTree::new(spec.clone())?),
            InstanceKind::Connect4 { position, .. } => Built::Connect4(Connect4::new(), *position),
        })
    }

    /// A config that rebuilds exactly this instance as a one-instance suite.
    pub fn replay(&self) -> String {
        match &self.kind {
            InstanceKind::Synthetic(s) => format!(
                "game=synthetic\nbranching={}\ndepth={}\nordering_quality={}\nvalue_span={}\nparity_offset={}\nseeds=1\nseed_base={}\n",
                s.branching, s.depth, s.ordering_quality, s.value_span, s.parity_offset, s.seed
            ),
            InstanceKind::Connect4 { seed, plies, .. } => format!(
                "game=connect4\ndepth={}\nplies={plies}\nseeds=1\nseed_base={seed}\n",
                self.depth
            ),
        }
    }
}

const C4_BRANCHING: u64 = 5;
/// Openings are redrawn with a shifted seed when a random game ends early.
const RESEED_STRIDE: u64 = 0x9e37_79b9_7f4a_7c15;

/// All instances named by `cfg`, in a fixed order.
pub fn suite(cfg: &BenchConfig) -> Result<Vec<Instance>, GameError> {
    let mut out = Vec::new();
    match cfg.game {
        GameKind::Synthetic => {
            for &ordering_quality in &cfg.ordering_quality {
                for &branching in &cfg.branching {
                    for &depth in &cfg.depth {
                        for s in 0..cfg.seeds {
                            let spec = SyntheticTreeSpec {
                                branching,
                                depth,
                                seed: cfg.seed_base.wrapping_add(s),
                                value_span: cfg.value_span,
                                ordering_quality,
                                parity_offset: cfg.parity_offset,
                            };
                            spec.validate()?;
                            out.push(Instance {
                                index: out.len(),
                                depth,
                                kind: InstanceKind::Synthetic(spec),
                            });
                        }
                    }
                }
            }
        }
        GameKind::Connect4 => {
            let game = Connect4::new();
            for &depth in &cfg.depth {
                for s in 0..cfg.seeds {
                    let mut seed = cfg.seed_base.wrapping_add(s);
                    let position = loop {
                        if let Some(p) = game.random_position(seed, cfg.plies) {
                            break p;
                        }
                        seed = seed.wrapping_add(RESEED_STRIDE);
                    };
                    out.push(Instance {
                        index: out.len(),
                        depth,
                        kind: InstanceKind::Connect4 {
                            seed,
                            plies: cfg.plies,
                            position,
                        },
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_is_the_cartesian_product() {
        let cfg = BenchConfig::from_text("branching=2,3\ndepth=2..4\nordering_quality=0,1\nseeds=5").unwrap();
        let s = suite(&cfg).unwrap();
        assert_eq!(s.len(), 2 * 3 * 2 * 5);
        assert!(s.iter().enumerate().all(|(i, x)| x.index == i));
    }

    #[test]
    fn replay_rebuilds_the_instance() {
        for text in ["game=connect4\ndepth=3\nplies=9\nseeds=20", "branching=3\ndepth=4\nseeds=4\nseed_base=77"] {
            let cfg = BenchConfig::from_text(text).unwrap();
            for inst in suite(&cfg).unwrap() {
                let again = suite(&BenchConfig::from_text(&inst.replay()).unwrap()).unwrap();
                assert_eq!(again.len(), 1);
                assert_eq!(again[0].id(), inst.id());
                if let (InstanceKind::Connect4 { position: a, .. }, InstanceKind::Connect4 { position: b, .. }) =
                    (&inst.kind, &again[0].kind)
                {
                    assert_eq!(a, b);
                }
            }
        }
    }
}
