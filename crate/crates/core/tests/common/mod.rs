#![allow(dead_code)]

use mtd_core::game::{GameModel, Move, NodeKind};
use mtd_core::Value;

/// Explicit tree parsed from nested parentheses, e.g. `((3, 17), (2, 12))`.
/// The root is a MAX node; kinds alternate by ply.
pub struct ListTree {
    nodes: Vec<ListNode>,
}

struct ListNode {
    children: Vec<usize>,
    value: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ListPos {
    pub node: usize,
    pub ply: u32,
}

impl ListTree {
    pub fn parse(src: &str) -> ListTree {
        let tokens: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
        let mut tree = ListTree { nodes: Vec::new() };
        let mut at = 0;
        tree.node(&tokens, &mut at);
        assert_eq!(at, tokens.len(), "trailing input in {src:?}");
        tree
    }

    fn node(&mut self, t: &[char], at: &mut usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(ListNode { children: Vec::new(), value: 0 });
        if t[*at] == '(' {
            *at += 1;
            loop {
                let child = self.node(t, at);
                self.nodes[id].children.push(child);
                match t[*at] {
                    ',' => *at += 1,
                    ')' => {
                        *at += 1;
                        break;
                    }
                    c => panic!("unexpected {c:?}"),
                }
            }
        } else {
            let start = *at;
            while *at < t.len() && (t[*at] == '-' || t[*at].is_ascii_digit()) {
                *at += 1;
            }
            self.nodes[id].value = t[start..*at].iter().collect::<String>().parse().unwrap();
        }
        id
    }

    pub fn root(&self) -> ListPos {
        ListPos { node: 0, ply: 0 }
    }
}

impl GameModel for ListTree {
    type Position = ListPos;

    fn kind(&self, p: &ListPos) -> NodeKind {
        if p.ply % 2 == 0 {
            NodeKind::Max
        } else {
            NodeKind::Min
        }
    }

    fn is_terminal(&self, p: &ListPos) -> bool {
        self.nodes[p.node].children.is_empty()
    }

    fn moves(&self, p: &ListPos) -> Vec<Move> {
        (0..self.nodes[p.node].children.len() as u16).map(Move).collect()
    }

    fn play(&self, p: &ListPos, mv: Move) -> ListPos {
        ListPos {
            node: self.nodes[p.node].children[mv.0 as usize],
            ply: p.ply + 1,
        }
    }

    fn evaluate(&self, p: &ListPos) -> Value {
        self.nodes[p.node].value
    }

    fn key(&self, p: &ListPos) -> u64 {
        (p.node as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
    }

    fn ply(&self, p: &ListPos) -> u32 {
        p.ply
    }
}

/// The running example: MAX root over MIN nodes (3, 17) and (2, 12).
pub fn four_leaf() -> ListTree {
    ListTree::parse("((3, 17), (2, 12))")
}

/// Every position reachable from `root` within `depth` plies, with its remaining depth.
pub fn positions_within<G: GameModel>(model: &G, root: &G::Position, depth: u32) -> Vec<(G::Position, u32)> {
    let mut out = Vec::new();
    let mut stack = vec![(root.clone(), depth)];
    while let Some((p, d)) = stack.pop() {
        if d > 0 && !model.is_terminal(&p) {
            for mv in model.moves(&p) {
                stack.push((model.play(&p, mv), d - 1));
            }
        }
        out.push((p, d));
    }
    out
}
