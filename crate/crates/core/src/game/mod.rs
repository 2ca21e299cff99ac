mod build;
mod decide;
mod model;
mod solve;

use std::fmt::Write as _;

use serde::Serialize;

use crate::automata::Priority;

pub use build::{GameBuilder, NodeKind, NodeStore, PermutationGame};
pub use decide::{
    build_permutation_game, decide, decide_on_the_fly, Answer, DecideError, Options, SolverKind, Statistics, Verdict,
};
pub use model::{extract_model, refutation_dump, StrategyMove};
pub use solve::{fixpoint_iteration, solve, zielonka, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Player {
    Eloise,
    Abelard,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Eloise => Player::Abelard,
            Player::Abelard => Player::Eloise,
        }
    }

    /// The player who wins plays whose dominating priority is `p`.
    pub fn of_priority(p: Priority) -> Player {
        if p % 2 == 0 {
            Player::Eloise
        } else {
            Player::Abelard
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Edge {
    pub label: usize,
    pub target: usize,
    pub priority: Priority,
}

/// A parity game with priorities on edges; a player without moves loses.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub edges: Vec<Vec<Edge>>,
    pub initial: usize,
}

impl ParityGame {
    pub fn new() -> Self {
        ParityGame::default()
    }

    pub fn add_node(&mut self, owner: Player) -> usize {
        self.owner.push(owner);
        self.edges.push(Vec::new());
        self.owner.len() - 1
    }

    pub fn add_edge(&mut self, source: usize, label: usize, target: usize, priority: Priority) {
        self.edges[source].push(Edge {
            label,
            target,
            priority,
        });
    }

    pub fn num_nodes(&self) -> usize {
        self.owner.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn max_priority(&self) -> Priority {
        self.edges.iter().flatten().map(|e| e.priority).max().unwrap_or(0)
    }

    /// Nodes reachable from the initial node.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_nodes()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges[v] {
                if !seen[e.target] {
                    seen[e.target] = true;
                    stack.push(e.target);
                }
            }
        }
        seen
    }

    pub fn to_dot_with(&self, node_label: impl Fn(usize) -> String, edge_label: impl Fn(&Edge) -> String) -> String {
        let mut out = String::from("digraph game {\n  rankdir=LR;\n");
        for v in 0..self.num_nodes() {
            let shape = match self.owner[v] {
                Player::Eloise => "diamond",
                Player::Abelard => "box",
            };
            let style = if v == self.initial { ",penwidth=2" } else { "" };
            let _ = writeln!(
                out,
                "  n{v} [shape={shape}{style},label=\"{}\"];",
                node_label(v).replace('"', "\\\"")
            );
        }
        for (v, es) in self.edges.iter().enumerate() {
            for e in es {
                let _ = writeln!(
                    out,
                    "  n{v} -> n{} [label=\"{}\"];",
                    e.target,
                    edge_label(e).replace('"', "\\\"")
                );
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn to_dot(&self) -> String {
        self.to_dot_with(|v| v.to_string(), |e| format!("{}/{}", e.label, e.priority))
    }
}
