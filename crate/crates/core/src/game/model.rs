use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use super::build::{NodeKind, NodeStore};
use super::{ParityGame, Player, Solution};
use crate::formula::{Closure, Node};
use crate::semantics::KripkeModel;
use crate::tracking::TrackingLetter;

/// Follows Eloise's strategy and the forced Abelard moves from `v` to the next saturated node.
fn saturate(g: &ParityGame, nodes: &NodeStore, s: &Solution, mut v: usize) -> Result<usize, String> {
    let mut seen = HashSet::new();
    loop {
        match nodes.kind(v) {
            NodeKind::State | NodeKind::Terminal => return Ok(v),
            NodeKind::Clash => return Err(format!("strategy reaches clash node {v}")),
            NodeKind::Internal(_) => {}
        }
        if !seen.insert(v) {
            return Err(format!("internal cycle through node {v}"));
        }
        let edge = match g.owner[v] {
            Player::Eloise => s.strategy[v].ok_or_else(|| format!("no strategy at node {v}"))?,
            Player::Abelard => 0,
        };
        v = g.edges[v]
            .get(edge)
            .ok_or_else(|| format!("node {v} is not expanded"))?
            .target;
    }
}

/// Reads a Kripke model off a winning strategy of Eloise: one state per
/// saturated node reached, one edge per diamond Abelard may challenge.
pub fn extract_model(
    g: &ParityGame,
    nodes: &NodeStore,
    closure: &Closure,
    letters: &[TrackingLetter],
    s: &Solution,
) -> Result<KripkeModel, String> {
    if s.winner[g.initial] != Player::Eloise {
        return Err("Eloise does not win the initial node".into());
    }
    let root = saturate(g, nodes, s, g.initial)?;
    let mut index: HashMap<usize, usize> = HashMap::from([(root, 0)]);
    let mut order = vec![root];
    let mut queue = VecDeque::from([root]);
    let mut edges = Vec::new();
    while let Some(u) = queue.pop_front() {
        for e in &g.edges[u] {
            let Node::Diamond(action, _) = &closure.nodes[letters[e.label].principal] else {
                return Err(format!("non-modal edge at state node {u}"));
            };
            let w = saturate(g, nodes, s, e.target)?;
            let next = index.len();
            let wi = *index.entry(w).or_insert_with(|| {
                order.push(w);
                queue.push_back(w);
                next
            });
            edges.push((action.to_string(), index[&u], wi));
        }
    }
    let mut m = KripkeModel::new(order.len(), 0);
    for (i, &u) in order.iter().enumerate() {
        for f in nodes.sequent(u) {
            if let Node::Prop(p) = &closure.nodes[f] {
                m.set_true(p, i);
            }
        }
    }
    for (a, from, to) in edges {
        m.add_edge(&a, from, to);
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrategyMove {
    pub node: usize,
    pub edge: usize,
    pub target: usize,
}

/// Abelard's moves on the nodes reachable from the initial node under Abelard's winning strategy.
pub fn refutation_dump(g: &ParityGame, s: &Solution) -> Vec<StrategyMove> {
    let mut out = Vec::new();
    let mut seen = vec![false; g.num_nodes()];
    let mut stack = vec![g.initial];
    seen[g.initial] = true;
    while let Some(v) = stack.pop() {
        let targets: Vec<usize> = match g.owner[v] {
            Player::Abelard => match s.strategy[v] {
                Some(e) => {
                    out.push(StrategyMove {
                        node: v,
                        edge: e,
                        target: g.edges[v][e].target,
                    });
                    vec![g.edges[v][e].target]
                }
                None => Vec::new(),
            },
            Player::Eloise => g.edges[v].iter().map(|e| e.target).collect(),
        };
        for t in targets {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    out.sort_by_key(|m| m.node);
    out
}
