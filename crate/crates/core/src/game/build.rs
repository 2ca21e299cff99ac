use std::collections::{BTreeSet, VecDeque};

use indexmap::IndexSet;

use serde::Serialize;

use super::{Edge, ParityGame, Player};
use crate::automata::{LdbaDeterminizer, PermutationState, Priority};
use crate::formula::{FormulaId, Node};
use crate::tracking::{Rule, TrackingAutomaton, TrackingLetter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum NodeKind {
    /// Saturated sequent with at least one diamond.
    State,
    /// Saturated sequent without diamonds.
    Terminal,
    /// Contains false or a complementary pair of literals.
    Clash,
    Internal(Rule),
}

/// Node data packed as `[|sequent|, |subset|, sequent.., subset.., permutation..]`;
/// the insertion index of a key is the node id.
#[derive(Debug, Clone, Default)]
pub struct NodeStore {
    keys: IndexSet<Box<[u32]>>,
    kinds: Vec<NodeKind>,
}

fn pack(sequent: &[FormulaId], det: &PermutationState) -> Box<[u32]> {
    let mut key = Vec::with_capacity(2 + sequent.len() + det.subset.len() + det.perm.len());
    key.push(sequent.len() as u32);
    key.push(det.subset.len() as u32);
    key.extend(sequent.iter().chain(&det.subset).chain(&det.perm).map(|&x| x as u32));
    key.into_boxed_slice()
}

impl NodeStore {
    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn kind(&self, v: usize) -> NodeKind {
        self.kinds[v]
    }

    pub fn sequent(&self, v: usize) -> Vec<FormulaId> {
        let key = &self.keys[v];
        key[2..2 + key[0] as usize].iter().map(|&x| x as FormulaId).collect()
    }

    pub fn det(&self, v: usize) -> PermutationState {
        let key = &self.keys[v];
        let (n, m) = (key[0] as usize, key[1] as usize);
        let widen = |xs: &[u32]| xs.iter().map(|&x| x as usize).collect();
        PermutationState {
            subset: widen(&key[2 + n..2 + n + m]),
            perm: widen(&key[2 + n + m..]),
        }
    }
}

/// The rule fixed for a sequent, with its conclusions.
enum Step {
    Clash,
    Rule(Rule, FormulaId, Vec<Vec<FormulaId>>),
    Modal(Vec<(FormulaId, Vec<FormulaId>)>),
}

/// Incremental construction of the permutation game of a formula.
pub struct GameBuilder<'a> {
    pub tracking: &'a TrackingAutomaton,
    det: &'a LdbaDeterminizer<'a>,
    pub game: ParityGame,
    pub nodes: NodeStore,
    pub expanded: Vec<bool>,
    expanded_count: usize,
    frontier: VecDeque<usize>,
}

impl<'a> GameBuilder<'a> {
    pub fn new(tracking: &'a TrackingAutomaton, det: &'a LdbaDeterminizer<'a>) -> Self {
        let mut b = GameBuilder {
            tracking,
            det,
            game: ParityGame::new(),
            nodes: NodeStore::default(),
            expanded: Vec::new(),
            expanded_count: 0,
            frontier: VecDeque::new(),
        };
        let root = vec![tracking.closure.root_formula()];
        b.game.initial = b.intern(root, det.initial());
        b
    }

    fn node(&self, f: FormulaId) -> &Node {
        &self.tracking.closure.nodes[f]
    }

    fn step_for(&self, sequent: &[FormulaId]) -> Step {
        let mut positive = BTreeSet::new();
        for &f in sequent {
            match self.node(f) {
                Node::False => return Step::Clash,
                Node::Prop(p) => {
                    positive.insert(p.clone());
                }
                _ => {}
            }
        }
        let clash = sequent
            .iter()
            .any(|&f| matches!(self.node(f), Node::NegProp(p) if positive.contains(p)));
        if clash {
            return Step::Clash;
        }
        let without = |f: FormulaId| -> Vec<FormulaId> { sequent.iter().copied().filter(|&g| g != f).collect() };
        let first = |pred: &dyn Fn(&Node) -> bool| sequent.iter().copied().find(|&f| pred(self.node(f)));
        if let Some(f) = first(&|n| matches!(n, Node::True)) {
            return Step::Rule(Rule::Top, f, vec![without(f)]);
        }
        if let Some(f) = first(&|n| matches!(n, Node::And(..))) {
            let Node::And(l, r) = *self.node(f) else { unreachable!() };
            let mut s = without(f);
            s.extend([l, r]);
            return Step::Rule(Rule::And, f, vec![s]);
        }
        if let Some(f) = first(&|n| matches!(n, Node::Fix(..))) {
            let Node::Fix(op, body) = *self.node(f) else { unreachable!() };
            let rule = match op {
                crate::formula::Fixpoint::Mu => Rule::Mu,
                crate::formula::Fixpoint::Nu => Rule::Nu,
            };
            let mut s = without(f);
            s.push(body);
            return Step::Rule(rule, f, vec![s]);
        }
        if let Some(f) = first(&|n| matches!(n, Node::Or(..))) {
            let Node::Or(l, r) = *self.node(f) else { unreachable!() };
            let mut left = without(f);
            left.push(l);
            let mut right = without(f);
            right.push(r);
            return Step::Rule(Rule::Or, f, vec![left, right]);
        }
        let mut moves = Vec::new();
        for &f in sequent {
            if let Node::Diamond(a, chi) = self.node(f) {
                let mut s = vec![*chi];
                for &g in sequent {
                    if let Node::Box(b, beta) = self.node(g) {
                        if a == b {
                            s.push(*beta);
                        }
                    }
                }
                moves.push((f, s));
            }
        }
        Step::Modal(moves)
    }

    fn intern(&mut self, mut sequent: Vec<FormulaId>, det: PermutationState) -> usize {
        sequent.sort_unstable();
        sequent.dedup();
        let key = pack(&sequent, &det);
        if let Some(id) = self.nodes.keys.get_index_of(&key) {
            return id;
        }
        let kind = match self.step_for(&sequent) {
            Step::Clash => NodeKind::Clash,
            Step::Rule(rule, ..) => NodeKind::Internal(rule),
            Step::Modal(moves) if moves.is_empty() => NodeKind::Terminal,
            Step::Modal(_) => NodeKind::State,
        };
        let owner = match kind {
            NodeKind::Clash | NodeKind::Internal(Rule::Or) => Player::Eloise,
            _ => Player::Abelard,
        };
        let id = self.game.add_node(owner);
        self.nodes.keys.insert(key);
        self.nodes.kinds.push(kind);
        self.expanded.push(false);
        self.frontier.push_back(id);
        id
    }

    fn successor(&mut self, v: usize, letter: TrackingLetter, sequent: Vec<FormulaId>) {
        let l = self.tracking.letter(&letter).expect("rule letter in alphabet");
        let (det, p) = self.det.step(&self.nodes.det(v), l);
        let w = self.intern(sequent, det);
        self.game.add_edge(v, l, w, complemented(p));
    }

    /// Adds the outgoing edges of `v`, interning new successors.
    pub fn expand(&mut self, v: usize) {
        if self.expanded[v] {
            return;
        }
        self.expanded[v] = true;
        self.expanded_count += 1;
        match self.step_for(&self.nodes.sequent(v)) {
            Step::Clash => {}
            Step::Rule(rule, principal, conclusions) => {
                for (i, s) in conclusions.into_iter().enumerate() {
                    let letter = TrackingLetter {
                        rule,
                        principal,
                        conclusion: i as u8,
                    };
                    self.successor(v, letter, s);
                }
            }
            Step::Modal(moves) => {
                for (principal, s) in moves {
                    let letter = TrackingLetter {
                        rule: Rule::Modal,
                        principal,
                        conclusion: 0,
                    };
                    self.successor(v, letter, s);
                }
            }
        }
    }

    /// Expands up to `budget` frontier nodes in breadth-first order; returns how many were expanded.
    pub fn expand_batch(&mut self, budget: usize) -> usize {
        let mut done = 0;
        while done < budget {
            let Some(v) = self.frontier.pop_front() else { break };
            if !self.expanded[v] {
                self.expand(v);
                done += 1;
            }
        }
        done
    }

    /// Expands up to `budget` unexpanded nodes breadth-first from `seeds`.
    pub fn expand_from(&mut self, seeds: &[usize], budget: usize) -> usize {
        let mut queue: VecDeque<usize> = seeds.iter().copied().collect();
        let mut done = 0;
        while done < budget {
            let Some(v) = queue.pop_front() else { break };
            if self.expanded[v] {
                continue;
            }
            self.expand(v);
            done += 1;
            queue.extend(self.game.edges[v].iter().map(|e| e.target).filter(|&w| !self.expanded[w]));
        }
        done
    }

    pub fn is_complete(&self) -> bool {
        self.expanded_count == self.num_nodes()
    }

    pub fn explored(&self) -> usize {
        self.expanded_count
    }

    /// Unexpanded nodes reached from the initial node when `player` follows the
    /// strategy of `s` on the completion `g` and the opponent moves freely.
    pub fn unexpanded_under(&self, g: &ParityGame, s: &super::Solution, player: Player) -> Vec<usize> {
        let mut seen = vec![false; g.num_nodes()];
        let mut stack = vec![g.initial];
        let mut out = Vec::new();
        seen[g.initial] = true;
        while let Some(v) = stack.pop() {
            if !self.expanded[v] {
                out.push(v);
                continue;
            }
            let edges = &g.edges[v];
            let chosen: Vec<usize> = if g.owner[v] == player {
                s.strategy[v].map(|e| edges[e].target).into_iter().collect()
            } else {
                edges.iter().map(|e| e.target).collect()
            };
            for w in chosen {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn num_nodes(&self) -> usize {
        self.game.num_nodes()
    }

    /// The explored game with every unexpanded node turned into a self-loop won by `favoured`.
    pub fn completion(&self, favoured: Player) -> ParityGame {
        let mut g = self.game.clone();
        let prio: Priority = match favoured {
            Player::Eloise => 0,
            Player::Abelard => 1,
        };
        for v in 0..g.num_nodes() {
            if !self.expanded[v] {
                g.edges[v] = vec![Edge {
                    label: usize::MAX,
                    target: v,
                    priority: prio,
                }];
            }
        }
        g
    }

    pub fn into_game(self) -> PermutationGame {
        PermutationGame {
            letters: self.tracking.letters.clone(),
            formulas: self.tracking.closure.formulas.iter().map(|f| f.to_string()).collect(),
            state_names: self.det.automaton().state_names.clone(),
            game: self.game,
            nodes: self.nodes,
        }
    }
}

/// Priority of the complemented automaton for a transition of the determinized one.
fn complemented(p: Priority) -> Priority {
    p - 1
}

/// A fully built permutation game with the data needed to print it.
#[derive(Debug, Clone)]
pub struct PermutationGame {
    pub game: ParityGame,
    pub nodes: NodeStore,
    pub letters: Vec<TrackingLetter>,
    pub formulas: Vec<String>,
    pub state_names: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
struct DumpNode {
    id: usize,
    owner: Player,
    kind: NodeKind,
    sequent: Vec<String>,
    permutation: String,
}

#[derive(Debug, Clone, Serialize)]
struct DumpEdge {
    source: usize,
    letter: String,
    target: usize,
    priority: Priority,
}

#[derive(Debug, Clone, Serialize)]
struct Dump {
    initial: usize,
    nodes: Vec<DumpNode>,
    edges: Vec<DumpEdge>,
}

impl PermutationGame {
    pub fn sequent_text(&self, v: usize) -> String {
        let parts: Vec<&str> = self.nodes.sequent(v).into_iter().map(|f| self.formulas[f].as_str()).collect();
        format!("{{{}}}", parts.join(", "))
    }

    pub fn letter_text(&self, e: &Edge) -> String {
        self.letters.get(e.label).map(|l| l.to_string()).unwrap_or_default()
    }

    pub fn to_json(&self) -> String {
        let nodes = (0..self.game.num_nodes())
            .map(|v| DumpNode {
                id: v,
                owner: self.game.owner[v],
                kind: self.nodes.kind(v),
                sequent: self.nodes.sequent(v).into_iter().map(|f| self.formulas[f].clone()).collect(),
                permutation: self.nodes.det(v).display_with(&self.state_names),
            })
            .collect();
        let edges = self
            .game
            .edges
            .iter()
            .enumerate()
            .flat_map(|(v, es)| {
                es.iter().map(move |e| DumpEdge {
                    source: v,
                    letter: self.letter_text(e),
                    target: e.target,
                    priority: e.priority,
                })
            })
            .collect();
        let dump = Dump {
            initial: self.game.initial,
            nodes,
            edges,
        };
        serde_json::to_string_pretty(&dump).expect("game dump serializes")
    }

    pub fn to_dot(&self) -> String {
        self.game.to_dot_with(
            |v| format!("{}\n{}", self.sequent_text(v), self.nodes.det(v).display_with(&self.state_names)),
            |e| format!("{} / {}", self.letter_text(e), e.priority),
        )
    }
}
