use std::collections::{BTreeSet, HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use serde::Serialize;

use super::{Edge, ParityGame, Player};
use crate::automata::Priority;

/// Winning regions, with memoryless strategies given as edge indices when the solver produces them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub winner: Vec<Player>,
    /// For every node, the edge its owner takes when the owner wins it.
    pub strategy: Vec<Option<usize>>,
    pub iterations: usize,
}

impl Solution {
    pub fn region(&self, p: Player) -> Vec<usize> {
        (0..self.winner.len()).filter(|&v| self.winner[v] == p).collect()
    }
}

/// Maps `distinct` onto `0..=d` preserving order and parity, merging neighbours of equal parity.
fn compression(distinct: &BTreeSet<Priority>) -> (HashMap<Priority, Priority>, Priority) {
    let mut map = HashMap::new();
    let mut current: Option<Priority> = None;
    for &p in distinct {
        let next = match current {
            None => p % 2,
            Some(c) if c % 2 == p % 2 => c,
            Some(c) => c + 1,
        };
        map.insert(p, next);
        current = Some(next);
    }
    (map, current.unwrap_or(0))
}

fn compress(g: &ParityGame) -> (Vec<Vec<Priority>>, Priority) {
    let distinct: BTreeSet<Priority> = g.edges.iter().flatten().map(|e| e.priority).collect();
    let (map, d) = compression(&distinct);
    let prios = g.edges.iter().map(|es| es.iter().map(|e| map[&e.priority]).collect()).collect();
    (prios, d)
}

/// Node-priority arena in compressed sparse rows: original nodes, one node per
/// edge carrying its priority, and one sink won by each player for stuck owners.
struct Arena {
    owner: Vec<Player>,
    prio: Vec<u8>,
    succ_start: Vec<u32>,
    succ: Vec<u32>,
    pred_start: Vec<u32>,
    pred: Vec<u32>,
}

fn csr(lists: impl Iterator<Item = (usize, usize)>, size: usize) -> (Vec<u32>, Vec<u32>) {
    let pairs: Vec<(usize, usize)> = lists.collect();
    let mut start = vec![0u32; size + 1];
    for &(v, _) in &pairs {
        start[v + 1] += 1;
    }
    for v in 0..size {
        start[v + 1] += start[v];
    }
    let mut fill = start.clone();
    let mut out = vec![0u32; pairs.len()];
    for (v, w) in pairs {
        out[fill[v] as usize] = w as u32;
        fill[v] += 1;
    }
    (start, out)
}

impl Arena {
    fn from_game(g: &ParityGame) -> (Arena, Vec<usize>) {
        let (prios, d) = compress(g);
        assert!(d < u8::MAX as Priority, "too many distinct priorities");
        let n = g.num_nodes();
        let edges = g.num_edges();
        let size = n + edges + 2;
        let (eloise_sink, abelard_sink) = (size - 2, size - 1);
        let mut owner = g.owner.clone();
        owner.resize(n + edges, Player::Eloise);
        owner.extend([Player::Eloise, Player::Abelard]);
        let mut prio = vec![0u8; size];
        prio[abelard_sink] = 1;
        let mut pairs = Vec::with_capacity(2 * edges + n + 2);
        let mut first_edge_node = Vec::with_capacity(n);
        let mut m = n;
        for (v, es) in g.edges.iter().enumerate() {
            first_edge_node.push(m);
            if es.is_empty() {
                let sink = match g.owner[v] {
                    Player::Eloise => abelard_sink,
                    Player::Abelard => eloise_sink,
                };
                pairs.push((v, sink));
            }
            for (i, e) in es.iter().enumerate() {
                prio[m] = prios[v][i] as u8;
                pairs.push((v, m));
                pairs.push((m, e.target));
                m += 1;
            }
        }
        pairs.push((eloise_sink, eloise_sink));
        pairs.push((abelard_sink, abelard_sink));
        let (pred_start, pred) = csr(pairs.iter().map(|&(v, w)| (w, v)), size);
        let (succ_start, succ) = csr(pairs.into_iter(), size);
        let arena = Arena {
            owner,
            prio,
            succ_start,
            succ,
            pred_start,
            pred,
        };
        (arena, first_edge_node)
    }

    fn len(&self) -> usize {
        self.owner.len()
    }

    fn succ(&self, v: usize) -> &[u32] {
        &self.succ[self.succ_start[v] as usize..self.succ_start[v + 1] as usize]
    }

    fn pred(&self, v: usize) -> &[u32] {
        &self.pred[self.pred_start[v] as usize..self.pred_start[v + 1] as usize]
    }

    fn attractor(&self, mask: &[bool], target: &[usize], player: Player, strat: &mut [u32]) -> Vec<bool> {
        let mut attr = vec![false; self.len()];
        let mut count: Vec<u32> = vec![0; self.len()];
        let mut queue = VecDeque::new();
        for &t in target {
            if mask[t] && !attr[t] {
                attr[t] = true;
                queue.push_back(t);
            }
        }
        while let Some(w) = queue.pop_front() {
            for &v in self.pred(w) {
                let v = v as usize;
                if !mask[v] || attr[v] {
                    continue;
                }
                if self.owner[v] == player {
                    attr[v] = true;
                    strat[v] = w as u32;
                    queue.push_back(v);
                } else {
                    if count[v] == 0 {
                        count[v] = self.succ(v).iter().filter(|&&s| mask[s as usize]).count() as u32;
                    }
                    count[v] -= 1;
                    if count[v] == 0 {
                        attr[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        attr
    }

    /// Zielonka's recursion; the loop replaces the tail call on the shrinking subgame.
    fn zielonka(&self, mask: &[bool], strat: &mut [u32], iterations: &mut usize) -> [Vec<bool>; 2] {
        let size = self.len();
        let mut mask = mask.to_vec();
        let mut won: [Vec<bool>; 2] = [vec![false; size], vec![false; size]];
        loop {
            *iterations += 1;
            let Some(d) = (0..size).filter(|&v| mask[v]).map(|v| self.prio[v]).max() else {
                return won;
            };
            let p = Player::of_priority(d as Priority);
            let top: Vec<usize> = (0..size).filter(|&v| mask[v] && self.prio[v] == d).collect();
            let a = self.attractor(&mask, &top, p, strat);
            let rest: Vec<bool> = (0..size).map(|v| mask[v] && !a[v]).collect();
            drop(a);
            let sub = self.zielonka(&rest, strat, iterations);
            drop(rest);
            let opp = p.opponent().index();
            if !sub[opp].iter().any(|&b| b) {
                for &v in &top {
                    if self.owner[v] == p {
                        strat[v] = *self.succ(v).iter().find(|&&w| mask[w as usize]).expect("total arena");
                    }
                }
                for v in 0..size {
                    if mask[v] {
                        won[p.index()][v] = true;
                    }
                }
                return won;
            }
            let lost: Vec<usize> = (0..size).filter(|&v| sub[opp][v]).collect();
            drop(sub);
            let b = self.attractor(&mask, &lost, p.opponent(), strat);
            for v in 0..size {
                if b[v] {
                    won[opp][v] = true;
                    mask[v] = false;
                }
            }
        }
    }
}

/// Solves `g` with Zielonka's recursive algorithm.
pub fn zielonka(g: &ParityGame) -> Solution {
    let n = g.num_nodes();
    let (arena, first_edge_node) = Arena::from_game(g);
    let size = arena.len();
    let mut strat = vec![u32::MAX; size];
    let mut iterations = 0;
    let won = arena.zielonka(&vec![true; size], &mut strat, &mut iterations);
    let winner: Vec<Player> = (0..n)
        .map(|v| if won[0][v] { Player::Eloise } else { Player::Abelard })
        .collect();
    let strategy = (0..n)
        .map(|v| {
            let m = strat[v];
            (winner[v] == g.owner[v] && !g.edges[v].is_empty() && m != u32::MAX).then(|| m as usize - first_edge_node[v])
        })
        .collect();
    Solution {
        winner,
        strategy,
        iterations,
    }
}

/// One strongly connected component with the edges leaving it already decided.
struct Component {
    owner: Vec<Player>,
    degree: Vec<u32>,
    /// Edges leaving the component towards nodes Eloise wins.
    fixed_good: Vec<u32>,
    /// Edges inside the component as (local target, compressed priority).
    inner: Vec<Vec<(u32, Priority)>>,
    /// Sources of priority-0 inner edges, grouped by target.
    zero_start: Vec<u32>,
    zero_pred: Vec<u32>,
    d: Priority,
}

impl Component {
    fn new(g: &ParityGame, nodes: &[usize], local: &[u32], won: &[bool]) -> Component {
        let inside = |w: usize| nodes.get(local[w] as usize) == Some(&w);
        let distinct: BTreeSet<Priority> = nodes
            .iter()
            .flat_map(|&v| g.edges[v].iter().filter(|e| inside(e.target)).map(|e| e.priority))
            .collect();
        let (map, d) = compression(&distinct);
        let mut c = Component {
            owner: nodes.iter().map(|&v| g.owner[v]).collect(),
            degree: nodes.iter().map(|&v| g.edges[v].len() as u32).collect(),
            fixed_good: Vec::with_capacity(nodes.len()),
            inner: Vec::with_capacity(nodes.len()),
            zero_start: Vec::new(),
            zero_pred: Vec::new(),
            d,
        };
        let mut zero = Vec::new();
        for (i, &v) in nodes.iter().enumerate() {
            let (inner, outer): (Vec<&Edge>, Vec<&Edge>) = g.edges[v].iter().partition(|e| inside(e.target));
            c.fixed_good.push(outer.iter().filter(|e| won[e.target]).count() as u32);
            c.inner.push(inner.iter().map(|e| (local[e.target], map[&e.priority])).collect());
            zero.extend(c.inner[i].iter().filter(|e| e.1 == 0).map(|e| (e.0 as usize, i)));
        }
        (c.zero_start, c.zero_pred) = csr(zero.into_iter(), nodes.len());
        c
    }

    fn holds(&self, v: usize, good: u32) -> bool {
        match self.owner[v] {
            Player::Eloise => good > 0,
            Player::Abelard => good == self.degree[v],
        }
    }

    /// Shrinks `z[0]` to the greatest fixpoint below it.
    fn innermost(&self, z: &mut [Vec<bool>]) {
        let n = self.owner.len();
        let mut good: Vec<u32> = (0..n)
            .map(|v| self.fixed_good[v] + self.inner[v].iter().filter(|&&(w, p)| z[p as usize][w as usize]).count() as u32)
            .collect();
        let mut queue: Vec<usize> = (0..n).filter(|&v| z[0][v] && !self.holds(v, good[v])).collect();
        for &v in &queue {
            z[0][v] = false;
        }
        while let Some(w) = queue.pop() {
            for &v in &self.zero_pred[self.zero_start[w] as usize..self.zero_start[w + 1] as usize] {
                let v = v as usize;
                good[v] -= 1;
                if z[0][v] && !self.holds(v, good[v]) {
                    z[0][v] = false;
                    queue.push(v);
                }
            }
        }
    }

    /// Evaluates `η Z_i ... ν Z_0` with warm starts: inner variables of the
    /// parity being updated keep their values.
    fn level(&self, i: usize, z: &mut Vec<Vec<bool>>, iterations: &mut usize) {
        if i == 0 {
            *iterations += 1;
            return self.innermost(z);
        }
        loop {
            self.level(i - 1, z, iterations);
            if z[i - 1] == z[i] {
                return;
            }
            z[i] = z[i - 1].clone();
            for j in (0..i).filter(|j| j % 2 != i % 2) {
                z[j] = vec![j % 2 == 0; z[i].len()];
            }
        }
    }

    fn solve(&self, iterations: &mut usize) -> Vec<bool> {
        let d = self.d as usize;
        let mut z: Vec<Vec<bool>> = (0..=d).map(|i| vec![i % 2 == 0; self.owner.len()]).collect();
        self.level(d, &mut z, iterations);
        z.swap_remove(d)
    }
}

/// Solves `g` by evaluating the nested fixpoint `η Z_d ... ν Z_0. CPre` on
/// each strongly connected component, sinks first. The innermost greatest
/// fixpoint is computed by a worklist rather than repeated full passes.
pub fn fixpoint_iteration(g: &ParityGame) -> Solution {
    let n = g.num_nodes();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, g.num_edges());
    for _ in 0..n {
        graph.add_node(());
    }
    for (v, es) in g.edges.iter().enumerate() {
        for e in es {
            graph.add_edge(NodeIndex::new(v), NodeIndex::new(e.target), ());
        }
    }
    let sccs = tarjan_scc(&graph);
    drop(graph);
    let mut won = vec![false; n];
    let mut local = vec![u32::MAX; n];
    let mut iterations = 0;
    for scc in sccs {
        let nodes: Vec<usize> = scc.iter().map(|x| x.index()).collect();
        for (i, &v) in nodes.iter().enumerate() {
            local[v] = i as u32;
        }
        let c = Component::new(g, &nodes, &local, &won);
        for (i, w) in c.solve(&mut iterations).into_iter().enumerate() {
            won[nodes[i]] = w;
        }
    }
    let winner = won.iter().map(|&w| if w { Player::Eloise } else { Player::Abelard }).collect();
    Solution {
        winner,
        strategy: vec![None; n],
        iterations,
    }
}

pub fn solve(g: &ParityGame, kind: super::SolverKind) -> Solution {
    match kind {
        super::SolverKind::Zielonka => zielonka(g),
        super::SolverKind::Fixpoint => fixpoint_iteration(g),
    }
}
