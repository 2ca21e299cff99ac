use std::collections::HashMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::automaton::{Letter, ParityAutomaton, Priority, State};

/// The ultimately periodic word `prefix · loop^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoWord {
    pub prefix: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl LassoWord {
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Self {
        assert!(!cycle.is_empty(), "loop must be nonempty");
        LassoWord { prefix, cycle }
    }

    fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    fn letter_at(&self, pos: usize) -> Letter {
        if pos < self.prefix.len() {
            self.prefix[pos]
        } else {
            self.cycle[pos - self.prefix.len()]
        }
    }

    fn next_pos(&self, pos: usize) -> usize {
        if pos + 1 == self.len() {
            self.prefix.len()
        } else {
            pos + 1
        }
    }

    /// All lassos over `letters` letters with bounded prefix and loop lengths.
    pub fn enumerate(letters: usize, max_prefix: usize, max_loop: usize) -> Vec<LassoWord> {
        let words = |max: usize, min: usize| {
            let mut all: Vec<Vec<Letter>> = Vec::new();
            let mut layer = vec![Vec::new()];
            for len in 0..=max {
                if len >= min {
                    all.extend(layer.iter().cloned());
                }
                layer = layer
                    .iter()
                    .flat_map(|w| {
                        (0..letters).map(move |l| {
                            let mut v = w.clone();
                            v.push(l);
                            v
                        })
                    })
                    .collect();
            }
            all
        };
        let prefixes = words(max_prefix, 0);
        let loops = words(max_loop, 1);
        let mut out = Vec::new();
        for p in &prefixes {
            for l in &loops {
                out.push(LassoWord::new(p.clone(), l.clone()));
            }
        }
        out
    }
}

/// Runs the unique run of a deterministic automaton until a loop-start state repeats.
pub fn dpa_accepts_lasso(a: &ParityAutomaton, w: &LassoWord) -> bool {
    let mut state = a.initial;
    for &l in &w.prefix {
        match a.successors(state, l).first() {
            Some(&(t, _)) => state = t,
            None => return false,
        }
    }
    let mut starts: HashMap<State, usize> = HashMap::new();
    let mut block_max: Vec<Priority> = Vec::new();
    loop {
        if let Some(&first) = starts.get(&state) {
            let max = block_max[first..].iter().copied().max().expect("nonempty cycle");
            return max % 2 == 0;
        }
        starts.insert(state, block_max.len());
        let mut max = 0;
        for &l in &w.cycle {
            match a.successors(state, l).first() {
                Some(&(t, p)) => {
                    max = max.max(p);
                    state = t;
                }
                None => return false,
            }
        }
        block_max.push(max);
    }
}

/// Decides whether some run of `a` on `w` is accepting.
pub fn npa_accepts_lasso(a: &ParityAutomaton, w: &LassoWord) -> bool {
    let n = w.len();
    let node = |s: State, pos: usize| s * n + pos;
    let mut seen = vec![false; a.num_states() * n];
    let mut stack = vec![(a.initial, 0)];
    seen[node(a.initial, 0)] = true;
    let mut edges: Vec<(usize, usize, Priority)> = Vec::new();
    while let Some((s, pos)) = stack.pop() {
        let next = w.next_pos(pos);
        for &(t, p) in a.successors(s, w.letter_at(pos)) {
            edges.push((node(s, pos), node(t, next), p));
            if !seen[node(t, next)] {
                seen[node(t, next)] = true;
                stack.push((t, next));
            }
        }
    }
    let mut evens: Vec<Priority> = edges.iter().map(|e| e.2).filter(|p| p % 2 == 0).collect();
    evens.sort_unstable();
    evens.dedup();
    evens.into_iter().any(|bound| {
        let mut g: DiGraph<(), ()> = DiGraph::new();
        let nodes: Vec<_> = (0..seen.len()).map(|_| g.add_node(())).collect();
        for &(x, y, p) in &edges {
            if p <= bound {
                g.add_edge(nodes[x], nodes[y], ());
            }
        }
        let mut component = vec![0; seen.len()];
        for (i, scc) in tarjan_scc(&g).into_iter().enumerate() {
            for v in scc {
                component[v.index()] = i;
            }
        }
        edges.iter().any(|&(x, y, p)| p == bound && component[x] == component[y])
    })
}
