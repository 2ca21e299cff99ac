use std::collections::{BTreeSet, HashMap};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::automaton::{AutomatonError, ParityAutomaton, Priority, State, Transition};

/// States reachable from the target of `t` using transitions of priority at most `t.priority`.
pub fn compartment(a: &ParityAutomaton, t: &Transition) -> Result<BTreeSet<State>, AutomatonError> {
    if t.priority % 2 == 1 {
        return Err(AutomatonError::OddPriority(t.priority));
    }
    let reach = a.reachable_from(t.target, Some(t.priority));
    Ok(reach.iter().enumerate().filter(|(_, &r)| r).map(|(s, _)| s).collect())
}

/// Every compartment must be internally deterministic.
pub fn is_limit_deterministic(a: &ParityAutomaton) -> bool {
    let mut checked: HashMap<(State, Priority), bool> = HashMap::new();
    for t in a.transitions() {
        if t.priority % 2 == 1 {
            continue;
        }
        let ok = *checked.entry((t.target, t.priority)).or_insert_with(|| {
            let members = compartment(a, &t).expect("even priority");
            members.iter().all(|&s| deterministic_below(a, s, t.priority))
        });
        if !ok {
            return false;
        }
    }
    true
}

fn deterministic_below(a: &ParityAutomaton, s: State, bound: Priority) -> bool {
    (0..a.num_letters()).all(|l| a.successors(s, l).iter().filter(|e| e.1 <= bound).count() <= 1)
}

/// Demotes accepting transitions of a Büchi automaton that lie on no cycle.
pub fn prune_non_cyclic_accepting(a: &ParityAutomaton) -> ParityAutomaton {
    let mut out = a.clone();
    let mut reach_cache: HashMap<State, Vec<bool>> = HashMap::new();
    for t in a.transitions() {
        if t.priority != 2 {
            continue;
        }
        let reach = reach_cache.entry(t.target).or_insert_with(|| a.reachable_from(t.target, None));
        if !reach[t.source] {
            out.add_transition(t.source, t.letter, t.target, 1);
        }
    }
    out
}

/// Let `p` be the least priority such that a transition lies on a cycle of
/// transitions with priority at most `p`. When `p` is odd the transition is
/// raised to `p`: a run repeating it repeats a maximum of at least `p`, so the
/// language is unchanged. Even transitions on no cycle occur at most once per
/// run and are raised to the least odd priority above every even one. Either
/// way the transition leaves the compartments it cannot return to.
pub fn normalize_cycle_priorities(a: &ParityAutomaton) -> ParityAutomaton {
    let mut out = a.clone();
    let levels: BTreeSet<Priority> = a.transitions().map(|t| t.priority).collect();
    let mut settled: BTreeSet<Transition> = BTreeSet::new();
    for &p in &levels {
        let mut g = DiGraph::<(), ()>::with_capacity(a.num_states(), 0);
        for _ in 0..a.num_states() {
            g.add_node(());
        }
        for t in a.transitions().filter(|t| t.priority <= p) {
            g.add_edge(NodeIndex::new(t.source), NodeIndex::new(t.target), ());
        }
        let mut component = vec![0; a.num_states()];
        for (i, scc) in tarjan_scc(&g).iter().enumerate() {
            for s in scc {
                component[s.index()] = i;
            }
        }
        for t in a.transitions().filter(|t| t.priority <= p) {
            if component[t.source] == component[t.target] && settled.insert(t) && p % 2 == 1 {
                out.add_transition(t.source, t.letter, t.target, p);
            }
        }
    }
    let top = a.index() | 1;
    for t in a.transitions().filter(|t| t.priority % 2 == 0 && !settled.contains(t)) {
        out.add_transition(t.source, t.letter, t.target, top);
    }
    out
}
