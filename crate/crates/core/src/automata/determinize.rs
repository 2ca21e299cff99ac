use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use super::automaton::{AutomatonError, Letter, ParityAutomaton, Priority, State};
use super::compartment::{is_limit_deterministic, prune_non_cyclic_accepting};
use super::pa_to_ba::pa_to_ba;

/// A set of states outside `Q` together with a partial permutation of states in `Q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermutationState {
    pub subset: Vec<State>,
    pub perm: Vec<State>,
}

impl PermutationState {
    pub fn display_with(&self, names: &[String]) -> String {
        let set: Vec<&str> = self.subset.iter().map(|&s| names[s].as_str()).collect();
        let perm: Vec<&str> = self.perm.iter().map(|&s| names[s].as_str()).collect();
        format!("{{{}}},[{}]", set.join(","), perm.join(","))
    }
}

impl fmt::Display for PermutationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set: Vec<String> = self.subset.iter().map(|s| s.to_string()).collect();
        let perm: Vec<String> = self.perm.iter().map(|s| s.to_string()).collect();
        write!(f, "{{{}}},[{}]", set.join(","), perm.join(","))
    }
}

/// Lazily computes the permutation determinization of a limit-deterministic Büchi automaton.
#[derive(Debug, Clone)]
pub struct LdbaDeterminizer<'a> {
    ba: &'a ParityAutomaton,
    in_q: Vec<bool>,
    q: usize,
}

impl<'a> LdbaDeterminizer<'a> {
    pub fn new(ba: &'a ParityAutomaton) -> Result<Self, AutomatonError> {
        if !is_limit_deterministic(ba) {
            return Err(AutomatonError::NotLimitDeterministic);
        }
        let mut in_q = vec![false; ba.num_states()];
        for t in ba.transitions().filter(|t| t.priority == 2) {
            if !in_q[t.target] {
                for (s, r) in ba.reachable_from(t.target, None).into_iter().enumerate() {
                    in_q[s] |= r;
                }
            }
        }
        let q = in_q.iter().filter(|&&b| b).count();
        Ok(LdbaDeterminizer { ba, in_q, q })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn in_q(&self, s: State) -> bool {
        self.in_q[s]
    }

    pub fn automaton(&self) -> &ParityAutomaton {
        self.ba
    }

    pub fn initial(&self) -> PermutationState {
        let u0 = self.ba.initial;
        if self.in_q[u0] {
            PermutationState {
                subset: Vec::new(),
                perm: vec![u0],
            }
        } else {
            PermutationState {
                subset: vec![u0],
                perm: Vec::new(),
            }
        }
    }

    pub fn step(&self, g: &PermutationState, letter: Letter) -> (PermutationState, Priority) {
        let mut seen = BTreeSet::new();
        let mut removed = None;
        let mut t = Vec::with_capacity(g.perm.len());
        for (i, &v) in g.perm.iter().enumerate() {
            let succ = self.ba.successors(v, letter);
            debug_assert!(succ.len() <= 1, "states in Q are deterministic");
            match succ.first() {
                Some(&(w, _)) if seen.insert(w) => t.push(w),
                _ => {
                    removed.get_or_insert(i + 1);
                }
            }
        }
        let mut subset = BTreeSet::new();
        let mut fresh = BTreeSet::new();
        for &u in &g.subset {
            for &(w, _) in self.ba.successors(u, letter) {
                if self.in_q[w] {
                    if !seen.contains(&w) {
                        fresh.insert(w);
                    }
                } else {
                    subset.insert(w);
                }
            }
        }
        let mut l_next = t;
        l_next.extend(fresh);
        let sentinel = self.q + 1;
        let r = removed.unwrap_or(sentinel);
        let a = (0..g.perm.len().min(l_next.len()))
            .find(|&i| self.ba.priority(g.perm[i], letter, l_next[i]) == Some(2))
            .map(|i| i + 1)
            .unwrap_or(sentinel);
        let q = self.q as Priority;
        let priority = if r == sentinel && a == sentinel {
            1
        } else if r <= a {
            2 * (q - r as Priority) + 3
        } else {
            2 * (q - a as Priority) + 2
        };
        let next = PermutationState {
            subset: subset.into_iter().collect(),
            perm: l_next,
        };
        (next, priority)
    }

    /// Eager construction of all reachable states.
    pub fn determinize(&self) -> (ParityAutomaton, Vec<PermutationState>) {
        let mut out = ParityAutomaton::new(self.ba.letters.clone());
        let mut index: HashMap<PermutationState, State> = HashMap::new();
        let mut states = Vec::new();
        let mut queue = VecDeque::new();
        let init = self.initial();
        index.insert(init.clone(), out.add_state(init.display_with(&self.ba.state_names)));
        states.push(init.clone());
        queue.push_back(init);
        while let Some(g) = queue.pop_front() {
            let src = index[&g];
            for letter in 0..self.ba.num_letters() {
                let (h, p) = self.step(&g, letter);
                let dst = match index.get(&h) {
                    Some(&d) => d,
                    None => {
                        let d = out.add_state(h.display_with(&self.ba.state_names));
                        index.insert(h.clone(), d);
                        states.push(h.clone());
                        queue.push_back(h);
                        d
                    }
                };
                out.add_transition(src, letter, dst, p);
            }
        }
        (out, states)
    }
}

pub fn determinize_ldba(a: &ParityAutomaton) -> Result<ParityAutomaton, AutomatonError> {
    Ok(LdbaDeterminizer::new(a)?.determinize().0)
}

pub fn determinize_ldpa(a: &ParityAutomaton) -> Result<ParityAutomaton, AutomatonError> {
    if !is_limit_deterministic(a) {
        return Err(AutomatonError::NotLimitDeterministic);
    }
    determinize_ldba(&prune_non_cyclic_accepting(&pa_to_ba(a)))
}

/// Number of partial permutations of a `q`-element set.
pub fn pperm_count(q: usize) -> u128 {
    let mut total = 0u128;
    let mut term = 1u128;
    for i in 0..=q {
        total += term;
        term *= (q - i) as u128;
    }
    total
}

/// All partial permutations over `items`, shortest first.
pub fn partial_permutations(items: &[State]) -> Vec<Vec<State>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..items.len() {
        let mut next = Vec::new();
        for p in &frontier {
            for &x in items {
                if !p.contains(&x) {
                    let mut q = p.clone();
                    q.push(x);
                    next.push(q);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::examples::example_ba;

    fn edge(b: &ParityAutomaton, from: &str, letter: &str, to: &str) -> Option<Priority> {
        b.priority(b.state_index(from)?, b.letter_index(letter)?, b.state_index(to)?)
    }

    #[test]
    fn example_determinization() {
        let b = determinize_ldba(&example_ba()).unwrap();
        assert_eq!(b.num_states(), 6);
        assert!(b.is_deterministic());
        assert_eq!(edge(&b, "{0,2},[1]", "b", "{2},[3]"), Some(4));
        assert_eq!(edge(&b, "{2},[3]", "b", "{2},[3]"), Some(5));
        assert_eq!(edge(&b, "{0,2},[1,3]", "a", "{0,2},[1,3]"), Some(3));
        assert_eq!(edge(&b, "{0},[]", "b", "{},[]"), Some(1));
        assert_eq!(edge(&b, "{0},[]", "a", "{0,2},[1]"), Some(1));
        assert_eq!(edge(&b, "{2},[3]", "a", "{2},[1,3]"), Some(1));
        assert_eq!(edge(&b, "{2},[1,3]", "a", "{2},[1,3]"), Some(3));
        assert_eq!(edge(&b, "{2},[1,3]", "b", "{2},[3]"), Some(4));
    }

    #[test]
    fn empty_accepting_set_gives_subset_construction() {
        let mut a = ParityAutomaton::with_states(&["0", "1"], &["a"]);
        a.add_transition(0, 0, 0, 1);
        a.add_transition(0, 0, 1, 1);
        let b = determinize_ldba(&a).unwrap();
        assert!(b.transitions().all(|t| t.priority == 1));
        assert_eq!(b.num_states(), 2);
    }

    #[test]
    fn single_accepting_loop() {
        let mut a = ParityAutomaton::with_states(&["0"], &["a"]);
        a.add_transition(0, 0, 0, 2);
        let b = determinize_ldba(&a).unwrap();
        assert_eq!(b.state_names, vec!["{},[0]"]);
        assert_eq!(b.priority(0, 0, 0), Some(2));
    }

    #[test]
    fn rejects_nondeterministic_compartment() {
        let mut a = ParityAutomaton::with_states(&["0", "1"], &["a"]);
        a.add_transition(0, 0, 0, 2);
        a.add_transition(0, 0, 1, 1);
        assert_eq!(determinize_ldba(&a), Err(AutomatonError::NotLimitDeterministic));
    }

    #[test]
    fn partial_permutation_count() {
        let all = partial_permutations(&[1, 3]);
        assert_eq!(all, vec![vec![], vec![1], vec![3], vec![1, 3], vec![3, 1]]);
        assert_eq!(pperm_count(2), 5);
        assert_eq!(pperm_count(3), 16);
        for q in 0..6 {
            let items: Vec<usize> = (0..q).collect();
            assert_eq!(partial_permutations(&items).len() as u128, pperm_count(q));
        }
    }
}
