use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

pub type State = usize;
pub type Letter = usize;
pub type Priority = u32;

/// Transition-based parity automaton with max-even acceptance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityAutomaton {
    pub state_names: Vec<String>,
    pub letters: Vec<String>,
    pub initial: State,
    delta: Vec<BTreeMap<Letter, Vec<(State, Priority)>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: State,
    pub letter: Letter,
    pub target: State,
    pub priority: Priority,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomatonError {
    #[error("automaton is not limit-deterministic")]
    NotLimitDeterministic,
    #[error("automaton is not deterministic")]
    NotDeterministic,
    #[error("transition priority {0} is odd")]
    OddPriority(Priority),
    #[error("malformed automaton: {0}")]
    Format(String),
}

impl ParityAutomaton {
    pub fn new(letters: Vec<String>) -> Self {
        ParityAutomaton {
            state_names: Vec::new(),
            letters,
            initial: 0,
            delta: Vec::new(),
        }
    }

    pub fn with_states(names: &[&str], letters: &[&str]) -> Self {
        let mut a = ParityAutomaton::new(letters.iter().map(|s| s.to_string()).collect());
        for n in names {
            a.add_state(n.to_string());
        }
        a
    }

    pub fn add_state(&mut self, name: String) -> State {
        self.state_names.push(name);
        self.delta.push(BTreeMap::new());
        self.delta.len() - 1
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn num_letters(&self) -> usize {
        self.letters.len()
    }

    pub fn letter_index(&self, name: &str) -> Option<Letter> {
        self.letters.iter().position(|l| l == name)
    }

    pub fn state_index(&self, name: &str) -> Option<State> {
        self.state_names.iter().position(|l| l == name)
    }

    /// Adds a transition; an existing transition with the same endpoints gets the new priority.
    pub fn add_transition(&mut self, source: State, letter: Letter, target: State, priority: Priority) {
        let succ = self.delta[source].entry(letter).or_default();
        match succ.binary_search_by_key(&target, |e| e.0) {
            Ok(i) => succ[i].1 = priority,
            Err(i) => succ.insert(i, (target, priority)),
        }
    }

    pub fn successors(&self, state: State, letter: Letter) -> &[(State, Priority)] {
        self.delta[state].get(&letter).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn outgoing(&self, state: State) -> impl Iterator<Item = Transition> + '_ {
        self.delta[state].iter().flat_map(move |(&letter, succ)| {
            succ.iter().map(move |&(target, priority)| Transition {
                source: state,
                letter,
                target,
                priority,
            })
        })
    }

    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        (0..self.num_states()).flat_map(move |s| self.outgoing(s))
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().map(|m| m.values().map(Vec::len).sum::<usize>()).sum()
    }

    pub fn priority(&self, source: State, letter: Letter, target: State) -> Option<Priority> {
        self.successors(source, letter).iter().find(|e| e.0 == target).map(|e| e.1)
    }

    pub fn index(&self) -> Priority {
        self.transitions().map(|t| t.priority).max().unwrap_or(0)
    }

    pub fn is_deterministic(&self) -> bool {
        self.delta.iter().all(|m| m.values().all(|v| v.len() <= 1))
    }

    pub fn is_buchi(&self) -> bool {
        self.transitions().all(|t| t.priority == 1 || t.priority == 2)
    }

    pub fn reachable_from(&self, start: State, max_priority: Option<Priority>) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(s) = queue.pop_front() {
            for t in self.outgoing(s) {
                if max_priority.is_some_and(|m| t.priority > m) || seen[t.target] {
                    continue;
                }
                seen[t.target] = true;
                queue.push_back(t.target);
            }
        }
        seen
    }

    /// Copy restricted to states reachable from the initial state.
    pub fn trim(&self) -> ParityAutomaton {
        let reach = self.reachable_from(self.initial, None);
        let mut map = vec![None; self.num_states()];
        let mut out = ParityAutomaton::new(self.letters.clone());
        for s in 0..self.num_states() {
            if reach[s] {
                map[s] = Some(out.add_state(self.state_names[s].clone()));
            }
        }
        out.initial = map[self.initial].unwrap();
        for t in self.transitions() {
            if let (Some(s), Some(d)) = (map[t.source], map[t.target]) {
                out.add_transition(s, t.letter, d, t.priority);
            }
        }
        out
    }

    pub fn map_priorities(&self, f: impl Fn(Priority) -> Priority) -> ParityAutomaton {
        let mut out = self.clone();
        for m in &mut out.delta {
            for succ in m.values_mut() {
                for e in succ.iter_mut() {
                    e.1 = f(e.1);
                }
            }
        }
        out
    }

    pub fn to_serial(&self) -> SerialAutomaton {
        SerialAutomaton {
            states: self.state_names.clone(),
            alphabet: self.letters.clone(),
            initial: self.initial,
            transitions: self.transitions().map(|t| (t.source, t.letter, t.target, t.priority)).collect(),
        }
    }

    pub fn from_serial(s: &SerialAutomaton) -> Result<Self, AutomatonError> {
        let mut a = ParityAutomaton::new(s.alphabet.clone());
        for n in &s.states {
            a.add_state(n.clone());
        }
        if s.initial >= a.num_states() {
            return Err(AutomatonError::Format(format!("initial state {} out of range", s.initial)));
        }
        a.initial = s.initial;
        for &(src, letter, dst, p) in &s.transitions {
            if src >= a.num_states() || dst >= a.num_states() || letter >= a.num_letters() {
                return Err(AutomatonError::Format(format!("transition ({src},{letter},{dst}) out of range")));
            }
            a.add_transition(src, letter, dst, p);
        }
        Ok(a)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_serial()).expect("automaton serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, AutomatonError> {
        let s: SerialAutomaton = serde_json::from_str(text).map_err(|e| AutomatonError::Format(e.to_string()))?;
        Self::from_serial(&s)
    }

    /// DOT rendering with `letter,priority` edge labels; parallel edges are merged.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph automaton {\n  rankdir=LR;\n  init [shape=point];\n");
        for (i, n) in self.state_names.iter().enumerate() {
            out.push_str(&format!("  q{i} [shape=box, style=rounded, label=\"{}\"];\n", escape(n)));
        }
        out.push_str(&format!("  init -> q{};\n", self.initial));
        let mut merged: BTreeMap<(State, State, Priority), Vec<&str>> = BTreeMap::new();
        for t in self.transitions() {
            merged.entry((t.source, t.target, t.priority)).or_default().push(&self.letters[t.letter]);
        }
        for ((s, d, p), letters) in merged {
            out.push_str(&format!("  q{s} -> q{d} [label=\"{},{p}\"];\n", escape(&letters.join(","))));
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerialAutomaton {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub initial: State,
    pub transitions: Vec<(State, Letter, State, Priority)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut a = ParityAutomaton::with_states(&["0", "1"], &["a", "b"]);
        a.add_transition(0, 0, 1, 2);
        a.add_transition(1, 1, 0, 3);
        let text = a.to_json();
        let b = ParityAutomaton::from_json(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.to_json(), text);
        assert!(a.to_dot().contains("q0 -> q1 [label=\"a,2\"]"));
    }

    #[test]
    fn rejects_out_of_range() {
        let s = SerialAutomaton {
            states: vec!["0".into()],
            alphabet: vec!["a".into()],
            initial: 0,
            transitions: vec![(0, 0, 4, 1)],
        };
        assert!(ParityAutomaton::from_serial(&s).is_err());
    }

    #[test]
    fn trim_drops_unreachable() {
        let mut a = ParityAutomaton::with_states(&["0", "1", "2"], &["a"]);
        a.add_transition(0, 0, 1, 1);
        a.add_transition(2, 0, 0, 1);
        let t = a.trim();
        assert_eq!(t.num_states(), 2);
        assert_eq!(t.num_transitions(), 1);
    }
}
