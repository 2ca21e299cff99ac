use std::collections::{HashMap, VecDeque};

use super::automaton::{ParityAutomaton, Priority, State};

/// A state of the Büchi automaton: an original state, or an original state
/// committed to the even priority `2 * level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LevelledState {
    Plain(State),
    Levelled(State, Priority),
}

impl LevelledState {
    pub fn base(self) -> State {
        match self {
            LevelledState::Plain(s) | LevelledState::Levelled(s, _) => s,
        }
    }
}

/// Converts a parity automaton into a Büchi automaton with the same language,
/// together with the origin of every produced state. Automata whose
/// priorities already lie in {1, 2} are returned unchanged.
pub fn pa_to_ba_with_origin(a: &ParityAutomaton) -> (ParityAutomaton, Vec<LevelledState>) {
    if a.transitions().all(|t| t.priority == 1 || t.priority == 2) {
        let origin = (0..a.num_states()).map(LevelledState::Plain).collect();
        return (a.clone(), origin);
    }
    let mut out = ParityAutomaton::new(a.letters.clone());
    let mut index: HashMap<LevelledState, State> = HashMap::new();
    let mut origin = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |s: LevelledState, out: &mut ParityAutomaton, queue: &mut VecDeque<LevelledState>| -> State {
        *index.entry(s).or_insert_with(|| {
            let name = match s {
                LevelledState::Plain(v) => a.state_names[v].clone(),
                LevelledState::Levelled(v, l) => format!("({},{l})", a.state_names[v]),
            };
            origin.push(s);
            queue.push_back(s);
            out.add_state(name)
        })
    };
    out.initial = intern(LevelledState::Plain(a.initial), &mut out, &mut queue);
    while let Some(s) = queue.pop_front() {
        let src = intern(s, &mut out, &mut queue);
        match s {
            LevelledState::Plain(v) => {
                for t in a.outgoing(v) {
                    let dst = intern(LevelledState::Plain(t.target), &mut out, &mut queue);
                    out.add_transition(src, t.letter, dst, 1);
                    if t.priority % 2 == 0 {
                        let lv = intern(LevelledState::Levelled(t.target, t.priority / 2), &mut out, &mut queue);
                        out.add_transition(src, t.letter, lv, 1);
                    }
                }
            }
            LevelledState::Levelled(v, l) => {
                for t in a.outgoing(v).filter(|t| t.priority <= 2 * l) {
                    let dst = intern(LevelledState::Levelled(t.target, l), &mut out, &mut queue);
                    let p = if t.priority == 2 * l { 2 } else { 1 };
                    out.add_transition(src, t.letter, dst, p);
                }
            }
        }
    }
    (out, origin)
}

pub fn pa_to_ba(a: &ParityAutomaton) -> ParityAutomaton {
    pa_to_ba_with_origin(a).0
}
