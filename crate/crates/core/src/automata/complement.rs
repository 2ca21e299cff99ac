use super::automaton::{AutomatonError, ParityAutomaton};

/// Adds a rejecting sink so every state has a successor under every letter.
pub fn totalize(a: &ParityAutomaton) -> ParityAutomaton {
    let missing = (0..a.num_states()).any(|s| (0..a.num_letters()).any(|l| a.successors(s, l).is_empty()));
    if !missing {
        return a.clone();
    }
    let mut out = a.clone();
    let sink = out.add_state("sink".to_string());
    for s in 0..out.num_states() {
        for l in 0..out.num_letters() {
            if out.successors(s, l).is_empty() {
                out.add_transition(s, l, sink, 1);
            }
        }
    }
    out
}

/// Complements a deterministic parity automaton by shifting every priority down by one.
pub fn complement_dpa(a: &ParityAutomaton) -> Result<ParityAutomaton, AutomatonError> {
    if !a.is_deterministic() {
        return Err(AutomatonError::NotDeterministic);
    }
    let total = totalize(a);
    if total.transitions().any(|t| t.priority == 0) {
        Ok(total.map_priorities(|p| p + 1))
    } else {
        Ok(total.map_priorities(|p| p - 1))
    }
}
