use super::automaton::ParityAutomaton;

/// The four-state limit-deterministic Büchi automaton with the single accepting transition (1,b,3).
pub fn example_ba() -> ParityAutomaton {
    let mut a = ParityAutomaton::with_states(&["0", "1", "2", "3"], &["a", "b"]);
    let (x, y) = (0, 1);
    for (s, l, t) in [(0, x, 0), (0, x, 1), (0, x, 2), (1, x, 1), (2, x, 2), (2, y, 2), (2, x, 3), (2, y, 3), (3, x, 1)] {
        a.add_transition(s, l, t, 1);
    }
    a.add_transition(1, y, 3, 2);
    a
}
