pub mod automata;
pub mod bench;
pub mod formula;
pub mod game;
pub mod semantics;
pub mod tracking;
