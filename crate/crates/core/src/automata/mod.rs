mod automaton;
mod compartment;
mod complement;
mod determinize;
pub mod examples;
mod lasso;
mod pa_to_ba;

pub use automaton::{AutomatonError, Letter, ParityAutomaton, Priority, SerialAutomaton, State, Transition};
pub use compartment::{compartment, is_limit_deterministic, normalize_cycle_priorities, prune_non_cyclic_accepting};
pub use complement::{complement_dpa, totalize};
pub use determinize::{
    determinize_ldba, determinize_ldpa, partial_permutations, pperm_count, LdbaDeterminizer, PermutationState,
};
pub use lasso::{dpa_accepts_lasso, npa_accepts_lasso, LassoWord};
pub use pa_to_ba::{pa_to_ba, pa_to_ba_with_origin, LevelledState};
