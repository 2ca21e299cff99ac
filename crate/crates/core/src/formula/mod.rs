mod closure;
mod fragment;
mod normalize;
mod parse;
mod syntax;

pub use closure::{
    alternation_depth, alternation_level, apply_provenance, closure, Closure, ClosureItem, FormulaId, ItemDump,
    ItemId, Node, Unfolding,
};
pub use fragment::{check_fragment, modal_group, ActivityEnv, FragmentReport};
pub use normalize::{canonicalize, normalize};
pub use parse::{parse, ParseError};
pub use syntax::{name, Fixpoint, Formula, Name, SurfaceFormula, TemporalOp, DEFAULT_ACTION};

/// Parses and normalizes in one step.
pub fn parse_normalized(text: &str) -> Result<std::sync::Arc<Formula>, ParseError> {
    parse(text).map(|f| normalize(&f))
}
