use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::automata::{
    complement_dpa, determinize_ldba, is_limit_deterministic, normalize_cycle_priorities, pa_to_ba,
    prune_non_cyclic_accepting, AutomatonError,
    Letter, ParityAutomaton, Priority,
};
use crate::formula::{check_fragment, closure, Closure, Fixpoint, Formula, FormulaId, ItemId, Node};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    Bot,
    Clash,
    And,
    Or,
    Modal,
    Mu,
    Nu,
    Top,
}

impl Rule {
    pub fn symbol(self) -> &'static str {
        match self {
            Rule::Bot => "bot",
            Rule::Clash => "clash",
            Rule::And => "and",
            Rule::Or => "or",
            Rule::Modal => "modal",
            Rule::Mu => "mu",
            Rule::Nu => "nu",
            Rule::Top => "top",
        }
    }
}

/// A rule application: rule, principal formula and chosen conclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TrackingLetter {
    pub rule: Rule,
    pub principal: FormulaId,
    pub conclusion: u8,
}

impl fmt::Display for TrackingLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule {
            Rule::Or => write!(f, "{}:{}/{}", self.rule.symbol(), self.principal, self.conclusion),
            _ => write!(f, "{}:{}", self.rule.symbol(), self.principal),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TrackingError {
    #[error("formula is {0}")]
    Fragment(&'static str),
    #[error("formula has free variables")]
    Open,
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

/// All rule applications to formulas of the closure, in formula order.
pub fn alphabet(c: &Closure) -> Vec<TrackingLetter> {
    let mut out = Vec::new();
    for (fid, node) in c.nodes.iter().enumerate() {
        let letter = |rule| TrackingLetter {
            rule,
            principal: fid,
            conclusion: 0,
        };
        match node {
            Node::And(..) => out.push(letter(Rule::And)),
            Node::Or(..) => {
                out.push(letter(Rule::Or));
                out.push(TrackingLetter {
                    conclusion: 1,
                    ..letter(Rule::Or)
                });
            }
            Node::Fix(Fixpoint::Mu, _) => out.push(letter(Rule::Mu)),
            Node::Fix(Fixpoint::Nu, _) => out.push(letter(Rule::Nu)),
            Node::Diamond(..) => out.push(letter(Rule::Modal)),
            Node::True => out.push(letter(Rule::Top)),
            _ => {}
        }
    }
    out
}

/// The limit-deterministic parity automaton over rule applications that
/// accepts exactly the branches containing a mu-thread.
#[derive(Debug, Clone)]
pub struct TrackingAutomaton {
    pub closure: Closure,
    pub letters: Vec<TrackingLetter>,
    pub letter_index: HashMap<TrackingLetter, Letter>,
    pub pa: ParityAutomaton,
}

impl TrackingAutomaton {
    pub fn letter(&self, l: &TrackingLetter) -> Option<Letter> {
        self.letter_index.get(l).copied()
    }

    pub fn to_dot(&self) -> String {
        let mut a = self.pa.clone();
        a.letters = self.letters.iter().map(|l| self.describe_letter(l)).collect();
        a.to_dot()
    }

    pub fn describe_letter(&self, l: &TrackingLetter) -> String {
        let f = self.closure.formula(l.principal);
        match l.rule {
            Rule::Or => format!("({}){} {}", l.rule.symbol(), l.conclusion, f),
            _ => format!("({}) {}", l.rule.symbol(), f),
        }
    }
}

fn compound_leaves(c: &Closure, item: ItemId, out: &mut Vec<ItemId>) {
    if matches!(c.nodes[c.items[item].formula], Node::And(..)) {
        for &ch in &c.items[item].children {
            compound_leaves(c, ch, out);
        }
    } else {
        out.push(item);
    }
}

fn successors(c: &Closure, item: ItemId, letter: &TrackingLetter) -> Vec<ItemId> {
    let it = &c.items[item];
    let node = &c.nodes[it.formula];
    if letter.rule == Rule::Modal {
        let Node::Diamond(action, _) = &c.nodes[letter.principal] else {
            return Vec::new();
        };
        if it.compound {
            let mut leaves = Vec::new();
            compound_leaves(c, item, &mut leaves);
            if let Some(&d) = leaves.iter().find(|&&l| c.items[l].formula == letter.principal) {
                return vec![c.items[d].children[0]];
            }
            return leaves
                .into_iter()
                .filter(|&l| matches!(&c.nodes[c.items[l].formula], Node::Box(a, _) if a == action))
                .map(|l| c.items[l].children[0])
                .collect();
        }
        return match node {
            _ if it.formula == letter.principal => vec![it.children[0]],
            Node::Box(a, _) if a == action => vec![it.children[0]],
            _ => Vec::new(),
        };
    }
    if it.formula != letter.principal {
        return vec![item];
    }
    match letter.rule {
        Rule::And if it.compound => vec![item],
        Rule::And => it.children.clone(),
        Rule::Or => vec![it.children[letter.conclusion as usize]],
        Rule::Mu | Rule::Nu => vec![it.children[0]],
        _ => Vec::new(),
    }
}

/// Builds the tracking automaton; transitions into `ψ` get priority `k - al(ψ)`,
/// then transitions that only recur together with a higher odd priority are raised to it.
pub fn build_tracking_pa(f: &Arc<Formula>) -> Result<TrackingAutomaton, TrackingError> {
    if !f.is_closed() {
        return Err(TrackingError::Open);
    }
    let report = check_fragment(f);
    if let Some(v) = report.first_violation() {
        return Err(TrackingError::Fragment(v));
    }
    let c = closure(f);
    let letters = alphabet(&c);
    let letter_index: HashMap<TrackingLetter, Letter> = letters.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let mut pa = ParityAutomaton::new(letters.iter().map(|l| l.to_string()).collect());
    for item in &c.items {
        pa.add_state(c.formulas[item.formula].to_string());
    }
    pa.initial = c.root;
    let k = c.max_level;
    for item in 0..c.len() {
        for (li, letter) in letters.iter().enumerate() {
            for target in successors(&c, item, letter) {
                let priority = (k - c.items[target].level) as Priority;
                pa.add_transition(item, li, target, priority);
            }
        }
    }
    let pa = normalize_cycle_priorities(&pa);
    if !is_limit_deterministic(&pa) {
        return Err(AutomatonError::NotLimitDeterministic.into());
    }
    Ok(TrackingAutomaton {
        closure: c,
        letters,
        letter_index,
        pa,
    })
}

/// Determinized and complemented tracking automaton, built eagerly over the whole alphabet.
pub fn build_complemented_dpa(f: &Arc<Formula>) -> Result<(TrackingAutomaton, ParityAutomaton), TrackingError> {
    let t = build_tracking_pa(f)?;
    let ba = prune_non_cyclic_accepting(&pa_to_ba(&t.pa));
    let dpa = determinize_ldba(&ba)?;
    let c = complement_dpa(&dpa)?;
    Ok((t, c))
}

#[derive(Debug, Clone, Serialize)]
pub struct AlphabetEntry {
    pub letter: String,
    pub rule: Rule,
    pub principal: String,
    pub conclusion: u8,
}

pub fn dump_alphabet(t: &TrackingAutomaton) -> Vec<AlphabetEntry> {
    t.letters
        .iter()
        .map(|l| AlphabetEntry {
            letter: l.to_string(),
            rule: l.rule,
            principal: t.closure.formula(l.principal).to_string(),
            conclusion: l.conclusion,
        })
        .collect()
}

/// Formulas of the closure reachable under the subset construction of the tracking automaton.
pub fn subset_step(t: &TrackingAutomaton, items: &BTreeSet<ItemId>, letter: Letter) -> BTreeSet<ItemId> {
    items.iter().flat_map(|&i| t.pa.successors(i, letter).iter().map(|e| e.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_normalized;

    fn tracking(text: &str) -> TrackingAutomaton {
        build_tracking_pa(&parse_normalized(text).unwrap()).unwrap()
    }

    #[test]
    fn alphabet_of_disjunction() {
        let t = tracking("p | <a> q");
        let rules: Vec<(Rule, u8)> = t.letters.iter().map(|l| (l.rule, l.conclusion)).collect();
        assert_eq!(rules.len(), 3);
        assert!(rules.contains(&(Rule::Or, 0)) && rules.contains(&(Rule::Or, 1)) && rules.contains(&(Rule::Modal, 0)));
        assert!(tracking("p").letters.is_empty());
    }

    #[test]
    fn example_priorities() {
        let t = tracking("mu X. p & nu Y. (<a> (Y & p) | <a> X)");
        assert_eq!(t.pa.num_states(), 8);
        assert_eq!(t.letters.len(), 8);
        assert_eq!(t.pa.index(), 3);
        let mut moving: Vec<Priority> =
            t.pa.transitions().filter(|tr| tr.source != tr.target).map(|tr| tr.priority).collect();
        moving.sort_unstable();
        assert_eq!(moving, vec![1, 1, 1, 1, 1, 1, 2, 2, 3, 3]);
    }

    #[test]
    fn greatest_fixpoint_never_accepts() {
        let t = tracking("nu X. <a> X");
        assert!(t.pa.transitions().all(|tr| tr.priority % 2 == 1));
    }

    #[test]
    fn rejects_outside_fragment() {
        let f = parse_normalized("mu X. <a> X & <a> X").unwrap();
        assert!(matches!(build_tracking_pa(&f), Err(TrackingError::Fragment(_))));
        let g = parse_normalized("mu X. p | X").unwrap();
        assert!(matches!(build_tracking_pa(&g), Err(TrackingError::Fragment(_))));
    }

    #[test]
    fn side_conjunct_under_outer_greatest_fixpoint() {
        let t = tracking("nu X0. mu X1. <a> (X1 & (~q | X0))");
        assert!(is_limit_deterministic(&t.pa));
        assert_eq!(t.pa.index(), 1);
    }

    #[test]
    fn compound_tracks_single_diamond() {
        let t = tracking("mu X. p & <a> X & <a> q & [a] (X | q)");
        assert!(is_limit_deterministic(&t.pa));
    }

    #[test]
    fn complemented_initial_state() {
        let (t, c) = build_complemented_dpa(&parse_normalized("p").unwrap()).unwrap();
        assert_eq!(t.pa.num_states(), 1);
        assert_eq!(c.num_states(), 1);
        assert_eq!(c.state_names[c.initial], "{p},[]");
    }
}
