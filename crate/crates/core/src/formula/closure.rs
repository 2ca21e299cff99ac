use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::fragment::{modal_group, ActivityEnv};
use super::syntax::{Fixpoint, Formula, Name};

pub type ItemId = usize;
pub type FormulaId = usize;

/// One unfolding step of a provenance substitution.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Unfolding {
    pub var: Name,
    pub fixpoint: Fixpoint,
    /// The fixpoint literal as it occurs in the root, possibly open.
    pub literal: Arc<Formula>,
}

#[derive(Debug, Clone)]
pub struct ClosureItem {
    pub id: ItemId,
    /// Subformula occurrence of the root; a variable for decomposed fixpoint literals.
    pub base: Arc<Formula>,
    /// Substitutions applied to `base`, innermost first.
    pub provenance: Vec<Unfolding>,
    pub formula: FormulaId,
    pub level: usize,
    /// Conjunction of diamonds and one covering box containing an active mu-variable.
    pub compound: bool,
    pub children: Vec<ItemId>,
}

impl ClosureItem {
    pub fn is_deferral(&self) -> bool {
        !self.provenance.is_empty()
    }
}

/// Closed formula in the closure with its immediate closed subformulas.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    False,
    True,
    Prop(Name),
    NegProp(Name),
    And(FormulaId, FormulaId),
    Or(FormulaId, FormulaId),
    Diamond(Name, FormulaId),
    Box(Name, FormulaId),
    /// Fixpoint literal with the id of its unfolding.
    Fix(Fixpoint, FormulaId),
}

#[derive(Debug, Clone)]
pub struct Closure {
    pub root: ItemId,
    pub items: Vec<ClosureItem>,
    pub formulas: Vec<Arc<Formula>>,
    pub nodes: Vec<Node>,
    pub formula_items: Vec<Vec<ItemId>>,
    /// `k` of the tracking automaton: the alternation depth rounded up to an odd number.
    pub max_level: usize,
}

impl Closure {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn formula(&self, id: FormulaId) -> &Arc<Formula> {
        &self.formulas[id]
    }

    pub fn item_formula(&self, item: ItemId) -> &Arc<Formula> {
        &self.formulas[self.items[item].formula]
    }

    pub fn root_formula(&self) -> FormulaId {
        self.items[self.root].formula
    }

    pub fn alternation_depth(&self) -> usize {
        self.items.iter().filter(|i| i.is_deferral()).map(|i| i.level).max().unwrap_or(0)
    }

    pub fn id_of(&self, f: &Formula) -> Option<FormulaId> {
        self.formulas.iter().position(|g| **g == *f)
    }
}

pub fn alternation_depth(f: &Arc<Formula>) -> usize {
    closure(f).alternation_depth()
}

/// Alternation level of a provenance chain, innermost unfolding first.
pub fn alternation_level(chain: &[Fixpoint]) -> usize {
    let (mut al, mut mu, mut nu) = (0, 0, 0);
    for op in chain {
        match op {
            Fixpoint::Mu => {
                al = mu + 1;
                nu = mu + 1;
            }
            Fixpoint::Nu => {
                al = nu;
                mu = nu + 1;
            }
        }
    }
    al
}

/// Applies a provenance substitution to its base formula.
pub fn apply_provenance(base: &Arc<Formula>, provenance: &[Unfolding]) -> Arc<Formula> {
    provenance.iter().fold(base.clone(), |acc, u| acc.substitute(&u.var, &u.literal))
}

struct Binder {
    var: Name,
    fixpoint: Fixpoint,
    literal: Arc<Formula>,
    closed: bool,
    item: ItemId,
}

struct Builder {
    items: Vec<ClosureItem>,
    keys: HashMap<(Arc<Formula>, Vec<Name>), ItemId>,
    formulas: Vec<Arc<Formula>>,
    formula_ids: HashMap<Arc<Formula>, FormulaId>,
    env: ActivityEnv,
}

impl Builder {
    fn chain(stack: &[Binder], open: bool) -> Vec<Unfolding> {
        if !open {
            return Vec::new();
        }
        let mut out = Vec::new();
        for b in stack.iter().rev() {
            out.push(Unfolding {
                var: b.var.clone(),
                fixpoint: b.fixpoint,
                literal: b.literal.clone(),
            });
            if b.closed {
                break;
            }
        }
        out
    }

    fn intern_formula(&mut self, f: Arc<Formula>) -> FormulaId {
        if let Some(&id) = self.formula_ids.get(&f) {
            return id;
        }
        let id = self.formulas.len();
        self.formulas.push(f.clone());
        self.formula_ids.insert(f, id);
        id
    }

    /// Returns the item and whether it was newly created.
    fn intern_item(&mut self, base: Arc<Formula>, provenance: Vec<Unfolding>) -> (ItemId, bool) {
        let key = (base.clone(), provenance.iter().map(|u| u.var.clone()).collect());
        if let Some(&id) = self.keys.get(&key) {
            return (id, false);
        }
        let closed = apply_provenance(&base, &provenance);
        let formula = self.intern_formula(closed);
        let chain: Vec<Fixpoint> = provenance.iter().map(|u| u.fixpoint).collect();
        let id = self.items.len();
        self.items.push(ClosureItem {
            id,
            base,
            level: alternation_level(&chain),
            provenance,
            formula,
            compound: false,
            children: Vec::new(),
        });
        self.keys.insert(key, id);
        (id, true)
    }

    fn visit(&mut self, f: &Arc<Formula>, stack: &mut Vec<Binder>) -> ItemId {
        match &**f {
            Formula::Var(x) => {
                let b = stack.iter().rev().find(|b| &b.var == x).expect("closed root formula");
                return b.item;
            }
            Formula::Fix(op, x, body) => {
                let open = !f.is_closed();
                let mut provenance = Self::chain(stack, open);
                provenance.insert(
                    0,
                    Unfolding {
                        var: x.clone(),
                        fixpoint: *op,
                        literal: f.clone(),
                    },
                );
                let (id, fresh) = self.intern_item(Arc::new(Formula::Var(x.clone())), provenance);
                if fresh {
                    self.env.enter(f);
                    stack.push(Binder {
                        var: x.clone(),
                        fixpoint: *op,
                        literal: f.clone(),
                        closed: !open,
                        item: id,
                    });
                    let child = self.visit(body, stack);
                    stack.pop();
                    self.env.leave(x);
                    self.items[id].children = vec![child];
                }
                return id;
            }
            _ => {}
        }
        let provenance = Self::chain(stack, !f.is_closed());
        let (id, fresh) = self.intern_item(f.clone(), provenance);
        if !fresh {
            return id;
        }
        let children = match &**f {
            Formula::And(a, b) | Formula::Or(a, b) => vec![self.visit(a, stack), self.visit(b, stack)],
            Formula::Diamond(_, g) | Formula::Box(_, g) => vec![self.visit(g, stack)],
            _ => Vec::new(),
        };
        if matches!(**f, Formula::And(..)) {
            let parts = f.conjuncts();
            let active: Vec<bool> = parts.iter().map(|p| self.env.is_active(p)).collect();
            if active.iter().any(|&a| a) && parts.len() >= 2 {
                if let Some(group) = modal_group(&parts, &active) {
                    self.items[id].compound = group.len() == parts.len();
                }
            }
        }
        self.items[id].children = children;
        id
    }
}

/// Fischer-Ladner closure of a closed, clean, irredundant formula.
pub fn closure(f: &Arc<Formula>) -> Closure {
    let mut b = Builder {
        items: Vec::new(),
        keys: HashMap::new(),
        formulas: Vec::new(),
        formula_ids: HashMap::new(),
        env: ActivityEnv::default(),
    };
    let root = b.visit(f, &mut Vec::new());
    let mut formula_items = vec![Vec::new(); b.formulas.len()];
    for item in &b.items {
        formula_items[item.formula].push(item.id);
    }
    let nodes: Vec<Node> = (0..b.formulas.len())
        .map(|fid| {
            let item = &b.items[formula_items[fid][0]];
            let child = |i: usize| b.items[item.children[i]].formula;
            match &*b.formulas[fid] {
                Formula::False => Node::False,
                Formula::True => Node::True,
                Formula::Prop(p) => Node::Prop(p.clone()),
                Formula::NegProp(p) => Node::NegProp(p.clone()),
                Formula::And(..) => Node::And(child(0), child(1)),
                Formula::Or(..) => Node::Or(child(0), child(1)),
                Formula::Diamond(a, _) => Node::Diamond(a.clone(), child(0)),
                Formula::Box(a, _) => Node::Box(a.clone(), child(0)),
                Formula::Fix(op, _, _) => Node::Fix(*op, child(0)),
                Formula::Var(_) => unreachable!("closure formulas are closed"),
            }
        })
        .collect();
    let mut closure = Closure {
        root,
        items: b.items,
        formulas: b.formulas,
        nodes,
        formula_items,
        max_level: 0,
    };
    let ad = closure.alternation_depth();
    closure.max_level = if ad % 2 == 1 { ad } else { ad + 1 };
    closure
}

#[derive(Debug, Clone, Serialize)]
pub struct ItemDump {
    pub id: ItemId,
    pub formula: String,
    pub base: String,
    pub provenance: Vec<String>,
    pub level: usize,
    pub deferral: bool,
}

impl Closure {
    pub fn dump(&self) -> Vec<ItemDump> {
        self.items
            .iter()
            .map(|i| ItemDump {
                id: i.id,
                formula: self.formulas[i.formula].to_string(),
                base: i.base.to_string(),
                provenance: i.provenance.iter().map(|u| format!("{} -> {}", u.var, u.literal)).collect(),
                level: i.level,
                deferral: i.is_deferral(),
            })
            .collect()
    }
}

impl fmt::Display for Closure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.items {
            write!(f, "{:>3}  al={}  {}", i.id, i.level, self.formulas[i.formula])?;
            if i.is_deferral() {
                let vars: Vec<String> = i.provenance.iter().map(|u| u.var.to_string()).collect();
                write!(f, "    [{} via {}]", i.base, vars.join(";"))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{normalize, parse};

    fn cl(text: &str) -> Closure {
        closure(&normalize(&parse(text).unwrap()))
    }

    #[test]
    fn level_recurrence() {
        use Fixpoint::*;
        assert_eq!(alternation_level(&[]), 0);
        assert_eq!(alternation_level(&[Mu]), 1);
        assert_eq!(alternation_level(&[Nu]), 0);
        assert_eq!(alternation_level(&[Nu, Mu]), 2);
        assert_eq!(alternation_level(&[Mu, Nu]), 1);
        assert_eq!(alternation_level(&[Mu, Nu, Mu]), 3);
    }

    #[test]
    fn single_literal() {
        assert_eq!(cl("p").len(), 1);
        let c = cl("mu X. <a> X");
        assert_eq!(c.len(), 2);
        assert_eq!(c.alternation_depth(), 1);
        assert_eq!(c.max_level, 1);
    }

    #[test]
    fn example_closure_levels() {
        let c = cl("mu X. p & nu Y. (<a> (Y & p) | <a> X)");
        assert_eq!(c.len(), 8);
        assert_eq!(c.alternation_depth(), 2);
        assert_eq!(c.max_level, 3);
        let mut levels: Vec<(String, usize)> =
            c.items.iter().map(|i| (c.formulas[i.formula].to_string(), i.level)).collect();
        levels.sort();
        let phi = "mu X. p & (nu Y. <a> (Y & p) | <a> X)";
        let theta = "nu Y. <a> (Y & p) | <a> (mu X. p & (nu Y. <a> (Y & p) | <a> X))";
        let ones: Vec<_> = levels.iter().filter(|(_, l)| *l == 1).map(|(f, _)| f.clone()).collect();
        assert_eq!(ones.len(), 2);
        assert!(ones.contains(&phi.to_string()));
        assert!(levels.contains(&(theta.to_string(), 2)));
        assert!(levels.contains(&("p".to_string(), 0)));
        assert_eq!(levels.iter().filter(|(_, l)| *l == 2).count(), 5);
    }

    #[test]
    fn provenance_round_trip() {
        let c = cl("nu X. mu Y. [] X & <> <> Y");
        for i in &c.items {
            assert_eq!(apply_provenance(&i.base, &i.provenance), c.formulas[i.formula]);
        }
    }

    #[test]
    fn compound_detection() {
        let c = cl("mu X. p & <a> X & <a> q & [a] (X | q)");
        assert_eq!(c.items.iter().filter(|i| i.compound).count(), 1);
        let c = cl("<a> q & [a] q");
        assert!(c.items.iter().all(|i| !i.compound));
    }
}
