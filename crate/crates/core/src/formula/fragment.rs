use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;

use super::closure::alternation_depth;
use super::syntax::{Fixpoint, Formula, Name};

/// Binder context used to decide whether a subformula contains an active mu-variable.
#[derive(Debug, Default, Clone)]
pub struct ActivityEnv {
    binders: Vec<(Name, Fixpoint, bool)>,
}

impl ActivityEnv {
    /// Pushes the binder of a fixpoint literal whose free variables are bound by the current context.
    pub fn enter(&mut self, literal: &Arc<Formula>) {
        if let Formula::Fix(op, x, _) = &**literal {
            let active = match op {
                Fixpoint::Mu => true,
                Fixpoint::Nu => self.is_active(literal),
            };
            self.binders.push((x.clone(), *op, active));
        }
    }

    pub fn leave(&mut self, x: &Name) {
        let popped = self.binders.pop();
        debug_assert_eq!(popped.map(|b| b.0).as_ref(), Some(x));
    }

    fn var_active(&self, x: &Name) -> bool {
        self.binders.iter().rev().find(|b| &b.0 == x).map(|b| b.2).unwrap_or(false)
    }

    /// True if some free variable is a mu-variable, or a nu-variable whose
    /// unfolding exposes one.
    pub fn is_active(&self, f: &Formula) -> bool {
        f.free_vars().iter().any(|x| self.var_active(x))
    }
}

/// Indices of conjuncts forming `<a>ψ1 & ... & <a>ψn & [a](ψ1 | ... | ψn)` that
/// cover every active conjunct, if such a group exists.
pub fn modal_group(parts: &[Arc<Formula>], active: &[bool]) -> Option<Vec<usize>> {
    for (bi, b) in parts.iter().enumerate() {
        let Formula::Box(action, body) = &**b else { continue };
        let wanted: HashSet<Arc<Formula>> = body.disjuncts().into_iter().collect();
        let mut group = vec![bi];
        let mut covered = HashSet::new();
        for (di, d) in parts.iter().enumerate() {
            if let Formula::Diamond(a, arg) = &**d {
                if a == action && wanted.contains(arg) {
                    group.push(di);
                    covered.insert(arg.clone());
                }
            }
        }
        if covered.len() != wanted.len() {
            continue;
        }
        let covers_active = active.iter().enumerate().all(|(i, &act)| !act || group.contains(&i));
        if covers_active {
            group.sort_unstable();
            return Some(group);
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FragmentReport {
    pub guarded: bool,
    pub clean: bool,
    pub irredundant: bool,
    pub aconjunctive: bool,
    pub weakly_aconjunctive: bool,
    pub offending_subformula: Option<String>,
    pub alternation_depth: usize,
}

impl FragmentReport {
    pub fn accepted(&self) -> bool {
        self.guarded && self.clean && self.irredundant && self.weakly_aconjunctive
    }

    pub fn first_violation(&self) -> Option<&'static str> {
        [
            (self.guarded, "not guarded"),
            (self.clean, "not clean"),
            (self.irredundant, "not irredundant"),
            (self.weakly_aconjunctive, "not weakly aconjunctive"),
        ]
        .into_iter()
        .find(|(ok, _)| !ok)
        .map(|(_, msg)| msg)
    }
}

pub fn check_fragment(f: &Arc<Formula>) -> FragmentReport {
    let mut offending: Option<Arc<Formula>> = None;
    let guarded = check_guarded(f, &mut Vec::new(), &mut offending);
    let clean = check_clean(f, &mut offending);
    let irredundant = check_irredundant(f, &mut offending);
    let mut acon = true;
    let weak = check_conjunctions(f, &mut ActivityEnv::default(), &mut acon, &mut offending);
    let depth = if guarded && clean && irredundant && f.is_closed() {
        alternation_depth(f)
    } else {
        0
    };
    FragmentReport {
        guarded,
        clean,
        irredundant,
        aconjunctive: acon,
        weakly_aconjunctive: weak,
        offending_subformula: offending.map(|o| o.to_string()),
        alternation_depth: depth,
    }
}

/// `unguarded` holds binders whose variable may currently occur without an
/// intervening modality.
fn check_guarded(f: &Arc<Formula>, unguarded: &mut Vec<Name>, offending: &mut Option<Arc<Formula>>) -> bool {
    match &**f {
        Formula::Var(x) => {
            if unguarded.contains(x) {
                offending.get_or_insert_with(|| f.clone());
                false
            } else {
                true
            }
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            let l = check_guarded(a, unguarded, offending);
            check_guarded(b, unguarded, offending) && l
        }
        Formula::Diamond(_, g) | Formula::Box(_, g) => check_guarded(g, &mut Vec::new(), offending),
        Formula::Fix(_, x, g) => {
            unguarded.push(x.clone());
            let ok = check_guarded(g, unguarded, offending);
            unguarded.pop();
            if !ok {
                offending.get_or_insert_with(|| f.clone());
            }
            ok
        }
        _ => true,
    }
}

fn check_clean(f: &Arc<Formula>, offending: &mut Option<Arc<Formula>>) -> bool {
    let mut seen: HashSet<Name> = f.free_vars().into_iter().collect();
    fn go(f: &Arc<Formula>, seen: &mut HashSet<Name>, offending: &mut Option<Arc<Formula>>) -> bool {
        match &**f {
            Formula::And(a, b) | Formula::Or(a, b) => {
                let l = go(a, seen, offending);
                go(b, seen, offending) && l
            }
            Formula::Diamond(_, g) | Formula::Box(_, g) => go(g, seen, offending),
            Formula::Fix(_, x, g) => {
                let fresh = seen.insert(x.clone());
                if !fresh {
                    offending.get_or_insert_with(|| f.clone());
                }
                go(g, seen, offending) && fresh
            }
            _ => true,
        }
    }
    go(f, &mut seen, offending)
}

fn check_irredundant(f: &Arc<Formula>, offending: &mut Option<Arc<Formula>>) -> bool {
    match &**f {
        Formula::And(a, b) | Formula::Or(a, b) => {
            let l = check_irredundant(a, offending);
            check_irredundant(b, offending) && l
        }
        Formula::Diamond(_, g) | Formula::Box(_, g) => check_irredundant(g, offending),
        Formula::Fix(_, x, g) => {
            let ok = g.free_vars().contains(x);
            if !ok {
                offending.get_or_insert_with(|| f.clone());
            }
            check_irredundant(g, offending) && ok
        }
        _ => true,
    }
}

fn check_conjunctions(
    f: &Arc<Formula>,
    env: &mut ActivityEnv,
    acon: &mut bool,
    offending: &mut Option<Arc<Formula>>,
) -> bool {
    match &**f {
        Formula::And(..) => {
            let parts = f.conjuncts();
            let active: Vec<bool> = parts.iter().map(|p| env.is_active(p)).collect();
            let mut ok = true;
            if active.iter().filter(|&&a| a).count() >= 2 {
                *acon = false;
                if modal_group(&parts, &active).is_none() {
                    offending.get_or_insert_with(|| f.clone());
                    ok = false;
                }
            }
            for p in &parts {
                ok &= check_conjunctions(p, env, acon, offending);
            }
            ok
        }
        Formula::Or(a, b) => {
            let l = check_conjunctions(a, env, acon, offending);
            check_conjunctions(b, env, acon, offending) && l
        }
        Formula::Diamond(_, g) | Formula::Box(_, g) => check_conjunctions(g, env, acon, offending),
        Formula::Fix(_, x, g) => {
            env.enter(f);
            let ok = check_conjunctions(g, env, acon, offending);
            env.leave(x);
            ok
        }
        _ => true,
    }
}
