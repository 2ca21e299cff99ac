use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use super::fragment::{modal_group, ActivityEnv};
use super::syntax::{name, Fixpoint, Formula, Name, SurfaceFormula, TemporalOp, DEFAULT_ACTION};

/// Desugars, pushes negations to propositions, renames binders apart and
/// drops binders whose variable does not occur.
pub fn normalize(f: &SurfaceFormula) -> Arc<Formula> {
    let mut actions = BTreeSet::new();
    let mut used = HashSet::new();
    surface_names(f, &mut actions, &mut used);
    if actions.is_empty() {
        actions.insert(name(DEFAULT_ACTION));
    }
    let mut fresh = Fresh { used };
    let actions: Vec<Name> = actions.into_iter().collect();
    let nnf = to_nnf(f, false, &actions, &mut fresh);
    canonicalize(&nnf)
}

/// Clean renaming, irredundancy and conjunction ordering on a formula already in NNF.
pub fn canonicalize(f: &Arc<Formula>) -> Arc<Formula> {
    let mut used: HashSet<Name> = f.propositions().into_iter().collect();
    used.extend(f.free_vars());
    let cleaned = clean(f, &mut HashMap::new(), &mut used);
    let irredundant = drop_vacuous(&cleaned);
    order_conjunctions(&irredundant, &mut ActivityEnv::default())
}

struct Fresh {
    used: HashSet<Name>,
}

impl Fresh {
    fn variant(&mut self, base: &str) -> Name {
        let candidate = name(base);
        if self.used.insert(candidate.clone()) {
            return candidate;
        }
        (1..)
            .map(|i| name(&format!("{base}_{i}")))
            .find(|n| !self.used.contains(n))
            .map(|n| {
                self.used.insert(n.clone());
                n
            })
            .unwrap()
    }
}

fn surface_names(f: &SurfaceFormula, actions: &mut BTreeSet<Name>, used: &mut HashSet<Name>) {
    use SurfaceFormula as S;
    match f {
        S::Prop(p) | S::Var(p) => {
            used.insert(p.clone());
        }
        S::Diamond(a, g) | S::Box(a, g) => {
            actions.insert(a.clone());
            surface_names(g, actions, used);
        }
        S::Fix(_, x, g) => {
            used.insert(x.clone());
            surface_names(g, actions, used);
        }
        S::Not(g) | S::Temporal(_, g) => surface_names(g, actions, used),
        S::And(a, b) | S::Or(a, b) | S::Implies(a, b) | S::Iff(a, b) => {
            surface_names(a, actions, used);
            surface_names(b, actions, used);
        }
        S::True | S::False => {}
    }
}

fn fold(parts: Vec<Arc<Formula>>, conj: bool) -> Arc<Formula> {
    let mut iter = parts.into_iter().rev();
    let last = iter.next().expect("nonempty");
    iter.fold(last, |acc, p| if conj { Formula::and(p, acc) } else { Formula::or(p, acc) })
}

/// Negation normal form; `neg` means the subformula occurs under a negation.
/// Variables keep their polarity because the binder is dualized as well.
fn to_nnf(f: &SurfaceFormula, neg: bool, actions: &[Name], fresh: &mut Fresh) -> Arc<Formula> {
    use SurfaceFormula as S;
    match f {
        S::True => Arc::new(if neg { Formula::False } else { Formula::True }),
        S::False => Arc::new(if neg { Formula::True } else { Formula::False }),
        S::Prop(p) => Arc::new(if neg { Formula::NegProp(p.clone()) } else { Formula::Prop(p.clone()) }),
        S::Var(x) => Arc::new(Formula::Var(x.clone())),
        S::Not(g) => to_nnf(g, !neg, actions, fresh),
        S::And(a, b) | S::Or(a, b) => {
            let l = to_nnf(a, neg, actions, fresh);
            let r = to_nnf(b, neg, actions, fresh);
            if matches!(f, S::And(..)) != neg {
                Formula::and(l, r)
            } else {
                Formula::or(l, r)
            }
        }
        S::Implies(a, b) => {
            let expanded = S::or(S::not((**a).clone()), (**b).clone());
            to_nnf(&expanded, neg, actions, fresh)
        }
        S::Iff(a, b) => {
            let expanded = S::and(
                S::implies((**a).clone(), (**b).clone()),
                S::implies((**b).clone(), (**a).clone()),
            );
            to_nnf(&expanded, neg, actions, fresh)
        }
        S::Diamond(a, g) | S::Box(a, g) => {
            let body = to_nnf(g, neg, actions, fresh);
            if matches!(f, S::Diamond(..)) != neg {
                Arc::new(Formula::Diamond(a.clone(), body))
            } else {
                Arc::new(Formula::Box(a.clone(), body))
            }
        }
        S::Fix(op, x, g) => {
            let op = if neg { op.dual() } else { *op };
            Arc::new(Formula::Fix(op, x.clone(), to_nnf(g, neg, actions, fresh)))
        }
        S::Temporal(op, g) => {
            let x = fresh.variant("T");
            let var = S::Var(x.clone());
            let step = |diamond: bool| {
                let parts = actions.iter().map(|a| {
                    if diamond {
                        S::Diamond(a.clone(), Box::new(var.clone()))
                    } else {
                        S::Box(a.clone(), Box::new(var.clone()))
                    }
                });
                if diamond {
                    S::disj(parts)
                } else {
                    S::conj(parts)
                }
            };
            let body = (**g).clone();
            let (fix, inner) = match op {
                TemporalOp::AG => (Fixpoint::Nu, S::and(body, step(false))),
                TemporalOp::AF => (Fixpoint::Mu, S::or(body, step(false))),
                TemporalOp::EF => (Fixpoint::Mu, S::or(body, step(true))),
                TemporalOp::EG => (Fixpoint::Nu, S::and(body, step(true))),
            };
            to_nnf(&S::Fix(fix, x, Box::new(inner)), neg, actions, fresh)
        }
    }
}

fn clean(f: &Arc<Formula>, rename: &mut HashMap<Name, Name>, used: &mut HashSet<Name>) -> Arc<Formula> {
    match &**f {
        Formula::Var(x) => match rename.get(x) {
            Some(y) if y != x => Arc::new(Formula::Var(y.clone())),
            _ => f.clone(),
        },
        Formula::And(a, b) => Formula::and(clean(a, rename, used), clean(b, rename, used)),
        Formula::Or(a, b) => Formula::or(clean(a, rename, used), clean(b, rename, used)),
        Formula::Diamond(act, g) => Arc::new(Formula::Diamond(act.clone(), clean(g, rename, used))),
        Formula::Box(act, g) => Arc::new(Formula::Box(act.clone(), clean(g, rename, used))),
        Formula::Fix(op, x, g) => {
            let mut fresh = Fresh { used: std::mem::take(used) };
            let y = fresh.variant(x);
            *used = fresh.used;
            let previous = rename.insert(x.clone(), y.clone());
            let body = clean(g, rename, used);
            match previous {
                Some(p) => rename.insert(x.clone(), p),
                None => rename.remove(x),
            };
            Arc::new(Formula::Fix(*op, y, body))
        }
        _ => f.clone(),
    }
}

fn drop_vacuous(f: &Arc<Formula>) -> Arc<Formula> {
    match &**f {
        Formula::And(a, b) => Formula::and(drop_vacuous(a), drop_vacuous(b)),
        Formula::Or(a, b) => Formula::or(drop_vacuous(a), drop_vacuous(b)),
        Formula::Diamond(act, g) => Arc::new(Formula::Diamond(act.clone(), drop_vacuous(g))),
        Formula::Box(act, g) => Arc::new(Formula::Box(act.clone(), drop_vacuous(g))),
        Formula::Fix(op, x, g) => {
            let body = drop_vacuous(g);
            if body.free_vars().contains(x) {
                Arc::new(Formula::Fix(*op, x.clone(), body))
            } else {
                body
            }
        }
        _ => f.clone(),
    }
}

/// In conjunctions with several conjuncts containing an active mu-variable,
/// the inactive conjuncts are moved to the front so that the active part forms
/// a single right-nested tail.
fn order_conjunctions(f: &Arc<Formula>, env: &mut ActivityEnv) -> Arc<Formula> {
    match &**f {
        Formula::And(..) => {
            let parts: Vec<_> = f.conjuncts().iter().map(|c| order_conjunctions(c, env)).collect();
            let active: Vec<bool> = parts.iter().map(|c| env.is_active(c)).collect();
            let group = (active.iter().filter(|&&a| a).count() >= 2)
                .then(|| modal_group(&parts, &active))
                .flatten();
            match group {
                Some(group) => {
                    let (tail, front): (Vec<_>, Vec<_>) =
                        parts.into_iter().enumerate().partition(|(i, _)| group.contains(i));
                    fold(front.into_iter().chain(tail).map(|(_, c)| c).collect(), true)
                }
                None => rebuild_and(f, env),
            }
        }
        Formula::Or(a, b) => Formula::or(order_conjunctions(a, env), order_conjunctions(b, env)),
        Formula::Diamond(act, g) => Arc::new(Formula::Diamond(act.clone(), order_conjunctions(g, env))),
        Formula::Box(act, g) => Arc::new(Formula::Box(act.clone(), order_conjunctions(g, env))),
        Formula::Fix(op, x, g) => {
            env.enter(f);
            let body = order_conjunctions(g, env);
            env.leave(x);
            Arc::new(Formula::Fix(*op, x.clone(), body))
        }
        _ => f.clone(),
    }
}

fn rebuild_and(f: &Arc<Formula>, env: &mut ActivityEnv) -> Arc<Formula> {
    match &**f {
        Formula::And(a, b) => {
            let l = if matches!(**a, Formula::And(..)) { rebuild_and(a, env) } else { order_conjunctions(a, env) };
            let r = if matches!(**b, Formula::And(..)) { rebuild_and(b, env) } else { order_conjunctions(b, env) };
            Formula::and(l, r)
        }
        _ => order_conjunctions(f, env),
    }
}
