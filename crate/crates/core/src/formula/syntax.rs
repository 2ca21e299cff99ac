use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Interned identifier for propositions, actions and fixpoint variables.
pub type Name = Arc<str>;

/// Action used by `<>` and `[]` when no label is written.
pub const DEFAULT_ACTION: &str = "";

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fixpoint {
    Mu,
    Nu,
}

impl Fixpoint {
    pub fn dual(self) -> Fixpoint {
        match self {
            Fixpoint::Mu => Fixpoint::Nu,
            Fixpoint::Nu => Fixpoint::Mu,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Fixpoint::Mu => "mu",
            Fixpoint::Nu => "nu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemporalOp {
    AG,
    AF,
    EF,
    EG,
}

/// Input syntax as written by the user, before desugaring and negation pushing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SurfaceFormula {
    True,
    False,
    Prop(Name),
    Var(Name),
    Not(Box<SurfaceFormula>),
    And(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Or(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Implies(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Iff(Box<SurfaceFormula>, Box<SurfaceFormula>),
    Diamond(Name, Box<SurfaceFormula>),
    Box(Name, Box<SurfaceFormula>),
    Fix(Fixpoint, Name, Box<SurfaceFormula>),
    Temporal(TemporalOp, Box<SurfaceFormula>),
}

impl SurfaceFormula {
    pub fn prop(p: &str) -> Self {
        SurfaceFormula::Prop(name(p))
    }

    pub fn var(x: &str) -> Self {
        SurfaceFormula::Var(name(x))
    }

    pub fn not(f: SurfaceFormula) -> Self {
        SurfaceFormula::Not(Box::new(f))
    }

    pub fn and(a: SurfaceFormula, b: SurfaceFormula) -> Self {
        SurfaceFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: SurfaceFormula, b: SurfaceFormula) -> Self {
        SurfaceFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: SurfaceFormula, b: SurfaceFormula) -> Self {
        SurfaceFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: SurfaceFormula, b: SurfaceFormula) -> Self {
        SurfaceFormula::Iff(Box::new(a), Box::new(b))
    }

    pub fn diamond(a: &str, f: SurfaceFormula) -> Self {
        SurfaceFormula::Diamond(name(a), Box::new(f))
    }

    pub fn boxed(a: &str, f: SurfaceFormula) -> Self {
        SurfaceFormula::Box(name(a), Box::new(f))
    }

    pub fn fix(op: Fixpoint, x: &str, f: SurfaceFormula) -> Self {
        SurfaceFormula::Fix(op, name(x), Box::new(f))
    }

    pub fn temporal(op: TemporalOp, f: SurfaceFormula) -> Self {
        SurfaceFormula::Temporal(op, Box::new(f))
    }

    /// Conjunction of all parts; the empty conjunction is `true`.
    pub fn conj(parts: impl IntoIterator<Item = SurfaceFormula>) -> Self {
        let mut parts: Vec<_> = parts.into_iter().collect();
        match parts.pop() {
            None => SurfaceFormula::True,
            Some(last) => parts.into_iter().rev().fold(last, |acc, p| SurfaceFormula::and(p, acc)),
        }
    }

    /// Disjunction of all parts; the empty disjunction is `false`.
    pub fn disj(parts: impl IntoIterator<Item = SurfaceFormula>) -> Self {
        let mut parts: Vec<_> = parts.into_iter().collect();
        match parts.pop() {
            None => SurfaceFormula::False,
            Some(last) => parts.into_iter().rev().fold(last, |acc, p| SurfaceFormula::or(p, acc)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            SurfaceFormula::Fix(..) => 0,
            SurfaceFormula::Iff(..) => 1,
            SurfaceFormula::Implies(..) => 2,
            SurfaceFormula::Or(..) => 3,
            SurfaceFormula::And(..) => 4,
            _ => 5,
        }
    }
}

fn write_action(f: &mut fmt::Formatter<'_>, open: char, action: &str, close: char) -> fmt::Result {
    write!(f, "{open}{action}{close}")
}

fn write_child(
    f: &mut fmt::Formatter<'_>,
    child: &SurfaceFormula,
    min_prec: u8,
) -> fmt::Result {
    if child.precedence() < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for SurfaceFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceFormula::True => write!(f, "true"),
            SurfaceFormula::False => write!(f, "false"),
            SurfaceFormula::Prop(p) | SurfaceFormula::Var(p) => write!(f, "{p}"),
            SurfaceFormula::Not(g) => {
                write!(f, "~")?;
                write_child(f, g, 5)
            }
            SurfaceFormula::And(a, b) => {
                write_child(f, a, 5)?;
                write!(f, " & ")?;
                write_child(f, b, 4)
            }
            SurfaceFormula::Or(a, b) => {
                write_child(f, a, 4)?;
                write!(f, " | ")?;
                write_child(f, b, 3)
            }
            SurfaceFormula::Implies(a, b) => {
                write_child(f, a, 3)?;
                write!(f, " => ")?;
                write_child(f, b, 2)
            }
            SurfaceFormula::Iff(a, b) => {
                write_child(f, a, 2)?;
                write!(f, " <=> ")?;
                write_child(f, b, 3)
            }
            SurfaceFormula::Diamond(a, g) => {
                write_action(f, '<', a, '>')?;
                write!(f, " ")?;
                write_child(f, g, 5)
            }
            SurfaceFormula::Box(a, g) => {
                write_action(f, '[', a, ']')?;
                write!(f, " ")?;
                write_child(f, g, 5)
            }
            SurfaceFormula::Fix(op, x, g) => write!(f, "{} {x}. {g}", op.keyword()),
            SurfaceFormula::Temporal(op, g) => {
                write!(f, "{op:?} ")?;
                write_child(f, g, 5)
            }
        }
    }
}

/// Negation normal form formula over the core grammar.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    False,
    True,
    Prop(Name),
    NegProp(Name),
    Var(Name),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Diamond(Name, Arc<Formula>),
    Box(Name, Arc<Formula>),
    Fix(Fixpoint, Name, Arc<Formula>),
}

impl Formula {
    pub fn prop(p: &str) -> Arc<Formula> {
        Arc::new(Formula::Prop(name(p)))
    }

    pub fn neg_prop(p: &str) -> Arc<Formula> {
        Arc::new(Formula::NegProp(name(p)))
    }

    pub fn var(x: &str) -> Arc<Formula> {
        Arc::new(Formula::Var(name(x)))
    }

    pub fn and(a: Arc<Formula>, b: Arc<Formula>) -> Arc<Formula> {
        Arc::new(Formula::And(a, b))
    }

    pub fn or(a: Arc<Formula>, b: Arc<Formula>) -> Arc<Formula> {
        Arc::new(Formula::Or(a, b))
    }

    pub fn diamond(a: &str, f: Arc<Formula>) -> Arc<Formula> {
        Arc::new(Formula::Diamond(name(a), f))
    }

    pub fn boxed(a: &str, f: Arc<Formula>) -> Arc<Formula> {
        Arc::new(Formula::Box(name(a), f))
    }

    pub fn mu(x: &str, f: Arc<Formula>) -> Arc<Formula> {
        Arc::new(Formula::Fix(Fixpoint::Mu, name(x), f))
    }

    pub fn nu(x: &str, f: Arc<Formula>) -> Arc<Formula> {
        Arc::new(Formula::Fix(Fixpoint::Nu, name(x), f))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
            Formula::Diamond(_, g) | Formula::Box(_, g) | Formula::Fix(_, _, g) => 1 + g.size(),
            _ => 1,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Diamond(_, g) | Formula::Box(_, g) => g.collect_free(bound, out),
            Formula::Fix(_, x, g) => {
                bound.push(x.clone());
                g.collect_free(bound, out);
                bound.pop();
            }
            _ => {}
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn is_modal(&self) -> bool {
        matches!(self, Formula::Diamond(..) | Formula::Box(..))
    }

    /// Capture-free because bound names are unique in clean formulas.
    pub fn substitute(self: &Arc<Formula>, x: &Name, by: &Arc<Formula>) -> Arc<Formula> {
        match &**self {
            Formula::Var(y) if y == x => by.clone(),
            Formula::And(a, b) => Formula::and(a.substitute(x, by), b.substitute(x, by)),
            Formula::Or(a, b) => Formula::or(a.substitute(x, by), b.substitute(x, by)),
            Formula::Diamond(act, g) => Arc::new(Formula::Diamond(act.clone(), g.substitute(x, by))),
            Formula::Box(act, g) => Arc::new(Formula::Box(act.clone(), g.substitute(x, by))),
            Formula::Fix(op, y, g) if y != x => Arc::new(Formula::Fix(*op, y.clone(), g.substitute(x, by))),
            _ => self.clone(),
        }
    }

    /// `ψ[X ↦ ηX.ψ]` for a fixpoint literal; `None` for anything else.
    pub fn unfold(self: &Arc<Formula>) -> Option<Arc<Formula>> {
        match &**self {
            Formula::Fix(_, x, body) => Some(body.substitute(x, self)),
            _ => None,
        }
    }

    /// Flattened conjuncts, left to right.
    pub fn conjuncts(self: &Arc<Formula>) -> Vec<Arc<Formula>> {
        let mut out = Vec::new();
        fn go(f: &Arc<Formula>, out: &mut Vec<Arc<Formula>>) {
            match &**f {
                Formula::And(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                _ => out.push(f.clone()),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn disjuncts(self: &Arc<Formula>) -> Vec<Arc<Formula>> {
        let mut out = Vec::new();
        fn go(f: &Arc<Formula>, out: &mut Vec<Arc<Formula>>) {
            match &**f {
                Formula::Or(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                _ => out.push(f.clone()),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn actions(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        fn go(f: &Formula, out: &mut BTreeSet<Name>) {
            match f {
                Formula::And(a, b) | Formula::Or(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Formula::Diamond(act, g) | Formula::Box(act, g) => {
                    out.insert(act.clone());
                    go(g, out);
                }
                Formula::Fix(_, _, g) => go(g, out),
                _ => {}
            }
        }
        go(self, &mut out);
        out
    }

    pub fn propositions(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        fn go(f: &Formula, out: &mut BTreeSet<Name>) {
            match f {
                Formula::Prop(p) | Formula::NegProp(p) => {
                    out.insert(p.clone());
                }
                Formula::And(a, b) | Formula::Or(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Formula::Diamond(_, g) | Formula::Box(_, g) | Formula::Fix(_, _, g) => go(g, out),
                _ => {}
            }
        }
        go(self, &mut out);
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Fix(..) => 0,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            _ => 5,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::False => write!(f, "false"),
            Formula::True => write!(f, "true"),
            Formula::Prop(p) | Formula::Var(p) => write!(f, "{p}"),
            Formula::NegProp(p) => write!(f, "~{p}"),
            Formula::And(a, b) => {
                a.write_child(f, 5)?;
                write!(f, " & ")?;
                b.write_child(f, 4)
            }
            Formula::Or(a, b) => {
                a.write_child(f, 4)?;
                write!(f, " | ")?;
                b.write_child(f, 3)
            }
            Formula::Diamond(a, g) => {
                write_action(f, '<', a, '>')?;
                write!(f, " ")?;
                g.write_child(f, 5)
            }
            Formula::Box(a, g) => {
                write_action(f, '[', a, ']')?;
                write!(f, " ")?;
                g.write_child(f, 5)
            }
            Formula::Fix(op, x, g) => write!(f, "{} {x}. {g}", op.keyword()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_counts_nodes() {
        let f = Formula::mu("X", Formula::diamond("a", Formula::var("X")));
        assert_eq!(f.size(), 3);
        assert!(f.is_closed());
    }

    #[test]
    fn unfold_substitutes_literal() {
        let f = Formula::mu("X", Formula::diamond("a", Formula::var("X")));
        let u = f.unfold().unwrap();
        assert_eq!(u, Formula::diamond("a", f.clone()));
    }

    #[test]
    fn display_uses_surface_grammar() {
        let f = Formula::mu(
            "X",
            Formula::and(Formula::prop("p"), Formula::diamond("", Formula::var("X"))),
        );
        assert_eq!(f.to_string(), "mu X. p & <> X");
        let g = Formula::and(Formula::or(Formula::prop("p"), Formula::prop("q")), Formula::neg_prop("r"));
        assert_eq!(g.to_string(), "(p | q) & ~r");
    }
}
