use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::formula::{parse, Fixpoint, SurfaceFormula as S, TemporalOp};
use crate::game::Answer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    Theta1,
    Theta2,
    EarlyAc,
    EarlyAcGc,
    Aut,
    Game,
    Ne,
    Win,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Theta1,
        Family::Theta2,
        Family::EarlyAc,
        Family::EarlyAcGc,
        Family::Aut,
        Family::Game,
        Family::Ne,
        Family::Win,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Theta1 => "theta1",
            Family::Theta2 => "theta2",
            Family::EarlyAc => "early_ac",
            Family::EarlyAcGc => "early_ac_gc",
            Family::Aut => "aut",
            Family::Game => "game",
            Family::Ne => "ne",
            Family::Win => "win",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == norm)
            .ok_or_else(|| BenchError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BenchError {
    #[error("unknown family {0}")]
    UnknownFamily(String),
    #[error("invalid parameters: {0}")]
    Parameters(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BenchSpec {
    pub family: Family,
    pub n: usize,
    pub j: usize,
    pub k: usize,
}

impl BenchSpec {
    pub fn new(family: Family, n: usize) -> Self {
        BenchSpec { family, n, j: 4, k: 2 }
    }

    pub fn early(family: Family, n: usize, j: usize, k: usize) -> Self {
        BenchSpec { family, n, j, k }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.n == 0 {
            return Err(BenchError::Parameters("n must be at least 1".into()));
        }
        if matches!(self.family, Family::EarlyAc | Family::EarlyAcGc) && (self.j == 0 || self.k == 0) {
            return Err(BenchError::Parameters("j and k must be at least 1".into()));
        }
        if self.k > 4 {
            return Err(BenchError::Parameters("k above 4 nests more than 16 fixpoints".into()));
        }
        Ok(())
    }
}

impl fmt::Display for BenchSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::EarlyAc | Family::EarlyAcGc => write!(f, "{}({},{},{})", self.family, self.n, self.j, self.k),
            _ => write!(f, "{}({})", self.family, self.n),
        }
    }
}

fn p(name: &str) -> S {
    S::prop(name)
}

fn indexed(base: &str, i: usize) -> S {
    S::prop(&format!("{base}{i}"))
}

fn x(i: usize) -> String {
    format!("X{i}")
}

fn ag(f: S) -> S {
    S::temporal(TemporalOp::AG, f)
}

fn dia(f: S) -> S {
    S::diamond("", f)
}

fn boxed(f: S) -> S {
    S::boxed("", f)
}

/// `μ` for odd indices and `ν` for even ones.
fn parity_binder(i: usize) -> Fixpoint {
    if i % 2 == 1 {
        Fixpoint::Mu
    } else {
        Fixpoint::Nu
    }
}

/// `η X_n. ... ν X_2. μ X_1. body`.
fn alternating(n: usize, body: S) -> S {
    (1..=n).fold(body, |acc, i| S::fix(parity_binder(i), &x(i), acc))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modality {
    Diamond,
    Box,
}

impl Modality {
    fn apply(self, f: S) -> S {
        match self {
            Modality::Diamond => dia(f),
            Modality::Box => boxed(f),
        }
    }

    fn dual(self) -> Modality {
        match self {
            Modality::Diamond => Modality::Box,
            Modality::Box => Modality::Diamond,
        }
    }
}

pub fn aut(n: usize) -> S {
    ag(S::disj((1..=n).map(|i| {
        let others = (1..=n).filter(|&j| j != i).map(|j| S::not(indexed("q", j)));
        let parts: Vec<S> = std::iter::once(indexed("q", i)).chain(others).collect();
        S::conj(parts)
    })))
}

pub fn game(n: usize) -> S {
    let owner = S::or(S::and(p("qe"), S::not(p("qa"))), S::and(S::not(p("qe")), p("qa")));
    S::and(aut(n), ag(owner))
}

/// `⋁ (q_i ∧ ♥ X_i)`.
pub fn psi(n: usize, m: Modality) -> S {
    S::disj((1..=n).map(|i| S::and(indexed("q", i), m.apply(S::var(&x(i))))))
}

fn strat(diamond: S, boxed: S) -> S {
    S::or(S::and(p("qe"), diamond), S::and(p("qa"), boxed))
}

pub fn ne(n: usize) -> S {
    alternating(n, psi(n, Modality::Diamond))
}

pub fn win(n: usize) -> S {
    alternating(n, strat(psi(n, Modality::Diamond), psi(n, Modality::Box)))
}

/// The guarded choice `(q_i ∧ ♥Y) ∨ ⋁_{i<j≤n} (q_j ∧ ♥X) ∨ ⋁_{1≤j≤upper} (q_j ∧ ♥Z)`.
fn theta_choice(n: usize, i: usize, m: Modality, upper: usize) -> S {
    let arm = |j: usize, v: &str| S::and(indexed("q", j), m.apply(S::var(v)));
    let parts = std::iter::once(arm(i, "Y"))
        .chain((i + 1..=n).map(|j| arm(j, "X")))
        .chain((1..=upper).map(|j| arm(j, "Z")));
    S::disj(parts)
}

/// `θ_♥(i)` as displayed, including the `j = i` arm of the last disjunction.
pub fn theta_heart(n: usize, i: usize, m: Modality) -> S {
    theta_choice(n, i, m, i)
}

fn three_binders(outer: Fixpoint, body: S) -> S {
    S::fix(outer, "X", S::fix(outer.dual(), "Y", S::fix(outer, "Z", body)))
}

pub fn theta1(n: usize) -> S {
    let evens = (2..=n)
        .step_by(2)
        .map(|i| three_binders(Fixpoint::Mu, theta_heart(n, i, Modality::Diamond)));
    S::implies(aut(n), S::iff(ne(n), S::disj(evens)))
}

pub fn theta2(n: usize) -> S {
    let odds = (1..=n).step_by(2).map(|i| {
        three_binders(
            Fixpoint::Nu,
            strat(theta_heart(n, i, Modality::Diamond), theta_heart(n, i, Modality::Box)),
        )
    });
    S::implies(game(n), S::implies(win(n), S::conj(odds)))
}

/// Negation of a guarded choice whose guards are exclusive and exhaustive:
/// `¬⋁(g_j ∧ ♥T_j)` is `⋁(g_j ∧ ♥̄T_j)` in every state satisfying exactly one guard.
fn negated_psi(n: usize, m: Modality) -> S {
    psi(n, m.dual())
}

fn negated_theta_heart(n: usize, i: usize, m: Modality) -> S {
    theta_choice(n, i, m.dual(), i - 1)
}

fn dual_alternating(n: usize, body: S) -> S {
    (1..=n).fold(body, |acc, i| S::fix(parity_binder(i).dual(), &x(i), acc))
}

/// `¬θ₁(n)` with negations pushed through the choices guarded by `q_1..q_n`,
/// which `φ_aut(n)` makes exclusive and exhaustive in every reachable state.
pub fn negated_theta1(n: usize) -> S {
    let even: Vec<usize> = (2..=n).step_by(2).collect();
    let d = S::disj(
        even
            .iter()
            .map(|&i| three_binders(Fixpoint::Mu, theta_heart(n, i, Modality::Diamond))),
    );
    let not_d = S::conj(
        even
            .iter()
            .map(|&i| three_binders(Fixpoint::Nu, negated_theta_heart(n, i, Modality::Diamond))),
    );
    let not_ne = dual_alternating(n, negated_psi(n, Modality::Diamond));
    S::and(aut(n), S::or(S::and(ne(n), not_d), S::and(d, not_ne)))
}

/// `¬θ₂(n)` with negations pushed through the choices guarded by `q_e, q_a`
/// and `q_1..q_n`, which `φ_game(n)` makes exclusive and exhaustive.
pub fn negated_theta2(n: usize) -> S {
    let some_odd = S::disj((1..=n).step_by(2).map(|i| {
        three_binders(
            Fixpoint::Mu,
            strat(negated_theta_heart(n, i, Modality::Diamond), negated_theta_heart(n, i, Modality::Box)),
        )
    }));
    S::conj([game(n), win(n), some_odd])
}

fn bits(base: &str, m: usize) -> Vec<S> {
    (0..m).map(|i| indexed(base, i)).collect()
}

/// `AG ((start_x → (x ∧ counter zero)) ∧ (x → ◊x))`.
pub fn init(xname: &str, m: usize) -> S {
    let zero = S::conj(bits(xname, m).into_iter().map(S::not));
    let start = S::implies(p(&format!("start_{xname}")), S::and(p(xname), zero));
    ag(S::and(start, S::implies(p(xname), dia(p(xname)))))
}

/// Increment with wraparound of the `m`-bit counter `x_0..x_{m-1}` across every successor.
pub fn counter(xname: &str, m: usize) -> S {
    let b = bits(xname, m);
    S::conj((0..m).map(|i| {
        let carry = S::conj(b[..i].iter().cloned());
        let flips = S::and(carry.clone(), b[i].clone());
        let sets = S::and(carry.clone(), S::not(b[i].clone()));
        let keeps_true = S::and(S::not(carry.clone()), b[i].clone());
        let keeps_false = S::and(S::not(carry), S::not(b[i].clone()));
        S::conj([
            S::implies(flips, boxed(S::not(b[i].clone()))),
            S::implies(sets, boxed(b[i].clone())),
            S::implies(keeps_true, boxed(b[i].clone())),
            S::implies(keeps_false, boxed(S::not(b[i].clone()))),
        ])
    }))
}

/// Conjunction fixing `r_0..r_{k-1}` to the binary digits of `value`.
pub fn bin(rname: &str, k: usize, value: usize) -> S {
    S::conj((0..k).map(|i| {
        let bit = indexed(rname, i);
        if (value >> i) & 1 == 1 {
            bit
        } else {
            S::not(bit)
        }
    }))
}

/// `η X_{2^k}. ... ν X_2. μ X_1. ⋁_{1≤i≤2^k} (bin(r, i-1) ∧ ◊X_i)`.
pub fn early_theta(k: usize) -> S {
    let top = 1usize << k;
    let body = S::disj((1..=top).map(|i| S::and(bin("r", k, i - 1), dia(S::var(&x(i))))));
    alternating(top, body)
}

pub fn early_ac(n: usize, j: usize, k: usize) -> S {
    let trigger = S::conj((0..=j).map(|i| indexed("p", i)));
    let counters = ag(S::and(
        S::implies(p("r"), counter("r", k)),
        S::implies(p("p"), counter("p", n)),
    ));
    let branch = ag(S::conj([
        S::implies(trigger, dia(S::and(p("start_r"), early_theta(k)))),
        S::not(S::and(p("p"), p("r"))),
        S::implies(p("r"), boxed(p("r"))),
    ]));
    S::conj([p("start_p"), init("p", n), init("r", k), counters, branch])
}

pub fn early_ac_gc(n: usize, j: usize, k: usize) -> S {
    let exclusive = ag(S::and(S::not(S::and(p("p"), p("q"))), S::not(S::and(p("q"), p("r")))));
    let b_step = S::implies(
        p("b"),
        S::conj([dia(p("p")), dia(p("start_q")), boxed(S::not(p("b")))]),
    );
    let loops = ag(S::conj([
        S::implies(p("q"), counter("q", n)),
        S::temporal(TemporalOp::AF, p("b")),
        b_step,
    ]));
    S::conj([early_ac(n, j, k), p("b"), init("q", n), exclusive, loops])
}

pub fn generate(spec: &BenchSpec) -> Result<S, BenchError> {
    spec.validate()?;
    let n = spec.n;
    Ok(match spec.family {
        Family::Theta1 => theta1(n),
        Family::Theta2 => theta2(n),
        Family::EarlyAc => early_ac(n, spec.j, spec.k),
        Family::EarlyAcGc => early_ac_gc(n, spec.j, spec.k),
        Family::Aut => aut(n),
        Family::Game => game(n),
        Family::Ne => ne(n),
        Family::Win => win(n),
    })
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub formula: S,
    pub expected: Answer,
    /// Where the expected verdict comes from.
    pub source: &'static str,
}

const HAND_WRITTEN: &[(&str, &str, Answer, &str)] = &[
    ("clash", "p & ~p", Answer::Unsat, "trivial"),
    ("diamond-lfp", "mu X. <a> X", Answer::Unsat, "trivial"),
    ("example", "mu X. p & nu Y. (<a> (Y & p) | <a> X)", Answer::Sat, "certified model"),
    ("p-forever", "nu X. p & <a> X", Answer::Sat, "certified model"),
    ("two-successors", "<a> p & <a> ~p", Answer::Sat, "certified model"),
    ("ag-ef", "AG p & EF ~p", Answer::Unsat, "hand proof"),
    ("gf-path", "nu X. mu Y. (p & <> X | <> Y)", Answer::Sat, "certified model"),
    ("gf-path-never", "(nu X. mu Y. (p & <> X | <> Y)) & AG ~p", Answer::Unsat, "hand proof"),
    ("ef-never", "(mu X. p | <> X) & AG ~p", Answer::Unsat, "hand proof"),
    ("well-founded-infinite", "(mu X. [] X) & nu Y. <> Y", Answer::Unsat, "hand proof"),
    ("compound-regress", "mu X. p & <> X & <> q & [] (X | q)", Answer::Unsat, "hand proof"),
    ("compound-escape", "mu X. p & (q | <> X & <> q & [] (X | q))", Answer::Sat, "certified model"),
    ("two-actions", "nu X. <a> X & <b> X", Answer::Sat, "certified model"),
    ("box-lfp", "mu X. p | [a] X", Answer::Sat, "certified model"),
    ("af-dead-end", "AF p & AG ~p", Answer::Sat, "certified model"),
    ("af-serial", "AF p & AG (~p & <> true)", Answer::Unsat, "hand proof"),
    ("ag-af-serial", "AG (AF p & <> true) & EF AG ~p", Answer::Unsat, "hand proof"),
    ("false", "false", Answer::Unsat, "trivial"),
    ("true", "true", Answer::Sat, "trivial"),
];

/// The regression corpus: hand-written cases, the negated θ families for
/// `n ≤ max_n` and the early families as listed in the figure captions.
pub fn regression_corpus(max_n: usize) -> Vec<CorpusEntry> {
    let mut out: Vec<CorpusEntry> = HAND_WRITTEN
        .iter()
        .map(|&(name, text, expected, source)| CorpusEntry {
            name: name.to_string(),
            formula: parse(text).expect("corpus formula parses"),
            expected,
            source,
        })
        .collect();
    for n in 1..=max_n.min(3) {
        out.push(CorpusEntry {
            name: format!("~theta1({n})"),
            formula: negated_theta1(n),
            expected: Answer::Unsat,
            source: "figure caption",
        });
        out.push(CorpusEntry {
            name: format!("~theta2({n})"),
            formula: negated_theta2(n),
            expected: Answer::Unsat,
            source: "figure caption",
        });
    }
    for n in 1..=max_n.min(3) {
        out.push(CorpusEntry {
            name: format!("early_ac({n},4,2)"),
            formula: early_ac(n, 4, 2),
            expected: Answer::Unsat,
            source: "figure caption",
        });
    }
    out.push(CorpusEntry {
        name: "early_ac_gc(1,4,2)".into(),
        formula: early_ac_gc(1, 4, 2),
        expected: Answer::Unsat,
        source: "figure caption",
    });
    out
}
