use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::build::{GameBuilder, PermutationGame};
use super::model::{extract_model, refutation_dump, StrategyMove};
use super::solve::{solve, zielonka, Solution};
use super::{ParityGame, Player};
use crate::automata::{pa_to_ba, prune_non_cyclic_accepting, LdbaDeterminizer, ParityAutomaton};
use crate::formula::Formula;
use crate::semantics::{satisfies, KripkeModel};
use crate::tracking::{build_tracking_pa, TrackingAutomaton, TrackingError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
pub enum SolverKind {
    #[default]
    Zielonka,
    Fixpoint,
}

#[derive(Debug, Clone)]
pub struct Options {
    pub solver: SolverKind,
    pub certify: bool,
    pub node_cap: Option<usize>,
    pub time_cap: Option<Duration>,
    /// Newly expanded nodes before the first solver run on the fly; later
    /// batches grow with the explored game so the total solving work stays linear.
    pub cadence: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            solver: SolverKind::Zielonka,
            certify: true,
            node_cap: None,
            time_cap: None,
            cadence: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Answer {
    Sat,
    Unsat,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Sat => "SAT",
            Answer::Unsat => "UNSAT",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Statistics {
    pub explored_nodes: usize,
    pub game_nodes: usize,
    pub game_edges: usize,
    pub solves: usize,
    pub solver_iterations: usize,
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub answer: Answer,
    pub statistics: Statistics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<KripkeModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refutation: Option<Vec<StrategyMove>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecideError {
    #[error(transparent)]
    Tracking(#[from] TrackingError),
    #[error("indeterminate: {reason} after {explored} nodes")]
    Indeterminate { reason: String, explored: usize },
    #[error("certification failed: {0}")]
    Certification(String),
}

struct Budget {
    start: Instant,
    node_cap: Option<usize>,
    time_cap: Option<Duration>,
}

impl Budget {
    fn new(o: &Options) -> Self {
        Budget {
            start: Instant::now(),
            node_cap: o.node_cap,
            time_cap: o.time_cap,
        }
    }

    fn check(&self, nodes: usize) -> Result<(), DecideError> {
        if self.node_cap.is_some_and(|cap| nodes > cap) {
            return Err(DecideError::Indeterminate {
                reason: "node cap exceeded".into(),
                explored: nodes,
            });
        }
        if self.time_cap.is_some_and(|cap| self.start.elapsed() > cap) {
            return Err(DecideError::Indeterminate {
                reason: "time cap exceeded".into(),
                explored: nodes,
            });
        }
        Ok(())
    }
}

/// Tracking automaton of `f` and the pruned Büchi automaton the game determinizes.
fn prepare(f: &Arc<Formula>) -> Result<(TrackingAutomaton, ParityAutomaton), DecideError> {
    let t = build_tracking_pa(f)?;
    let ba = prune_non_cyclic_accepting(&pa_to_ba(&t.pa));
    Ok((t, ba))
}

fn determinizer(ba: &ParityAutomaton) -> Result<LdbaDeterminizer<'_>, DecideError> {
    LdbaDeterminizer::new(ba).map_err(|e| DecideError::Tracking(e.into()))
}

fn expand_all(b: &mut GameBuilder<'_>, budget: &Budget) -> Result<(), DecideError> {
    while b.expand_batch(1024) > 0 {
        budget.check(b.num_nodes())?;
    }
    Ok(())
}

pub fn build_permutation_game(f: &Arc<Formula>, o: &Options) -> Result<PermutationGame, DecideError> {
    let (t, ba) = prepare(f)?;
    let det = determinizer(&ba)?;
    let mut b = GameBuilder::new(&t, &det);
    expand_all(&mut b, &Budget::new(o))?;
    Ok(b.into_game())
}

fn strategy_solution(g: &ParityGame, s: Solution) -> Solution {
    if s.strategy.iter().any(Option::is_some) || g.num_nodes() == 0 {
        return s;
    }
    let z = zielonka(g);
    assert_eq!(z.winner, s.winner, "solvers disagree on a winning region");
    z
}

fn conclude(
    f: &Arc<Formula>,
    b: &GameBuilder<'_>,
    g: &ParityGame,
    s: Solution,
    o: &Options,
    mut stats: Statistics,
    start: Instant,
) -> Result<Verdict, DecideError> {
    let answer = match s.winner[g.initial] {
        Player::Eloise => Answer::Sat,
        Player::Abelard => Answer::Unsat,
    };
    let (mut model, mut refutation) = (None, None);
    if o.certify {
        let s = strategy_solution(g, s);
        match answer {
            Answer::Sat => {
                let m = extract_model(g, &b.nodes, &b.tracking.closure, &b.tracking.letters, &s)
                    .map_err(DecideError::Certification)?;
                if !satisfies(&m, f) {
                    return Err(DecideError::Certification("extracted model violates the formula".into()));
                }
                model = Some(m);
            }
            Answer::Unsat => refutation = Some(refutation_dump(g, &s)),
        }
    }
    stats.explored_nodes = b.explored();
    stats.game_nodes = b.num_nodes();
    stats.game_edges = b.game.num_edges();
    stats.wall_time = start.elapsed();
    Ok(Verdict {
        answer,
        statistics: stats,
        model,
        refutation,
    })
}

/// Builds the whole permutation game and solves it once.
pub fn decide(f: &Arc<Formula>, o: &Options) -> Result<Verdict, DecideError> {
    let start = Instant::now();
    let (t, ba) = prepare(f)?;
    let det = determinizer(&ba)?;
    let mut b = GameBuilder::new(&t, &det);
    expand_all(&mut b, &Budget::new(o))?;
    let s = solve(&b.game, o.solver);
    let stats = Statistics {
        solves: 1,
        solver_iterations: s.iterations,
        ..Statistics::default()
    };
    conclude(f, &b, &b.game, s, o, stats, start)
}

/// Expands the game in batches and stops as soon as one player wins a
/// completion that hands every unexplored node to the opponent. Each batch
/// grows from the unexplored nodes reached by the optimistic winning strategies.
pub fn decide_on_the_fly(f: &Arc<Formula>, o: &Options) -> Result<Verdict, DecideError> {
    let start = Instant::now();
    let budget = Budget::new(o);
    let (t, ba) = prepare(f)?;
    let det = determinizer(&ba)?;
    let mut b = GameBuilder::new(&t, &det);
    let mut stats = Statistics::default();
    let mut explored = 0;
    let mut seeds = vec![b.game.initial];
    loop {
        let batch = o.cadence.max(explored / 2).max(1);
        explored += b.expand_from(&seeds, batch);
        budget.check(b.num_nodes())?;
        if b.is_complete() {
            let s = solve(&b.game, o.solver);
            stats.solves += 1;
            stats.solver_iterations += s.iterations;
            return conclude(f, &b, &b.game, s, o, stats, start);
        }
        seeds.clear();
        for favoured in [Player::Eloise, Player::Abelard] {
            let g = b.completion(favoured);
            let s = solve(&g, o.solver);
            stats.solves += 1;
            stats.solver_iterations += s.iterations;
            if s.winner[g.initial] != favoured {
                return conclude(f, &b, &g, s, o, stats, start);
            }
            seeds.extend(b.unexpanded_under(&g, &s, favoured));
        }
        if seeds.is_empty() {
            seeds = (0..b.num_nodes()).filter(|&v| !b.expanded[v]).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_normalized;

    fn verdict(text: &str) -> Verdict {
        decide(&parse_normalized(text).unwrap(), &Options::default()).unwrap()
    }

    #[test]
    fn trivial_verdicts() {
        assert_eq!(verdict("p & ~p").answer, Answer::Unsat);
        assert_eq!(verdict("mu X. <a> X").answer, Answer::Unsat);
        assert_eq!(verdict("<a> p").answer, Answer::Sat);
        assert_eq!(verdict("false").answer, Answer::Unsat);
        assert_eq!(verdict("true").answer, Answer::Sat);
    }

    #[test]
    fn example_is_certified() {
        let v = verdict("mu X. p & nu Y. (<a> (Y & p) | <a> X)");
        assert_eq!(v.answer, Answer::Sat);
        assert!(v.model.is_some());
    }

    #[test]
    fn two_successors() {
        let v = verdict("<a> p & <a> ~p");
        let m = v.model.unwrap();
        assert_eq!(m.relations["a"].len(), 2);
    }

    #[test]
    fn on_the_fly_finds_clash_early() {
        let f = parse_normalized("p & ~p").unwrap();
        let v = decide_on_the_fly(&f, &Options::default()).unwrap();
        assert_eq!(v.answer, Answer::Unsat);
        assert!(v.statistics.explored_nodes <= 3);
    }

    #[test]
    fn caps_abort() {
        let f = parse_normalized("nu X. <a> X & <b> X").unwrap();
        let o = Options {
            node_cap: Some(0),
            ..Options::default()
        };
        assert!(matches!(decide(&f, &o), Err(DecideError::Indeterminate { .. })));
    }
}
