#![allow(dead_code)]

use std::sync::Arc;

use permgame::automata::{is_limit_deterministic, LassoWord, ParityAutomaton, Priority};
use permgame::formula::{check_fragment, normalize, Fixpoint, Formula, SurfaceFormula};
use permgame::game::{ParityGame, Player};
use permgame::semantics::{satisfies, KripkeModel};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random automaton with at most `max_states` states over two letters.
/// Büchi automata use priorities {1, 2}, parity automata 1..=4.
pub fn random_automaton(rng: &mut ChaCha8Rng, max_states: usize, buchi: bool) -> ParityAutomaton {
    let n = rng.gen_range(1..=max_states);
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut a = ParityAutomaton::with_states(&names, &["a", "b"]);
    let top: Priority = if buchi { 2 } else { 4 };
    for s in 0..n {
        for l in 0..2 {
            for t in 0..n {
                if rng.gen_bool(0.3) {
                    a.add_transition(s, l, t, rng.gen_range(1..=top));
                }
            }
        }
    }
    a
}

pub fn random_ld_automaton(rng: &mut ChaCha8Rng, max_states: usize, buchi: bool) -> ParityAutomaton {
    loop {
        let a = random_automaton(rng, max_states, buchi);
        if is_limit_deterministic(&a) {
            return a;
        }
    }
}

fn is_primitive(w: &[usize]) -> bool {
    (1..w.len()).all(|d| w.len() % d != 0 || (d..w.len()).any(|i| w[i] != w[i - d]))
}

/// One lasso per ultimately periodic word expressible within the bounds:
/// the loop is primitive and the prefix does not end with the loop's last letter.
pub fn canonical_lassos(letters: usize, max_prefix: usize, max_loop: usize) -> Vec<LassoWord> {
    LassoWord::enumerate(letters, max_prefix, max_loop)
        .into_iter()
        .filter(|w| is_primitive(&w.cycle) && w.prefix.last() != w.cycle.last())
        .collect()
}

pub fn random_game(rng: &mut ChaCha8Rng, max_nodes: usize) -> ParityGame {
    let n = rng.gen_range(1..=max_nodes);
    let mut g = ParityGame::new();
    for _ in 0..n {
        g.add_node(if rng.gen_bool(0.5) { Player::Eloise } else { Player::Abelard });
    }
    for v in 0..n {
        let degree = rng.gen_range(0..=3);
        for label in 0..degree {
            g.add_edge(v, label, rng.gen_range(0..n), rng.gen_range(0..=5));
        }
    }
    g
}

/// Winner of every node by enumerating all pairs of positional strategies.
pub fn brute_force_winners(g: &ParityGame) -> Vec<Player> {
    let n = g.num_nodes();
    let choices = |p: Player| -> Vec<Vec<Option<usize>>> {
        let mut all = vec![Vec::new()];
        for v in 0..n {
            let options: Vec<Option<usize>> = if g.owner[v] == p && !g.edges[v].is_empty() {
                (0..g.edges[v].len()).map(Some).collect()
            } else {
                vec![None]
            };
            all = all
                .into_iter()
                .flat_map(|s| {
                    options.iter().map(move |&o| {
                        let mut s = s.clone();
                        s.push(o);
                        s
                    })
                })
                .collect();
        }
        all
    };
    let eloise = choices(Player::Eloise);
    let abelard = choices(Player::Abelard);
    let play_winner = |e: &[Option<usize>], a: &[Option<usize>], start: usize| -> Player {
        let mut seen = vec![None; n];
        let mut path: Vec<Priority> = Vec::new();
        let mut v = start;
        loop {
            if let Some(at) = seen[v] {
                let top = path[at..].iter().copied().max().unwrap();
                return Player::of_priority(top);
            }
            seen[v] = Some(path.len());
            let Some(i) = e[v].or(a[v]) else {
                return g.owner[v].opponent();
            };
            let edge = g.edges[v][i];
            path.push(edge.priority);
            v = edge.target;
        }
    };
    (0..n)
        .map(|v| {
            let wins = eloise
                .iter()
                .any(|e| abelard.iter().all(|a| play_winner(e, a, v) == Player::Eloise));
            if wins {
                Player::Eloise
            } else {
                Player::Abelard
            }
        })
        .collect()
}

fn random_surface(rng: &mut ChaCha8Rng, depth: usize, vars: &mut Vec<(String, bool)>) -> SurfaceFormula {
    let guarded: Vec<String> = vars.iter().filter(|v| v.1).map(|v| v.0.clone()).collect();
    if depth == 0 || rng.gen_bool(0.2) {
        if !guarded.is_empty() && rng.gen_bool(0.5) {
            return SurfaceFormula::var(&guarded[rng.gen_range(0..guarded.len())]);
        }
        let p = SurfaceFormula::prop(["p", "q"][rng.gen_range(0..2)]);
        return match rng.gen_range(0..6) {
            0 => SurfaceFormula::True,
            1 => SurfaceFormula::False,
            2 | 3 => SurfaceFormula::not(p),
            _ => p,
        };
    }
    match rng.gen_range(0..6) {
        0 => SurfaceFormula::and(random_surface(rng, depth - 1, vars), random_surface(rng, depth - 1, vars)),
        1 => SurfaceFormula::or(random_surface(rng, depth - 1, vars), random_surface(rng, depth - 1, vars)),
        2 | 3 => {
            let saved: Vec<bool> = vars.iter().map(|v| v.1).collect();
            vars.iter_mut().for_each(|v| v.1 = true);
            let body = random_surface(rng, depth - 1, vars);
            vars.iter_mut().zip(saved).for_each(|(v, s)| v.1 = s);
            if rng.gen_bool(0.5) {
                SurfaceFormula::diamond("a", body)
            } else {
                SurfaceFormula::boxed("a", body)
            }
        }
        _ => {
            let x = format!("X{}", vars.len());
            vars.push((x.clone(), false));
            let body = random_surface(rng, depth - 1, vars);
            vars.pop();
            let op = if rng.gen_bool(0.5) { Fixpoint::Mu } else { Fixpoint::Nu };
            SurfaceFormula::fix(op, &x, body)
        }
    }
}

/// Random guarded formula over props p, q and one action, kept only when it
/// lies in the weakly aconjunctive fragment.
pub fn random_fragment_formula(rng: &mut ChaCha8Rng, depth: usize) -> (SurfaceFormula, Arc<Formula>) {
    loop {
        let s = random_surface(rng, depth, &mut Vec::new());
        let f = normalize(&s);
        if check_fragment(&f).accepted() {
            return (s, f);
        }
    }
}

/// Every Kripke model over props p, q and action a with at most `max_states` states, rooted at 0.
pub fn small_models(max_states: usize) -> Vec<KripkeModel> {
    let mut out = Vec::new();
    for n in 1..=max_states {
        for edges in 0u32..1 << (n * n) {
            for val in 0u32..1 << (2 * n) {
                let mut m = KripkeModel::new(n, 0);
                for i in 0..n * n {
                    if edges >> i & 1 == 1 {
                        m.add_edge("a", i / n, i % n);
                    }
                }
                for s in 0..n {
                    if val >> (2 * s) & 1 == 1 {
                        m.set_true("p", s);
                    }
                    if val >> (2 * s + 1) & 1 == 1 {
                        m.set_true("q", s);
                    }
                }
                out.push(m);
            }
        }
    }
    out
}

pub fn has_small_model(f: &Formula, models: &[KripkeModel]) -> bool {
    models.iter().any(|m| satisfies(m, f))
}
