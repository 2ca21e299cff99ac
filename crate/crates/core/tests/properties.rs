mod common;

use permgame::automata::{normalize_cycle_priorities, npa_accepts_lasso};
use permgame::formula::{
    alternation_level, apply_provenance, check_fragment, closure, normalize, parse, Fixpoint, SurfaceFormula,
};
use permgame::game::{decide, decide_on_the_fly, fixpoint_iteration, zielonka, Answer, Options, SolverKind};
use permgame::semantics::{evaluate, satisfies, Interpretation};
use permgame::tracking::build_tracking_pa;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{
    brute_force_winners, canonical_lassos, has_small_model, random_automaton, random_fragment_formula, random_game,
    small_models,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Number of maximal blocks of equal operators, minus one when the last is a greatest fixpoint.
fn reference_level(chain: &[Fixpoint]) -> usize {
    let blocks = chain.iter().zip(chain.iter().skip(1)).filter(|(a, b)| a != b).count() + usize::from(!chain.is_empty());
    blocks - usize::from(chain.last() == Some(&Fixpoint::Nu))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>()) {
        let (_, f) = random_fragment_formula(&mut rng(seed), 5);
        let again = normalize(&parse(&f.to_string()).unwrap());
        prop_assert_eq!(again.to_string(), f.to_string());
    }

    #[test]
    fn closure_is_small_and_provenance_round_trips(seed in any::<u64>()) {
        let (_, f) = random_fragment_formula(&mut rng(seed), 6);
        let c = closure(&f);
        prop_assert!(c.len() <= f.size());
        for item in &c.items {
            prop_assert_eq!(&apply_provenance(&item.base, &item.provenance), c.item_formula(item.id));
        }
    }

    #[test]
    fn alternation_level_matches_block_count(chain in proptest::collection::vec(any::<bool>(), 0..8)) {
        let ops: Vec<Fixpoint> = chain.iter().map(|&m| if m { Fixpoint::Mu } else { Fixpoint::Nu }).collect();
        prop_assert_eq!(alternation_level(&ops), reference_level(&ops));
    }

    #[test]
    fn tracking_automata_are_limit_deterministic(seed in any::<u64>()) {
        let (_, f) = random_fragment_formula(&mut rng(seed), 7);
        let t = build_tracking_pa(&f);
        prop_assert!(t.is_ok(), "{}: {:?}", f, t.err());
    }

    #[test]
    fn cycle_normalization_preserves_language(seed in any::<u64>()) {
        let a = random_automaton(&mut rng(seed), 4, false);
        let b = normalize_cycle_priorities(&a);
        for w in canonical_lassos(2, 4, 4) {
            prop_assert_eq!(npa_accepts_lasso(&a, &w), npa_accepts_lasso(&b, &w));
        }
    }

    #[test]
    fn zielonka_and_fixpoint_match_brute_force(seed in any::<u64>()) {
        let g = random_game(&mut rng(seed), 6);
        let oracle = brute_force_winners(&g);
        prop_assert_eq!(&zielonka(&g).winner, &oracle);
        prop_assert_eq!(&fixpoint_iteration(&g).winner, &oracle);
    }
}

#[test]
fn negation_is_complement_and_fixpoints_unfold() {
    let models = small_models(2);
    let mut r = rng(7);
    for _ in 0..60 {
        let (s, f) = random_fragment_formula(&mut r, 5);
        let negated = normalize(&SurfaceFormula::not(s));
        let unfolded = f.unfold();
        for m in &models {
            assert_eq!(satisfies(m, &negated), !satisfies(m, &f), "{f} on {m:?}");
            if let Some(u) = &unfolded {
                let i = Interpretation::new();
                assert_eq!(evaluate(&f, m, &i).unwrap(), evaluate(u, m, &i).unwrap(), "{f}");
            }
        }
    }
}

#[test]
fn verdicts_agree_with_small_models() {
    let models = small_models(2);
    let mut r = rng(11);
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..150 {
        let (s, f) = random_fragment_formula(&mut r, 5);
        let v = decide(&f, &Options::default()).unwrap_or_else(|e| panic!("{f}: {e}"));
        match v.answer {
            Answer::Sat => {
                sat += 1;
                assert!(satisfies(v.model.as_ref().unwrap(), &f), "{f}");
            }
            Answer::Unsat => {
                unsat += 1;
                assert!(!has_small_model(&f, &models), "{f} has a model");
                let negated = normalize(&SurfaceFormula::not(s));
                if check_fragment(&negated).accepted() {
                    let w = decide(&negated, &Options::default()).unwrap();
                    assert_eq!(w.answer, Answer::Sat, "negation of unsatisfiable {f}");
                }
            }
        }
        if has_small_model(&f, &models) {
            assert_eq!(v.answer, Answer::Sat, "{f}");
        }
        let fly = decide_on_the_fly(&f, &Options::default()).unwrap();
        assert_eq!(fly.answer, v.answer, "on the fly {f}");
        let o = Options {
            solver: SolverKind::Fixpoint,
            ..Options::default()
        };
        assert_eq!(decide(&f, &o).unwrap().answer, v.answer, "fixpoint solver {f}");
    }
    assert!(sat > 10 && unsat > 10, "{sat} satisfiable, {unsat} unsatisfiable");
}
