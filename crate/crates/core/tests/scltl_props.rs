mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{formula, lasso_holds, observations, word, PHI0};
use tlfe::scltl::{
    can_still_be_satisfied, compile_dfa, is_good_prefix, parse_formula, progress, pruned_distances, Formula, Letter,
    TotalDfa,
};

fn obligation_after(f: &Formula, w: &[Letter]) -> Formula {
    w.iter().fold(f.canonical(), |g, &l| progress(&g, l))
}

fn check_structure(dfa: &TotalDfa) {
    let t = dfa.trash();
    assert!(!dfa.is_accepting(t));
    for l in dfa.alphabet().letters() {
        assert_eq!(dfa.next(t, l), t);
    }
    // every non-trash state is reachable from the initial one
    let mut seen = vec![false; dfa.num_states()];
    seen[dfa.initial()] = true;
    let mut stack = vec![dfa.initial()];
    while let Some(s) = stack.pop() {
        for l in dfa.alphabet().letters() {
            let n = dfa.next(s, l);
            assert!(n < dfa.num_states());
            if !seen[n] {
                seen[n] = true;
                stack.push(n);
            }
        }
    }
    assert!(dfa.states().all(|s| s == t || seen[s]));
    // good-prefix closure: accepting states only lead to accepting states
    for s in dfa.accepting_states() {
        for l in dfa.alphabet().letters() {
            assert!(dfa.is_accepting(dfa.next(s, l)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dfa_acceptance_matches_progression(
        f in formula(3),
        words in prop::collection::vec(word(8, 8), 8),
    ) {
        let set = observations(3);
        let dfa = compile_dfa(&f, &set).unwrap();
        for w in &words {
            prop_assert_eq!(dfa.accepts(w), is_good_prefix(&f, w), "{} on {:?}", f.display(&set), w);
        }
    }

    #[test]
    fn compiled_automata_are_well_formed(f in formula(3)) {
        let set = observations(3);
        let dfa = compile_dfa(&f, &set).unwrap();
        check_structure(&dfa);
        prop_assert_eq!(dfa.minimize().num_states(), dfa.num_states());
        prop_assert_eq!(TotalDfa::from_json(&dfa.to_json()).unwrap(), dfa);
    }

    #[test]
    fn trash_iff_obligation_unsatisfiable(f in formula(2), w in word(4, 6)) {
        let set = observations(2);
        let dfa = compile_dfa(&f, &set).unwrap();
        let in_trash = dfa.is_trash(dfa.run_from(dfa.initial(), &w));
        let live = can_still_be_satisfied(&obligation_after(&f, &w), &set, 5_000);
        prop_assert_eq!(live.map(|b| !b), Some(in_trash));
    }

    #[test]
    fn accepted_and_trash_words_agree_with_lasso_semantics(
        f in formula(3),
        w in word(8, 8),
        extensions in prop::collection::vec((word(8, 3), prop::collection::vec((0..8u32).prop_map(Letter), 1..4)), 6),
    ) {
        let set = observations(3);
        let dfa = compile_dfa(&f, &set).unwrap();
        let end = dfa.run_from(dfa.initial(), &w);
        for (middle, cycle) in &extensions {
            let prefix: Vec<Letter> = w.iter().chain(middle).copied().collect();
            let holds = lasso_holds(&f, &prefix, cycle);
            if dfa.is_accepting(end) {
                prop_assert!(holds, "accepted prefix has a violating extension");
            }
            if dfa.is_trash(end) {
                prop_assert!(!holds, "trash prefix has a satisfying extension");
            }
        }
    }

    #[test]
    fn display_round_trips_through_the_parser(f in formula(3)) {
        let set = observations(3);
        let text = f.display(&set).to_string();
        let back = parse_formula(&text, &set).unwrap();
        prop_assert_eq!(back.canonical(), f.canonical(), "{}", text);
    }

    #[test]
    fn pruned_distances_are_consistent(f in formula(3)) {
        let set = observations(3);
        let dfa = compile_dfa(&f, &set).unwrap();
        let d = pruned_distances(&dfa);
        for s in dfa.states() {
            prop_assert_eq!(d.get(s) == Some(0), dfa.is_accepting(s));
            if let Some(k) = d.get(s).filter(|&k| k > 0) {
                let step_down = dfa
                    .alphabet()
                    .letters()
                    .filter(|l| l.len() <= 1)
                    .any(|l| d.get(dfa.next(s, l)) == Some(k - 1));
                prop_assert!(step_down);
            }
        }
    }
}

#[test]
fn phi0_agrees_with_progression_on_ten_thousand_words() {
    let set = observations(3);
    let phi = parse_formula(PHI0, &set).unwrap();
    let dfa = compile_dfa(&phi, &set).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..10_000 {
        let len = rng.gen_range(0..=8);
        let w: Vec<Letter> = (0..len).map(|_| Letter(rng.gen_range(0..8))).collect();
        assert_eq!(dfa.accepts(&w), is_good_prefix(&phi, &w), "{w:?}");
    }
}

#[test]
fn phi0_has_four_live_states_and_one_accepting() {
    let dfa = common::compile(PHI0, &["a", "b", "c"]);
    assert_eq!(dfa.num_states(), 5);
    assert_eq!(dfa.accepting_states().count(), 1);
    check_structure(&dfa);
}

#[test]
fn rescue_task_automaton() {
    let dfa = common::rescue();
    check_structure(&dfa);
    let set = dfa.alphabet().clone();
    let l = |names: &[&str]| set.letter(names).unwrap();
    let s0 = dfa.initial();
    assert_eq!(dfa.next(s0, l(&[])), s0);
    assert!(dfa.is_trash(dfa.next(s0, l(&["s"]))));
    assert!(dfa.accepts(&[l(&["p"]), l(&[]), l(&["s"])]));
    assert!(dfa.accepts(&[l(&["l"]), l(&["p"]), l(&["l"]), l(&["s"])]));
    // once in a lower-level region, unlabeled cells are off limits until the exit
    assert!(dfa.is_trash(dfa.run_from(s0, &[l(&["l"]), l(&["p"]), l(&[])])));
    let d = pruned_distances(&dfa);
    assert_eq!(d.get(s0), Some(2));
    assert_eq!(d.get(dfa.next(s0, l(&["p"]))), Some(1));
}
