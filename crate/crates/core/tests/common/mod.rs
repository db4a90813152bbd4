//! Strategies and reference implementations shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tlfe::env::{Cell, GridMap};
use tlfe::scltl::{compile_dfa, parse_formula, Atom, Formula, Letter, ObservationSet, TotalDfa};

pub const PHI0: &str = "(!b U a) | ((!a U b) & F c)";

pub fn observations(n: usize) -> ObservationSet {
    ObservationSet::new(["a", "b", "c"].into_iter().take(n)).unwrap()
}

pub fn compile(text: &str, atoms: &[&str]) -> TotalDfa {
    let set = ObservationSet::new(atoms.iter().copied()).unwrap();
    compile_dfa(&parse_formula(text, &set).unwrap(), &set).unwrap()
}

pub fn rescue() -> TotalDfa {
    compile(tlfe::RESCUE_TASK, &tlfe::RESCUE_ALPHABET)
}

/// Formulas of depth at most 4 over atoms `0..atoms`, built without simplification.
pub fn formula(atoms: u8) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        1 => Just(Formula::True),
        3 => (0..atoms).prop_map(|a| Formula::Obs(Atom(a))),
        2 => (0..atoms).prop_map(|a| Formula::NegObs(Atom(a))),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::until(a, b)),
            inner.prop_map(Formula::eventually),
        ]
    })
}

pub fn word(letters: usize, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..letters as u32).prop_map(Letter), 0..=max_len)
}

/// Truth of `f` at every position of the lasso `word`, whose last position is followed by
/// `loop_start`. Direct least-fixpoint evaluation of the semantics, sharing nothing with
/// the progression code.
pub fn lasso_truth(f: &Formula, word: &[Letter], loop_start: usize) -> Vec<bool> {
    let n = word.len();
    let next = |i: usize| if i + 1 < n { i + 1 } else { loop_start };
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Obs(a) => word.iter().map(|l| l.contains(*a)).collect(),
        Formula::NegObs(a) => word.iter().map(|l| !l.contains(*a)).collect(),
        Formula::And(xs) => xs.iter().fold(vec![true; n], |acc, x| {
            acc.iter().zip(lasso_truth(x, word, loop_start)).map(|(p, q)| *p && q).collect()
        }),
        Formula::Or(xs) => xs.iter().fold(vec![false; n], |acc, x| {
            acc.iter().zip(lasso_truth(x, word, loop_start)).map(|(p, q)| *p || q).collect()
        }),
        Formula::Until(a, b) => until(&lasso_truth(a, word, loop_start), &lasso_truth(b, word, loop_start), next),
        Formula::Eventually(a) => until(&vec![true; n], &lasso_truth(a, word, loop_start), next),
    }
}

fn until(a: &[bool], b: &[bool], next: impl Fn(usize) -> usize) -> Vec<bool> {
    let n = a.len();
    let mut sat = vec![false; n];
    for _ in 0..=n {
        for i in (0..n).rev() {
            sat[i] = b[i] || (a[i] && sat[next(i)]);
        }
    }
    sat
}

/// Whether the infinite word `prefix · cycle^ω` satisfies `f`.
pub fn lasso_holds(f: &Formula, prefix: &[Letter], cycle: &[Letter]) -> bool {
    assert!(!cycle.is_empty());
    let word: Vec<Letter> = prefix.iter().chain(cycle).copied().collect();
    lasso_truth(f, &word, prefix.len())[0]
}

/// A random complete automaton with `n` states over `letters` letters.
pub fn random_dfa(rng: &mut ChaCha8Rng, alphabet: &ObservationSet, n: usize) -> TotalDfa {
    let k = alphabet.num_letters();
    let table: Vec<Vec<usize>> = (0..n).map(|_| (0..k).map(|_| rng.gen_range(0..n)).collect()).collect();
    let accepting: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.3)).collect();
    TotalDfa::from_table(alphabet.clone(), 0, &table, &accepting).unwrap()
}

/// A random small map with labels over `atoms` observations (named a, b, c) and a
/// random rectangular one-way region.
pub fn random_map(seed: u64, atoms: usize) -> GridMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (rng.gen_range(2..9), rng.gen_range(2..9));
    let alphabet = observations(atoms);
    let start = Cell::new(rng.gen_range(0..w), rng.gen_range(0..h));
    let labels: Vec<Option<Atom>> =
        (0..w * h).map(|_| if rng.gen_bool(0.25) { Some(Atom(rng.gen_range(0..atoms) as u8)) } else { None }).collect();
    let mut one_way = vec![false; w * h];
    if rng.gen_bool(0.5) {
        let (c0, r0) = (rng.gen_range(0..w), rng.gen_range(0..h));
        let (c1, r1) = (rng.gen_range(c0..w), rng.gen_range(r0..h));
        for r in r0..=r1 {
            for c in c0..=c1 {
                one_way[r * w + c] = true;
            }
        }
    }
    GridMap::new(w, h, start, alphabet, labels, one_way).unwrap()
}
