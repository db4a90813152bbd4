use std::collections::{HashSet, VecDeque};

use super::formula::simplify;
use super::{Formula, Letter, ObservationSet};

fn step(f: &Formula, letter: Letter) -> Formula {
    match f {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Obs(a) => bool_formula(letter.contains(*a)),
        Formula::NegObs(a) => bool_formula(!letter.contains(*a)),
        Formula::And(xs) => Formula::And(xs.iter().map(|x| step(x, letter)).collect()),
        Formula::Or(xs) => Formula::Or(xs.iter().map(|x| step(x, letter)).collect()),
        Formula::Until(lhs, rhs) => {
            Formula::Or(vec![step(rhs, letter), Formula::And(vec![step(lhs, letter), f.clone()])])
        }
        Formula::Eventually(sub) => Formula::Or(vec![step(sub, letter), f.clone()]),
    }
}

fn bool_formula(b: bool) -> Formula {
    if b {
        Formula::True
    } else {
        Formula::False
    }
}

/// One-step progression of an already canonical formula; the result is canonical.
pub(crate) fn progress_canonical(f: &Formula, letter: Letter) -> Formula {
    simplify(&step(f, letter))
}

/// Consumes one letter: returns the obligation the remainder of the word must satisfy.
///
/// `True` means the letters consumed so far already form a good prefix; `False` means
/// no continuation can satisfy the formula any more.
pub fn progress(phi: &Formula, letter: Letter) -> Formula {
    progress_canonical(&phi.canonical(), letter)
}

/// Whether `word` is a good prefix of `phi`, decided by iterated progression.
pub fn is_good_prefix(phi: &Formula, word: &[Letter]) -> bool {
    let mut f = phi.canonical();
    if f.is_true() {
        return true;
    }
    for &l in word {
        f = progress_canonical(&f, l);
        if f.is_true() {
            return true;
        }
        if f.is_false() {
            return false;
        }
    }
    false
}

/// Whether some extension of the empty word is a good prefix of `phi`, explored by
/// breadth-first search over progressed obligations. Independent of any automaton.
///
/// Returns `None` if more than `limit` distinct obligations are encountered.
pub fn can_still_be_satisfied(phi: &Formula, alphabet: &ObservationSet, limit: usize) -> Option<bool> {
    let start = phi.canonical();
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(f) = queue.pop_front() {
        if f.is_true() {
            return Some(true);
        }
        for l in alphabet.letters() {
            let g = progress_canonical(&f, l);
            if seen.insert(g.clone()) {
                if seen.len() > limit {
                    return None;
                }
                queue.push_back(g);
            }
        }
    }
    Some(false)
}
