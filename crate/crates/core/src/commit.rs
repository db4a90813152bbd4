//! Commit states: non-trash, non-accepting DFA states `s` for which some word accepted
//! from the initial state is rejected when started from `s`.
//!
//! Decided by reachability in the self-product `A × A` from the pairs `(s0, s)` to the
//! target set `F × (S \ F)`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::scltl::{Letter, StateId, TotalDfa};

pub type Pair = (StateId, StateId);

/// The part of `A × A` reachable from the initial pairs.
#[derive(Debug, Clone)]
pub struct SelfProduct {
    states: Vec<Pair>,
    index: HashMap<Pair, usize>,
    initials: Vec<usize>,
    /// `succ[i][letter]` is the index of the successor pair.
    succ: Vec<Vec<usize>>,
    targets: Vec<bool>,
}

impl SelfProduct {
    pub fn states(&self) -> &[Pair] {
        &self.states
    }

    pub fn initials(&self) -> impl Iterator<Item = Pair> + '_ {
        self.initials.iter().map(|&i| self.states[i])
    }

    pub fn targets(&self) -> impl Iterator<Item = Pair> + '_ {
        self.states.iter().zip(&self.targets).filter(|(_, &t)| t).map(|(p, _)| *p)
    }

    pub fn contains(&self, pair: Pair) -> bool {
        self.index.contains_key(&pair)
    }

    pub fn successor(&self, pair: Pair, letter: Letter) -> Option<Pair> {
        self.index.get(&pair).map(|&i| self.states[self.succ[i][letter.index()]])
    }

    /// Whether some target pair is reachable from `from` (a forward search).
    pub fn reaches_target(&self, from: Pair) -> bool {
        let Some(&start) = self.index.get(&from) else {
            return false;
        };
        let mut seen = vec![false; self.states.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            if self.targets[i] {
                return true;
            }
            for &j in &self.succ[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        false
    }
}

pub fn self_product(dfa: &TotalDfa) -> SelfProduct {
    let s0 = dfa.initial();
    let mut states = Vec::new();
    let mut index = HashMap::new();
    let mut queue = VecDeque::new();
    let mut initials = Vec::new();
    for s in dfa.states().filter(|&s| !dfa.is_trash(s) && !dfa.is_accepting(s)) {
        let pair = (s0, s);
        index.insert(pair, states.len());
        initials.push(states.len());
        states.push(pair);
        queue.push_back(pair);
    }
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let (a, b) = states[i];
        let row = dfa
            .alphabet()
            .letters()
            .map(|l| {
                let next = (dfa.next(a, l), dfa.next(b, l));
                *index.entry(next).or_insert_with(|| {
                    states.push(next);
                    states.len() - 1
                })
            })
            .collect();
        succ.push(row);
        i += 1;
    }
    let targets = states.iter().map(|&(a, b)| dfa.is_accepting(a) && !dfa.is_accepting(b)).collect();
    SelfProduct { states, index, initials, succ, targets }
}

/// Commit states together with one shortest witness word each.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommitReport {
    pub commit_set: BTreeSet<StateId>,
    pub witnesses: BTreeMap<StateId, Vec<Letter>>,
}

impl CommitReport {
    pub fn contains(&self, s: StateId) -> bool {
        self.commit_set.contains(&s)
    }

    pub fn to_json(&self, dfa: &TotalDfa) -> CommitJson {
        CommitJson {
            commit_states: self.commit_set.iter().copied().collect(),
            witnesses: self
                .witnesses
                .iter()
                .map(|(s, w)| (s.to_string(), w.iter().map(|&l| dfa.alphabet().letter_names(l)).collect()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommitJson {
    pub commit_states: Vec<StateId>,
    pub witnesses: BTreeMap<String, Vec<Vec<String>>>,
}

pub fn commit_states(dfa: &TotalDfa) -> CommitReport {
    let product = self_product(dfa);
    let n = product.states.len();
    let k = dfa.num_letters();

    // one backward breadth-first search from the whole target set; `toward[i]` is the
    // first letter and successor on a shortest path from pair i to a target
    let mut pred: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
    for (i, row) in product.succ.iter().enumerate() {
        for (l, &j) in row.iter().enumerate() {
            pred[j].push((i, l as u32));
        }
    }
    let mut toward: Vec<Option<(Letter, usize)>> = vec![None; n];
    let mut reached = product.targets.clone();
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| reached[i]).collect();
    while let Some(j) = queue.pop_front() {
        for &(i, l) in &pred[j] {
            if !reached[i] {
                reached[i] = true;
                toward[i] = Some((Letter(l), j));
                queue.push_back(i);
            }
        }
    }
    debug_assert!(k > 0);

    let mut report = CommitReport::default();
    for &i in &product.initials {
        if !reached[i] {
            continue;
        }
        let (_, s) = product.states[i];
        let mut word = Vec::new();
        let mut at = i;
        while !product.targets[at] {
            let (l, next) = toward[at].expect("reached pairs have a path to a target");
            word.push(l);
            at = next;
        }
        report.commit_set.insert(s);
        report.witnesses.insert(s, word);
    }
    report
}

/// Whether `word` is accepted by the automaton but rejected once its initial state is
/// moved to `s`.
pub fn verify_witness(dfa: &TotalDfa, s: StateId, word: &[Letter]) -> bool {
    dfa.accepts(word) && !dfa.accepts_from(s, word)
}
