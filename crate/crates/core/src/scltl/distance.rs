use std::collections::VecDeque;

use super::{StateId, TotalDfa};

/// Hop distance to the nearest accepting state once every transition that needs more
/// than one simultaneous observation has been removed. `None` means unreachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrunedDistances {
    distance: Vec<Option<u32>>,
}

impl PrunedDistances {
    pub fn get(&self, s: StateId) -> Option<u32> {
        self.distance[s]
    }

    pub fn len(&self) -> usize {
        self.distance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distance.is_empty()
    }

    pub fn as_slice(&self) -> &[Option<u32>] {
        &self.distance
    }
}

pub fn pruned_distances(dfa: &TotalDfa) -> PrunedDistances {
    let n = dfa.num_states();
    let mut pred: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for s in dfa.states() {
        for l in dfa.alphabet().letters().filter(|l| l.len() <= 1) {
            pred[dfa.next(s, l)].push(s);
        }
    }
    let mut distance = vec![None; n];
    let mut queue = VecDeque::new();
    for s in dfa.accepting_states() {
        distance[s] = Some(0);
        queue.push_back(s);
    }
    while let Some(t) = queue.pop_front() {
        let d = distance[t].unwrap();
        for &s in &pred[t] {
            if distance[s].is_none() {
                distance[s] = Some(d + 1);
                queue.push_back(s);
            }
        }
    }
    PrunedDistances { distance }
}

/// Progress made by moving from `from` to `to`: the drop in pruned distance.
/// Unreachable distances count as `cap`.
pub fn delta_phi(d: &PrunedDistances, from: StateId, to: StateId, cap: u32) -> i64 {
    let hop = |s: StateId| i64::from(d.get(s).map_or(cap, |x| x.min(cap)));
    hop(from) - hop(to)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scltl::{compile_dfa, parse_formula, ObservationSet};

    fn phi0() -> TotalDfa {
        let set = ObservationSet::new(["a", "b", "c"]).unwrap();
        compile_dfa(&parse_formula("(!b U a) | ((!a U b) & F c)", &set).unwrap(), &set).unwrap()
    }

    #[test]
    fn phi0_distances() {
        let dfa = phi0();
        let d = pruned_distances(&dfa);
        let acc = dfa.accepting_states().next().unwrap();
        assert_eq!(d.get(acc), Some(0));
        assert_eq!(d.get(dfa.initial()), Some(1));
        assert_eq!(d.get(dfa.trash()), None);
        let cap = dfa.num_states() as u32;
        assert_eq!(delta_phi(&d, dfa.initial(), acc, cap), 1);
        assert_eq!(delta_phi(&d, dfa.initial(), dfa.initial(), cap), 0);
        let b = dfa.alphabet().letter(&["b"]).unwrap();
        let committed = dfa.next(dfa.initial(), b);
        assert_eq!(delta_phi(&d, dfa.initial(), committed, cap), 0);
        assert_eq!(delta_phi(&d, dfa.initial(), dfa.trash(), cap), 1 - i64::from(cap));
    }

    #[test]
    fn conjunction_needs_simultaneous_letter() {
        // "a & b" is only satisfiable by the letter {a,b}, which pruning removes
        let set = ObservationSet::new(["a", "b"]).unwrap();
        let dfa = compile_dfa(&parse_formula("a & b", &set).unwrap(), &set).unwrap();
        let d = pruned_distances(&dfa);
        assert_eq!(d.get(dfa.initial()), None);
        let cap = dfa.num_states() as u32;
        let acc = dfa.accepting_states().next().unwrap();
        assert_eq!(delta_phi(&d, dfa.initial(), acc, cap), i64::from(cap));
    }
}
