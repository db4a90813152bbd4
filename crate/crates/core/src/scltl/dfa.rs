use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::progress::progress_canonical;
use super::{DfaError, Formula, Letter, ObservationSet};

pub type StateId = usize;

/// Default bound on the number of progression states explored by [`compile_dfa`].
pub const DEFAULT_STATE_CAP: usize = 4096;

/// A total deterministic automaton over `2^O` with a single absorbing trash state.
///
/// Invariants (checked by every constructor):
/// * every `(state, letter)` pair has exactly one successor;
/// * the trash state is absorbing, non-accepting, and no accepting state is reachable
///   from it; every other state can reach an accepting state;
/// * every non-trash state is reachable from the initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalDfa {
    alphabet: ObservationSet,
    initial: StateId,
    accepting: Vec<bool>,
    trash: StateId,
    delta: Vec<StateId>,
}

impl TotalDfa {
    /// Builds a trimmed automaton from a raw transition table (`table[s][letter]`).
    ///
    /// States unreachable from `initial` are dropped, every state from which no
    /// accepting state is reachable is merged into one trash state, and a trash state is
    /// added if none exists. States are renumbered in breadth-first order with the trash
    /// state last.
    pub fn from_table(
        alphabet: ObservationSet,
        initial: StateId,
        table: &[Vec<StateId>],
        accepting: &[bool],
    ) -> Result<Self, DfaError> {
        let n = table.len();
        let k = alphabet.num_letters();
        if initial >= n || accepting.len() != n {
            return Err(DfaError::Invalid("table, initial state and accepting flags disagree".into()));
        }
        for row in table {
            if row.len() != k || row.iter().any(|&t| t >= n) {
                return Err(DfaError::Invalid("transition table is not total".into()));
            }
        }
        let mut reach = vec![false; n];
        let mut queue = VecDeque::from([initial]);
        reach[initial] = true;
        while let Some(s) = queue.pop_front() {
            for &t in &table[s] {
                if !reach[t] {
                    reach[t] = true;
                    queue.push_back(t);
                }
            }
        }
        let live = coreachable(n, |s| table[s].iter().copied(), |s| accepting[s]);

        // renumber: live states in BFS order from the initial state, trash last
        let mut id = vec![usize::MAX; n];
        let mut order = Vec::new();
        if live[initial] {
            id[initial] = 0;
            order.push(initial);
            let mut i = 0;
            while i < order.len() {
                let s = order[i];
                for &t in &table[s] {
                    if live[t] && id[t] == usize::MAX {
                        id[t] = order.len();
                        order.push(t);
                    }
                }
                i += 1;
            }
        }
        debug_assert!(order.iter().all(|&s| reach[s]));
        let trash = order.len();
        let mut delta = Vec::with_capacity((trash + 1) * k);
        let mut acc = Vec::with_capacity(trash + 1);
        for &s in &order {
            delta.extend(table[s].iter().map(|&t| if live[t] { id[t] } else { trash }));
            acc.push(accepting[s]);
        }
        delta.extend(std::iter::repeat_n(trash, k));
        acc.push(false);
        let initial = if live[initial] { 0 } else { trash };
        Ok(Self { alphabet, initial, accepting: acc, trash, delta })
    }

    /// Builds an automaton from explicit parts, rejecting anything that violates the
    /// total-DFA invariants. No states are renamed.
    pub fn from_parts(
        alphabet: ObservationSet,
        initial: StateId,
        table: Vec<Vec<StateId>>,
        accepting: Vec<bool>,
        trash: StateId,
    ) -> Result<Self, DfaError> {
        let n = table.len();
        let k = alphabet.num_letters();
        if initial >= n || trash >= n || accepting.len() != n {
            return Err(DfaError::Invalid("state ids out of range".into()));
        }
        if table.iter().any(|row| row.len() != k || row.iter().any(|&t| t >= n)) {
            return Err(DfaError::Invalid("transition table is not total".into()));
        }
        if accepting[trash] || table[trash].iter().any(|&t| t != trash) {
            return Err(DfaError::Invalid("trash state must be absorbing and non-accepting".into()));
        }
        let live = coreachable(n, |s| table[s].iter().copied(), |s| accepting[s]);
        if let Some(s) = (0..n).find(|&s| s != trash && !live[s]) {
            return Err(DfaError::Invalid(format!("state {s} cannot reach acceptance but is not trash")));
        }
        let mut reach = vec![false; n];
        reach[initial] = true;
        let mut queue = VecDeque::from([initial]);
        while let Some(s) = queue.pop_front() {
            for &t in &table[s] {
                if !reach[t] {
                    reach[t] = true;
                    queue.push_back(t);
                }
            }
        }
        if let Some(s) = (0..n).find(|&s| s != trash && !reach[s]) {
            return Err(DfaError::Invalid(format!("state {s} is unreachable from the initial state")));
        }
        let delta = table.into_iter().flatten().collect();
        Ok(Self { alphabet, initial, accepting, trash, delta })
    }

    pub fn alphabet(&self) -> &ObservationSet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_letters(&self) -> usize {
        self.alphabet.num_letters()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.num_states()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn trash(&self) -> StateId {
        self.trash
    }

    pub fn is_accepting(&self, s: StateId) -> bool {
        self.accepting[s]
    }

    pub fn is_trash(&self, s: StateId) -> bool {
        s == self.trash
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(|&s| self.accepting[s])
    }

    pub fn next(&self, s: StateId, letter: Letter) -> StateId {
        self.delta[s * self.num_letters() + letter.index()]
    }

    /// State reached from `from` after consuming `word`.
    pub fn run_from(&self, from: StateId, word: &[Letter]) -> StateId {
        word.iter().fold(from, |s, &l| self.next(s, l))
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        self.accepts_from(self.initial, word)
    }

    /// Membership in the language of the automaton with its initial state moved to `from`.
    pub fn accepts_from(&self, from: StateId, word: &[Letter]) -> bool {
        self.is_accepting(self.run_from(from, word))
    }

    /// The automaton whose language is empty iff the trash state is initial.
    pub fn language_is_empty(&self) -> bool {
        self.initial == self.trash
    }

    /// Merges language-equivalent states (Hopcroft partition refinement), then
    /// renumbers in breadth-first order with the trash state last.
    pub fn minimize(&self) -> TotalDfa {
        let n = self.num_states();
        let k = self.num_letters();
        let mut inverse: Vec<Vec<Vec<StateId>>> = vec![vec![Vec::new(); n]; k];
        for s in 0..n {
            for l in 0..k {
                inverse[l][self.delta[s * k + l]].push(s);
            }
        }

        let acc: Vec<StateId> = (0..n).filter(|&s| self.accepting[s]).collect();
        let rej: Vec<StateId> = (0..n).filter(|&s| !self.accepting[s]).collect();
        let mut blocks: Vec<Vec<StateId>> = Vec::new();
        let mut block_of = vec![0usize; n];
        for part in [acc, rej] {
            if !part.is_empty() {
                for &s in &part {
                    block_of[s] = blocks.len();
                }
                blocks.push(part);
            }
        }
        let mut in_work = vec![true; blocks.len()];
        let mut work: Vec<usize> = (0..blocks.len()).collect();

        let mut marked = vec![false; n];
        while let Some(splitter) = work.pop() {
            in_work[splitter] = false;
            let members = blocks[splitter].clone();
            for inv in &inverse {
                let mut touched: Vec<usize> = Vec::new();
                for &t in &members {
                    for &s in &inv[t] {
                        if !marked[s] {
                            marked[s] = true;
                            touched.push(block_of[s]);
                        }
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                for b in touched {
                    let (inside, outside): (Vec<StateId>, Vec<StateId>) = blocks[b].iter().partition(|&&s| marked[s]);
                    if outside.is_empty() {
                        continue;
                    }
                    let new_id = blocks.len();
                    for &s in &outside {
                        block_of[s] = new_id;
                    }
                    let smaller_is_inside = inside.len() <= outside.len();
                    blocks[b] = inside;
                    blocks.push(outside);
                    in_work.push(false);
                    if in_work[b] {
                        in_work[new_id] = true;
                        work.push(new_id);
                    } else if smaller_is_inside {
                        in_work[b] = true;
                        work.push(b);
                    } else {
                        in_work[new_id] = true;
                        work.push(new_id);
                    }
                }
                for &t in &members {
                    for &s in &inv[t] {
                        marked[s] = false;
                    }
                }
            }
        }

        let nb = blocks.len();
        let table: Vec<Vec<StateId>> = (0..nb)
            .map(|b| {
                let rep = blocks[b][0];
                (0..k).map(|l| block_of[self.delta[rep * k + l]]).collect()
            })
            .collect();
        let accepting: Vec<bool> = (0..nb).map(|b| self.accepting[blocks[b][0]]).collect();
        // trimming again renumbers canonically and keeps the trash state last
        TotalDfa::from_table(self.alphabet.clone(), block_of[self.initial], &table, &accepting)
            .expect("quotient of a total automaton is total")
    }

    pub fn to_json(&self) -> DfaJson {
        let mut transitions = Vec::with_capacity(self.delta.len());
        for s in self.states() {
            let mut row: Vec<(Vec<String>, StateId)> =
                self.alphabet.letters().map(|l| (self.alphabet.letter_names(l), self.next(s, l))).collect();
            row.sort();
            transitions.extend(row.into_iter().map(|(letter, to)| TransitionJson { from: s, letter, to }));
        }
        DfaJson {
            alphabet: self.alphabet.names().to_vec(),
            states: self.states().collect(),
            initial: self.initial,
            accepting: self.accepting_states().collect(),
            trash: self.trash,
            transitions,
        }
    }

    pub fn from_json(json: &DfaJson) -> Result<Self, DfaError> {
        let alphabet =
            ObservationSet::new(json.alphabet.iter().cloned()).map_err(|e| DfaError::Invalid(e.to_string()))?;
        let n = json.states.len();
        if json.states.iter().enumerate().any(|(i, &s)| i != s) {
            return Err(DfaError::Invalid("states must be 0..n in order".into()));
        }
        let k = alphabet.num_letters();
        let mut table = vec![vec![usize::MAX; k]; n];
        for t in &json.transitions {
            let letter = alphabet.letter(&t.letter).map_err(|e| DfaError::Invalid(e.to_string()))?;
            if t.from >= n || t.to >= n {
                return Err(DfaError::Invalid(format!("transition {} -> {} out of range", t.from, t.to)));
            }
            let slot = &mut table[t.from][letter.index()];
            if *slot != usize::MAX {
                return Err(DfaError::Invalid(format!("duplicate transition from {} on {:?}", t.from, t.letter)));
            }
            *slot = t.to;
        }
        if table.iter().flatten().any(|&t| t == usize::MAX) {
            return Err(DfaError::Invalid("transition relation is not total".into()));
        }
        let mut accepting = vec![false; n];
        for &a in &json.accepting {
            *accepting.get_mut(a).ok_or_else(|| DfaError::Invalid(format!("accepting state {a} out of range")))? = true;
        }
        Self::from_parts(alphabet, json.initial, table, accepting, json.trash)
    }
}

fn coreachable<I>(n: usize, succ: impl Fn(StateId) -> I, target: impl Fn(StateId) -> bool) -> Vec<bool>
where
    I: Iterator<Item = StateId>,
{
    let mut pred: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for s in 0..n {
        for t in succ(s) {
            pred[t].push(s);
        }
    }
    let mut live: Vec<bool> = (0..n).map(&target).collect();
    let mut queue: VecDeque<StateId> = (0..n).filter(|&s| live[s]).collect();
    while let Some(t) = queue.pop_front() {
        for &s in &pred[t] {
            if !live[s] {
                live[s] = true;
                queue.push_back(s);
            }
        }
    }
    live
}

/// Bit-exact JSON form of a [`TotalDfa`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaJson {
    pub alphabet: Vec<String>,
    pub states: Vec<StateId>,
    pub initial: StateId,
    pub accepting: Vec<StateId>,
    pub trash: StateId,
    pub transitions: Vec<TransitionJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionJson {
    pub from: StateId,
    pub letter: Vec<String>,
    pub to: StateId,
}

/// Compiles `phi` into the minimal total automaton accepting exactly its good prefixes.
pub fn compile_dfa(phi: &Formula, alphabet: &ObservationSet) -> Result<TotalDfa, DfaError> {
    compile_dfa_with_cap(phi, alphabet, DEFAULT_STATE_CAP)
}

/// Like [`compile_dfa`] with an explicit bound on explored progression states.
///
/// States of the unminimized automaton are canonical progressed obligations: the
/// initial state is `phi` itself, `True` is the only accepting obligation and `False`
/// is dead.
pub fn compile_dfa_with_cap(phi: &Formula, alphabet: &ObservationSet, cap: usize) -> Result<TotalDfa, DfaError> {
    if let Some(a) = phi.atoms().into_iter().find(|a| a.index() >= alphabet.len()) {
        return Err(DfaError::Invalid(format!("atom index {} outside the alphabet", a.index())));
    }
    let start = phi.canonical();
    let mut index: HashMap<Formula, StateId> = HashMap::from([(start.clone(), 0)]);
    let mut states = vec![start];
    let mut table: Vec<Vec<StateId>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let mut row = Vec::with_capacity(alphabet.num_letters());
        for l in alphabet.letters() {
            let next = progress_canonical(&states[i], l);
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    if states.len() >= cap {
                        return Err(DfaError::StateCap(cap));
                    }
                    let id = states.len();
                    index.insert(next.clone(), id);
                    states.push(next);
                    id
                }
            };
            row.push(id);
        }
        table.push(row);
        i += 1;
    }
    let accepting: Vec<bool> = states.iter().map(Formula::is_true).collect();
    let dfa = TotalDfa::from_table(alphabet.clone(), 0, &table, &accepting)?;
    Ok(dfa.minimize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scltl::parse_formula;

    fn abc() -> ObservationSet {
        ObservationSet::new(["a", "b", "c"]).unwrap()
    }

    fn compile(text: &str) -> TotalDfa {
        let set = abc();
        compile_dfa(&parse_formula(text, &set).unwrap(), &set).unwrap()
    }

    #[test]
    fn tautology_is_one_accepting_state() {
        let dfa = compile("true");
        assert_eq!(dfa.accepting_states().count(), 1);
        let acc = dfa.initial();
        assert!(dfa.is_accepting(acc));
        assert!(dfa.alphabet().letters().all(|l| dfa.next(acc, l) == acc));
        // plus the unreachable trash state
        assert_eq!(dfa.num_states(), 2);
    }

    #[test]
    fn contradiction_is_trash_only() {
        let dfa = compile("a & !a");
        assert!(dfa.language_is_empty());
        assert_eq!(dfa.initial(), dfa.trash());
        assert_eq!(dfa.accepting_states().count(), 0);
    }

    #[test]
    fn phi0_has_four_live_states() {
        let dfa = compile("(!b U a) | ((!a U b) & F c)");
        assert_eq!(dfa.num_states(), 5);
        assert_eq!(dfa.accepting_states().count(), 1);
        let t = dfa.trash();
        let reaches_trash =
            dfa.states().filter(|&s| s != t).any(|s| dfa.alphabet().letters().any(|l| dfa.next(s, l) == t));
        assert!(!reaches_trash, "trash is unreachable for this formula");
    }

    #[test]
    fn state_cap_is_enforced() {
        let set = abc();
        let phi = parse_formula("(!b U a) | ((!a U b) & F c)", &set).unwrap();
        assert_eq!(compile_dfa_with_cap(&phi, &set, 2), Err(DfaError::StateCap(2)));
    }

    #[test]
    fn minimize_merges_equivalent_states() {
        let set = ObservationSet::new(["a"]).unwrap();
        // 0 -a-> 1, 0 -∅-> 2, 1 and 2 both accepting sinks: 1 ~ 2
        let table = vec![vec![2, 1], vec![1, 1], vec![2, 2]];
        let dfa = TotalDfa::from_table(set, 0, &table, &[false, true, true]).unwrap();
        assert_eq!(dfa.num_states(), 4);
        let min = dfa.minimize();
        assert_eq!(min.num_states(), 3);
        assert!(min.accepts(&[Letter(0)]));
        assert!(min.accepts(&[Letter(1)]));
        assert!(!min.accepts(&[]));
    }

    #[test]
    fn json_round_trip_and_layout() {
        let dfa = compile("(!b U a) | ((!a U b) & F c)");
        let json = dfa.to_json();
        assert_eq!(json.transitions.len(), 5 * 8);
        assert_eq!(json.transitions[0].letter, Vec::<String>::new());
        assert_eq!(json.transitions[1].letter, ["a"]);
        assert_eq!(json.transitions[2].letter, ["a", "b"]);
        let text = serde_json::to_string(&json).unwrap();
        assert!(text.starts_with(r#"{"alphabet":["a","b","c"],"states":[0,1,2,3,4],"initial":0,"#));
        let back: DfaJson = serde_json::from_str(&text).unwrap();
        assert_eq!(TotalDfa::from_json(&back).unwrap(), dfa);
    }

    #[test]
    fn json_rejects_partial_relation() {
        let mut json = compile("F a").to_json();
        json.transitions.pop();
        assert!(TotalDfa::from_json(&json).is_err());
    }
}
