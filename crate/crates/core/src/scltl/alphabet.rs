use std::fmt;

use serde::{Deserialize, Serialize};

use super::FormulaError;

/// Upper bound on the number of observations; letters are stored as `u32` bitmasks
/// and the compiler enumerates all `2^|O|` letters per state.
pub const MAX_OBSERVATIONS: usize = 16;

/// Index of an observation inside its [`ObservationSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom(pub u8);

impl Atom {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Lexicographically ordered, duplicate-free set of observation names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ObservationSet {
    members: Vec<String>,
}

pub(crate) fn is_observation_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

const RESERVED: &[&str] = &["true", "false"];

impl ObservationSet {
    /// Builds the set from arbitrary-order names. Duplicates and malformed names are rejected.
    pub fn new<I, S>(names: I) -> Result<Self, FormulaError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut members: Vec<String> = names.into_iter().map(Into::into).collect();
        for name in &members {
            if !is_observation_name(name) || RESERVED.contains(&name.as_str()) {
                return Err(FormulaError::InvalidObservation(name.clone()));
            }
        }
        members.sort();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(FormulaError::DuplicateObservation(w[0].clone()));
        }
        if members.len() > MAX_OBSERVATIONS {
            return Err(FormulaError::TooManyObservations(members.len()));
        }
        Ok(Self { members })
    }

    /// Parses a comma-separated list such as `a,b,c`. Whitespace is ignored.
    pub fn parse_list(list: &str) -> Result<Self, FormulaError> {
        Self::new(list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_owned))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.members
    }

    pub fn name(&self, atom: Atom) -> &str {
        &self.members[atom.index()]
    }

    pub fn atom(&self, name: &str) -> Option<Atom> {
        self.members.binary_search_by(|m| m.as_str().cmp(name)).ok().map(|i| Atom(i as u8))
    }

    /// Number of letters in `2^O`.
    pub fn num_letters(&self) -> usize {
        1usize << self.members.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.num_letters() as u32).map(Letter)
    }

    pub fn letter<S: AsRef<str>>(&self, names: &[S]) -> Result<Letter, FormulaError> {
        let mut bits = 0u32;
        for n in names {
            let atom = self
                .atom(n.as_ref())
                .ok_or_else(|| FormulaError::UnknownAtom { name: n.as_ref().to_owned(), pos: 0 })?;
            bits |= 1 << atom.0;
        }
        Ok(Letter(bits))
    }

    /// Names of the observations in `letter`, sorted.
    pub fn letter_names(&self, letter: Letter) -> Vec<String> {
        letter.atoms().map(|a| self.members[a.index()].clone()).collect()
    }
}

impl fmt::Display for ObservationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.members.join(","))
    }
}

/// An element of `2^O`, encoded as a bitmask over atom indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Letter(pub u32);

impl Letter {
    pub const EMPTY: Letter = Letter(0);

    pub fn single(atom: Atom) -> Self {
        Letter(1 << atom.0)
    }

    pub fn contains(self, atom: Atom) -> bool {
        self.0 & (1 << atom.0) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn atoms(self) -> impl Iterator<Item = Atom> {
        (0..32u8).filter(move |i| self.0 & (1 << i) != 0).map(Atom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn members_are_sorted_and_unique() {
        let set = ObservationSet::new(["c", "a", "b"]).unwrap();
        assert_eq!(set.names(), ["a", "b", "c"]);
        assert_eq!(set.atom("b"), Some(Atom(1)));
        assert!(matches!(ObservationSet::new(["a", "a"]), Err(FormulaError::DuplicateObservation(_))));
        assert!(ObservationSet::new(["A"]).is_err());
        assert!(ObservationSet::new(["true"]).is_err());
    }

    #[test]
    fn letter_names_round_trip() {
        let set = ObservationSet::parse_list("p, l ,s").unwrap();
        let letter = set.letter(&["s", "l"]).unwrap();
        assert_eq!(set.letter_names(letter), ["l", "s"]);
        assert_eq!(letter.len(), 2);
        assert_eq!(set.num_letters(), 8);
    }
}
