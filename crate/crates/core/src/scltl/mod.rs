//! Syntactically co-safe LTL without Next: parsing, progression semantics, and
//! compilation to minimal total DFAs.

mod alphabet;
mod dfa;
mod distance;
mod formula;
mod parse;
mod progress;

pub use alphabet::{Atom, Letter, ObservationSet, MAX_OBSERVATIONS};
pub use dfa::{compile_dfa, compile_dfa_with_cap, DfaJson, StateId, TotalDfa, TransitionJson, DEFAULT_STATE_CAP};
pub use distance::{delta_phi, pruned_distances, PrunedDistances};
pub use formula::Formula;
pub use parse::parse_formula;
pub use progress::{can_still_be_satisfied, is_good_prefix, progress};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown atom `{name}` at {pos}")]
    UnknownAtom { name: String, pos: usize },
    #[error("negation applied to a non-atom at {pos}")]
    NegationOfNonAtom { pos: usize },
    #[error("operator `{op}` at {pos} is not part of scLTL")]
    Unsupported { op: String, pos: usize },
    #[error("invalid observation name `{0}`")]
    InvalidObservation(String),
    #[error("duplicate observation `{0}`")]
    DuplicateObservation(String),
    #[error("{0} observations exceed the limit of {MAX_OBSERVATIONS}")]
    TooManyObservations(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DfaError {
    #[error("automaton exceeds the state cap of {0}")]
    StateCap(usize),
    #[error("invalid automaton: {0}")]
    Invalid(String),
}
