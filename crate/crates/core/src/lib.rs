//! Temporal-logic-aware frontier-based exploration.
//!
//! A robot explores an initially unknown grid world while working towards an scLTL
//! task. Tasks are compiled to total DFAs ([`scltl`]), DFA states whose entry forecloses
//! some way of satisfying the task are found with a DFA self-product ([`commit`]), and
//! the exploration loop ([`planner`]) scores frontiers over an incrementally built
//! grid × DFA product ([`product`]) so it never violates the task and avoids committing
//! early. [`baseline`] is the physical-space frontier method used for comparison and
//! [`bench`] runs both over random maps.

pub mod baseline;
pub mod bench;
pub mod commit;
pub mod env;
pub mod planner;
pub mod product;
pub mod scltl;

/// The search-and-rescue task: go through a person before a safe exit, and once a
/// lower-level region is entered only lower-level and person cells may be used until
/// the exit.
pub const RESCUE_TASK: &str = "(!l U (l U (p U ((l|p) U s)))) & F s & (!s U p)";

/// Observations used by [`RESCUE_TASK`] and the random map generator.
pub const RESCUE_ALPHABET: [&str; 3] = ["l", "p", "s"];
