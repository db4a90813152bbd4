//! Physical-space frontier exploration with violation-based frontier discarding.
//!
//! The robot heads for the nearest frontier by physical path weight over known cells,
//! ignoring the task except that a frontier whose shortest path would drive the DFA into
//! the trash state is skipped. As soon as the product shows an accepting node reachable,
//! the minimum-weight satisfying path is executed.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::env::{Action, Cell, GridMap, KnownSet};
use crate::planner::{Episode, EpisodeResult, IterationLog, Phase, PlanError, PlannerConfig, Termination, Verdict};
use crate::scltl::{Letter, StateId, TotalDfa};

/// Minimum physical path weights from `from` over known cells, honouring the one-way
/// rule. Returns per-cell weights and the action leading into each cell.
/// Per-cell parent pointer of a shortest physical path.
pub type Parents = Vec<Option<(Cell, Action)>>;

pub fn physical_paths(map: &GridMap, known: &KnownSet, from: Cell) -> (Vec<Option<u64>>, Parents) {
    let n = map.num_cells();
    let mut weight = vec![None; n];
    let mut parent = vec![None; n];
    let mut heap = BinaryHeap::new();
    weight[map.index(from)] = Some(0u64);
    heap.push(Reverse((0u64, from)));
    while let Some(Reverse((w, c))) = heap.pop() {
        if weight[map.index(c)] != Some(w) {
            continue;
        }
        for a in Action::MOVES {
            let Some(next) = map.step(c, a) else { continue };
            if !known.is_known(map, next) {
                continue;
            }
            let cand = w + u64::from(map.step_cost(c));
            let i = map.index(next);
            if weight[i].is_none_or(|old| cand < old) {
                weight[i] = Some(cand);
                parent[i] = Some((c, a));
                heap.push(Reverse((cand, next)));
            }
        }
    }
    (weight, parent)
}

fn unwind(map: &GridMap, parent: &[Option<(Cell, Action)>], from: Cell, to: Cell) -> Vec<(Action, Cell)> {
    let mut steps = Vec::new();
    let mut at = to;
    while at != from {
        let (prev, a) = parent[map.index(at)].expect("reached cells have parents");
        steps.push((a, at));
        at = prev;
    }
    steps.reverse();
    steps
}

fn survives(dfa: &TotalDfa, letters: &[Letter], map: &GridMap, mut s: StateId, path: &[(Action, Cell)]) -> bool {
    for &(_, c) in path {
        s = dfa.next(s, letters[map.index(c)]);
        if dfa.is_trash(s) {
            return false;
        }
    }
    true
}

pub fn run_baseline(map: &GridMap, dfa: &TotalDfa, cfg: &PlannerConfig) -> Result<EpisodeResult, PlanError> {
    cfg.validate()?;
    let letters = map.letters_over(dfa.alphabet());
    let mut ep = Episode::begin(map, dfa, cfg);
    if ep.violated() {
        return Ok(ep.finish(Verdict::Unsatisfiable, Termination::ViolatedAtStart));
    }
    loop {
        if ep.accepting_reachable()? {
            ep.satisfy(None)?;
            return Ok(ep.finish(Verdict::Satisfied, Termination::Accepted));
        }
        let cells = ep.frontiers();
        let (weight, parent) = physical_paths(map, &ep.known, ep.cur.cell);
        let mut ranked: Vec<(u64, Cell)> =
            cells.iter().filter_map(|&c| weight[map.index(c)].filter(|&w| w > 0).map(|w| (w, c))).collect();
        ranked.sort_unstable();
        let chosen = ranked.iter().find_map(|&(w, c)| {
            let path = unwind(map, &parent, ep.cur.cell, c);
            survives(dfa, &letters, map, ep.cur.dfa, &path).then_some((w, c, path))
        });
        ep.iterations.push(IterationLog {
            iteration: ep.iterations.len(),
            t: ep.steps(),
            known: ep.known.len(),
            frontiers: cells.len(),
            chosen: chosen.as_ref().map(|(_, c, _)| [c.col, c.row]),
            v_max: None,
            weight: chosen.as_ref().map(|(w, _, _)| *w),
            best_end: None,
            commit: false,
        });
        if cells.is_empty() {
            return Ok(ep.finish(Verdict::Unsatisfiable, Termination::NoFrontiers));
        }
        let Some((_, target, path)) = chosen else {
            log::debug!("baseline: no frontier reachable without violation after {} steps", ep.steps());
            return Ok(ep.finish(Verdict::Unsatisfiable, Termination::NoSafeFrontier));
        };
        for (action, _) in path {
            ep.act(action, Phase::Explore, Some(target), None)?;
            if ep.accepting_reachable()? || !ep.is_frontier(target) {
                break;
            }
        }
    }
}
