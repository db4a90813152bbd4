//! Temporal-logic-aware frontier-based exploration.
//!
//! Each frontier `x` is scored by
//! `V(x) = max_s (α1·I(x) + α2·Ω(s)) / W*(x, s)^α3` over the product states `(x, s)`
//! reachable from the robot's current product state, where `I` is the information gain,
//! `W*` the minimum product path weight and `Ω` the task progress metric, which is
//! `−∞` for the trash state, `−α1·|X|/α2` for commit states and `Δφ` otherwise.

mod episode;

pub(crate) use episode::Episode;
pub use episode::Phase;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::commit::CommitReport;
use crate::env::{info_gain, Action, Cell, GridMap, KnownSet};
use crate::product::{ProductError, ProductGraph, ProductState, ShortestPaths};
use crate::scltl::{delta_phi, pruned_distances, Letter, PrunedDistances, StateId, TotalDfa};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlannerConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    /// Sensing radius in 4-adjacency hops.
    pub h: usize,
    /// Upper bound on executed actions; `None` means `10·|X|·|S|`.
    pub step_cap: Option<usize>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self { alpha1: 1.0, alpha2: 20.0, alpha3: 1.0, h: 3, step_cap: None }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), PlanError> {
        for (name, v) in [("alpha1", self.alpha1), ("alpha2", self.alpha2), ("alpha3", self.alpha3)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(PlanError::Config(format!("{name} must be a positive number, got {v}")));
            }
        }
        if self.h == 0 {
            return Err(PlanError::Config("sensing radius h must be at least 1".into()));
        }
        if self.step_cap == Some(0) {
            return Err(PlanError::Config("step cap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("invalid planner configuration: {0}")]
    Config(String),
    #[error("step cap of {0} actions exceeded")]
    StepCap(usize),
    #[error("cell ({}, {}) is not a frontier", .0.col, .0.row)]
    NotAFrontier(Cell),
    #[error("the task was violated at step {step}")]
    Violation { step: usize },
    #[error("illegal move {action:?} from ({}, {})", .cell.col, .cell.row)]
    IllegalMove { cell: Cell, action: Action },
    #[error("no accepting product node is reachable")]
    NoSatisfyingPath,
    #[error("an exploration iteration revealed no new cell")]
    Stalled,
    #[error(transparent)]
    Product(#[from] ProductError),
}

/// An `f64` that serializes `−∞` as the string `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtValue(pub f64);

impl Serialize for ExtValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

/// Task progress metric of reaching `s_end` from `s_start`.
pub fn omega(
    dfa: &TotalDfa,
    commits: &CommitReport,
    d: &PrunedDistances,
    s_start: StateId,
    s_end: StateId,
    map_size: usize,
    cfg: &PlannerConfig,
) -> f64 {
    if dfa.is_trash(s_end) {
        f64::NEG_INFINITY
    } else if commits.contains(s_end) {
        -(cfg.alpha1 * map_size as f64) / cfg.alpha2
    } else {
        delta_phi(d, s_start, s_end, dfa.num_states() as u32) as f64
    }
}

/// Everything fixed during an episode that frontier scoring needs.
#[derive(Debug, Clone, Copy)]
pub struct ScoringContext<'a> {
    pub dfa: &'a TotalDfa,
    pub commits: &'a CommitReport,
    pub distances: &'a PrunedDistances,
    pub map: &'a GridMap,
    pub cfg: &'a PlannerConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredFrontier {
    pub cell: Cell,
    pub value: ExtValue,
    /// `None` iff the value is `−∞`.
    pub best_end: Option<ProductState>,
    /// Product states after the current one, ending in `best_end`.
    pub best_path: Vec<ProductState>,
    pub actions: Vec<Action>,
    pub weight: Option<u64>,
}

/// Scores frontier `x` from the current product state `cur`.
pub fn frontier_value(
    g: &ProductGraph,
    cur: ProductState,
    x: Cell,
    known: &KnownSet,
    ctx: &ScoringContext<'_>,
) -> Result<ScoredFrontier, PlanError> {
    let map = ctx.map;
    if !known.is_known(map, x) || map.neighbours(x).all(|n| known.is_known(map, n)) {
        return Err(PlanError::NotAFrontier(x));
    }
    let paths = g.min_weight_paths(ctx.dfa, cur)?;
    Ok(score(g, &paths, cur, x, known, ctx))
}

fn score(
    g: &ProductGraph,
    paths: &ShortestPaths,
    cur: ProductState,
    x: Cell,
    known: &KnownSet,
    ctx: &ScoringContext<'_>,
) -> ScoredFrontier {
    let gain = info_gain(ctx.map, x, ctx.cfg.h, known) as f64;
    let mut best: Option<(f64, u64, StateId, usize)> = None;
    for s in ctx.dfa.states() {
        let Some(node) = g.node(ProductState { cell: x, dfa: s }) else { continue };
        // zero-weight candidates only arise for the robot's own cell, which is never a
        // frontier once it has sensed
        let Some(w) = paths.weight(node).filter(|&w| w > 0) else { continue };
        let om = omega(ctx.dfa, ctx.commits, ctx.distances, cur.dfa, s, ctx.map.num_cells(), ctx.cfg);
        let v = (ctx.cfg.alpha1 * gain + ctx.cfg.alpha2 * om) / (w as f64).powf(ctx.cfg.alpha3);
        let better = match best {
            None => true,
            Some((bv, bw, _, _)) => v > bv || (v == bv && w < bw),
        };
        if better {
            best = Some((v, w, s, node));
        }
    }
    match best {
        None => ScoredFrontier {
            cell: x,
            value: ExtValue(f64::NEG_INFINITY),
            best_end: None,
            best_path: Vec::new(),
            actions: Vec::new(),
            weight: None,
        },
        Some((v, w, s, node)) => {
            let steps = paths.path_to(node).expect("scored nodes are reachable");
            ScoredFrontier {
                cell: x,
                value: ExtValue(v),
                best_end: Some(ProductState { cell: x, dfa: s }),
                best_path: steps.iter().map(|&(_, n)| g.state(n)).collect(),
                actions: steps.iter().map(|&(a, _)| a).collect(),
                weight: Some(w),
            }
        }
    }
}

/// Scores every frontier with one shortest-path search and returns the argmax. Ties go
/// to the smaller weight, then the row-major first cell.
pub fn select_frontier(
    g: &ProductGraph,
    cur: ProductState,
    frontier_cells: &[Cell],
    known: &KnownSet,
    ctx: &ScoringContext<'_>,
) -> Result<Option<ScoredFrontier>, PlanError> {
    let paths = g.min_weight_paths(ctx.dfa, cur)?;
    let mut best: Option<ScoredFrontier> = None;
    let mut cells = frontier_cells.to_vec();
    cells.sort_unstable();
    for x in cells {
        let scored = score(g, &paths, cur, x, known, ctx);
        let better = match &best {
            None => true,
            Some(b) => {
                scored.value > b.value
                    || (scored.value == b.value && scored.weight.unwrap_or(u64::MAX) < b.weight.unwrap_or(u64::MAX))
            }
        };
        if better {
            best = Some(scored);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Satisfied,
    Unsatisfiable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// An accepting product node was reached.
    Accepted,
    /// The start cell's label already violates the task.
    ViolatedAtStart,
    /// Every reachable cell is known and no satisfying path exists.
    NoFrontiers,
    /// Every frontier scored `−∞`, or every baseline path to a frontier violates the task.
    NoSafeFrontier,
}

/// One line of the per-step trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub t: usize,
    pub cell: [usize; 2],
    pub dfa: StateId,
    pub known: usize,
    pub phase: Phase,
    pub frontier: Option<[usize; 2]>,
    pub v_max: Option<ExtValue>,
}

/// Per-iteration diagnostics of the exploration loop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub t: usize,
    pub known: usize,
    pub frontiers: usize,
    pub chosen: Option<[usize; 2]>,
    /// `None` for the baseline, which does not score frontiers.
    pub v_max: Option<ExtValue>,
    /// Path weight to the chosen frontier.
    pub weight: Option<u64>,
    pub best_end: Option<StateId>,
    pub commit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub verdict: Verdict,
    pub termination: Termination,
    /// Visited cells, starting with the start cell.
    pub trajectory: Vec<Cell>,
    pub actions: Vec<Action>,
    /// Labels of the visited cells, starting with the start cell's.
    pub word: Vec<Letter>,
    /// DFA states before each letter of `word` and after the last one.
    pub dfa_states: Vec<StateId>,
    /// Per map cell, the step at which it was first sensed.
    pub reveal_step: Vec<Option<usize>>,
    pub trace: Vec<TraceStep>,
    pub iterations: Vec<IterationLog>,
    pub known: KnownSet,
    pub steps: usize,
}

impl EpisodeResult {
    pub fn is_satisfied(&self) -> bool {
        self.verdict == Verdict::Satisfied
    }

    /// Replays `word` through `dfa`: whether it ends accepting, and whether the trash
    /// state was visited.
    pub fn replay(&self, dfa: &TotalDfa) -> (bool, bool) {
        let mut s = dfa.initial();
        let mut hit_trash = dfa.is_trash(s);
        for &l in &self.word {
            s = dfa.next(s, l);
            hit_trash |= dfa.is_trash(s);
        }
        (dfa.is_accepting(s), hit_trash)
    }

    /// Known cells after `step` actions.
    pub fn known_at(&self, step: usize) -> impl Iterator<Item = usize> + '_ {
        self.reveal_step.iter().enumerate().filter(move |(_, r)| r.is_some_and(|r| r <= step)).map(|(i, _)| i)
    }

    pub fn to_json(&self, dfa: &TotalDfa) -> EpisodeJson {
        EpisodeJson {
            verdict: self.verdict,
            termination: self.termination,
            steps: self.steps,
            trajectory: self.trajectory.iter().map(|c| [c.col, c.row]).collect(),
            actions: self.actions.clone(),
            word: self.word.iter().map(|&l| dfa.alphabet().letter_names(l)).collect(),
            dfa_states: self.dfa_states.clone(),
            reveal_step: self.reveal_step.clone(),
            iterations: self.iterations.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeJson {
    pub verdict: Verdict,
    pub termination: Termination,
    pub steps: usize,
    pub trajectory: Vec<[usize; 2]>,
    pub actions: Vec<Action>,
    pub word: Vec<Vec<String>>,
    pub dfa_states: Vec<StateId>,
    pub reveal_step: Vec<Option<usize>>,
    pub iterations: Vec<IterationLog>,
}

/// Runs one exploration episode from the map's start cell.
pub fn run_episode(
    map: &GridMap,
    dfa: &TotalDfa,
    commits: &CommitReport,
    cfg: &PlannerConfig,
) -> Result<EpisodeResult, PlanError> {
    cfg.validate()?;
    let distances = pruned_distances(dfa);
    let ctx = ScoringContext { dfa, commits, distances: &distances, map, cfg };
    let mut ep = Episode::begin(map, dfa, cfg);
    if ep.violated() {
        return Ok(ep.finish(Verdict::Unsatisfiable, Termination::ViolatedAtStart));
    }
    let mut last_v = None;
    let mut last_known = None;
    while !ep.accepting_reachable()? {
        if last_known == Some(ep.known.len()) {
            return Err(PlanError::Stalled);
        }
        last_known = Some(ep.known.len());
        let cells = ep.frontiers();
        let chosen = select_frontier(&ep.graph, ep.cur, &cells, &ep.known, &ctx)?;
        let v_max = chosen.as_ref().map_or(f64::NEG_INFINITY, |c| c.value.0);
        ep.iterations.push(IterationLog {
            iteration: ep.iterations.len(),
            t: ep.steps(),
            known: ep.known.len(),
            frontiers: cells.len(),
            chosen: chosen.as_ref().filter(|c| c.best_end.is_some()).map(|c| [c.cell.col, c.cell.row]),
            v_max: Some(ExtValue(v_max)),
            weight: chosen.as_ref().and_then(|c| c.weight),
            best_end: chosen.as_ref().and_then(|c| c.best_end).map(|e| e.dfa),
            commit: chosen.as_ref().and_then(|c| c.best_end).is_some_and(|e| commits.contains(e.dfa)),
        });
        let Some(target) = chosen else {
            log::debug!("no frontiers left after {} steps", ep.steps());
            return Ok(ep.finish(Verdict::Unsatisfiable, Termination::NoFrontiers));
        };
        if target.best_end.is_none() {
            log::debug!("every frontier leads to a violation after {} steps", ep.steps());
            return Ok(ep.finish(Verdict::Unsatisfiable, Termination::NoSafeFrontier));
        }
        log::trace!("frontier ({}, {}) with value {v_max}", target.cell.col, target.cell.row);
        last_v = Some(v_max);
        for &action in &target.actions {
            ep.act(action, Phase::Explore, Some(target.cell), last_v)?;
            if ep.accepting_reachable()? || !ep.is_frontier(target.cell) {
                break;
            }
        }
    }
    ep.satisfy(last_v)?;
    Ok(ep.finish(Verdict::Satisfied, Termination::Accepted))
}
