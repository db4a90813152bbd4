//! Sense / act / record bookkeeping shared by both exploration methods.

use serde::Serialize;

use super::{EpisodeResult, IterationLog, PlanError, PlannerConfig, Termination, TraceStep, Verdict};
use crate::env::{frontiers, Action, Cell, GridMap, KnownSet};
use crate::product::{ProductGraph, ProductState};
use crate::scltl::{Letter, StateId, TotalDfa};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Explore,
    Satisfy,
}

pub(crate) struct Episode<'a> {
    pub map: &'a GridMap,
    pub dfa: &'a TotalDfa,
    pub cfg: &'a PlannerConfig,
    pub known: KnownSet,
    pub graph: ProductGraph,
    pub cur: ProductState,
    letters: Vec<Letter>,
    step_cap: usize,
    trajectory: Vec<Cell>,
    actions: Vec<Action>,
    word: Vec<Letter>,
    dfa_states: Vec<StateId>,
    reveal_step: Vec<Option<usize>>,
    trace: Vec<TraceStep>,
    pub iterations: Vec<IterationLog>,
}

impl<'a> Episode<'a> {
    /// Places the robot at the start, consumes the start label and senses once.
    pub fn begin(map: &'a GridMap, dfa: &'a TotalDfa, cfg: &'a PlannerConfig) -> Self {
        let letters = map.letters_over(dfa.alphabet());
        let graph = ProductGraph::new(map, dfa);
        let cur = graph.root();
        let mut ep = Self {
            map,
            dfa,
            cfg,
            known: KnownSet::empty(map),
            graph,
            cur,
            letters,
            step_cap: cfg.step_cap.unwrap_or(10 * map.num_cells() * dfa.num_states()),
            trajectory: vec![cur.cell],
            actions: Vec::new(),
            word: Vec::new(),
            dfa_states: vec![dfa.initial(), cur.dfa],
            reveal_step: vec![None; map.num_cells()],
            trace: Vec::new(),
            iterations: Vec::new(),
        };
        ep.word.push(ep.letters[map.index(cur.cell)]);
        ep.sense();
        ep.record(Phase::Explore, None, None);
        ep
    }

    pub fn steps(&self) -> usize {
        self.actions.len()
    }

    pub fn violated(&self) -> bool {
        self.dfa.is_trash(self.cur.dfa)
    }

    fn sense(&mut self) {
        let t = self.actions.len();
        for c in self.known.sense(self.map, self.cur.cell, self.cfg.h) {
            self.reveal_step[self.map.index(c)] = Some(t);
        }
        self.graph.expand(self.map, &self.known, self.dfa);
    }

    fn record(&mut self, phase: Phase, frontier: Option<Cell>, v_max: Option<f64>) {
        self.trace.push(TraceStep {
            t: self.actions.len(),
            cell: [self.cur.cell.col, self.cur.cell.row],
            dfa: self.cur.dfa,
            known: self.known.len(),
            phase,
            frontier: frontier.map(|c| [c.col, c.row]),
            v_max: v_max.map(super::ExtValue),
        });
    }

    pub fn accepting_reachable(&self) -> Result<bool, PlanError> {
        Ok(self.graph.accepting_reachable(self.dfa, self.cur)?)
    }

    pub fn is_frontier(&self, c: Cell) -> bool {
        self.known.is_known(self.map, c) && self.map.neighbours(c).any(|n| !self.known.is_known(self.map, n))
    }

    pub fn frontiers(&self) -> Vec<Cell> {
        frontiers(self.map, &self.known)
    }

    /// Executes one action, reads the entered cell's label and senses.
    pub fn act(
        &mut self,
        action: Action,
        phase: Phase,
        frontier: Option<Cell>,
        v_max: Option<f64>,
    ) -> Result<(), PlanError> {
        if self.actions.len() >= self.step_cap {
            return Err(PlanError::StepCap(self.step_cap));
        }
        let cell =
            self.map.step(self.cur.cell, action).ok_or(PlanError::IllegalMove { cell: self.cur.cell, action })?;
        if !self.known.is_known(self.map, cell) {
            return Err(PlanError::IllegalMove { cell: self.cur.cell, action });
        }
        let letter = self.letters[self.map.index(cell)];
        self.cur = ProductState { cell, dfa: self.dfa.next(self.cur.dfa, letter) };
        self.trajectory.push(cell);
        self.actions.push(action);
        self.word.push(letter);
        self.dfa_states.push(self.cur.dfa);
        if self.violated() {
            return Err(PlanError::Violation { step: self.actions.len() });
        }
        self.sense();
        self.record(phase, frontier, v_max);
        Ok(())
    }

    /// Executes a minimum-weight path to an accepting product node. Ties go to the
    /// row-major first cell, then the smaller DFA state.
    pub fn satisfy(&mut self, v_max: Option<f64>) -> Result<(), PlanError> {
        let paths = self.graph.min_weight_paths(self.dfa, self.cur)?;
        let goal = self
            .graph
            .accepting_nodes(self.dfa)
            .filter_map(|n| paths.weight(n).map(|w| (w, self.graph.state(n), n)))
            .min()
            .map(|(_, _, n)| n)
            .ok_or(PlanError::NoSatisfyingPath)?;
        for (action, _) in paths.path_to(goal).expect("goal has a weight") {
            self.act(action, Phase::Satisfy, None, v_max)?;
        }
        Ok(())
    }

    pub fn finish(self, verdict: Verdict, termination: Termination) -> EpisodeResult {
        EpisodeResult {
            verdict,
            termination,
            steps: self.actions.len(),
            trajectory: self.trajectory,
            actions: self.actions,
            word: self.word,
            dfa_states: self.dfa_states,
            reveal_step: self.reveal_step,
            trace: self.trace,
            iterations: self.iterations,
            known: self.known,
        }
    }
}
