//! The grid × DFA product over the known part of the map, grown as the robot senses.
//!
//! An edge `(x, s) --a--> (x', s')` exists iff `x' = step(x, a)` is known and
//! `s' = δ(s, L(x'))`. Trash nodes are materialized but never expanded, and every
//! planning query ignores them as well as `Stay` edges.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::env::{Action, Cell, GridMap, KnownSet};
use crate::scltl::{Letter, StateId, TotalDfa};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProductState {
    pub cell: Cell,
    pub dfa: StateId,
}

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub action: Action,
    pub to: NodeId,
    pub weight: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductError {
    #[error("product state ({}, {}) / {} is not in the graph", .0.cell.col, .0.cell.row, .0.dfa)]
    UnknownNode(ProductState),
}

const ALL_ACTIONS: u8 = 0b1_1111;

#[derive(Debug, Clone)]
pub struct ProductGraph {
    root: ProductState,
    letters: Vec<Letter>,
    nodes: Vec<ProductState>,
    index: HashMap<ProductState, NodeId>,
    edges: Vec<Vec<Edge>>,
    /// Bit `i` set once `Action::ALL[i]` has been resolved for the node.
    resolved: Vec<u8>,
    /// Nodes with at least one action still waiting on an unknown cell.
    open: Vec<NodeId>,
    edge_count: usize,
}

impl ProductGraph {
    /// An empty product rooted at the robot's start. The start cell's label is
    /// consumed, so the root is `(x0, δ(s0, L(x0)))`.
    pub fn new(map: &GridMap, dfa: &TotalDfa) -> Self {
        let letters = map.letters_over(dfa.alphabet());
        let start = map.start();
        let root = ProductState { cell: start, dfa: dfa.next(dfa.initial(), letters[map.index(start)]) };
        Self::with_root(map, dfa, root)
    }

    /// An empty product rooted at an arbitrary product state.
    pub fn with_root(map: &GridMap, dfa: &TotalDfa, root: ProductState) -> Self {
        Self {
            root,
            letters: map.letters_over(dfa.alphabet()),
            nodes: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            resolved: Vec::new(),
            open: Vec::new(),
            edge_count: 0,
        }
    }

    pub fn root(&self) -> ProductState {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn node(&self, state: ProductState) -> Option<NodeId> {
        self.index.get(&state).copied()
    }

    pub fn state(&self, id: NodeId) -> ProductState {
        self.nodes[id]
    }

    pub fn states(&self) -> &[ProductState] {
        &self.nodes
    }

    pub fn edges(&self, id: NodeId) -> &[Edge] {
        &self.edges[id]
    }

    pub fn accepting_nodes<'a>(&'a self, dfa: &'a TotalDfa) -> impl Iterator<Item = NodeId> + 'a {
        (0..self.nodes.len()).filter(|&i| dfa.is_accepting(self.nodes[i].dfa))
    }

    pub fn trash_nodes<'a>(&'a self, dfa: &'a TotalDfa) -> impl Iterator<Item = NodeId> + 'a {
        (0..self.nodes.len()).filter(|&i| dfa.is_trash(self.nodes[i].dfa))
    }

    /// The letter read when entering `cell`, over the DFA's alphabet.
    pub fn letter(&self, map: &GridMap, cell: Cell) -> Letter {
        self.letters[map.index(cell)]
    }

    fn intern(&mut self, state: ProductState, queue: &mut VecDeque<NodeId>) -> NodeId {
        if let Some(&id) = self.index.get(&state) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(state);
        self.index.insert(state, id);
        self.edges.push(Vec::new());
        self.resolved.push(0);
        queue.push_back(id);
        id
    }

    /// Adds every product state over the known cells reachable from the root, with all
    /// induced edges. Existing nodes and edges are kept, so repeated calls with the same
    /// known set change nothing.
    pub fn expand(&mut self, map: &GridMap, known: &KnownSet, dfa: &TotalDfa) {
        let mut queue: VecDeque<NodeId> = std::mem::take(&mut self.open).into();
        if self.nodes.is_empty() {
            if !known.is_known(map, self.root.cell) {
                return;
            }
            self.intern(self.root, &mut queue);
        }
        let mut still_open = Vec::new();
        while let Some(id) = queue.pop_front() {
            let ProductState { cell, dfa: s } = self.nodes[id];
            if dfa.is_trash(s) {
                self.resolved[id] = ALL_ACTIONS;
                continue;
            }
            for (bit, action) in Action::ALL.into_iter().enumerate() {
                if self.resolved[id] & (1 << bit) != 0 {
                    continue;
                }
                let Some(next) = map.step(cell, action) else {
                    self.resolved[id] |= 1 << bit;
                    continue;
                };
                if !known.is_known(map, next) {
                    continue;
                }
                let to_state = ProductState { cell: next, dfa: dfa.next(s, self.letters[map.index(next)]) };
                let to = self.intern(to_state, &mut queue);
                self.edges[id].push(Edge { action, to, weight: map.step_cost(cell) });
                self.edge_count += 1;
                self.resolved[id] |= 1 << bit;
            }
            if self.resolved[id] != ALL_ACTIONS {
                still_open.push(id);
            }
        }
        still_open.sort_unstable();
        still_open.dedup();
        self.open = still_open;
    }

    fn require(&self, from: ProductState) -> Result<NodeId, ProductError> {
        self.node(from).ok_or(ProductError::UnknownNode(from))
    }

    fn moves(&self, id: NodeId) -> impl Iterator<Item = &Edge> {
        self.edges[id].iter().filter(|e| e.action != Action::Stay)
    }

    /// Whether an accepting node is reachable from `from` through non-trash nodes.
    pub fn accepting_reachable(&self, dfa: &TotalDfa, from: ProductState) -> Result<bool, ProductError> {
        let start = self.require(from)?;
        if dfa.is_trash(from.dfa) {
            return Ok(false);
        }
        let mut seen = vec![false; self.nodes.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            if dfa.is_accepting(self.nodes[i].dfa) {
                return Ok(true);
            }
            for e in self.moves(i) {
                if !seen[e.to] && !dfa.is_trash(self.nodes[e.to].dfa) {
                    seen[e.to] = true;
                    queue.push_back(e.to);
                }
            }
        }
        Ok(false)
    }

    /// Single-source minimum total weights over non-trash nodes, ignoring `Stay`.
    pub fn min_weight_paths(&self, dfa: &TotalDfa, from: ProductState) -> Result<ShortestPaths, ProductError> {
        let start = self.require(from)?;
        let n = self.nodes.len();
        let mut weight: Vec<Option<u64>> = vec![None; n];
        let mut parent: Vec<Option<(NodeId, Action)>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        if !dfa.is_trash(from.dfa) {
            weight[start] = Some(0);
            heap.push(Reverse((0u64, start)));
        }
        while let Some(Reverse((w, i))) = heap.pop() {
            if weight[i] != Some(w) {
                continue;
            }
            for e in self.moves(i) {
                if dfa.is_trash(self.nodes[e.to].dfa) {
                    continue;
                }
                let cand = w + u64::from(e.weight);
                if weight[e.to].is_none_or(|old| cand < old) {
                    weight[e.to] = Some(cand);
                    parent[e.to] = Some((i, e.action));
                    heap.push(Reverse((cand, e.to)));
                }
            }
        }
        Ok(ShortestPaths { source: start, weight, parent })
    }
}

/// Result of [`ProductGraph::min_weight_paths`].
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    source: NodeId,
    weight: Vec<Option<u64>>,
    parent: Vec<Option<(NodeId, Action)>>,
}

impl ShortestPaths {
    pub fn source(&self) -> NodeId {
        self.source
    }

    /// `None` when `to` is unreachable.
    pub fn weight(&self, to: NodeId) -> Option<u64> {
        self.weight.get(to).copied().flatten()
    }

    /// Nodes and actions of a minimum-weight path, excluding the source.
    pub fn path_to(&self, to: NodeId) -> Option<Vec<(Action, NodeId)>> {
        self.weight(to)?;
        let mut steps = Vec::new();
        let mut at = to;
        while at != self.source {
            let (prev, action) = self.parent[at]?;
            steps.push((action, at));
            at = prev;
        }
        steps.reverse();
        Some(steps)
    }
}
