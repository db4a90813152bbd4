use std::collections::VecDeque;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Cell, GridMap, MapError};
use crate::scltl::{Atom, ObservationSet};

pub const DEFAULT_REJECTION_CAP: usize = 10_000;

/// Parameters of the random lower-level-region maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapGenConfig {
    pub size: usize,
    pub n_blocks: usize,
    pub block_size: usize,
    pub n_person: usize,
    pub n_exit: usize,
    pub start: Cell,
    pub rejection_cap: usize,
}

impl MapGenConfig {
    pub fn new(size: usize, n_blocks: usize) -> Self {
        Self {
            size,
            n_blocks,
            block_size: 5,
            n_person: 2,
            n_exit: 2,
            start: Cell::new(0, 0),
            rejection_cap: DEFAULT_REJECTION_CAP,
        }
    }
}

/// `size × size` map with `n_blocks` lower-level blocks, two person cells and two exits,
/// starting in the top-left corner. See [`MapGenConfig`] for the knobs.
pub fn random_map(size: usize, n_blocks: usize, seed: u64) -> Result<GridMap, MapError> {
    MapGenConfig::new(size, n_blocks).generate(seed)
}

impl MapGenConfig {
    /// Blocks are fully inside the grid and never cover the start cell; they may
    /// overlap each other. Person and exit cells are distinct non-start cells chosen
    /// uniformly; a person or exit inside a block keeps its own label but belongs to the
    /// block's one-way region. Maps are resampled until [`free_route_exists`] holds.
    pub fn generate(&self, seed: u64) -> Result<GridMap, MapError> {
        let size = self.size;
        if size < 10 {
            return Err(MapError::Params(format!("size {size} is below 10")));
        }
        if self.block_size == 0 || self.block_size > size {
            return Err(MapError::Params("block does not fit the grid".into()));
        }
        let cells = size * size;
        if self.n_person + self.n_exit >= cells {
            return Err(MapError::Params("too many labelled cells".into()));
        }
        let alphabet = ObservationSet::new(crate::RESCUE_ALPHABET).expect("static alphabet");
        let lower = alphabet.atom("l").unwrap();
        let person = alphabet.atom("p").unwrap();
        let exit = alphabet.atom("s").unwrap();
        let start = self.start;
        let start_index = start.row * size + start.col;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let span = size - self.block_size + 1;
        for _ in 0..self.rejection_cap {
            let mut labels: Vec<Option<Atom>> = vec![None; cells];
            let mut one_way = vec![false; cells];
            for _ in 0..self.n_blocks {
                let (c0, r0) = loop {
                    let c0 = rng.gen_range(0..span);
                    let r0 = rng.gen_range(0..span);
                    let covers_start = (c0..c0 + self.block_size).contains(&start.col)
                        && (r0..r0 + self.block_size).contains(&start.row);
                    if !covers_start {
                        break (c0, r0);
                    }
                };
                for r in r0..r0 + self.block_size {
                    for c in c0..c0 + self.block_size {
                        labels[r * size + c] = Some(lower);
                        one_way[r * size + c] = true;
                    }
                }
            }
            let picks = sample(&mut rng, cells - 1, self.n_person + self.n_exit);
            for (k, i) in picks.into_iter().enumerate() {
                let i = if i >= start_index { i + 1 } else { i };
                labels[i] = Some(if k < self.n_person { person } else { exit });
            }
            let map = GridMap::new(size, size, start, alphabet.clone(), labels, one_way)?;
            if free_route_exists(&map, person, exit) {
                return Ok(map);
            }
        }
        Err(MapError::RejectionCap { attempts: self.rejection_cap, seed })
    }
}

/// Whether a `first` cell outside every one-way region is reachable from the start
/// over non-region cells without crossing a `then` cell, and a `then` cell outside the
/// regions is reachable from it over non-region cells.
pub fn free_route_exists(map: &GridMap, first: Atom, then: Atom) -> bool {
    let free = |c: Cell| !map.is_one_way(c);
    if !free(map.start()) {
        return false;
    }
    let from_start = flood(map, &[map.start()], |c| free(c) && map.label(c) != Some(then));
    let firsts: Vec<Cell> = map.cells().filter(|&c| from_start[map.index(c)] && map.label(c) == Some(first)).collect();
    if firsts.is_empty() {
        return false;
    }
    let onward = flood(map, &firsts, free);
    map.cells().any(|c| onward[map.index(c)] && map.label(c) == Some(then))
}

/// Breadth-first flood from `seeds` over cells accepted by `pass`. A cell that fails
/// `pass` is still marked when reached (it may be a goal) but not expanded.
fn flood(map: &GridMap, seeds: &[Cell], pass: impl Fn(Cell) -> bool) -> Vec<bool> {
    let mut seen = vec![false; map.num_cells()];
    let mut queue = VecDeque::new();
    for &s in seeds {
        seen[map.index(s)] = true;
        queue.push_back(s);
    }
    while let Some(c) = queue.pop_front() {
        if !pass(c) {
            continue;
        }
        for n in map.neighbours(c) {
            if !seen[map.index(n)] && !map.is_one_way(n) {
                seen[map.index(n)] = true;
                queue.push_back(n);
            }
        }
    }
    seen
}
