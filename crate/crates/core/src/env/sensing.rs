use super::{Cell, GridMap};
use crate::scltl::Atom;

/// The cells whose labels the robot has revealed so far.
///
/// Sensing and frontier adjacency use undirected 4-adjacency hops: sensors see terrain
/// whether or not the robot could drive there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnownSet {
    revealed: Vec<Option<Option<Atom>>>,
    count: usize,
}

impl KnownSet {
    pub fn empty(map: &GridMap) -> Self {
        Self { revealed: vec![None; map.num_cells()], count: 0 }
    }

    /// A set in which every cell of `map` is known.
    pub fn full(map: &GridMap) -> Self {
        Self { revealed: map.cells().map(|c| Some(map.label(c))).collect(), count: map.num_cells() }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn is_known(&self, map: &GridMap, c: Cell) -> bool {
        self.revealed[map.index(c)].is_some()
    }

    /// `None` for unknown cells, `Some(label)` once revealed.
    pub fn label(&self, map: &GridMap, c: Cell) -> Option<Option<Atom>> {
        self.revealed[map.index(c)]
    }

    pub fn known_cells<'a>(&'a self, map: &'a GridMap) -> impl Iterator<Item = Cell> + 'a {
        map.cells().filter(move |&c| self.is_known(map, c))
    }

    /// Reveals every cell within `h` hops of `x`; returns the newly revealed cells in
    /// row-major order.
    pub fn sense(&mut self, map: &GridMap, x: Cell, h: usize) -> Vec<Cell> {
        let mut fresh = Vec::new();
        for c in diamond(map, x, h) {
            let i = map.index(c);
            if self.revealed[i].is_none() {
                self.revealed[i] = Some(map.label(c));
                self.count += 1;
                fresh.push(c);
            }
        }
        fresh
    }
}

/// Cells within Manhattan distance `h` of `x`, clipped to the grid, row-major.
pub(crate) fn diamond(map: &GridMap, x: Cell, h: usize) -> impl Iterator<Item = Cell> + '_ {
    let rows = x.row.saturating_sub(h)..=(x.row + h).min(map.height() - 1);
    rows.flat_map(move |row| {
        let rest = h - row.abs_diff(x.row);
        let cols = x.col.saturating_sub(rest)..=(x.col + rest).min(map.width() - 1);
        cols.map(move |col| Cell::new(col, row))
    })
}

/// Functional form of [`KnownSet::sense`].
pub fn sense(map: &GridMap, x: Cell, h: usize, known: &KnownSet) -> KnownSet {
    let mut next = known.clone();
    next.sense(map, x, h);
    next
}

/// Known cells with at least one unknown 4-neighbour, row-major.
pub fn frontiers(map: &GridMap, known: &KnownSet) -> Vec<Cell> {
    known.known_cells(map).filter(|&c| map.neighbours(c).any(|n| !known.is_known(map, n))).collect()
}

/// Number of unknown cells that visiting `x` with sensing radius `h` would reveal.
pub fn info_gain(map: &GridMap, x: Cell, h: usize, known: &KnownSet) -> usize {
    diamond(map, x, h).filter(|&c| !known.is_known(map, c)).count()
}
