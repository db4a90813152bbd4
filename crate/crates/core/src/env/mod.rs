//! The robot's world: a 4-connected grid with at most one observation per cell,
//! one-way (lower-level) regions that can be entered but not left, and unit step
//! weights unless overridden.

mod generate;
mod sensing;

pub use generate::{free_route_exists, random_map, MapGenConfig, DEFAULT_REJECTION_CAP};
pub use sensing::{frontiers, info_gain, sense, KnownSet};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scltl::{Atom, Letter, ObservationSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("line {line}: expected {expected} columns, found {found}")]
    Dimension { line: usize, expected: usize, found: usize },
    #[error("expected {expected} grid rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("line {line}: character `{ch}` is not in the legend")]
    UnknownLegend { line: usize, ch: char },
    #[error("missing `start` line")]
    MissingStart,
    #[error("start cell ({0}, {1}) is outside the grid")]
    StartOutOfBounds(usize, usize),
    #[error("no valid map after {attempts} attempts (seed {seed})")]
    RejectionCap { attempts: usize, seed: u64 },
    #[error("invalid generator parameters: {0}")]
    Params(String),
}

/// A grid cell. Ordering is row-major, which is what every tie-break uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(col: usize, row: usize) -> Self {
        Self { row, col }
    }

    pub fn manhattan(self, other: Cell) -> usize {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    Up,
    Down,
    Right,
    Left,
    Stay,
}

impl Action {
    pub const ALL: [Action; 5] = [Action::Up, Action::Down, Action::Right, Action::Left, Action::Stay];
    pub const MOVES: [Action; 4] = [Action::Up, Action::Down, Action::Right, Action::Left];

    fn offset(self) -> (isize, isize) {
        match self {
            Action::Up => (0, -1),
            Action::Down => (0, 1),
            Action::Right => (1, 0),
            Action::Left => (-1, 0),
            Action::Stay => (0, 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    width: usize,
    height: usize,
    start: Cell,
    alphabet: ObservationSet,
    labels: Vec<Option<Atom>>,
    one_way: Vec<bool>,
    one_way_label: Option<Atom>,
    step_cost: Vec<u32>,
    legend: BTreeMap<char, String>,
    region_chars: Vec<char>,
    glyphs: Vec<char>,
}

impl GridMap {
    /// Builds a map from per-cell labels (row-major) and a one-way region mask.
    pub fn new(
        width: usize,
        height: usize,
        start: Cell,
        alphabet: ObservationSet,
        labels: Vec<Option<Atom>>,
        one_way: Vec<bool>,
    ) -> Result<Self, MapError> {
        if width == 0 || height == 0 {
            return Err(MapError::Params("grid dimensions must be positive".into()));
        }
        if labels.len() != width * height || one_way.len() != width * height {
            return Err(MapError::Params("label or region mask has the wrong size".into()));
        }
        if start.col >= width || start.row >= height {
            return Err(MapError::StartOutOfBounds(start.col, start.row));
        }
        if labels.iter().flatten().any(|a| a.index() >= alphabet.len()) {
            return Err(MapError::Params("label outside the alphabet".into()));
        }
        let one_way_label = alphabet.atom("l");
        let mut map = Self {
            width,
            height,
            start,
            alphabet,
            labels,
            one_way,
            one_way_label,
            step_cost: vec![1; width * height],
            legend: BTreeMap::new(),
            region_chars: Vec::new(),
            glyphs: Vec::new(),
        };
        map.derive_glyphs();
        Ok(map)
    }

    /// Assigns display characters: upper-case initial of the observation, lower-case
    /// when the cell lies in a one-way region but carries another observation.
    fn derive_glyphs(&mut self) {
        let mut legend = BTreeMap::new();
        let mut region_chars = Vec::new();
        let mut glyphs = Vec::with_capacity(self.labels.len());
        let mut used: BTreeMap<(Option<Atom>, bool), char> = BTreeMap::new();
        for i in 0..self.labels.len() {
            let label = self.labels[i];
            let region = self.one_way[i];
            let Some(atom) = label else {
                if region {
                    // unlabeled region cells still need a legend entry; they are rare
                    glyphs.push('#');
                    legend.entry('#').or_insert_with(String::new);
                    if !region_chars.contains(&'#') {
                        region_chars.push('#');
                    }
                } else {
                    glyphs.push('.');
                }
                continue;
            };
            let key = (Some(atom), region);
            let ch = *used.entry(key).or_insert_with(|| {
                let name = self.alphabet.name(atom);
                let first = name.chars().next().unwrap();
                let is_region_label = Some(atom) == self.one_way_label;
                let mut ch = if region && !is_region_label { first } else { first.to_ascii_uppercase() };
                // resolve clashes between observations sharing an initial
                let mut alt = b'A';
                while legend.get(&ch).is_some_and(|n: &String| n != name) {
                    ch = alt as char;
                    alt += 1;
                }
                legend.insert(ch, name.to_owned());
                ch
            });
            if region && !region_chars.contains(&ch) {
                region_chars.push(ch);
            }
            glyphs.push(ch);
        }
        region_chars.sort_unstable();
        self.legend = legend;
        self.region_chars = region_chars;
        self.glyphs = glyphs;
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn num_cells(&self) -> usize {
        self.width * self.height
    }

    pub fn start(&self) -> Cell {
        self.start
    }

    pub fn alphabet(&self) -> &ObservationSet {
        &self.alphabet
    }

    pub fn one_way_label(&self) -> Option<Atom> {
        self.one_way_label
    }

    pub fn index(&self, c: Cell) -> usize {
        c.row * self.width + c.col
    }

    pub fn cell(&self, index: usize) -> Cell {
        Cell::new(index % self.width, index / self.width)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.num_cells()).map(|i| self.cell(i))
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.col < self.width && c.row < self.height
    }

    pub fn label(&self, c: Cell) -> Option<Atom> {
        self.labels[self.index(c)]
    }

    pub fn label_name(&self, c: Cell) -> Option<&str> {
        self.label(c).map(|a| self.alphabet.name(a))
    }

    pub fn glyph(&self, c: Cell) -> char {
        self.glyphs[self.index(c)]
    }

    pub fn is_one_way(&self, c: Cell) -> bool {
        self.one_way[self.index(c)]
    }

    pub fn has_one_way_cells(&self) -> bool {
        self.one_way.iter().any(|&b| b)
    }

    /// Weight of any action taken in `c`.
    pub fn step_cost(&self, c: Cell) -> u32 {
        self.step_cost[self.index(c)]
    }

    pub fn set_step_cost(&mut self, c: Cell, cost: u32) {
        assert!(cost > 0, "weights are positive");
        let i = self.index(c);
        self.step_cost[i] = cost;
    }

    /// Undirected 4-neighbours inside the grid, in `Up, Down, Right, Left` order.
    pub fn neighbours(&self, c: Cell) -> impl Iterator<Item = Cell> + '_ {
        Action::MOVES.into_iter().filter_map(move |a| self.offset(c, a))
    }

    fn offset(&self, c: Cell, a: Action) -> Option<Cell> {
        let (dc, dr) = a.offset();
        let col = c.col.checked_add_signed(dc)?;
        let row = c.row.checked_add_signed(dr)?;
        let next = Cell::new(col, row);
        self.contains(next).then_some(next)
    }

    /// The deterministic transition function. Off-grid moves and moves from a one-way
    /// region cell to a cell outside the region are undefined; `Stay` is a self-loop.
    pub fn step(&self, c: Cell, a: Action) -> Option<Cell> {
        let next = self.offset(c, a)?;
        if self.is_one_way(c) && !self.is_one_way(next) {
            return None;
        }
        Some(next)
    }

    /// Per-cell letters over another alphabet, matched by observation name. Observations
    /// the other alphabet does not mention read as the empty letter.
    pub fn letters_over(&self, alphabet: &ObservationSet) -> Vec<Letter> {
        let map: Vec<Option<Atom>> = self.alphabet.names().iter().map(|n| alphabet.atom(n)).collect();
        self.labels
            .iter()
            .map(|l| match l.and_then(|a| map[a.index()]) {
                Some(b) => Letter::single(b),
                None => Letter::EMPTY,
            })
            .collect()
    }

    /// Serializes to the text format read by [`load_map`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "map {} {}", self.width, self.height);
        let _ = writeln!(out, "start {} {}", self.start.col, self.start.row);
        out.push_str("legend");
        for (ch, name) in &self.legend {
            if !name.is_empty() {
                let _ = write!(out, " {ch}={name}");
            }
        }
        out.push('\n');
        if !self.region_chars.is_empty() {
            out.push_str("region");
            for ch in &self.region_chars {
                let _ = write!(out, " {ch}");
            }
            out.push('\n');
        }
        for row in 0..self.height {
            let line: String = (0..self.width).map(|col| self.glyph(Cell::new(col, row))).collect();
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// Parses the map text format:
///
/// ```text
/// map <width> <height>
/// start <col> <row>
/// legend <char>=<obs> ...
/// region <char> ...        (optional)
/// <height rows of width characters>
/// ```
///
/// `.` is an unlabeled cell. Without a `region` line the one-way region is every cell
/// carrying the observation of legend character `L` (or the observation `l`). Blank
/// lines and lines starting with `#` before the grid are ignored.
pub fn load_map(text: &str) -> Result<GridMap, MapError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    let mut header = |what: &str| -> Result<(usize, Vec<String>), MapError> {
        for (n, line) in lines.by_ref() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<String> = line.split_whitespace().map(str::to_owned).collect();
            if parts[0] != what {
                return Err(MapError::Format { line: n, msg: format!("expected `{what}`, found `{}`", parts[0]) });
            }
            return Ok((n, parts[1..].to_vec()));
        }
        Err(MapError::Format { line: 0, msg: format!("missing `{what}` line") })
    };

    let number = |line: usize, s: &str| -> Result<usize, MapError> {
        s.parse().map_err(|_| MapError::Format { line, msg: format!("`{s}` is not a number") })
    };

    let (n, dims) = header("map")?;
    if dims.len() != 2 {
        return Err(MapError::Format { line: n, msg: "expected `map <width> <height>`".into() });
    }
    let (width, height) = (number(n, &dims[0])?, number(n, &dims[1])?);
    if width == 0 || height == 0 {
        return Err(MapError::Format { line: n, msg: "dimensions must be positive".into() });
    }
    let (n, start) = header("start").map_err(|_| MapError::MissingStart)?;
    if start.len() != 2 {
        return Err(MapError::Format { line: n, msg: "expected `start <col> <row>`".into() });
    }
    let start = Cell::new(number(n, &start[0])?, number(n, &start[1])?);
    let (n, entries) = header("legend")?;
    let mut legend: BTreeMap<char, String> = BTreeMap::new();
    for e in &entries {
        let mut chars = e.chars();
        let (Some(ch), Some('=')) = (chars.next(), chars.next()) else {
            return Err(MapError::Format { line: n, msg: format!("bad legend entry `{e}`") });
        };
        let name: String = chars.collect();
        if ch == '.' || ch.is_whitespace() {
            return Err(MapError::Format { line: n, msg: "`.` is reserved for unlabeled cells".into() });
        }
        if ObservationSet::new([name.as_str()]).is_err() {
            return Err(MapError::Format { line: n, msg: format!("invalid observation `{name}`") });
        }
        legend.insert(ch, name);
    }
    let alphabet = ObservationSet::new(legend.values().cloned().collect::<std::collections::BTreeSet<_>>())
        .map_err(|e| MapError::Format { line: n, msg: e.to_string() })?;

    // optional region line, then the grid
    let mut rest: Vec<(usize, &str)> = lines.filter(|(_, l)| !l.trim().is_empty()).collect();
    let mut region_chars: Option<Vec<char>> = None;
    if let Some(&(n, line)) = rest.first() {
        if let Some(list) = line.strip_prefix("region") {
            if list.is_empty() || list.starts_with(' ') {
                let mut chars = Vec::new();
                for tok in list.split_whitespace() {
                    let mut it = tok.chars();
                    match (it.next(), it.next()) {
                        (Some(c), None) if c == '#' || legend.contains_key(&c) => chars.push(c),
                        _ => return Err(MapError::Format { line: n, msg: format!("bad region entry `{tok}`") }),
                    }
                }
                region_chars = Some(chars);
                rest.remove(0);
            }
        }
    }
    if rest.len() != height {
        return Err(MapError::RowCount { expected: height, found: rest.len() });
    }
    let one_way_label = legend.get(&'L').and_then(|n| alphabet.atom(n)).or_else(|| alphabet.atom("l"));
    let mut labels = Vec::with_capacity(width * height);
    let mut one_way = Vec::with_capacity(width * height);
    let mut glyphs = Vec::with_capacity(width * height);
    for &(n, line) in &rest {
        let found = line.chars().count();
        if found != width {
            return Err(MapError::Dimension { line: n, expected: width, found });
        }
        for ch in line.chars() {
            let label = match ch {
                '.' => None,
                '#' if region_chars.as_ref().is_some_and(|r| r.contains(&'#')) => None,
                _ => match legend.get(&ch) {
                    Some(name) => alphabet.atom(name),
                    None => return Err(MapError::UnknownLegend { line: n, ch }),
                },
            };
            let region = match &region_chars {
                Some(chars) => chars.contains(&ch),
                None => label.is_some() && label == one_way_label,
            };
            labels.push(label);
            one_way.push(region);
            glyphs.push(ch);
        }
    }
    if start.col >= width || start.row >= height {
        return Err(MapError::StartOutOfBounds(start.col, start.row));
    }
    let region_chars = region_chars.unwrap_or_else(|| {
        legend
            .iter()
            .filter(|(_, name)| one_way_label.is_some_and(|a| alphabet.atom(name) == Some(a)))
            .map(|(&c, _)| c)
            .collect()
    });
    let mut map = GridMap::new(width, height, start, alphabet, labels, one_way)?;
    map.one_way_label = one_way_label;
    map.legend = legend;
    map.region_chars = region_chars;
    map.region_chars.sort_unstable();
    map.glyphs = glyphs;
    Ok(map)
}
