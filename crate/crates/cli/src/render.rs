//! Text and SVG renderings of an episode.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;
use tlfe::env::{Cell, GridMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Ascii,
    Svg,
}

impl FromStr for Format {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ascii" => Ok(Format::Ascii),
            "svg" => Ok(Format::Svg),
            other => Err(RenderError::Format(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("unsupported format `{0}` (expected `ascii` or `svg`)")]
    Format(String),
    #[error("trajectory cell ({}, {}) is outside the map", .0.col, .0.row)]
    OutOfBounds(Cell),
    #[error("step {step} is past the last step {last}")]
    Step { step: usize, last: usize },
    #[error("reveal timeline has {found} entries, the map has {expected} cells")]
    Timeline { expected: usize, found: usize },
}

/// Where the robot went and when each cell was first sensed.
#[derive(Debug, Clone, Copy)]
pub struct Timeline<'a> {
    pub trajectory: &'a [Cell],
    pub reveal_step: &'a [Option<usize>],
}

impl Timeline<'_> {
    fn check(&self, map: &GridMap) -> Result<usize, RenderError> {
        if self.reveal_step.len() != map.num_cells() {
            return Err(RenderError::Timeline { expected: map.num_cells(), found: self.reveal_step.len() });
        }
        if let Some(&c) = self.trajectory.iter().find(|&&c| !map.contains(c)) {
            return Err(RenderError::OutOfBounds(c));
        }
        Ok(self.trajectory.len().saturating_sub(1))
    }

    fn known(&self, map: &GridMap, c: Cell, step: usize) -> bool {
        self.reveal_step[map.index(c)].is_some_and(|r| r <= step)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderFrame {
    pub step: usize,
    pub rows: Vec<String>,
}

/// `?` unknown, map glyphs for known cells, `*` trail, `@` robot.
pub fn frame(map: &GridMap, tl: Timeline<'_>, step: usize) -> Result<RenderFrame, RenderError> {
    let last = tl.check(map)?;
    if step > last {
        return Err(RenderError::Step { step, last });
    }
    let mut grid: Vec<Vec<char>> = (0..map.height())
        .map(|row| {
            (0..map.width())
                .map(|col| {
                    let c = Cell::new(col, row);
                    if tl.known(map, c, step) {
                        map.glyph(c)
                    } else {
                        '?'
                    }
                })
                .collect()
        })
        .collect();
    for &c in &tl.trajectory[..step] {
        grid[c.row][c.col] = '*';
    }
    let at = tl.trajectory[step];
    grid[at.row][at.col] = '@';
    Ok(RenderFrame { step, rows: grid.into_iter().map(String::from_iter).collect() })
}

/// Renders the requested steps as ASCII frames, or the final state as one SVG document.
/// An empty `steps` list means the last step.
pub fn render_trajectory(
    map: &GridMap,
    tl: Timeline<'_>,
    format: Format,
    steps: &[usize],
) -> Result<String, RenderError> {
    let last = tl.check(map)?;
    match format {
        Format::Ascii => {
            let mut out = String::new();
            let wanted = if steps.is_empty() { vec![last] } else { steps.to_vec() };
            for (i, &step) in wanted.iter().enumerate() {
                let f = frame(map, tl, step)?;
                if i > 0 {
                    out.push('\n');
                }
                let _ = writeln!(out, "step {step}");
                for row in f.rows {
                    out.push_str(&row);
                    out.push('\n');
                }
            }
            Ok(out)
        }
        Format::Svg => Ok(svg(map, tl, last)),
    }
}

const CELL: usize = 20;

fn fill(map: &GridMap, c: Cell) -> &'static str {
    match map.label_name(c) {
        Some("p") => "#3cb44b",
        Some("s") => "#4363d8",
        _ if map.is_one_way(c) => "#f2d13a",
        Some(_) => "#b99fe0",
        None => "#ffffff",
    }
}

fn svg(map: &GridMap, tl: Timeline<'_>, step: usize) -> String {
    let (w, h) = (map.width() * CELL, map.height() * CELL);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(out, "<title>trajectory after {step} steps</title>");
    for c in map.cells() {
        let colour = if tl.known(map, c, step) { fill(map, c) } else { "#9a9a9a" };
        let _ = writeln!(
            out,
            r##"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{colour}" stroke="#666" stroke-width="0.5"/>"##,
            c.col * CELL,
            c.row * CELL
        );
    }
    let centre = |c: Cell| (c.col * CELL + CELL / 2, c.row * CELL + CELL / 2);
    let points: Vec<String> = tl.trajectory[..=step]
        .iter()
        .map(|&c| {
            let (x, y) = centre(c);
            format!("{x},{y}")
        })
        .collect();
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="#d62728" stroke-width="3" stroke-linejoin="round"/>"##,
        points.join(" ")
    );
    let (sx, sy) = centre(tl.trajectory[0]);
    let _ = writeln!(out, r##"<rect x="{}" y="{}" width="10" height="10" fill="#d62728"/>"##, sx - 5, sy - 5);
    let (rx, ry) = centre(tl.trajectory[step]);
    let _ = writeln!(out, r##"<circle cx="{rx}" cy="{ry}" r="6" fill="#111"/>"##);
    out.push_str("</svg>\n");
    out
}
