use std::ops::Range;

use super::{Coord, Direction, GridMap};
use crate::error::WindowError;

/// Side length of the lookahead square for grid scale `n`:
/// `min(ceil(sqrt(n)) + 1, 5)`.
pub fn window_side(n: usize) -> usize {
    let mut root = (n as f64).sqrt() as usize;
    while root * root < n {
        root += 1;
    }
    while root > 0 && (root - 1) * (root - 1) >= n {
        root -= 1;
    }
    (root + 1).min(5)
}

/// Lookahead square in front of a candidate move.
///
/// The square contains the candidate cell on its edge nearest the mover and
/// extends away from it along the move direction. For axis moves the square
/// is centered across the move (the extra row/column of an even side goes to
/// the positive side). Cells outside the map are clipped, so the window is
/// always a rectangle of in-bounds cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionWindow {
    pub anchor: Coord,
    pub direction: Direction,
    pub side: usize,
    rows: Range<usize>,
    cols: Range<usize>,
}

impl PredictionWindow {
    pub fn rows(&self) -> Range<usize> {
        self.rows.clone()
    }

    pub fn cols(&self) -> Range<usize> {
        self.cols.clone()
    }

    /// Number of in-bounds cells (`mS`).
    pub fn len(&self) -> usize {
        self.rows.len() * self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, at: Coord) -> bool {
        self.rows.contains(&at.row) && self.cols.contains(&at.col)
    }

    /// Window cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Coord> + '_ {
        self.rows.clone().flat_map(move |r| self.cols.clone().map(move |c| Coord::new(r, c)))
    }
}

// Signed span of one axis of the window, before clipping.
fn span(anchor: usize, step: isize, side: usize) -> (isize, isize) {
    let a = anchor as isize;
    let s = side as isize;
    match step {
        1 => (a, a + s - 1),
        -1 => (a - s + 1, a),
        _ => (a - (s - 1) / 2, a + s / 2),
    }
}

fn clip(lo: isize, hi: isize, len: usize) -> Range<usize> {
    let lo = lo.max(0) as usize;
    let hi = (hi + 1).min(len as isize).max(0) as usize;
    lo..hi.max(lo)
}

/// Prediction window for a move `from -> to` between 8-neighbors.
pub fn prediction_window(map: &GridMap, from: Coord, to: Coord) -> Result<PredictionWindow, WindowError> {
    if from == to {
        return Err(WindowError::SameCell(from));
    }
    if !map.in_bounds(from) || !map.in_bounds(to) {
        return Err(WindowError::OutOfBounds);
    }
    let direction = Direction::between(from, to).ok_or(WindowError::NotAdjacent { from, to })?;
    Ok(window_for(map, to, direction))
}

/// Window anchored at `anchor` facing `direction`; no adjacency checks.
pub(crate) fn window_for(map: &GridMap, anchor: Coord, direction: Direction) -> PredictionWindow {
    let side = window_side(map.scale());
    let (dr, dc) = direction.delta();
    let (r0, r1) = span(anchor.row, dr, side);
    let (c0, c1) = span(anchor.col, dc, side);
    PredictionWindow {
        anchor,
        direction,
        side,
        rows: clip(r0, r1, map.height()),
        cols: clip(c0, c1, map.width()),
    }
}

/// Connected blocking terrain inside a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ObstacleStats {
    /// Number of 8-connected components of obstacle/river cells (`Znum`).
    pub components: usize,
    /// Total obstacle/river cells (`Zdx`).
    pub cells: usize,
}

/// Counts blocking components and cells, with connectivity restricted to the
/// window.
pub fn obstacle_stats(map: &GridMap, window: &PredictionWindow) -> ObstacleStats {
    let (rows, cols) = (window.rows(), window.cols());
    let w = cols.len();
    let local = |at: Coord| (at.row - rows.start) * w + (at.col - cols.start);
    let mut blocked = vec![false; window.len()];
    for at in window.cells() {
        blocked[local(at)] = map.class(at).is_blocking();
    }
    let mut seen = vec![false; blocked.len()];
    let mut stats = ObstacleStats::default();
    let mut stack = Vec::new();
    for seed in window.cells() {
        let i = local(seed);
        if !blocked[i] || seen[i] {
            continue;
        }
        stats.components += 1;
        seen[i] = true;
        stack.push(seed);
        while let Some(at) = stack.pop() {
            stats.cells += 1;
            for d in Direction::ALL {
                let Some(next) = map.step(at, d).filter(|&n| window.contains(n)) else {
                    continue;
                };
                let j = local(next);
                if blocked[j] && !seen[j] {
                    seen[j] = true;
                    stack.push(next);
                }
            }
        }
    }
    stats
}
