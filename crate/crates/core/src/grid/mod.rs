//! Static grid environment: cell classes, the ASCII map format, and
//! 8-connected motion.

pub(crate) mod window;

pub use window::{obstacle_stats, prediction_window, window_side, ObstacleStats, PredictionWindow};

use std::fmt;
use std::str::FromStr;

use crate::error::{MapError, MapErrorKind};

/// Terrain class of a single cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellClass {
    Obstacle,
    Road,
    Crop,
    River,
}

impl CellClass {
    /// Road and crop cells can be driven over; obstacles and rivers cannot.
    pub fn is_traversable(self) -> bool {
        matches!(self, CellClass::Road | CellClass::Crop)
    }

    /// Cells that count toward `Znum`/`Zdx` in a prediction window.
    pub fn is_blocking(self) -> bool {
        !self.is_traversable()
    }

    pub fn symbol(self) -> char {
        match self {
            CellClass::Obstacle => '#',
            CellClass::Road => '.',
            CellClass::Crop => 'c',
            CellClass::River => '~',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CellClass::Obstacle => "obstacle",
            CellClass::Road => "road",
            CellClass::Crop => "crop",
            CellClass::River => "river",
        }
    }
}

/// Cell coordinate, `(row, col)` with row 0 at the top of the map text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub row: usize,
    pub col: usize,
}

impl Coord {
    pub const fn new(row: usize, col: usize) -> Self {
        Coord { row, col }
    }

    /// Euclidean distance between cell centers.
    pub fn distance(self, other: Coord) -> f64 {
        let dr = self.row as f64 - other.row as f64;
        let dc = self.col as f64 - other.col as f64;
        dr.hypot(dc)
    }

    /// Chebyshev (king-move) distance.
    pub fn chebyshev(self, other: Coord) -> usize {
        self.row.abs_diff(other.row).max(self.col.abs_diff(other.col))
    }

    fn offset(self, dr: isize, dc: isize) -> Option<Coord> {
        Some(Coord {
            row: self.row.checked_add_signed(dr)?,
            col: self.col.checked_add_signed(dc)?,
        })
    }
}

impl From<(usize, usize)> for Coord {
    fn from((row, col): (usize, usize)) -> Self {
        Coord { row, col }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// One of the eight compass directions, clockwise from north.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
}

impl Direction {
    pub const ALL: [Direction; 8] = [
        Direction::N,
        Direction::NE,
        Direction::E,
        Direction::SE,
        Direction::S,
        Direction::SW,
        Direction::W,
        Direction::NW,
    ];

    /// `(d_row, d_col)` unit step.
    pub fn delta(self) -> (isize, isize) {
        match self {
            Direction::N => (-1, 0),
            Direction::NE => (-1, 1),
            Direction::E => (0, 1),
            Direction::SE => (1, 1),
            Direction::S => (1, 0),
            Direction::SW => (1, -1),
            Direction::W => (0, -1),
            Direction::NW => (-1, -1),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_diagonal(self) -> bool {
        let (dr, dc) = self.delta();
        dr != 0 && dc != 0
    }

    pub fn opposite(self) -> Direction {
        Direction::ALL[(self.index() + 4) % 8]
    }

    /// Direction of a single king move from `from` to `to`, if they are
    /// distinct 8-neighbors.
    pub fn between(from: Coord, to: Coord) -> Option<Direction> {
        let dr = to.row as isize - from.row as isize;
        let dc = to.col as isize - from.col as isize;
        Direction::ALL.into_iter().find(|d| d.delta() == (dr, dc))
    }

    pub fn step_cost(self) -> f64 {
        if self.is_diagonal() {
            std::f64::consts::SQRT_2
        } else {
            1.0
        }
    }
}

/// Immutable grid map with a start and a goal cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    width: usize,
    height: usize,
    cells: Vec<CellClass>,
    start: Coord,
    goal: Coord,
}

impl GridMap {
    /// Builds a map from row-major cells, checking every structural invariant.
    pub fn new(
        width: usize,
        height: usize,
        cells: Vec<CellClass>,
        start: Coord,
        goal: Coord,
    ) -> Result<Self, MapError> {
        let bad = |kind| Err(MapError { line: 0, col: 0, kind });
        if width < 2 || height < 2 {
            return bad(MapErrorKind::TooSmall { width, height });
        }
        if cells.len() != width * height {
            return bad(MapErrorKind::CellCount { expected: width * height, got: cells.len() });
        }
        let map = GridMap { width, height, cells, start, goal };
        for (what, at) in [("start", start), ("goal", goal)] {
            if !map.in_bounds(at) {
                return bad(MapErrorKind::OutOfBounds { what, at });
            }
            if !map.class(at).is_traversable() {
                return bad(MapErrorKind::Blocked { what });
            }
        }
        if start == goal {
            return bad(MapErrorKind::StartIsGoal);
        }
        Ok(map)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Grid scale `n` of an `n×n` environment; `max(width, height)` for
    /// rectangular maps.
    pub fn scale(&self) -> usize {
        self.width.max(self.height)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn start(&self) -> Coord {
        self.start
    }

    pub fn goal(&self) -> Coord {
        self.goal
    }

    pub fn cells(&self) -> &[CellClass] {
        &self.cells
    }

    pub fn in_bounds(&self, at: Coord) -> bool {
        at.row < self.height && at.col < self.width
    }

    pub fn index(&self, at: Coord) -> usize {
        debug_assert!(self.in_bounds(at), "{at} out of bounds");
        at.row * self.width + at.col
    }

    pub fn coord(&self, index: usize) -> Coord {
        Coord::new(index / self.width, index % self.width)
    }

    pub fn class(&self, at: Coord) -> CellClass {
        self.cells[self.index(at)]
    }

    pub fn is_traversable(&self, at: Coord) -> bool {
        self.in_bounds(at) && self.class(at).is_traversable()
    }

    /// All coordinates in row-major order.
    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.cells.len()).map(|i| self.coord(i))
    }

    pub fn count(&self, class: CellClass) -> usize {
        self.cells.iter().filter(|&&c| c == class).count()
    }

    /// In-bounds cell one step from `at` in `dir`.
    pub fn step(&self, at: Coord, dir: Direction) -> Option<Coord> {
        let (dr, dc) = dir.delta();
        at.offset(dr, dc).filter(|&c| self.in_bounds(c))
    }

    /// Whether a single move from `at` in `dir` is legal: both cells are
    /// traversable and a diagonal does not cut between two blocked cells.
    pub fn can_move(&self, at: Coord, dir: Direction) -> bool {
        let Some(to) = self.step(at, dir) else {
            return false;
        };
        if !self.is_traversable(at) || !self.is_traversable(to) {
            return false;
        }
        if dir.is_diagonal() {
            let (dr, dc) = dir.delta();
            let vertical = at.offset(dr, 0).is_some_and(|c| self.is_traversable(c));
            let horizontal = at.offset(0, dc).is_some_and(|c| self.is_traversable(c));
            if !vertical && !horizontal {
                return false;
            }
        }
        true
    }

    /// Traversable 8-neighbors of `at` with their step costs.
    pub fn neighbors(&self, at: Coord) -> Vec<(Coord, f64)> {
        Direction::ALL
            .into_iter()
            .filter(|&d| self.can_move(at, d))
            .map(|d| (self.step(at, d).expect("checked by can_move"), d.step_cost()))
            .collect()
    }

    /// Whether the goal can be reached from the start at all.
    pub fn goal_reachable(&self) -> bool {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![self.start];
        seen[self.index(self.start)] = true;
        while let Some(at) = stack.pop() {
            if at == self.goal {
                return true;
            }
            for (next, _) in self.neighbors(at) {
                let i = self.index(next);
                if !seen[i] {
                    seen[i] = true;
                    stack.push(next);
                }
            }
        }
        false
    }

    /// Renders the map back into its ASCII document form.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for at in self.coords() {
            let ch = if at == self.start {
                'S'
            } else if at == self.goal {
                'G'
            } else {
                self.class(at).symbol()
            };
            out.push(ch);
            if at.col + 1 == self.width {
                out.push('\n');
            }
        }
        out
    }
}

impl fmt::Display for GridMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for GridMap {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_map(s)
    }
}

/// Parses an ASCII map document.
///
/// `#` obstacle, `.` road, `c` crop, `~` river, `S` start, `G` goal. Start and
/// goal cells are roads. Rows must all have the same width; a final newline is
/// optional. Errors carry a 1-based line and column.
pub fn parse_map(text: &str) -> Result<GridMap, MapError> {
    let err = |line: usize, col: usize, kind| MapError { line, col, kind };
    let lines: Vec<&str> = text.strip_suffix('\n').unwrap_or(text).split('\n').collect();
    if text.is_empty() {
        return Err(err(1, 1, MapErrorKind::Empty));
    }
    let width = lines[0].chars().count();
    let height = lines.len();
    let mut cells = Vec::with_capacity(width * height);
    let mut start = None;
    let mut goal = None;
    for (row, line) in lines.iter().enumerate() {
        let len = line.chars().count();
        if len != width {
            return Err(err(row + 1, len.min(width) + 1, MapErrorKind::Ragged { expected: width, got: len }));
        }
        for (col, ch) in line.chars().enumerate() {
            let class = match ch {
                '#' => CellClass::Obstacle,
                '.' => CellClass::Road,
                'c' => CellClass::Crop,
                '~' => CellClass::River,
                'S' | 'G' => {
                    let slot = if ch == 'S' { &mut start } else { &mut goal };
                    if slot.is_some() {
                        let kind = if ch == 'S' { MapErrorKind::DuplicateStart } else { MapErrorKind::DuplicateGoal };
                        return Err(err(row + 1, col + 1, kind));
                    }
                    *slot = Some(Coord::new(row, col));
                    CellClass::Road
                }
                other => return Err(err(row + 1, col + 1, MapErrorKind::UnknownChar(other))),
            };
            cells.push(class);
        }
    }
    let start = start.ok_or(err(0, 0, MapErrorKind::MissingStart))?;
    let goal = goal.ok_or(err(0, 0, MapErrorKind::MissingGoal))?;
    GridMap::new(width, height, cells, start, goal).map_err(|mut e| {
        if e.line == 0 {
            e.line = 1;
            e.col = 1;
        }
        e
    })
}
