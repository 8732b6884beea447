use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::grid::Coord;

/// A map document (or programmatic map) violated the map format.
///
/// `line`/`col` are 1-based; structural errors found after scanning the whole
/// document point at line 1, column 1, or at 0:0 when built programmatically.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct MapError {
    pub line: usize,
    pub col: usize,
    pub kind: MapErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapErrorKind {
    #[error("empty map")]
    Empty,
    #[error("ragged row: expected {expected} cells, found {got}")]
    Ragged { expected: usize, got: usize },
    #[error("unknown character {0:?}")]
    UnknownChar(char),
    #[error("missing start 'S'")]
    MissingStart,
    #[error("missing goal 'G'")]
    MissingGoal,
    #[error("duplicate start")]
    DuplicateStart,
    #[error("duplicate goal")]
    DuplicateGoal,
    #[error("{what} lies on a non-traversable cell")]
    Blocked { what: &'static str },
    #[error("{what} {at} is out of bounds")]
    OutOfBounds { what: &'static str, at: Coord },
    #[error("start and goal coincide")]
    StartIsGoal,
    #[error("map is {width}x{height}; both sides must be at least 2")]
    TooSmall { width: usize, height: usize },
    #[error("expected {expected} cells, got {got}")]
    CellCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindowError {
    #[error("window for a move from {0} to itself")]
    SameCell(Coord),
    #[error("{from} and {to} are not 8-neighbors")]
    NotAdjacent { from: Coord, to: Coord },
    #[error("window coordinates out of bounds")]
    OutOfBounds,
}

/// An invalid tunable.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid {field}: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError { field: field.into(), reason: reason.into() }
    }
}

/// Failure to produce a plan at all (as opposed to a single ant dying).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("goal unreachable from start")]
    Unreachable,
    #[error("no ant reached the goal in any generation")]
    NoPathFound,
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Degenerate Bayesian evidence: every prior-likelihood product is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("all prior x likelihood products are zero")]
pub struct DegenerateEvidence;

/// Errors from the experiment harness and file-level entry points.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Map { path: PathBuf, source: MapError },
    #[error("{path}:{line}: {reason}")]
    Spec { path: PathBuf, line: usize, reason: String },
    #[error("unknown sweep parameter {0:?}")]
    UnknownParameter(String),
    #[error("sweep needs at least one value")]
    EmptySweep,
    #[error("empty intensity grid")]
    EmptyGrid,
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
