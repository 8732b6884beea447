//! Classic ant colony optimizer on a [`GridMap`].
//!
//! Ants walk from start to goal without revisiting cells, picking each step by
//! roulette over `tau^alpha * eta^beta` where `eta` is the inverse Euclidean
//! distance to the goal. After every generation all pheromone evaporates, then
//! the generation-best and the global-best paths deposit `Q / cost`.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{ConfigError, PlanError};
use crate::grid::{Coord, Direction, GridMap};
use crate::rng::{self, StreamRng};

/// Smallest pheromone value an edge can hold.
pub const PHEROMONE_FLOOR: f64 = 1e-12;

/// Colony tunables. Field names match the command-line flags.
#[derive(Debug, Clone, PartialEq)]
pub struct AcoConfig {
    /// Ants per generation (`M`).
    pub ants: usize,
    /// Generations (`K`).
    pub generations: usize,
    /// Pheromone exponent.
    pub alpha: f64,
    /// Heuristic exponent.
    pub beta: f64,
    /// Deposit constant (`Q`).
    pub q: f64,
    /// Fraction of pheromone lost per generation, in (0,1).
    pub evaporation: f64,
    pub initial_pheromone: f64,
    /// Step budget per ant; `None` means `4 * width * height`.
    pub max_steps: Option<usize>,
    pub seed: u64,
}

impl Default for AcoConfig {
    fn default() -> Self {
        AcoConfig {
            ants: 50,
            generations: 100,
            alpha: 1.0,
            beta: 2.0,
            q: 1.0,
            evaporation: 0.5,
            initial_pheromone: 1.0,
            max_steps: None,
            seed: 0,
        }
    }
}

impl AcoConfig {
    pub fn validate(&self, map: &GridMap) -> Result<(), ConfigError> {
        if self.ants == 0 {
            return Err(ConfigError::new("ants", "need at least one ant"));
        }
        if self.generations == 0 {
            return Err(ConfigError::new("generations", "need at least one generation"));
        }
        if !(self.evaporation > 0.0 && self.evaporation < 1.0) {
            return Err(ConfigError::new("evaporation", "must lie in (0,1)"));
        }
        if !(self.initial_pheromone > 0.0) || !self.initial_pheromone.is_finite() {
            return Err(ConfigError::new("initial_pheromone", "must be positive"));
        }
        for (field, v) in [("alpha", self.alpha), ("beta", self.beta), ("q", self.q)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(ConfigError::new(field, "must be a finite non-negative number"));
            }
        }
        if let Some(steps) = self.max_steps {
            if steps < map.len() {
                return Err(ConfigError::new("max_steps", format!("must be at least width*height = {}", map.len())));
            }
        }
        Ok(())
    }

    pub fn step_budget(&self, map: &GridMap) -> usize {
        self.max_steps.unwrap_or(4 * map.len())
    }
}

/// Pheromone on every directed edge between adjacent cells.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneField {
    tau: Vec<f64>,
}

impl PheromoneField {
    pub fn new(map: &GridMap, initial: f64) -> Self {
        PheromoneField { tau: vec![initial.max(PHEROMONE_FLOOR); map.len() * 8] }
    }

    fn slot(map: &GridMap, from: Coord, dir: Direction) -> usize {
        map.index(from) * 8 + dir.index()
    }

    pub fn get(&self, map: &GridMap, from: Coord, dir: Direction) -> f64 {
        self.tau[Self::slot(map, from, dir)]
    }

    pub fn set(&mut self, map: &GridMap, from: Coord, dir: Direction, value: f64) {
        self.tau[Self::slot(map, from, dir)] = value.max(PHEROMONE_FLOOR);
    }

    /// Multiplies every edge by `1 - rate`, flooring at [`PHEROMONE_FLOOR`].
    pub fn evaporate(&mut self, rate: f64) {
        let keep = 1.0 - rate;
        for t in &mut self.tau {
            *t = (*t * keep).max(PHEROMONE_FLOOR);
        }
    }

    /// Adds `amount` to every directed edge of `path`.
    pub fn deposit(&mut self, map: &GridMap, path: &Path, amount: f64) {
        for pair in path.cells.windows(2) {
            let dir = Direction::between(pair[0], pair[1]).expect("path steps are king moves");
            let i = Self::slot(map, pair[0], dir);
            self.tau[i] += amount;
        }
    }

    pub fn min(&self) -> f64 {
        self.tau.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Sum of outgoing pheromone per cell, for heatmaps.
    pub fn cell_totals(&self, map: &GridMap) -> Vec<f64> {
        (0..map.len())
            .map(|i| {
                let at = map.coord(i);
                Direction::ALL.iter().filter(|&&d| map.can_move(at, d)).map(|&d| self.tau[i * 8 + d.index()]).sum()
            })
            .collect()
    }
}

/// Evaporation followed by a `Q / length` deposit from each path.
pub fn update_pheromone(field: &mut PheromoneField, map: &GridMap, paths: &[&Path], config: &AcoConfig) {
    field.evaporate(config.evaporation);
    for p in paths {
        field.deposit(map, p, config.q / p.length);
    }
}

/// An ordered cell sequence with its geometric length.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub cells: Vec<Coord>,
    pub length: f64,
}

impl Path {
    /// Builds a path from consecutive king moves, summing step costs.
    ///
    /// Panics if two consecutive cells are not 8-neighbors.
    pub fn from_cells(cells: Vec<Coord>) -> Self {
        let length = cells
            .windows(2)
            .map(|w| Direction::between(w[0], w[1]).expect("consecutive path cells must be adjacent").step_cost())
            .sum();
        Path { cells, length }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn first(&self) -> Option<Coord> {
        self.cells.first().copied()
    }

    pub fn last(&self) -> Option<Coord> {
        self.cells.last().copied()
    }

    /// Checks every path invariant against `map`.
    pub fn is_valid_on(&self, map: &GridMap) -> bool {
        let mut seen = vec![false; map.len()];
        for &c in &self.cells {
            if !map.is_traversable(c) || std::mem::replace(&mut seen[map.index(c)], true) {
                return false;
            }
        }
        let steps_ok = self.cells.windows(2).all(|w| Direction::between(w[0], w[1]).is_some_and(|d| map.can_move(w[0], d)));
        let len: f64 = self.cells.windows(2).map(|w| w[0].distance(w[1])).sum();
        steps_ok && (len - self.length).abs() <= 1e-9
    }

    /// `step,row,col` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,row,col\n");
        for (i, c) in self.cells.iter().enumerate() {
            let _ = writeln!(out, "{i},{},{}", c.row, c.col);
        }
        out
    }
}

/// One candidate move with its probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub to: Coord,
    pub dir: Direction,
    pub probability: f64,
}

/// The ant has no unvisited traversable neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeadEnd;

/// Heuristic desirability `1 / max(1, dist(cell, goal))`.
pub fn goal_heuristic(map: &GridMap, at: Coord) -> f64 {
    1.0 / at.distance(map.goal()).max(1.0)
}

/// Transition distribution over unvisited neighbors, proportional to
/// `tau^alpha * eta^beta`. `visited` is indexed by cell index.
pub fn transition_prior(
    field: &PheromoneField,
    map: &GridMap,
    alpha: f64,
    beta: f64,
    at: Coord,
    visited: &[bool],
) -> Result<Vec<Candidate>, DeadEnd> {
    let mut out: Vec<Candidate> = Direction::ALL
        .into_iter()
        .filter(|&d| map.can_move(at, d))
        .filter_map(|dir| {
            let to = map.step(at, dir)?;
            if visited[map.index(to)] {
                return None;
            }
            let weight = field.get(map, at, dir).powf(alpha) * goal_heuristic(map, to).powf(beta);
            Some(Candidate { to, dir, probability: weight })
        })
        .collect();
    if out.is_empty() {
        return Err(DeadEnd);
    }
    normalize(&mut out);
    Ok(out)
}

fn normalize(cands: &mut [Candidate]) {
    let total: f64 = cands.iter().map(|c| c.probability).sum();
    if total > 0.0 && total.is_finite() {
        for c in cands.iter_mut() {
            c.probability /= total;
        }
    } else {
        let u = 1.0 / cands.len() as f64;
        for c in cands.iter_mut() {
            c.probability = u;
        }
    }
}

/// Roulette-wheel draw over probabilities summing to one.
pub fn roulette(probabilities: impl IntoIterator<Item = f64>, rng: &mut impl Rng) -> usize {
    let r: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probabilities.into_iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if r < acc {
            return i;
        }
    }
    last
}

/// Walks from start to goal choosing steps with `choose`. A dead-ended ant
/// backs up along its own trail; visited cells stay closed. `None` once the
/// trail is exhausted or `max_steps` moves (back-ups included) are spent.
pub(crate) fn walk<R>(
    map: &GridMap,
    max_steps: usize,
    rng: &mut R,
    mut choose: impl FnMut(Coord, &[bool], &mut R) -> Result<Coord, DeadEnd>,
) -> Option<Path> {
    let mut visited = vec![false; map.len()];
    visited[map.index(map.start())] = true;
    let mut cells = vec![map.start()];
    for _ in 0..max_steps {
        let at = *cells.last()?;
        if at == map.goal() {
            break;
        }
        match choose(at, &visited, rng) {
            Ok(next) => {
                visited[map.index(next)] = true;
                cells.push(next);
            }
            Err(DeadEnd) => {
                cells.pop();
            }
        }
    }
    (cells.last() == Some(&map.goal())).then(|| Path::from_cells(prune_detours(map, &cells)))
}

/// Shortcuts a loop-free walk: from each kept cell, jump to the furthest later
/// cell reachable in one legal move.
pub fn prune_detours(map: &GridMap, cells: &[Coord]) -> Vec<Coord> {
    let mut position = vec![usize::MAX; map.len()];
    for (i, &c) in cells.iter().enumerate() {
        position[map.index(c)] = i;
    }
    let mut out = Vec::with_capacity(cells.len());
    let mut i = 0;
    while i < cells.len() {
        let at = cells[i];
        out.push(at);
        let next = Direction::ALL
            .into_iter()
            .filter(|&d| map.can_move(at, d))
            .filter_map(|d| map.step(at, d))
            .map(|n| position[map.index(n)])
            .filter(|&j| j != usize::MAX && j > i)
            .max();
        match next {
            Some(j) => i = j,
            None => break,
        }
    }
    out
}

/// One classic ant walk.
pub fn construct_path(map: &GridMap, field: &PheromoneField, config: &AcoConfig, rng: &mut StreamRng) -> Option<Path> {
    walk(map, config.step_budget(map), rng, |at, visited, rng| {
        let cands = transition_prior(field, map, config.alpha, config.beta, at, visited)?;
        Ok(cands[roulette(cands.iter().map(|c| c.probability), rng)].to)
    })
}

/// Per-generation best costs. `None` marks generations before any ant (or in
/// which no ant) reached the goal.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Convergence {
    pub best_so_far: Vec<Option<f64>>,
    pub generation_best: Vec<Option<f64>>,
}

impl Convergence {
    pub fn len(&self) -> usize {
        self.best_so_far.len()
    }

    pub fn is_empty(&self) -> bool {
        self.best_so_far.is_empty()
    }

    /// Running best with unreached generations as `+inf`.
    pub fn series(&self) -> Vec<f64> {
        self.best_so_far.iter().map(|v| v.unwrap_or(f64::INFINITY)).collect()
    }

    pub fn is_non_increasing(&self) -> bool {
        self.series().windows(2).all(|w| w[1] <= w[0])
    }

    /// `generation,best_length_so_far,generation_best_length`, six decimals,
    /// empty fields for generations without a path.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("generation,best_length_so_far,generation_best_length\n");
        for (g, (b, gb)) in self.best_so_far.iter().zip(&self.generation_best).enumerate() {
            let _ = writeln!(out, "{},{},{}", g + 1, fmt_opt(*b), fmt_opt(*gb));
        }
        out
    }
}

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// Result of a colony run.
#[derive(Debug, Clone, PartialEq)]
pub struct ColonyRun {
    pub best: Path,
    /// Cost of `best` under the run's ranking (its length for the classic
    /// colony).
    pub best_cost: f64,
    pub convergence: Convergence,
    pub pheromone: PheromoneField,
}

/// Generic elitist colony loop shared by the classic and Bayesian planners.
///
/// `ant(field, generation, index)` performs one walk against the frozen
/// pheromone snapshot; `cost` ranks finished paths (lower is better) and sets
/// the deposit to `Q / cost`.
pub(crate) fn run_colony<A, C>(map: &GridMap, config: &AcoConfig, ant: A, cost: C) -> Result<ColonyRun, PlanError>
where
    A: Fn(&PheromoneField, usize, usize) -> Option<Path> + Sync,
    C: Fn(&Path) -> f64 + Sync,
{
    config.validate(map)?;
    if !map.goal_reachable() {
        return Err(PlanError::Unreachable);
    }
    let mut field = PheromoneField::new(map, config.initial_pheromone);
    let mut best: Option<(Path, f64)> = None;
    let mut convergence = Convergence::default();
    for generation in 0..config.generations {
        let snapshot = &field;
        let results: Vec<Option<(Path, f64)>> = (0..config.ants)
            .into_par_iter()
            .map(|i| {
                let p = ant(snapshot, generation, i)?;
                let c = cost(&p);
                Some((p, c))
            })
            .collect();
        // first minimum wins ties so the outcome is schedule independent
        let gen_best = results.into_iter().flatten().fold(None::<(Path, f64)>, |acc, (p, c)| match acc {
            Some((_, bc)) if bc <= c => acc,
            _ => Some((p, c)),
        });
        if let Some((p, c)) = &gen_best {
            if best.as_ref().is_none_or(|(_, bc)| *c < *bc) {
                best = Some((p.clone(), *c));
            }
        }
        field.evaporate(config.evaporation);
        if let Some((p, c)) = &gen_best {
            field.deposit(map, p, config.q / c.max(f64::MIN_POSITIVE));
        }
        if let Some((p, c)) = &best {
            field.deposit(map, p, config.q / c.max(f64::MIN_POSITIVE));
        }
        convergence.generation_best.push(gen_best.map(|(_, c)| c));
        convergence.best_so_far.push(best.as_ref().map(|(_, c)| *c));
    }
    let (best, best_cost) = best.ok_or(PlanError::NoPathFound)?;
    Ok(ColonyRun { best, best_cost, convergence, pheromone: field })
}

/// Classic colony: `K` generations of `M` ants ranked by path length.
pub fn optimize(map: &GridMap, config: &AcoConfig) -> Result<ColonyRun, PlanError> {
    optimize_with_key(map, config, &[])
}

/// [`optimize`] with extra components mixed into every ant's stream key, so
/// repeated runs on one seed (e.g. successive cruise rounds) stay independent.
pub fn optimize_with_key(map: &GridMap, config: &AcoConfig, key: &[u64]) -> Result<ColonyRun, PlanError> {
    run_colony(
        map,
        config,
        |field, generation, ant| {
            let mut path_key = key.to_vec();
            path_key.extend([generation as u64, ant as u64]);
            let mut rng = rng::stream(config.seed, &path_key);
            construct_path(map, field, config, &mut rng)
        },
        |p| p.length,
    )
}
