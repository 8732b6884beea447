//! Multi-round irrigation cruises with the classic and the Bayesian planner.
//!
//! Each Bayesian step fuses the colony's transition probability (prior) with
//! the four-factor likelihood of every candidate. From the second round on, the
//! posterior also drives a two-state risk decision: when exploring carries the
//! lower conditional risk the choice is further conditioned on the candidate
//! windows being unexplored. Between rounds unexplored cells are pinned at the
//! maximum drought value and the risk of exploring is lowered while any cell
//! remains unexplored.

use std::fmt::Write as _;

use crate::aco::{self, fmt_opt, roulette, transition_prior, AcoConfig, ColonyRun, Convergence, DeadEnd, Path, PheromoneField};
use crate::bayes::{likelihood, min_risk_decision, posterior, FactorInputs, FactorScores, FactorWeights, RiskTable};
use crate::bayes::inputs_for_window;
use crate::error::{ConfigError, PlanError};
use crate::field::{irrigation_swath, FieldState, MoistureModel, PassSummary};
use crate::grid::{obstacle_stats, Coord, Direction, GridMap, ObstacleStats, PredictionWindow};
use crate::rng::{self, StreamRng};

/// Which planner drives a cruise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Baseline,
    Improved,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Baseline => "baseline",
            Algorithm::Improved => "improved",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "baseline" => Ok(Algorithm::Baseline),
            "improved" => Ok(Algorithm::Improved),
            other => Err(ConfigError::new("algo", format!("expected baseline or improved, got {other:?}"))),
        }
    }
}

/// Everything a cruise needs beyond the map.
#[derive(Debug, Clone, PartialEq)]
pub struct CruiseConfig {
    pub aco: AcoConfig,
    /// Factor weights for rounds after the first.
    pub weights: FactorWeights,
    /// Initial risk table; a working copy is relaxed between rounds.
    pub risk: RiskTable,
    /// Amount the explore decision's risk drops after an incomplete round.
    pub risk_decrement: f64,
    /// Drought value assigned to unexplored cells; also scales `f3`.
    pub drought_max: u32,
    /// Chebyshev radius of the sprinkler swath around the path.
    pub irrigation_radius: usize,
    /// Base discount a fully unexplored path earns when ranking paths in
    /// rounds after the first.
    pub information_weight: f64,
    pub moisture: MoistureModel,
}

impl Default for CruiseConfig {
    fn default() -> Self {
        CruiseConfig {
            aco: AcoConfig::default(),
            weights: FactorWeights::default(),
            risk: RiskTable::default(),
            risk_decrement: 0.1,
            drought_max: 10,
            irrigation_radius: 1,
            information_weight: 0.6,
            moisture: MoistureModel::default(),
        }
    }
}

impl CruiseConfig {
    pub fn validate(&self, map: &GridMap) -> Result<(), ConfigError> {
        self.aco.validate(map)?;
        self.moisture.validate()?;
        if self.drought_max == 0 {
            return Err(ConfigError::new("drought_max", "must be at least 1"));
        }
        if !(self.risk_decrement >= 0.0) {
            return Err(ConfigError::new("risk_decrement", "must be non-negative"));
        }
        if !(0.0..1.0).contains(&self.information_weight) {
            return Err(ConfigError::new("information_weight", "must lie in [0,1)"));
        }
        if self.risk.decisions() < 2 || self.risk.states() < 2 {
            return Err(ConfigError::new("risk", "needs explore/exploit rows and unexplored/explored columns"));
        }
        Ok(())
    }
}

/// Precomputed prediction windows and obstacle statistics for every legal
/// move of a map.
#[derive(Debug, Clone)]
pub struct WindowCache {
    entries: Vec<Option<(PredictionWindow, ObstacleStats)>>,
}

impl WindowCache {
    pub fn new(map: &GridMap) -> Self {
        let mut entries = vec![None; map.len() * 8];
        for at in map.coords() {
            for d in Direction::ALL {
                if map.can_move(at, d) {
                    let to = map.step(at, d).expect("legal move stays in bounds");
                    let w = crate::grid::window::window_for(map, to, d);
                    let stats = obstacle_stats(map, &w);
                    entries[map.index(at) * 8 + d.index()] = Some((w, stats));
                }
            }
        }
        WindowCache { entries }
    }

    fn get(&self, map: &GridMap, from: Coord, dir: Direction) -> &(PredictionWindow, ObstacleStats) {
        self.entries[map.index(from) * 8 + dir.index()].as_ref().expect("window cached for every legal move")
    }
}

/// Read-only inputs of one Bayesian step.
#[derive(Clone, Copy)]
pub struct StepContext<'a> {
    pub map: &'a GridMap,
    pub state: &'a FieldState,
    pub pheromone: &'a PheromoneField,
    pub cache: &'a WindowCache,
    pub weights: FactorWeights,
    /// Risk table for the explore/exploit decision; `None` skips it.
    pub risk: Option<&'a RiskTable>,
    pub alpha: f64,
    pub beta: f64,
    pub drought_max: u32,
}

/// Everything computed for one step, candidate by candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution {
    pub candidates: Vec<Coord>,
    pub inputs: Vec<FactorInputs>,
    pub scores: Vec<FactorScores>,
    pub prior: Vec<f64>,
    pub likelihood: Vec<f64>,
    /// Posterior `P(W_i | S)`, or the prior when the evidence is degenerate.
    pub posterior: Vec<f64>,
    /// Risk decision taken, if a risk table was supplied.
    pub decision: Option<usize>,
    /// Final choice distribution after the risk decision.
    pub choice: Vec<f64>,
}

/// How [`select_next`] turns the choice distribution into a move.
pub enum Selection<'r> {
    Sample(&'r mut StreamRng),
    Greedy,
}

/// Computes prior, likelihoods, posterior and the risk-conditioned choice
/// distribution at `from`.
pub fn step_distribution(ctx: &StepContext<'_>, from: Coord, visited: &[bool]) -> Result<StepDistribution, DeadEnd> {
    let cands = transition_prior(ctx.pheromone, ctx.map, ctx.alpha, ctx.beta, from, visited)?;
    let mut candidates = Vec::with_capacity(cands.len());
    let mut inputs = Vec::with_capacity(cands.len());
    let mut scores = Vec::with_capacity(cands.len());
    let mut lik = Vec::with_capacity(cands.len());
    for c in &cands {
        let (window, stats) = ctx.cache.get(ctx.map, from, c.dir);
        let inp = inputs_for_window(ctx.map, ctx.state, window, *stats);
        let sc = inp.scores(ctx.drought_max);
        candidates.push(c.to);
        lik.push(likelihood(&sc, &ctx.weights));
        inputs.push(inp);
        scores.push(sc);
    }
    let prior: Vec<f64> = cands.iter().map(|c| c.probability).collect();
    let post = posterior(&prior, &lik).unwrap_or_else(|_| prior.clone());
    let mut decision = None;
    let mut choice = post.clone();
    if let Some(table) = ctx.risk {
        let p_unexplored: f64 = post.iter().zip(&scores).map(|(p, s)| p * s.f4).sum::<f64>().clamp(0.0, 1.0);
        let mut states = vec![0.0; table.states()];
        states[RiskTable::UNEXPLORED] = p_unexplored;
        states[RiskTable::EXPLORED] = 1.0 - p_unexplored;
        let d = min_risk_decision(&states, table);
        decision = Some(d);
        if d == RiskTable::EXPLORE {
            let f4: Vec<f64> = scores.iter().map(|s| s.f4).collect();
            if let Ok(cond) = posterior(&post, &f4) {
                choice = cond;
            }
        }
    }
    Ok(StepDistribution { candidates, inputs, scores, prior, likelihood: lik, posterior: post, decision, choice })
}

/// Next cell for an ant at `from`: sampled from the choice distribution, or
/// its argmax (lowest index on ties) in greedy mode.
pub fn select_next(ctx: &StepContext<'_>, from: Coord, visited: &[bool], selection: Selection<'_>) -> Result<Coord, DeadEnd> {
    let dist = step_distribution(ctx, from, visited)?;
    let i = match selection {
        Selection::Sample(rng) => roulette(dist.choice.iter().copied(), rng),
        Selection::Greedy => argmax(&dist.choice),
    };
    Ok(dist.candidates[i])
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Ranking used by the Bayesian colony after the first round: a path is
/// discounted by `pressure` times the share of the still unexplored cells its
/// swath would cover.
#[derive(Debug, Clone, Copy)]
struct InformationCost {
    pressure: f64,
    radius: usize,
    remaining: usize,
}

impl InformationCost {
    fn cost(&self, map: &GridMap, state: &FieldState, path: &Path) -> f64 {
        if self.pressure == 0.0 || self.remaining == 0 {
            return path.length;
        }
        let swath = irrigation_swath(map, &path.cells, self.radius);
        let fresh = swath.iter().filter(|&&c| !state.is_explored(map, c)).count();
        path.length * (1.0 - self.pressure * fresh as f64 / self.remaining as f64)
    }
}

/// Discount strength for a round: the configured base plus however far the
/// explore decision's risk has been relaxed.
pub fn exploration_pressure(config: &CruiseConfig, risk: &RiskTable) -> f64 {
    let initial = config.risk.get(RiskTable::EXPLORE, RiskTable::EXPLORED);
    let now = risk.get(RiskTable::EXPLORE, RiskTable::EXPLORED);
    let relaxed = if initial > 0.0 { (initial - now) / initial } else { 1.0 };
    (config.information_weight + relaxed * (1.0 - config.information_weight)).min(0.9)
}

/// Outcome of planning one round (before irrigation).
#[derive(Debug, Clone, PartialEq)]
pub struct RoundPlan {
    pub path: Path,
    /// Ranking cost of `path` (its length in the first round and for the
    /// baseline).
    pub cost: f64,
    pub convergence: Convergence,
    /// Weights the round actually used.
    pub weights: FactorWeights,
}

/// Plans one round against a frozen field state. `round` is 1-based.
pub fn plan_round(
    map: &GridMap,
    state: &FieldState,
    algorithm: Algorithm,
    config: &CruiseConfig,
    risk: &RiskTable,
    round: usize,
) -> Result<RoundPlan, PlanError> {
    config.validate(map)?;
    // the first round shares its streams with a plain colony run
    let key: Vec<u64> = if round <= 1 { Vec::new() } else { vec![round as u64] };
    if algorithm == Algorithm::Baseline {
        let run = aco::optimize_with_key(map, &config.aco, &key)?;
        return Ok(RoundPlan { cost: run.best_cost, path: run.best, convergence: run.convergence, weights: config.weights });
    }
    let first = round <= 1;
    let weights = if first { FactorWeights::FIRST_ROUND } else { config.weights };
    let table = (!first).then_some(risk);
    let ranking = InformationCost {
        pressure: if first { 0.0 } else { exploration_pressure(config, risk) },
        radius: config.irrigation_radius,
        remaining: state.unexplored_traversable(map),
    };
    let cache = WindowCache::new(map);
    let placeholder = PheromoneField::new(map, config.aco.initial_pheromone);
    let base = StepContext {
        map,
        state,
        pheromone: &placeholder,
        cache: &cache,
        weights,
        risk: table,
        alpha: config.aco.alpha,
        beta: config.aco.beta,
        drought_max: config.drought_max,
    };
    let budget = config.aco.step_budget(map);
    let ColonyRun { best, best_cost, convergence, pheromone } = aco::run_colony(
        map,
        &config.aco,
        |field, generation, ant| {
            let ctx = StepContext { pheromone: field, ..base };
            let mut path_key = key.clone();
            path_key.extend([generation as u64, ant as u64]);
            let mut rng = rng::stream(config.aco.seed, &path_key);
            aco::walk(map, budget, &mut rng, |at, visited, rng| select_next(&ctx, at, visited, Selection::Sample(rng)))
        },
        |p| ranking.cost(map, state, p),
    )?;
    // greedy re-scoring against the trained pheromone
    let ctx = StepContext { pheromone: &pheromone, ..base };
    let greedy = aco::walk(map, budget, &mut rng::stream(0, &[]), |at, visited, _| {
        select_next(&ctx, at, visited, Selection::Greedy)
    });
    let (path, cost) = match greedy {
        Some(g) => {
            let gc = ranking.cost(map, state, &g);
            if gc < best_cost {
                (g, gc)
            } else {
                (best, best_cost)
            }
        }
        None => (best, best_cost),
    };
    Ok(RoundPlan { path, cost, convergence, weights })
}

/// One completed cruise round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    pub path: Path,
    pub cost: f64,
    pub convergence: Convergence,
    pub pass: PassSummary,
    /// Crop coverage after the round.
    pub coverage: f64,
    pub mean_drought_before: f64,
    pub mean_drought_after: f64,
}

impl RoundRecord {
    /// Newly explored cells per unit path length.
    pub fn information_per_length(&self) -> f64 {
        self.pass.newly_explored as f64 / self.path.length.max(f64::MIN_POSITIVE)
    }
}

/// Plans a round, then irrigates the swath around the chosen path.
pub fn cruise_round(
    map: &GridMap,
    state: &mut FieldState,
    algorithm: Algorithm,
    config: &CruiseConfig,
    risk: &RiskTable,
) -> Result<(RoundPlan, PassSummary, Vec<Coord>), PlanError> {
    let plan = plan_round(map, state, algorithm, config, risk, state.round + 1)?;
    let swath = irrigation_swath(map, &plan.path.cells, config.irrigation_radius);
    let pass = state.record_pass(map, &swath, &config.moisture);
    Ok((plan, pass, swath))
}

/// All rounds of a cruise campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct CruiseReport {
    pub algorithm: Algorithm,
    pub rounds: Vec<RoundRecord>,
    /// Times each cell was watered.
    pub irrigation_count: Vec<u32>,
    /// Water applied to each cell, in moisture units.
    pub irrigation_volume: Vec<f64>,
    pub final_state: FieldState,
    pub width: usize,
}

impl CruiseReport {
    pub fn final_coverage(&self) -> f64 {
        self.rounds.last().map_or(0.0, |r| r.coverage)
    }

    /// `round,path_length,cells_irrigated,coverage_fraction,mean_drought_before,mean_drought_after`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,path_length,cells_irrigated,coverage_fraction,mean_drought_before,mean_drought_after\n");
        for r in &self.rounds {
            let _ = writeln!(
                out,
                "{},{:.6},{},{:.6},{:.6},{:.6}",
                r.round, r.path.length, r.pass.crops_irrigated, r.coverage, r.mean_drought_before, r.mean_drought_after
            );
        }
        out
    }

    /// Per-round convergence, `round,generation,best_cost_so_far,generation_best_cost`.
    pub fn convergence_csv(&self) -> String {
        let mut out = String::from("round,generation,best_cost_so_far,generation_best_cost\n");
        for r in &self.rounds {
            for (g, (b, gb)) in r.convergence.best_so_far.iter().zip(&r.convergence.generation_best).enumerate() {
                let _ = writeln!(out, "{},{},{},{}", r.round, g + 1, fmt_opt(*b), fmt_opt(*gb));
            }
        }
        out
    }

    /// Irrigation count grid, one CSV row per map row.
    pub fn irrigation_grid_csv(&self) -> String {
        grid_csv(&self.irrigation_count.iter().map(|&c| f64::from(c)).collect::<Vec<_>>(), self.width)
    }
}

/// Renders a row-major grid of values as CSV rows with six decimals.
pub fn grid_csv(values: &[f64], width: usize) -> String {
    let mut out = String::new();
    for row in values.chunks(width) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Runs `rounds` cruises: maximum-risk update, plan, irrigate, dry, relax the
/// risk table while unexplored cells remain.
pub fn run_cruises(map: &GridMap, rounds: usize, algorithm: Algorithm, config: &CruiseConfig) -> Result<CruiseReport, PlanError> {
    run_cruises_observed(map, rounds, algorithm, config, |_, _, _| {})
}

/// [`run_cruises`] that also reports, for every round, the field state the
/// planner saw and the resulting record.
pub fn run_cruises_observed(
    map: &GridMap,
    rounds: usize,
    algorithm: Algorithm,
    config: &CruiseConfig,
    mut observe: impl FnMut(&FieldState, &RiskTable, &RoundRecord),
) -> Result<CruiseReport, PlanError> {
    if rounds == 0 {
        return Err(ConfigError::new("rounds", "need at least one round").into());
    }
    config.validate(map)?;
    if !map.goal_reachable() {
        return Err(PlanError::Unreachable);
    }
    let mut state = FieldState::new(map);
    let mut risk = config.risk.clone();
    let mut report = CruiseReport {
        algorithm,
        rounds: Vec::with_capacity(rounds),
        irrigation_count: vec![0; map.len()],
        irrigation_volume: vec![0.0; map.len()],
        final_state: state.clone(),
        width: map.width(),
    };
    for round in 1..=rounds {
        if round >= 2 {
            state.apply_maximum_risk(map, config.drought_max);
        }
        let seen = state.clone();
        let mean_drought_before = state.mean_crop_drought(map);
        let moisture_before = state.moisture.clone();
        let (plan, pass, swath) = cruise_round(map, &mut state, algorithm, config, &risk)?;
        for c in swath.iter().filter(|&&c| map.class(c) == crate::grid::CellClass::Crop) {
            let i = map.index(*c);
            report.irrigation_count[i] += 1;
            report.irrigation_volume[i] += (config.moisture.irrigation_refill - moisture_before[i]).max(0.0);
        }
        state.advance_round(map, &config.moisture);
        let record = RoundRecord {
            round,
            path: plan.path,
            cost: plan.cost,
            convergence: plan.convergence,
            pass,
            coverage: state.crop_coverage(map),
            mean_drought_before,
            mean_drought_after: state.mean_crop_drought(map),
        };
        observe(&seen, &risk, &record);
        if state.unexplored_traversable(map) > 0 {
            risk.relax_exploration(config.risk_decrement);
        }
        report.rounds.push(record);
    }
    report.final_state = state;
    Ok(report)
}
