//! Four-factor likelihood, Bayesian posterior over candidate moves, and the
//! minimum conditional-risk decision rule.

use crate::error::{ConfigError, DegenerateEvidence};
use crate::field::{FieldState, WindowSums};
use crate::grid::{obstacle_stats, prediction_window, Coord, GridMap, ObstacleStats, PredictionWindow};

/// Weights of the four environmental factors, normalized to sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorWeights([f64; 4]);

impl FactorWeights {
    /// Weights used for the first cruise: distance and obstacles only.
    pub const FIRST_ROUND: FactorWeights = FactorWeights([0.5, 0.5, 0.0, 0.0]);

    /// Normalizes `raw` so the weights sum to one.
    pub fn new(raw: [f64; 4]) -> Result<Self, ConfigError> {
        if raw.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(ConfigError::new("weights", "weights must be finite and non-negative"));
        }
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Err(ConfigError::new("weights", "at least one weight must be positive"));
        }
        Ok(FactorWeights(raw.map(|w| w / total)))
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }
}

impl std::str::FromStr for FactorWeights {
    type Err = ConfigError;

    /// Parses `l1,l2,l3,l4`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| ConfigError::new("weights", format!("cannot parse {s:?}")))?;
        let raw: [f64; 4] = parts.try_into().map_err(|_| ConfigError::new("weights", "expected four comma-separated weights"))?;
        FactorWeights::new(raw)
    }
}

impl Default for FactorWeights {
    /// Unexplored area first, drought next, then distance and obstacles.
    fn default() -> Self {
        FactorWeights([0.2, 0.2, 0.25, 0.35])
    }
}

/// The four factor values of one candidate move, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorScores {
    /// Inverse distance to the goal.
    pub f1: f64,
    /// Obstacle factor; 1 when the window is obstacle-free.
    pub f2: f64,
    /// Drought fraction of the window.
    pub f3: f64,
    /// Unexplored fraction of the window.
    pub f4: f64,
}

impl FactorScores {
    pub fn as_array(&self) -> [f64; 4] {
        [self.f1, self.f2, self.f3, self.f4]
    }
}

/// Raw window measurements behind a [`FactorScores`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorInputs {
    /// Euclidean distance from the candidate to the goal.
    pub goal_distance: f64,
    pub obstacles: ObstacleStats,
    pub sums: WindowSums,
}

impl FactorInputs {
    pub fn scores(&self, drought_max: u32) -> FactorScores {
        let ms = self.sums.cells.max(1) as f64;
        let f2 = match self.obstacles.components {
            0 => 1.0,
            z => 1.0 / (z + self.obstacles.cells) as f64,
        };
        FactorScores {
            f1: 1.0 / self.goal_distance.max(1.0),
            f2,
            f3: (self.sums.drought as f64 / (ms * f64::from(drought_max.max(1)))).min(1.0),
            f4: self.sums.unexplored as f64 / ms,
        }
    }
}

/// Window measurements for the move `from -> candidate`.
///
/// Panics if `candidate` is not an 8-neighbor of `from`.
pub fn factor_inputs(map: &GridMap, state: &FieldState, from: Coord, candidate: Coord) -> FactorInputs {
    let window = prediction_window(map, from, candidate).expect("candidate must neighbor the current cell");
    inputs_for_window(map, state, &window, obstacle_stats(map, &window))
}

pub(crate) fn inputs_for_window(
    map: &GridMap,
    state: &FieldState,
    window: &PredictionWindow,
    obstacles: ObstacleStats,
) -> FactorInputs {
    FactorInputs {
        goal_distance: window.anchor.distance(map.goal()),
        obstacles,
        sums: state.window_sums(map, window),
    }
}

/// `f1..f4` for the move `from -> candidate`; `drought_max` scales `f3`.
pub fn factor_scores(map: &GridMap, state: &FieldState, from: Coord, candidate: Coord, drought_max: u32) -> FactorScores {
    factor_inputs(map, state, from, candidate).scores(drought_max)
}

/// Weighted sum `λ1 f1 + λ2 f2 + λ3 f3 + λ4 f4`.
pub fn likelihood(scores: &FactorScores, weights: &FactorWeights) -> f64 {
    scores.as_array().iter().zip(weights.as_array()).map(|(f, w)| f * w).sum()
}

/// Normalized products `prior_i * likelihood_i`.
pub fn posterior(priors: &[f64], likelihoods: &[f64]) -> Result<Vec<f64>, DegenerateEvidence> {
    debug_assert_eq!(priors.len(), likelihoods.len());
    let products: Vec<f64> = priors.iter().zip(likelihoods).map(|(p, l)| p * l).collect();
    let total: f64 = products.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(DegenerateEvidence);
    }
    Ok(products.into_iter().map(|x| x / total).collect())
}

/// Loss matrix `λ[i][j]`: cost of decision `i` when the true state is `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskTable {
    rows: Vec<Vec<f64>>,
}

impl RiskTable {
    /// Row index of the "explore" decision in the default table.
    pub const EXPLORE: usize = 0;
    /// Row index of the "exploit" decision in the default table.
    pub const EXPLOIT: usize = 1;
    /// Column of the "unexplored region" state.
    pub const UNEXPLORED: usize = 0;
    /// Column of the "explored region" state.
    pub const EXPLORED: usize = 1;

    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ConfigError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(ConfigError::new("risk", "table needs at least one row and one column"));
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(ConfigError::new("risk", "rows differ in length"));
        }
        if rows.iter().flatten().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(ConfigError::new("risk", "entries must be finite and non-negative"));
        }
        for (i, row) in rows.iter().enumerate().take(cols) {
            if row.iter().enumerate().any(|(j, &v)| j != i && v <= row[i]) {
                return Err(ConfigError::new("risk", format!("row {i}: diagonal must be strictly below the other entries")));
            }
        }
        Ok(RiskTable { rows })
    }

    pub fn decisions(&self) -> usize {
        self.rows.len()
    }

    pub fn states(&self) -> usize {
        self.rows[0].len()
    }

    pub fn get(&self, decision: usize, state: usize) -> f64 {
        self.rows[decision][state]
    }

    /// Conditional risk `R(α_i | x) = Σ_j λ_ij P(w_j | x)` of every decision.
    pub fn conditional_risks(&self, posterior: &[f64]) -> Vec<f64> {
        debug_assert_eq!(posterior.len(), self.states());
        self.rows.iter().map(|row| row.iter().zip(posterior).map(|(l, p)| l * p).sum()).collect()
    }

    /// Lowers the off-diagonal "explore" entries by `amount`, floored at zero.
    ///
    /// The decremented table may reach equality between diagonal and
    /// off-diagonal entries; ties then resolve to the explore decision.
    pub fn relax_exploration(&mut self, amount: f64) {
        let row = &mut self.rows[Self::EXPLORE];
        for (j, v) in row.iter_mut().enumerate() {
            if j != Self::UNEXPLORED {
                *v = (*v - amount).max(0.0);
            }
        }
    }
}

impl Default for RiskTable {
    /// 0/1 loss over {explore, exploit} x {unexplored, explored}.
    fn default() -> Self {
        RiskTable { rows: vec![vec![0.0, 1.0], vec![1.0, 0.0]] }
    }
}

/// Index of the decision with minimal conditional risk; ties go to the lowest
/// index.
pub fn min_risk_decision(posterior: &[f64], table: &RiskTable) -> usize {
    let risks = table.conditional_risks(posterior);
    let mut best = 0;
    for (i, &r) in risks.iter().enumerate().skip(1) {
        if r < risks[best] {
            best = i;
        }
    }
    best
}
