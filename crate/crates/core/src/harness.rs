//! Seeded experiments: baseline-vs-improved comparisons, parameter sweeps and
//! convergence studies, with byte-stable CSV output.

use std::fmt::Write as _;
use std::path::{Path as FsPath, PathBuf};

use rayon::prelude::*;

use crate::bayes::FactorWeights;
use crate::error::{ConfigError, Error};
use crate::grid::{parse_map, GridMap};
use crate::planner::{grid_csv, run_cruises, Algorithm, CruiseConfig, CruiseReport};

/// A complete, validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub map_path: PathBuf,
    pub map: GridMap,
    /// Arms to run, in output order.
    pub algorithms: Vec<Algorithm>,
    pub cruise: CruiseConfig,
    pub rounds: usize,
    pub replicates: usize,
    /// Replicate `r` runs with seed `seed + r`.
    pub seed: u64,
    /// Required relative information-per-length gain of the improved arm.
    pub min_info_gain: f64,
    /// Allowed relative path-length inflation of the improved arm.
    pub max_length_inflation: f64,
}

/// Keys accepted by [`ExperimentSpec::set`], besides `map`.
pub const SPEC_KEYS: &[&str] = &[
    "algorithm",
    "ants",
    "generations",
    "alpha",
    "beta",
    "q",
    "evaporation",
    "initial_pheromone",
    "max_steps",
    "weights",
    "rounds",
    "replicates",
    "seed",
    "decay",
    "dry_threshold",
    "refill",
    "drought_max",
    "risk_decrement",
    "information_weight",
    "irrigation_radius",
    "min_info_gain",
    "max_length_inflation",
];

impl ExperimentSpec {
    /// Defaults: both arms, 3 rounds, 20 replicates, seed 0.
    pub fn new(map: GridMap, map_path: impl Into<PathBuf>) -> Self {
        ExperimentSpec {
            map_path: map_path.into(),
            map,
            algorithms: vec![Algorithm::Baseline, Algorithm::Improved],
            cruise: CruiseConfig::default(),
            rounds: 3,
            replicates: 20,
            seed: 0,
            min_info_gain: 0.10,
            max_length_inflation: 0.25,
        }
    }

    /// Reads a `key = value` file; `map` is resolved against the file's
    /// directory. Blank lines and `#` comments are ignored.
    pub fn from_file(path: impl AsRef<FsPath>) -> Result<Self, Error> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Parses spec text as if read from `origin`.
    pub fn parse(text: &str, origin: &FsPath) -> Result<Self, Error> {
        let spec_err = |line: usize, reason: String| Error::Spec { path: origin.to_path_buf(), line, reason };
        let mut map_entry = None;
        let mut settings = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| spec_err(i + 1, format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "map" {
                map_entry = Some(value.to_string());
            } else {
                settings.push((i + 1, key.to_string(), value.to_string()));
            }
        }
        let map_entry = map_entry.ok_or_else(|| spec_err(0, "missing map".into()))?;
        let base = origin.parent().unwrap_or(FsPath::new(""));
        let map_path = base.join(map_entry);
        let map = load_map(&map_path)?;
        let mut spec = ExperimentSpec::new(map, map_path);
        for (line, key, value) in settings {
            spec.set(&key, &value).map_err(|e| spec_err(line, e.to_string()))?;
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Overrides one setting by name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
            v.parse().map_err(|_| ConfigError::new(key.to_string(), format!("cannot parse {v:?}")))
        }
        let aco = &mut self.cruise.aco;
        let moisture = &mut self.cruise.moisture;
        match key {
            "algorithm" => {
                self.algorithms = match value {
                    "both" => vec![Algorithm::Baseline, Algorithm::Improved],
                    v => v.split(',').map(|a| a.trim().parse()).collect::<Result<_, _>>()?,
                }
            }
            "ants" => aco.ants = num(key, value)?,
            "generations" => aco.generations = num(key, value)?,
            "alpha" => aco.alpha = num(key, value)?,
            "beta" => aco.beta = num(key, value)?,
            "q" => aco.q = num(key, value)?,
            "evaporation" => aco.evaporation = num(key, value)?,
            "initial_pheromone" => aco.initial_pheromone = num(key, value)?,
            "max_steps" => aco.max_steps = Some(num(key, value)?),
            "weights" => self.cruise.weights = value.parse()?,
            "rounds" => self.rounds = num(key, value)?,
            "replicates" => self.replicates = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "decay" => moisture.decay_per_round = num(key, value)?,
            "dry_threshold" => moisture.dry_threshold = num(key, value)?,
            "refill" => moisture.irrigation_refill = num(key, value)?,
            "drought_max" => self.cruise.drought_max = num(key, value)?,
            "risk_decrement" => self.cruise.risk_decrement = num(key, value)?,
            "information_weight" => self.cruise.information_weight = num(key, value)?,
            "irrigation_radius" => self.cruise.irrigation_radius = num(key, value)?,
            "min_info_gain" => self.min_info_gain = num(key, value)?,
            "max_length_inflation" => self.max_length_inflation = num(key, value)?,
            _ => return Err(ConfigError::new(key.to_string(), "unknown setting")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.replicates == 0 {
            return Err(ConfigError::new("replicates", "must be at least 1"));
        }
        if self.rounds == 0 {
            return Err(ConfigError::new("rounds", "must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(ConfigError::new("algorithm", "no arm selected"));
        }
        self.cruise.validate(&self.map)
    }

    /// The cruise configuration of replicate `rep`.
    pub fn replicate_config(&self, rep: usize) -> CruiseConfig {
        let mut c = self.cruise.clone();
        c.aco.seed = self.seed.wrapping_add(rep as u64);
        c
    }
}

/// Reads and parses a map file.
pub fn load_map(path: &FsPath) -> Result<GridMap, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_map(&text).map_err(|source| Error::Map { path: path.to_path_buf(), source })
}

/// Population mean and standard deviation; `(0, 0)` for no samples.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.max(0.0).sqrt())
}

/// Aggregates of one arm over all replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSummary {
    pub algorithm: Algorithm,
    pub runs: Vec<CruiseReport>,
}

impl ArmSummary {
    /// Path length of every round of every replicate, from round `from`.
    fn lengths(&self, from: usize) -> Vec<f64> {
        self.runs.iter().flat_map(|r| r.rounds.iter().filter(|x| x.round >= from).map(|x| x.path.length)).collect()
    }

    fn info(&self, from: usize) -> Vec<f64> {
        self.runs.iter().flat_map(|r| r.rounds.iter().filter(|x| x.round >= from).map(|x| x.information_per_length())).collect()
    }

    /// First round counted by the information metrics: 2 when the campaign
    /// has more than one round.
    fn info_from(&self) -> usize {
        if self.runs.first().is_some_and(|r| r.rounds.len() > 1) {
            2
        } else {
            1
        }
    }

    /// Mean and σ of the path length over all rounds.
    pub fn length(&self) -> (f64, f64) {
        mean_sd(&self.lengths(1))
    }

    /// Mean and σ of the path length in the rounds counted for information.
    pub fn info_round_length(&self) -> (f64, f64) {
        mean_sd(&self.lengths(self.info_from()))
    }

    /// Mean and σ of newly explored cells per unit length in rounds ≥ 2 (or
    /// round 1 for single-round campaigns).
    pub fn info_per_length(&self) -> (f64, f64) {
        mean_sd(&self.info(self.info_from()))
    }

    /// Mean and σ of the best length of round 1 per replicate.
    pub fn first_round_length(&self) -> (f64, f64) {
        mean_sd(&self.runs.iter().map(|r| r.rounds[0].path.length).collect::<Vec<_>>())
    }

    /// Mean of `f(round record)` for each round index.
    fn per_round(&self, f: impl Fn(&crate::planner::RoundRecord) -> f64) -> Vec<(f64, f64)> {
        let rounds = self.runs.first().map_or(0, |r| r.rounds.len());
        (0..rounds).map(|k| mean_sd(&self.runs.iter().map(|r| f(&r.rounds[k])).collect::<Vec<_>>())).collect()
    }

    pub fn coverage_per_round(&self) -> Vec<f64> {
        self.per_round(|r| r.coverage).into_iter().map(|(m, _)| m).collect()
    }

    /// Mean irrigation count of every cell.
    pub fn mean_irrigation(&self) -> Vec<f64> {
        let n = self.runs.len().max(1) as f64;
        let cells = self.runs.first().map_or(0, |r| r.irrigation_count.len());
        (0..cells).map(|i| self.runs.iter().map(|r| f64::from(r.irrigation_count[i])).sum::<f64>() / n).collect()
    }
}

/// Outcome of [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub arms: Vec<ArmSummary>,
    pub width: usize,
    pub min_info_gain: f64,
    pub max_length_inflation: f64,
}

impl ComparisonReport {
    pub fn arm(&self, algorithm: Algorithm) -> Option<&ArmSummary> {
        self.arms.iter().find(|a| a.algorithm == algorithm)
    }

    /// Relative information-per-length gain of the improved arm over the
    /// baseline.
    pub fn info_gain(&self) -> Option<f64> {
        let b = self.arm(Algorithm::Baseline)?.info_per_length().0;
        let i = self.arm(Algorithm::Improved)?.info_per_length().0;
        Some(if b > 0.0 { i / b - 1.0 } else if i > 0.0 { f64::INFINITY } else { 0.0 })
    }

    /// Relative path-length inflation of the improved arm in the rounds used
    /// for the information metric.
    pub fn length_inflation(&self) -> Option<f64> {
        let b = self.arm(Algorithm::Baseline)?.info_round_length().0;
        let i = self.arm(Algorithm::Improved)?.info_round_length().0;
        Some(i / b - 1.0)
    }

    /// Whether both thresholds hold; `None` without both arms.
    pub fn meets_thresholds(&self) -> Option<bool> {
        Some(self.info_gain()? >= self.min_info_gain && self.length_inflation()? <= self.max_length_inflation)
    }

    /// One row per arm and round plus an `all` row per arm.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "arm,round,mean_path_length,sd_path_length,mean_coverage,mean_new_cells,mean_info_per_length,sd_info_per_length\n",
        );
        for arm in &self.arms {
            let len = arm.per_round(|r| r.path.length);
            let cov = arm.per_round(|r| r.coverage);
            let new = arm.per_round(|r| r.pass.newly_explored as f64);
            let info = arm.per_round(|r| r.information_per_length());
            for k in 0..len.len() {
                let _ = writeln!(
                    out,
                    "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                    arm.algorithm.name(),
                    k + 1,
                    len[k].0,
                    len[k].1,
                    cov[k].0,
                    new[k].0,
                    info[k].0,
                    info[k].1
                );
            }
            let (lm, ls) = arm.length();
            let (im, is) = arm.info_per_length();
            let cov_final = cov.last().map_or(0.0, |c| c.0);
            let new_mean = mean_sd(&new.iter().map(|n| n.0).collect::<Vec<_>>()).0;
            let _ = writeln!(
                out,
                "{},all,{lm:.6},{ls:.6},{cov_final:.6},{new_mean:.6},{im:.6},{is:.6}",
                arm.algorithm.name()
            );
        }
        out
    }

    /// Writes `report.csv`, `convergence_<arm>_<rep>.csv` and
    /// `irrigation_grid_<arm>.csv` into `dir`.
    pub fn write_to(&self, dir: &FsPath) -> Result<Vec<PathBuf>, Error> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut files = vec![(dir.join("report.csv"), self.to_csv())];
        for arm in &self.arms {
            let name = arm.algorithm.name();
            for (rep, run) in arm.runs.iter().enumerate() {
                files.push((dir.join(format!("convergence_{name}_{rep}.csv")), run.convergence_csv()));
            }
            files.push((dir.join(format!("irrigation_grid_{name}.csv")), grid_csv(&arm.mean_irrigation(), self.width)));
        }
        for (path, text) in &files {
            std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
        }
        Ok(files.into_iter().map(|(p, _)| p).collect())
    }
}

/// Runs every arm of `spec` over all replicates. Replicates run in parallel;
/// the result depends only on the spec.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ComparisonReport, Error> {
    spec.validate()?;
    if !spec.map.goal_reachable() {
        return Err(crate::error::PlanError::Unreachable.into());
    }
    let mut arms = Vec::with_capacity(spec.algorithms.len());
    for &algorithm in &spec.algorithms {
        let runs = (0..spec.replicates)
            .into_par_iter()
            .map(|rep| run_cruises(&spec.map, spec.rounds, algorithm, &spec.replicate_config(rep)))
            .collect::<Result<Vec<_>, _>>()?;
        arms.push(ArmSummary { algorithm, runs });
    }
    Ok(ComparisonReport {
        arms,
        width: spec.map.width(),
        min_info_gain: spec.min_info_gain,
        max_length_inflation: spec.max_length_inflation,
    })
}

/// Parameters [`sweep`] can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Ants,
    Generations,
    Alpha,
    Beta,
    Evaporation,
    /// One factor weight, 0-based; the weights are renormalized.
    Weight(usize),
    Rounds,
}

impl SweepParameter {
    pub fn name(self) -> String {
        match self {
            SweepParameter::Ants => "M".into(),
            SweepParameter::Generations => "K".into(),
            SweepParameter::Alpha => "alpha".into(),
            SweepParameter::Beta => "beta".into(),
            SweepParameter::Evaporation => "evaporation".into(),
            SweepParameter::Weight(i) => format!("lambda{}", i + 1),
            SweepParameter::Rounds => "rounds".into(),
        }
    }

    fn apply(self, spec: &mut ExperimentSpec, value: f64) -> Result<(), ConfigError> {
        let count = |v: f64| -> Result<usize, ConfigError> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(ConfigError::new(self.name(), format!("{v} is not a count")))
            }
        };
        match self {
            SweepParameter::Ants => spec.cruise.aco.ants = count(value)?,
            SweepParameter::Generations => spec.cruise.aco.generations = count(value)?,
            SweepParameter::Alpha => spec.cruise.aco.alpha = value,
            SweepParameter::Beta => spec.cruise.aco.beta = value,
            SweepParameter::Evaporation => spec.cruise.aco.evaporation = value,
            SweepParameter::Weight(i) => {
                let mut w = spec.cruise.weights.as_array();
                w[i] = value;
                spec.cruise.weights = FactorWeights::new(w)?;
            }
            SweepParameter::Rounds => spec.rounds = count(value)?,
        }
        Ok(())
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "M" | "ants" => SweepParameter::Ants,
            "K" | "generations" => SweepParameter::Generations,
            "alpha" => SweepParameter::Alpha,
            "beta" => SweepParameter::Beta,
            "evaporation" | "rho" => SweepParameter::Evaporation,
            "lambda1" | "λ1" => SweepParameter::Weight(0),
            "lambda2" | "λ2" => SweepParameter::Weight(1),
            "lambda3" | "λ3" => SweepParameter::Weight(2),
            "lambda4" | "λ4" => SweepParameter::Weight(3),
            "rounds" => SweepParameter::Rounds,
            other => return Err(Error::UnknownParameter(other.to_string())),
        })
    }
}

/// One report per value of `parameter`, in the given order.
pub fn sweep(spec: &ExperimentSpec, parameter: SweepParameter, values: &[f64]) -> Result<Vec<(f64, ComparisonReport)>, Error> {
    if values.is_empty() {
        return Err(Error::EmptySweep);
    }
    values
        .iter()
        .map(|&v| {
            let mut s = spec.clone();
            parameter.apply(&mut s, v)?;
            Ok((v, run_experiment(&s)?))
        })
        .collect()
}

/// `parameter,value,arm,mean_path_length,sd_path_length,mean_first_round_length,mean_info_per_length,mean_final_coverage`.
pub fn sweep_summary_csv(parameter: SweepParameter, results: &[(f64, ComparisonReport)]) -> String {
    let mut out = String::from(
        "parameter,value,arm,mean_path_length,sd_path_length,mean_first_round_length,mean_info_per_length,mean_final_coverage\n",
    );
    for (value, report) in results {
        for arm in &report.arms {
            let (lm, ls) = arm.length();
            let first = arm.first_round_length().0;
            let info = arm.info_per_length().0;
            let cov = arm.coverage_per_round().last().copied().unwrap_or(0.0);
            let _ = writeln!(
                out,
                "{},{value:.6},{},{lm:.6},{ls:.6},{first:.6},{info:.6},{cov:.6}",
                parameter.name(),
                arm.algorithm.name()
            );
        }
    }
    out
}

/// First generation `g` whose value stays within `tolerance` (strictly) of
/// `series[g]` through `series[g + window]`; `None` if no such window fits.
pub fn stability_generation(series: &[f64], window: usize, tolerance: f64) -> Option<usize> {
    if series.len() <= window {
        return None;
    }
    (0..series.len() - window).find(|&g| series[g..=g + window].iter().all(|&x| (x - series[g]).abs() < tolerance))
}
