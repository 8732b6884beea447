//! Command-line surface: `plan`, `cruise`, `compare`, `sweep`, `render`.
//!
//! Exit codes: 1 map parse error, 2 goal unreachable, 3 bad flags or spec,
//! 4 no ant reached the goal.

use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::aco::{self, Path};
use crate::bayes::FactorWeights;
use crate::error::{ConfigError, Error, PlanError};
use crate::grid::{Coord, GridMap};
use crate::harness::{load_map, run_experiment, sweep, sweep_summary_csv, ExperimentSpec, SweepParameter};
use crate::planner::{grid_csv, run_cruises, Algorithm, CruiseConfig};
use crate::render::{overlay_path, render_heatmap, render_map, render_series, Overlay, RenderStyle};

#[derive(Debug, Parser)]
#[command(name = "bayes-aco", version, about = "Bayesian ant-colony irrigation path planner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan start-to-goal paths and write path CSVs.
    Plan(RunArgs),
    /// Run a multi-round irrigation campaign and write its reports.
    Cruise(RunArgs),
    /// Compare the baseline and improved planners over seeded replicates.
    Compare(SpecArgs),
    /// Repeat a comparison for each value of one parameter.
    Sweep(SweepArgs),
    /// Render a map with a path or heatmap overlay as a P3 image.
    Render(RenderArgs),
}

/// Settings shared by every command; unset flags keep the defaults (or the
/// spec file's values).
#[derive(Debug, Clone, Default, Args)]
pub struct Tunables {
    #[arg(long)]
    pub algo: Option<Algorithm>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub ants: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Factor weights `l1,l2,l3,l4`.
    #[arg(long)]
    pub weights: Option<FactorWeights>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub evaporation: Option<f64>,
    #[arg(long)]
    pub initial_pheromone: Option<f64>,
    #[arg(long)]
    pub information_weight: Option<f64>,
}

impl Tunables {
    fn apply(&self, cruise: &mut CruiseConfig) {
        let aco = &mut cruise.aco;
        if let Some(v) = self.seed {
            aco.seed = v;
        }
        if let Some(v) = self.ants {
            aco.ants = v;
        }
        if let Some(v) = self.generations {
            aco.generations = v;
        }
        if let Some(v) = self.alpha {
            aco.alpha = v;
        }
        if let Some(v) = self.beta {
            aco.beta = v;
        }
        if let Some(v) = self.evaporation {
            aco.evaporation = v;
        }
        if let Some(v) = self.initial_pheromone {
            aco.initial_pheromone = v;
        }
        if let Some(v) = self.weights {
            cruise.weights = v;
        }
        if let Some(v) = self.information_weight {
            cruise.information_weight = v;
        }
    }

    fn apply_spec(&self, spec: &mut ExperimentSpec) {
        self.apply(&mut spec.cruise);
        if let Some(v) = self.seed {
            spec.seed = v;
        }
        if let Some(v) = self.rounds {
            spec.rounds = v;
        }
        if let Some(a) = self.algo {
            spec.algorithms = vec![a];
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[command(flatten)]
    pub tunables: Tunables,
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// `key = value` experiment file.
    #[arg(long)]
    pub spec: PathBuf,
    /// Overrides the spec's map.
    #[arg(long)]
    pub map: Option<PathBuf>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[command(flatten)]
    pub tunables: Tunables,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub base: SpecArgs,
    /// One of M, K, alpha, beta, evaporation, lambda1..lambda4, rounds.
    #[arg(long)]
    pub param: String,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// path, pheromone, irrigation or drought.
    #[arg(long, default_value = "irrigation")]
    pub overlay: Overlay,
    /// Row-per-line intensity CSV to draw instead of running a cruise.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// `step,row,col` CSV to draw instead of planning.
    #[arg(long)]
    pub path: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    pub cell_size: usize,
    /// Output image; defaults to `<overlay>.ppm`.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[command(flatten)]
    pub tunables: Tunables,
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Map { .. } => 1,
        Error::Plan(PlanError::Unreachable) => 2,
        Error::Plan(PlanError::NoPathFound) => 4,
        _ => 3,
    }
}

fn write(path: &FsPath, text: &str) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn cruise_config(map: &GridMap, t: &Tunables) -> Result<CruiseConfig, Error> {
    let mut c = CruiseConfig::default();
    t.apply(&mut c);
    c.validate(map)?;
    Ok(c)
}

/// Runs one parsed command, printing a short summary to stdout.
pub fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Plan(a) => plan(&a),
        Command::Cruise(a) => cruise(&a),
        Command::Compare(a) => compare(&a),
        Command::Sweep(a) => run_sweep(&a),
        Command::Render(a) => render(&a),
    }
}

fn plan(a: &RunArgs) -> Result<(), Error> {
    let map = load_map(&a.map)?;
    let cfg = cruise_config(&map, &a.tunables)?;
    let algo = a.tunables.algo.unwrap_or(Algorithm::Baseline);
    let rounds = a.tunables.rounds.unwrap_or(1);
    if rounds == 1 && algo == Algorithm::Baseline {
        let run = aco::optimize(&map, &cfg.aco)?;
        write(&a.out.join("path.csv"), &run.best.to_csv())?;
        write(&a.out.join("convergence.csv"), &run.convergence.to_csv())?;
        println!("length {:.6}", run.best.length);
        return Ok(());
    }
    let report = run_cruises(&map, rounds, algo, &cfg)?;
    for r in &report.rounds {
        let name = if rounds == 1 { "path.csv".to_string() } else { format!("path_round_{}.csv", r.round) };
        write(&a.out.join(name), &r.path.to_csv())?;
        println!("round {} length {:.6}", r.round, r.path.length);
    }
    Ok(())
}

fn cruise(a: &RunArgs) -> Result<(), Error> {
    let map = load_map(&a.map)?;
    let cfg = cruise_config(&map, &a.tunables)?;
    let algo = a.tunables.algo.unwrap_or(Algorithm::Improved);
    let report = run_cruises(&map, a.tunables.rounds.unwrap_or(3), algo, &cfg)?;
    write(&a.out.join("cruise_report.csv"), &report.to_csv())?;
    write(&a.out.join("convergence.csv"), &report.convergence_csv())?;
    write(&a.out.join("irrigation_grid.csv"), &report.irrigation_grid_csv())?;
    write(&a.out.join("irrigation_volume.csv"), &grid_csv(&report.irrigation_volume, map.width()))?;
    write(&a.out.join("state.csv"), &report.final_state.to_csv(&map))?;
    for r in &report.rounds {
        write(&a.out.join(format!("path_round_{}.csv", r.round)), &r.path.to_csv())?;
    }
    let style = RenderStyle::default();
    let counts: Vec<f64> = report.irrigation_count.iter().map(|&c| f64::from(c)).collect();
    write(&a.out.join("irrigation.ppm"), &render_heatmap(&map, &counts, &style)?.to_ppm())?;
    for r in &report.rounds {
        println!(
            "round {} length {:.6} new {} coverage {:.6}",
            r.round, r.path.length, r.pass.newly_explored, r.coverage
        );
    }
    Ok(())
}

fn load_spec(a: &SpecArgs) -> Result<ExperimentSpec, Error> {
    let mut spec = ExperimentSpec::from_file(&a.spec)?;
    if let Some(m) = &a.map {
        spec.map = load_map(m)?;
        spec.map_path = m.clone();
    }
    if let Some(r) = a.replicates {
        spec.replicates = r;
    }
    a.tunables.apply_spec(&mut spec);
    spec.validate()?;
    Ok(spec)
}

fn compare(a: &SpecArgs) -> Result<(), Error> {
    let spec = load_spec(a)?;
    let report = run_experiment(&spec)?;
    report.write_to(&a.out)?;
    let series: Vec<Vec<f64>> = report.arms.iter().map(|arm| arm.runs[0].rounds[0].convergence.series()).collect();
    if let Ok(img) = render_series(&series, 200, 100, &[[200, 40, 40], [40, 90, 210]]) {
        write(&a.out.join("convergence.ppm"), &img.to_ppm())?;
    }
    for arm in &report.arms {
        let (lm, ls) = arm.length();
        let (im, _) = arm.info_per_length();
        println!("{} length {lm:.6} sd {ls:.6} info_per_length {im:.6}", arm.algorithm.name());
    }
    if let (Some(g), Some(l)) = (report.info_gain(), report.length_inflation()) {
        println!("info_gain {g:.6} length_inflation {l:.6}");
    }
    Ok(())
}

fn run_sweep(a: &SweepArgs) -> Result<(), Error> {
    let param: SweepParameter = a.param.parse()?;
    let spec = load_spec(&a.base)?;
    let results = sweep(&spec, param, &a.values)?;
    let csv = sweep_summary_csv(param, &results);
    write(&a.base.out.join("sweep_summary.csv"), &csv)?;
    print!("{csv}");
    Ok(())
}

fn read_grid(path: &FsPath) -> Result<Vec<f64>, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .flat_map(|l| l.split(','))
        .map(|v| v.trim().parse::<f64>().map_err(|_| ConfigError::new("grid", format!("bad number {v:?}")).into()))
        .collect()
}

fn read_path(path: &FsPath) -> Result<Path, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |l: &str| Error::from(ConfigError::new("path", format!("bad row {l:?}")));
    let mut cells = Vec::new();
    for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 {
            return Err(bad(line));
        }
        let row = f[1].trim().parse().map_err(|_| bad(line))?;
        let col = f[2].trim().parse().map_err(|_| bad(line))?;
        cells.push(Coord::new(row, col));
    }
    Ok(Path::from_cells(cells))
}

fn render(a: &RenderArgs) -> Result<(), Error> {
    let map = load_map(&a.map)?;
    let style = RenderStyle { cell_size: a.cell_size, overlay: a.overlay, ..Default::default() };
    let cfg = cruise_config(&map, &a.tunables)?;
    let algo = a.tunables.algo.unwrap_or(Algorithm::Improved);
    let rounds = a.tunables.rounds.unwrap_or(3);
    let img = match a.overlay {
        Overlay::Path => {
            let path = match &a.path {
                Some(p) => read_path(p)?,
                None => aco::optimize(&map, &cfg.aco)?.best,
            };
            if !path.is_valid_on(&map) {
                return Err(ConfigError::new("path", "not a legal start-to-goal path on this map").into());
            }
            let mut img = render_map(&map, &style)?;
            overlay_path(&mut img, &path, &style);
            img
        }
        overlay => {
            let values = match &a.grid {
                Some(g) => read_grid(g)?,
                None => match overlay {
                    Overlay::Pheromone => aco::optimize(&map, &cfg.aco)?.pheromone.cell_totals(&map),
                    Overlay::Drought => {
                        let r = run_cruises(&map, rounds, algo, &cfg)?;
                        r.final_state.drought.iter().map(|&d| f64::from(d)).collect()
                    }
                    _ => run_cruises(&map, rounds, algo, &cfg)?.irrigation_count.iter().map(|&c| f64::from(c)).collect(),
                },
            };
            render_heatmap(&map, &values, &style)?
        }
    };
    let out = if a.out.extension().is_some_and(|e| e == "ppm") {
        a.out.clone()
    } else {
        let name = match a.overlay {
            Overlay::Path => "path",
            Overlay::Pheromone => "pheromone",
            Overlay::Irrigation => "irrigation",
            Overlay::Drought => "drought",
        };
        a.out.join(format!("{name}.ppm"))
    };
    write(&out, &img.to_ppm())?;
    println!("wrote {}", out.display());
    Ok(())
}
