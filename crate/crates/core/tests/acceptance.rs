//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::collections::BTreeMap;
use std::path::Path as FsPath;
use std::process::{Command, Stdio};
use std::time::Instant;

use bayes_aco::aco::{optimize, AcoConfig, PheromoneField};
use bayes_aco::bayes::{min_risk_decision, posterior, RiskTable, FactorWeights};
use bayes_aco::field::FieldState;
use bayes_aco::grid::GridMap;
use bayes_aco::harness::{run_experiment, stability_generation, ExperimentSpec};
use bayes_aco::planner::{plan_round, run_cruises, run_cruises_observed, step_distribution, Algorithm, CruiseConfig, StepContext, WindowCache};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: u64 = 20;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

struct ColonyBatch {
    map: GridMap,
    optimum: f64,
    lengths: Vec<f64>,
    stability: Vec<Option<usize>>,
    monotone: bool,
    seconds_per_run: f64,
}

fn colony_batches() -> BTreeMap<&'static str, ColonyBatch> {
    let names = [
        "brick_pattern",
        "corridor_waves",
        "dense_area",
        "double_maze",
        "front_and_rear",
        "square_spiral",
        "tunnel_dogleg",
        "tunnel_twisted",
    ];
    names
        .into_iter()
        .map(|name| {
            let map = common::load(name);
            let optimum = common::dijkstra(&map).expect("fixture is solvable");
            let t = Instant::now();
            let mut lengths = Vec::new();
            let mut stability = Vec::new();
            let mut monotone = true;
            for seed in 0..SEEDS {
                let run = optimize(&map, &AcoConfig { seed, ..Default::default() }).unwrap();
                lengths.push(run.best.length);
                stability.push(stability_generation(&run.convergence.series(), 10, 1.0));
                monotone &= run.convergence.is_non_increasing();
            }
            let seconds_per_run = t.elapsed().as_secs_f64() / SEEDS as f64;
            (name, ColonyBatch { map, optimum, lengths, stability, monotone, seconds_per_run })
        })
        .collect()
}

fn baseline_optimality(batches: &BTreeMap<&str, ColonyBatch>) -> Outcome {
    let graded = ["corridor_waves", "dense_area", "double_maze", "front_and_rear", "square_spiral"];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, b) in batches {
        let hits = b.lengths.iter().filter(|&&l| l <= b.optimum * 1.05).count();
        let counted = graded.contains(name);
        if counted {
            pass &= hits * 10 >= b.lengths.len() * 9 && b.seconds_per_run <= 10.0;
        }
        parts.push(format!(
            "{name}{} {hits}/{} ({:.2}s/run)",
            if counted { "" } else { "[info]" },
            b.lengths.len(),
            b.seconds_per_run
        ));
    }
    outcome(pass, format!("within 5% of optimum in >=90% of runs: {}", parts.join(", ")))
}

fn convergence_shape(batches: &BTreeMap<&str, ColonyBatch>) -> Outcome {
    let monotone = batches.values().all(|b| b.monotone);
    let densest = batches
        .iter()
        .max_by(|a, b| blocked_fraction(&a.1.map).total_cmp(&blocked_fraction(&b.1.map)))
        .map(|(n, _)| *n)
        .unwrap();
    let mut pass = monotone;
    let mut parts = Vec::new();
    for (name, b) in batches {
        let n = b.stability.len();
        let by100 = b.stability.iter().filter(|s| s.is_some_and(|g| g <= 100)).count();
        pass &= by100 * 10 >= n * 9;
        parts.push(format!("{name} {by100}/{n}"));
    }
    let b = &batches[densest];
    let by40 = b.stability.iter().filter(|s| s.is_some_and(|g| g <= 40)).count();
    pass &= by40 * 2 >= b.stability.len();
    outcome(
        pass,
        format!(
            "monotone={monotone}; stable by 100: {}; densest {densest} stable by 40: {by40}/{}",
            parts.join(", "),
            b.stability.len()
        ),
    )
}

fn blocked_fraction(m: &GridMap) -> f64 {
    m.cells().iter().filter(|c| c.is_blocking()).count() as f64 / m.len() as f64
}

fn posterior_and_risk_rule() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_norm = 0.0f64;
    let mut worst_scale = 0.0f64;
    let mut rule_mismatch = 0;
    let mut degenerate = 0;
    for _ in 0..10_000 {
        let n = rng.random_range(1..=8);
        let prior: Vec<f64> = (0..n).map(|_| rng.random_range(1e-6..1.0)).collect();
        let lik: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.15) { 0.0 } else { rng.random_range(0.0..1.0) }).collect();
        match posterior(&prior, &lik) {
            Ok(p) => {
                worst_norm = worst_norm.max((p.iter().sum::<f64>() - 1.0).abs());
                let c = 10f64.powf(rng.random_range(-6.0..6.0));
                let scaled: Vec<f64> = lik.iter().map(|l| l * c).collect();
                let q = posterior(&prior, &scaled).unwrap();
                for (a, b) in p.iter().zip(&q) {
                    worst_scale = worst_scale.max((a - b).abs());
                }
                let k = rng.random_range(2..=5);
                let states: Vec<f64> = if k == n { p.clone() } else { (0..k).map(|_| rng.random_range(0.0..1.0)).collect() };
                let table = RiskTable::new((0..k).map(|i| (0..k).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect()).unwrap();
                let argmax = (0..k).fold(0, |b, i| if states[i] > states[b] { i } else { b });
                if min_risk_decision(&states, &table) != argmax {
                    rule_mismatch += 1;
                }
            }
            Err(_) => degenerate += 1,
        }
    }
    let pass = worst_norm <= 1e-9 && worst_scale <= 1e-12 && rule_mismatch == 0;
    outcome(
        pass,
        format!(
            "10000 fuzzed inputs: max |sum-1| {worst_norm:.1e}, max scale drift {worst_scale:.1e}, risk-rule mismatches {rule_mismatch}, degenerate {degenerate}"
        ),
    )
}

fn factor_oracle() -> Outcome {
    let runs = [("dense_area", 1u64), ("brick_pattern", 2), ("double_maze", 3), ("front_and_rear", 4), ("open10", 5)];
    let mut steps = 0usize;
    let mut mismatches = Vec::new();
    for (name, seed) in runs {
        let map = common::load(name);
        let cfg = CruiseConfig { aco: AcoConfig { seed, ants: 20, generations: 30, ..Default::default() }, ..Default::default() };
        let cache = WindowCache::new(&map);
        let pheromone = PheromoneField::new(&map, 1.0);
        run_cruises_observed(&map, 3, Algorithm::Improved, &cfg, |state, _, record| {
            let ctx = StepContext {
                map: &map,
                state,
                pheromone: &pheromone,
                cache: &cache,
                weights: cfg.weights,
                risk: None,
                alpha: 1.0,
                beta: 2.0,
                drought_max: cfg.drought_max,
            };
            let mut visited = vec![false; map.len()];
            for w in record.path.cells.windows(2) {
                visited[map.index(w[0])] = true;
                let dist = step_distribution(&ctx, w[0], &visited).expect("recorded step has candidates");
                let i = dist.candidates.iter().position(|&c| c == w[1]).expect("recorded step is a candidate");
                let got = dist.inputs[i];
                let s = dist.scores[i].as_array();
                let o = common::oracle_scores(&map, &state.traversal, &state.drought, w[0], w[1], cfg.drought_max);
                let ints_ok = got.obstacles.components == o.components
                    && got.obstacles.cells == o.blocked
                    && got.sums.unexplored == o.unexplored
                    && got.sums.drought == o.drought
                    && got.sums.cells == o.cells.len() as u64;
                let reals_ok = (0..4).all(|k| (s[k] - o.scores[k]).abs() <= 1e-12);
                if !(ints_ok && reals_ok) && mismatches.len() < 3 {
                    mismatches.push(format!("{name} round {} {}->{}", record.round, w[0], w[1]));
                }
                steps += 1;
            }
        })
        .unwrap();
    }
    outcome(mismatches.is_empty(), format!("{steps} steps over 5 cruise runs checked; mismatches {mismatches:?}"))
}

fn full_coverage() -> Outcome {
    let map = common::load("open10");
    let mut worst = 0;
    let mut failures = Vec::new();
    let mut monotone = true;
    for seed in 0..SEEDS {
        let cfg = CruiseConfig { aco: AcoConfig { seed, ..Default::default() }, ..Default::default() };
        let r = run_cruises(&map, 10, Algorithm::Improved, &cfg).unwrap();
        monotone &= r.rounds.windows(2).all(|w| w[1].coverage >= w[0].coverage);
        match r.rounds.iter().position(|x| x.coverage >= 1.0) {
            Some(k) => worst = worst.max(k + 1),
            None => failures.push(seed),
        }
    }
    outcome(
        failures.is_empty() && monotone,
        format!("open 10x10 crops: full coverage for {}/{SEEDS} seeds, latest at round {worst}; non-decreasing={monotone}", SEEDS as usize - failures.len()),
    )
}

fn information_gain() -> Outcome {
    let spec_path = common::maps_dir().join("../specs/compare.spec");
    let base = ExperimentSpec::from_file(&spec_path).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["dense_area", "brick_pattern", "front_and_rear"] {
        let mut spec = base.clone();
        spec.map = common::load(name);
        spec.map_path = common::maps_dir().join(format!("{name}.grid"));
        let report = run_experiment(&spec).unwrap();
        let gain = report.info_gain().unwrap();
        let inflation = report.length_inflation().unwrap();
        pass &= report.meets_thresholds().unwrap();
        parts.push(format!("{name} gain {:+.1}% inflation {:+.1}%", gain * 100.0, inflation * 100.0));
    }
    outcome(
        pass,
        format!(
            "rounds>=2 over {} seeds (need gain >= {:.0}%, inflation <= {:.0}%): {}",
            base.replicates,
            base.min_info_gain * 100.0,
            base.max_length_inflation * 100.0,
            parts.join("; ")
        ),
    )
}

fn first_round_contract() -> Outcome {
    let mut changed = Vec::new();
    let mut checked = 0;
    for name in ["dense_area", "double_maze", "open10"] {
        let map = common::load(name);
        for seed in 0..SEEDS {
            let cfg = CruiseConfig { aco: AcoConfig { seed, ants: 20, generations: 30, ..Default::default() }, ..Default::default() };
            let fresh = FieldState::new(&map);
            let mut noisy = fresh.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xD1CE);
            for t in noisy.traversal.iter_mut() {
                *t = rng.random_range(0..=1);
            }
            for d in noisy.drought.iter_mut() {
                *d = rng.random_range(0..=10);
            }
            let a = plan_round(&map, &fresh, Algorithm::Improved, &cfg, &cfg.risk, 1).unwrap();
            let b = plan_round(&map, &noisy, Algorithm::Improved, &cfg, &cfg.risk, 1).unwrap();
            checked += 1;
            if a.path != b.path || a.weights != FactorWeights::FIRST_ROUND {
                changed.push(format!("{name}/{seed}"));
            }
        }
    }
    outcome(changed.is_empty(), format!("{checked} seeded first rounds with perturbed tables; paths changed: {changed:?}"))
}

fn snapshot(dir: &FsPath) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        out.insert(p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap());
    }
    out
}

fn determinism() -> Outcome {
    let maps = common::maps_dir();
    let open = maps.join("open10.grid").display().to_string();
    let dense = maps.join("dense_area.grid").display().to_string();
    let spec = maps.join("../specs/compare.spec").display().to_string();
    let small = ["--ants", "10", "--generations", "15", "--seed", "7"];
    let commands: Vec<(&str, Vec<String>)> = vec![
        ("plan", ["plan", "--map", &open, "--algo", "baseline"].iter().map(|s| s.to_string()).collect()),
        ("plan-improved", ["plan", "--map", &dense, "--algo", "improved", "--rounds", "3"].iter().map(|s| s.to_string()).collect()),
        ("cruise", ["cruise", "--map", &dense, "--rounds", "3"].iter().map(|s| s.to_string()).collect()),
        ("compare", ["compare", "--spec", &spec, "--replicates", "2"].iter().map(|s| s.to_string()).collect()),
        ("sweep", ["sweep", "--spec", &spec, "--replicates", "1", "--param", "beta", "--values", "1,2"].iter().map(|s| s.to_string()).collect()),
        ("render-path", ["render", "--map", &dense, "--overlay", "path"].iter().map(|s| s.to_string()).collect()),
        ("render-irrigation", ["render", "--map", &dense, "--overlay", "irrigation", "--rounds", "2"].iter().map(|s| s.to_string()).collect()),
        ("render-pheromone", ["render", "--map", &dense, "--overlay", "pheromone"].iter().map(|s| s.to_string()).collect()),
    ];
    let mut differing = Vec::new();
    let mut files = 0;
    for (label, args) in &commands {
        let mut shots = Vec::new();
        for _ in 0..2 {
            let out = tempfile::tempdir().unwrap();
            let status = Command::new(env!("CARGO_BIN_EXE_bayes-aco"))
                .args(args)
                .args(small)
                .args(["--out", &out.path().display().to_string()])
                .stdout(Stdio::null())
                .status()
                .unwrap();
            if !status.success() {
                differing.push(format!("{label} failed"));
            }
            shots.push(snapshot(out.path()));
        }
        files += shots[0].len();
        if shots[0] != shots[1] || shots[0].is_empty() {
            differing.push(label.to_string());
        }
    }
    outcome(differing.is_empty(), format!("{} commands, {files} artifacts compared byte for byte; differing {differing:?}", commands.len()))
}

fn main() {
    let t = Instant::now();
    let batches = colony_batches();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("baseline optimality", Box::new(|| baseline_optimality(&batches))),
        ("convergence shape", Box::new(|| convergence_shape(&batches))),
        ("posterior and risk rule", Box::new(posterior_and_risk_rule)),
        ("factor-score oracle", Box::new(factor_oracle)),
        ("maximum-risk full coverage", Box::new(full_coverage)),
        ("information gain vs baseline", Box::new(information_gain)),
        ("first-round weight contract", Box::new(first_round_contract)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {}/{} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), t.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
