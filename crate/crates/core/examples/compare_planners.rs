//! Baseline versus Bayesian planner over seeded replicates, driven by an
//! experiment spec file.
//!
//! ```text
//! cargo run --release --example compare_planners
//! ```

use bayes_aco::harness::{run_experiment, ExperimentSpec};

fn main() {
    let spec_path = concat!(env!("CARGO_MANIFEST_DIR"), "/specs/compare.spec");
    let mut spec = ExperimentSpec::from_file(spec_path).expect("valid spec");
    spec.replicates = 5;
    let report = run_experiment(&spec).unwrap();
    print!("{}", report.to_csv());
    println!(
        "information gain {:+.1}%, length inflation {:+.1}%, thresholds met: {}",
        report.info_gain().unwrap() * 100.0,
        report.length_inflation().unwrap() * 100.0,
        report.meets_thresholds().unwrap()
    );
}
