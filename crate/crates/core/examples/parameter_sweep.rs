//! Sweep the colony size and the number of generations.
//!
//! ```text
//! cargo run --release --example parameter_sweep
//! ```

use bayes_aco::harness::{sweep, sweep_summary_csv, ExperimentSpec, SweepParameter};
use bayes_aco::planner::Algorithm;

fn main() {
    let spec_path = concat!(env!("CARGO_MANIFEST_DIR"), "/specs/compare.spec");
    let mut spec = ExperimentSpec::from_file(spec_path).unwrap();
    spec.algorithms = vec![Algorithm::Baseline];
    spec.replicates = 4;
    spec.rounds = 1;
    for (param, values) in [(SweepParameter::Ants, vec![10.0, 25.0, 50.0]), (SweepParameter::Generations, vec![1.0, 10.0, 100.0])] {
        let results = sweep(&spec, param, &values).unwrap();
        print!("{}", sweep_summary_csv(param, &results));
    }
}
