//! Multi-round irrigation cruise with the Bayesian planner on an open crop
//! field, printing the per-round report.
//!
//! ```text
//! cargo run --release --example irrigation_cruise
//! ```

use bayes_aco::grid::parse_map;
use bayes_aco::planner::{run_cruises, Algorithm, CruiseConfig};

fn main() {
    let text = concat!(env!("CARGO_MANIFEST_DIR"), "/maps/open10.grid");
    let map = parse_map(&std::fs::read_to_string(text).unwrap()).unwrap();
    let mut cfg = CruiseConfig::default();
    cfg.aco.seed = 3;
    let report = run_cruises(&map, 8, Algorithm::Improved, &cfg).unwrap();
    print!("{}", report.to_csv());
    println!("irrigation counts:");
    print!("{}", report.irrigation_grid_csv());
}
