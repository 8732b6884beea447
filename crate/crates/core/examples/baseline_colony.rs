//! Classic elitist ant colony on a fixture map, with its convergence curve.
//!
//! ```text
//! cargo run --release --example baseline_colony
//! ```

use bayes_aco::aco::{optimize, AcoConfig};
use bayes_aco::harness::{load_map, stability_generation};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/maps/double_maze.grid");
    let map = load_map(path.as_ref()).expect("fixture map");
    let cfg = AcoConfig { seed: 11, ..Default::default() };
    let run = optimize(&map, &cfg).expect("goal reachable");
    println!("best length {:.3} over {} cells", run.best.length, run.best.len());
    let series = run.convergence.series();
    for g in [0, 4, 9, 24, 49, 99] {
        println!("  generation {:3}: {:.3}", g + 1, series[g]);
    }
    match stability_generation(&series, 10, 1.0) {
        Some(g) => println!("stable from generation {}", g + 1),
        None => println!("never stable"),
    }
}
