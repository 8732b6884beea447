//! Lookahead windows and the obstacle statistics measured inside them.
//!
//! ```text
//! cargo run --example prediction_windows
//! ```

use bayes_aco::grid::{obstacle_stats, parse_map, prediction_window, window_side, Coord, Direction};

fn main() {
    let map = parse_map(concat!(
        "S.........\n",
        "..........\n",
        "....###...\n",
        "....###...\n",
        ".........G\n",
    ))
    .unwrap();
    println!("window side for scale {}: {}", map.scale(), window_side(map.scale()));
    let from = Coord::new(2, 2);
    for dir in [Direction::E, Direction::SE, Direction::N] {
        let to = map.step(from, dir).unwrap();
        let w = prediction_window(&map, from, to).unwrap();
        let stats = obstacle_stats(&map, &w);
        println!(
            "{from} -> {to} ({dir:?}): rows {:?} cols {:?}, {} cells, Znum {} Zdx {}",
            w.rows(),
            w.cols(),
            w.len(),
            stats.components,
            stats.cells
        );
    }
}
