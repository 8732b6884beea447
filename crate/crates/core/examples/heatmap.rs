//! Render the irrigation counts of a cruise as a P3 heatmap over the map.
//!
//! ```text
//! cargo run --release --example heatmap > irrigation.ppm
//! ```

use bayes_aco::harness::load_map;
use bayes_aco::planner::{run_cruises, Algorithm, CruiseConfig};
use bayes_aco::render::{overlay_path, render_heatmap, RenderStyle};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/maps/front_and_rear.grid");
    let map = load_map(path.as_ref()).unwrap();
    let report = run_cruises(&map, 3, Algorithm::Improved, &CruiseConfig::default()).unwrap();
    let counts: Vec<f64> = report.irrigation_count.iter().map(|&c| f64::from(c)).collect();
    let style = RenderStyle { cell_size: 6, ..Default::default() };
    let mut img = render_heatmap(&map, &counts, &style).unwrap();
    overlay_path(&mut img, &report.rounds.last().unwrap().path, &style);
    print!("{}", img.to_ppm());
}
