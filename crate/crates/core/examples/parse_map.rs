//! Parse an ASCII field map and inspect its terrain and moves.
//!
//! ```text
//! cargo run --example parse_map
//! ```

use bayes_aco::grid::{parse_map, CellClass};

fn main() {
    let text = "S.#\n..c\n.~G\n";
    let map = parse_map(text).expect("valid map");
    println!("{}x{} map, start {} goal {}", map.width(), map.height(), map.start(), map.goal());
    for class in [CellClass::Road, CellClass::Crop, CellClass::Obstacle, CellClass::River] {
        println!("  {:8} {}", class.name(), map.count(class));
    }
    for (to, cost) in map.neighbors(map.start()) {
        println!("  start -> {to} costs {cost:.3}");
    }
    println!("goal reachable: {}", map.goal_reachable());
    assert_eq!(map.to_text(), text);

    match parse_map("S.\n.x\n") {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
}
