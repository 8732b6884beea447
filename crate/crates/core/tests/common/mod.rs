//! Test-only oracles, written independently of the library's search code.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::path::PathBuf;

use bayes_aco::grid::{parse_map, CellClass, Coord, GridMap};

pub fn maps_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("maps")
}

pub fn load(name: &str) -> GridMap {
    let text = std::fs::read_to_string(maps_dir().join(format!("{name}.grid"))).unwrap();
    parse_map(&text).unwrap()
}

/// Open `w x h` map of one terrain symbol, start top-left, goal bottom-right.
pub fn open_map(w: usize, h: usize, fill: char) -> GridMap {
    let mut s = String::new();
    for r in 0..h {
        for c in 0..w {
            s.push(if (r, c) == (0, 0) {
                'S'
            } else if (r, c) == (h - 1, w - 1) {
                'G'
            } else {
                fill
            });
        }
        s.push('\n');
    }
    parse_map(&s).unwrap()
}

fn free(map: &GridMap, r: isize, c: isize) -> bool {
    if r < 0 || c < 0 || r as usize >= map.height() || c as usize >= map.width() {
        return false;
    }
    matches!(map.cells()[r as usize * map.width() + c as usize], CellClass::Road | CellClass::Crop)
}

#[derive(PartialEq)]
struct Item(f64, usize);
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

/// Shortest 8-connected start-goal length (axis 1, diagonal sqrt 2, no
/// squeezing between two blocked orthogonal cells).
pub fn dijkstra(map: &GridMap) -> Option<f64> {
    let w = map.width();
    let idx = |c: Coord| c.row * w + c.col;
    let mut dist = vec![f64::INFINITY; map.len()];
    let mut heap = BinaryHeap::new();
    dist[idx(map.start())] = 0.0;
    heap.push(Item(0.0, idx(map.start())));
    while let Some(Item(d, i)) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        let (r, c) = ((i / w) as isize, (i % w) as isize);
        if i == idx(map.goal()) {
            return Some(d);
        }
        for dr in -1..=1isize {
            for dc in -1..=1isize {
                if (dr, dc) == (0, 0) || !free(map, r + dr, c + dc) {
                    continue;
                }
                if dr != 0 && dc != 0 && !free(map, r + dr, c) && !free(map, r, c + dc) {
                    continue;
                }
                let step = if dr != 0 && dc != 0 { std::f64::consts::SQRT_2 } else { 1.0 };
                let j = ((r + dr) as usize) * w + (c + dc) as usize;
                if d + step < dist[j] {
                    dist[j] = d + step;
                    heap.push(Item(d + step, j));
                }
            }
        }
    }
    None
}

/// Window measurements recomputed from scratch for the move `from -> to`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowOracle {
    pub cells: Vec<Coord>,
    pub components: usize,
    pub blocked: usize,
    pub unexplored: u64,
    pub drought: u64,
    pub scores: [f64; 4],
}

fn side_for(map: &GridMap) -> usize {
    let n = map.width().max(map.height());
    let mut s = 1;
    while s * s < n {
        s += 1;
    }
    (s + 1).min(5)
}

/// Cells of the lookahead square: the candidate sits on the near edge, the
/// square runs forward along each moving axis and is centered on a still one.
pub fn oracle_window(map: &GridMap, from: Coord, to: Coord) -> Vec<Coord> {
    let s = side_for(map) as isize;
    let axis = |a: usize, b: usize| -> (isize, isize) {
        let (a, b) = (a as isize, b as isize);
        if b > a {
            (b, b + s - 1)
        } else if b < a {
            (b - s + 1, b)
        } else {
            (b - (s - 1) / 2, b + s / 2)
        }
    };
    let (r0, r1) = axis(from.row, to.row);
    let (c0, c1) = axis(from.col, to.col);
    let mut out = Vec::new();
    for r in r0..=r1 {
        for c in c0..=c1 {
            if r >= 0 && c >= 0 && (r as usize) < map.height() && (c as usize) < map.width() {
                out.push(Coord::new(r as usize, c as usize));
            }
        }
    }
    out
}

/// Blocking components (8-connected, inside `cells` only) and blocking cells.
pub fn oracle_components(map: &GridMap, cells: &[Coord]) -> (usize, usize) {
    let blocked: Vec<Coord> = cells
        .iter()
        .copied()
        .filter(|&c| matches!(map.cells()[c.row * map.width() + c.col], CellClass::Obstacle | CellClass::River))
        .collect();
    // union-find over the blocked list
    let mut parent: Vec<usize> = (0..blocked.len()).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    for i in 0..blocked.len() {
        for j in i + 1..blocked.len() {
            let (a, b) = (blocked[i], blocked[j]);
            if a.row.abs_diff(b.row) <= 1 && a.col.abs_diff(b.col) <= 1 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let roots = (0..blocked.len()).filter(|&i| find(&mut parent, i) == i).count();
    (roots, blocked.len())
}

pub fn oracle_scores(map: &GridMap, traversal: &[u8], drought: &[u32], from: Coord, to: Coord, drought_max: u32) -> WindowOracle {
    let cells = oracle_window(map, from, to);
    let (components, blocked) = oracle_components(map, &cells);
    let idx = |c: &Coord| c.row * map.width() + c.col;
    let unexplored: u64 = cells.iter().map(|c| u64::from(traversal[idx(c)])).sum();
    let drought_sum: u64 = cells.iter().map(|c| u64::from(drought[idx(c)])).sum();
    let ms = cells.len() as f64;
    let g = map.goal();
    let dist = (((to.row as f64) - g.row as f64).powi(2) + ((to.col as f64) - g.col as f64).powi(2)).sqrt();
    let f1 = 1.0 / dist.max(1.0);
    let f2 = if components == 0 { 1.0 } else { 1.0 / (components + blocked) as f64 };
    let f3 = (drought_sum as f64 / (ms * f64::from(drought_max))).min(1.0);
    let f4 = unexplored as f64 / ms;
    WindowOracle { cells, components, blocked, unexplored, drought: drought_sum, scores: [f1, f2, f3, f4] }
}
