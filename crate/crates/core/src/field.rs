//! Per-cell memory carried across cruise rounds.

use std::fmt::Write as _;

use crate::error::ConfigError;
use crate::grid::{CellClass, Coord, GridMap, PredictionWindow};

/// Soil moisture dynamics standing in for the on-board drought sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoistureModel {
    pub decay_per_round: f64,
    pub dry_threshold: f64,
    pub irrigation_refill: f64,
}

impl Default for MoistureModel {
    fn default() -> Self {
        MoistureModel { decay_per_round: 0.2, dry_threshold: 0.5, irrigation_refill: 1.0 }
    }
}

impl MoistureModel {
    pub fn new(decay_per_round: f64, dry_threshold: f64, irrigation_refill: f64) -> Result<Self, ConfigError> {
        let m = MoistureModel { decay_per_round, dry_threshold, irrigation_refill };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let open = |x: f64| x > 0.0 && x < 1.0;
        if !open(self.decay_per_round) {
            return Err(ConfigError::new("decay", "must lie in (0,1)"));
        }
        if !open(self.dry_threshold) {
            return Err(ConfigError::new("dry_threshold", "must lie in (0,1)"));
        }
        if !(self.irrigation_refill > 0.0 && self.irrigation_refill <= 1.0) {
            return Err(ConfigError::new("refill", "must lie in (0,1]"));
        }
        if self.dry_threshold >= self.irrigation_refill {
            return Err(ConfigError::new("dry_threshold", "must be below the irrigation refill level"));
        }
        Ok(())
    }
}

/// Window aggregates used by the factor scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSums {
    /// Sum of the traversal table (`Wdx`): cells never irrigated.
    pub unexplored: u64,
    /// Sum of the drought table (`GHdx`).
    pub drought: u64,
    /// Cells in the window (`mS`).
    pub cells: u64,
}

/// What one irrigation pass changed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PassSummary {
    /// Traversable cells whose traversal flag went from 1 to 0.
    pub newly_explored: usize,
    /// Crop cells that received water.
    pub crops_irrigated: usize,
    /// Water applied, in moisture units (`refill - moisture_before`, summed).
    pub volume: f64,
}

/// Traversal, drought and moisture tables over the whole grid.
///
/// `traversal` starts at 1 on every cell and drops to 0 the first time the
/// cell is irrigated. `drought` counts rounds a crop spent below the dry
/// threshold and is also raised to the maximum-risk value on unexplored cells.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub traversal: Vec<u8>,
    pub drought: Vec<u32>,
    pub moisture: Vec<f64>,
    /// Completed cruise rounds.
    pub round: usize,
}

impl FieldState {
    /// Fresh state: everything unexplored, no drought, crops fully watered.
    pub fn new(map: &GridMap) -> Self {
        FieldState {
            traversal: vec![1; map.len()],
            drought: vec![0; map.len()],
            moisture: map.cells().iter().map(|&c| if c == CellClass::Crop { 1.0 } else { 0.0 }).collect(),
            round: 0,
        }
    }

    pub fn window_sums(&self, map: &GridMap, window: &PredictionWindow) -> WindowSums {
        let mut sums = WindowSums { unexplored: 0, drought: 0, cells: 0 };
        for r in window.rows() {
            let base = r * map.width();
            for i in window.cols().map(|c| base + c) {
                sums.unexplored += u64::from(self.traversal[i]);
                sums.drought += u64::from(self.drought[i]);
                sums.cells += 1;
            }
        }
        sums
    }

    pub fn is_explored(&self, map: &GridMap, at: Coord) -> bool {
        self.traversal[map.index(at)] == 0
    }

    /// Marks `irrigated` cells as explored and waters the crops among them.
    ///
    /// Drought counters are cleared only on cells that were dry when watered
    /// or had never been observed (so a maximum-risk placeholder does not
    /// outlive the first real reading).
    pub fn record_pass(&mut self, map: &GridMap, irrigated: &[Coord], model: &MoistureModel) -> PassSummary {
        let mut summary = PassSummary::default();
        for &at in irrigated {
            let i = map.index(at);
            let first_visit = self.traversal[i] == 1;
            if first_visit && map.class(at).is_traversable() {
                summary.newly_explored += 1;
            }
            let mut dry = false;
            if map.class(at) == CellClass::Crop {
                dry = self.moisture[i] < model.dry_threshold;
                summary.crops_irrigated += 1;
                summary.volume += (model.irrigation_refill - self.moisture[i]).max(0.0);
                self.moisture[i] = model.irrigation_refill;
            }
            if dry || first_visit {
                self.drought[i] = 0;
            }
            self.traversal[i] = 0;
        }
        summary
    }

    /// One round of drying: crops lose moisture and dry ones accrue drought.
    pub fn advance_round(&mut self, map: &GridMap, model: &MoistureModel) {
        for (i, &class) in map.cells().iter().enumerate() {
            if class != CellClass::Crop {
                continue;
            }
            let m = (self.moisture[i] - model.decay_per_round).max(0.0);
            self.moisture[i] = m;
            if m < model.dry_threshold {
                self.drought[i] += 1;
            }
        }
        self.round += 1;
    }

    /// Assigns the maximum drought value to every unexplored traversable cell.
    pub fn apply_maximum_risk(&mut self, map: &GridMap, drought_max: u32) {
        for (i, &class) in map.cells().iter().enumerate() {
            if class.is_traversable() && self.traversal[i] == 1 {
                self.drought[i] = drought_max;
            }
        }
    }

    /// Traversable cells not yet explored.
    pub fn unexplored_traversable(&self, map: &GridMap) -> usize {
        map.cells().iter().zip(&self.traversal).filter(|(c, &t)| c.is_traversable() && t == 1).count()
    }

    /// Fraction of crop cells explored; 1 when the map has no crops.
    pub fn crop_coverage(&self, map: &GridMap) -> f64 {
        let mut crops = 0usize;
        let mut done = 0usize;
        for (c, &t) in map.cells().iter().zip(&self.traversal) {
            if *c == CellClass::Crop {
                crops += 1;
                if t == 0 {
                    done += 1;
                }
            }
        }
        if crops == 0 {
            1.0
        } else {
            done as f64 / crops as f64
        }
    }

    /// Mean drought counter over crop cells (0 on crop-free maps).
    pub fn mean_crop_drought(&self, map: &GridMap) -> f64 {
        let (sum, n) = map
            .cells()
            .iter()
            .zip(&self.drought)
            .filter(|(c, _)| **c == CellClass::Crop)
            .fold((0u64, 0usize), |(s, n), (_, &d)| (s + u64::from(d), n + 1));
        if n == 0 {
            0.0
        } else {
            sum as f64 / n as f64
        }
    }

    /// CSV snapshot: `x,y,class,traversal,drought,moisture` with `x` the
    /// column and `y` the row.
    pub fn to_csv(&self, map: &GridMap) -> String {
        let mut out = String::from("x,y,class,traversal,drought,moisture\n");
        for at in map.coords() {
            let i = map.index(at);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.6}",
                at.col,
                at.row,
                map.class(at).name(),
                self.traversal[i],
                self.drought[i],
                self.moisture[i]
            );
        }
        out
    }
}

/// Traversable cells within Chebyshev `radius` of any path cell, in first-seen
/// order along the path.
pub fn irrigation_swath(map: &GridMap, path: &[Coord], radius: usize) -> Vec<Coord> {
    let mut seen = vec![false; map.len()];
    let mut out = Vec::new();
    for &p in path {
        let r0 = p.row.saturating_sub(radius);
        let c0 = p.col.saturating_sub(radius);
        let r1 = (p.row + radius).min(map.height() - 1);
        let c1 = (p.col + radius).min(map.width() - 1);
        for r in r0..=r1 {
            for c in c0..=c1 {
                let at = Coord::new(r, c);
                let i = map.index(at);
                if !seen[i] && map.class(at).is_traversable() {
                    seen[i] = true;
                    out.push(at);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{parse_map, prediction_window};

    fn field(n: usize) -> GridMap {
        let mut s = String::new();
        for r in 0..n {
            for c in 0..n {
                s.push(if (r, c) == (0, 0) { 'S' } else if (r, c) == (n - 1, n - 1) { 'G' } else { 'c' });
            }
            s.push('\n');
        }
        parse_map(&s).unwrap()
    }

    fn full_window(map: &GridMap) -> PredictionWindow {
        let w = prediction_window(map, Coord::new(8, 7), Coord::new(8, 8)).unwrap();
        assert_eq!(w.len(), 25);
        w
    }

    #[test]
    fn fresh_window_sums() {
        let m = field(16);
        let s = FieldState::new(&m);
        assert_eq!(s.window_sums(&m, &full_window(&m)), WindowSums { unexplored: 25, drought: 0, cells: 25 });
    }

    #[test]
    fn sums_after_irrigation_and_drought() {
        let m = field(16);
        let w = full_window(&m);
        let mut s = FieldState::new(&m);
        let cells: Vec<Coord> = w.cells().take(10).collect();
        s.record_pass(&m, &cells, &MoistureModel::default());
        assert_eq!(s.window_sums(&m, &w).unexplored, 15);

        let mut s = FieldState::new(&m);
        for at in w.cells().skip(4).take(3) {
            s.drought[m.index(at)] = 2;
        }
        assert_eq!(s.window_sums(&m, &w).drought, 6);
    }

    #[test]
    fn traversal_floors_at_zero() {
        let m = field(4);
        let mut s = FieldState::new(&m);
        let at = [Coord::new(1, 1)];
        let model = MoistureModel::default();
        let first = s.record_pass(&m, &at, &model);
        let second = s.record_pass(&m, &at, &model);
        assert_eq!(s.traversal[m.index(at[0])], 0);
        assert_eq!(first.newly_explored, 1);
        assert_eq!(second.newly_explored, 0);
    }

    #[test]
    fn empty_pass_is_identity() {
        let m = field(4);
        let mut s = FieldState::new(&m);
        let before = s.clone();
        let summary = s.record_pass(&m, &[], &MoistureModel::default());
        assert_eq!(s, before);
        assert_eq!(summary, PassSummary::default());
    }

    #[test]
    fn irrigation_refills_crops() {
        let m = field(4);
        let mut s = FieldState::new(&m);
        let i = m.index(Coord::new(2, 1));
        s.moisture[i] = 0.3;
        let model = MoistureModel::new(0.2, 0.5, 0.9).unwrap();
        let summary = s.record_pass(&m, &[Coord::new(2, 1)], &model);
        assert_eq!(s.moisture[i], 0.9);
        assert!((summary.volume - 0.6).abs() < 1e-12);
    }

    #[test]
    fn drying_arithmetic() {
        let m = field(4);
        let model = MoistureModel::default();
        let i = m.index(Coord::new(1, 2));
        let j = m.index(Coord::new(2, 1));
        let mut s = FieldState::new(&m);
        s.moisture[i] = 0.9;
        s.moisture[j] = 0.6;
        s.advance_round(&m, &model);
        assert!((s.moisture[i] - 0.7).abs() < 1e-12);
        assert_eq!(s.drought[i], 0);
        assert!((s.moisture[j] - 0.4).abs() < 1e-12);
        assert_eq!(s.drought[j], 1);
        assert_eq!(s.round, 1);
    }

    #[test]
    fn roads_never_dry() {
        let m = parse_map("S..\n.c.\n..G\n").unwrap();
        let mut s = FieldState::new(&m);
        for _ in 0..10 {
            s.advance_round(&m, &MoistureModel::default());
        }
        for at in m.coords() {
            let d = s.drought[m.index(at)];
            if m.class(at) == CellClass::Crop {
                assert!(d > 0);
            } else {
                assert_eq!(d, 0);
            }
        }
    }

    #[test]
    fn maximum_risk_targets_unexplored_only() {
        let m = field(5);
        let mut s = FieldState::new(&m);
        let explored = Coord::new(2, 2);
        s.record_pass(&m, &[explored], &MoistureModel::default());
        s.drought[m.index(explored)] = 3;
        s.apply_maximum_risk(&m, 10);
        assert_eq!(s.drought[m.index(explored)], 3);
        for at in m.coords().filter(|&c| c != explored) {
            assert_eq!(s.drought[m.index(at)], 10);
        }

        let mut all = FieldState::new(&m);
        let every: Vec<Coord> = m.coords().collect();
        all.record_pass(&m, &every, &MoistureModel::default());
        let before = all.clone();
        all.apply_maximum_risk(&m, 10);
        assert_eq!(all, before);
    }

    #[test]
    fn maximum_risk_skips_obstacles() {
        let m = parse_map("S#.\n.~.\n..G\n").unwrap();
        let mut s = FieldState::new(&m);
        s.apply_maximum_risk(&m, 7);
        assert_eq!(s.drought[m.index(Coord::new(0, 1))], 0);
        assert_eq!(s.drought[m.index(Coord::new(1, 1))], 0);
        assert_eq!(s.drought[m.index(Coord::new(0, 2))], 7);
    }

    #[test]
    fn model_validation() {
        assert!(MoistureModel::new(0.2, 0.5, 1.0).is_ok());
        assert!(MoistureModel::new(0.0, 0.5, 1.0).is_err());
        assert!(MoistureModel::new(0.2, 0.9, 0.8).is_err());
        assert!(MoistureModel::new(0.2, 0.5, 1.1).is_err());
    }

    #[test]
    fn swath_radius() {
        let m = field(6);
        let path = [Coord::new(0, 0), Coord::new(1, 1)];
        let sw = irrigation_swath(&m, &path, 1);
        assert_eq!(sw.len(), 9);
        assert!(sw.iter().all(|c| c.row <= 2 && c.col <= 2));
        assert_eq!(irrigation_swath(&m, &path, 0).len(), 2);
    }

    #[test]
    fn csv_snapshot_header_and_rows() {
        let m = parse_map("S.\ncG\n").unwrap();
        let csv = FieldState::new(&m).to_csv(&m);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,y,class,traversal,drought,moisture");
        assert_eq!(lines[3], "0,1,crop,1,0,1.000000");
        assert_eq!(lines.len(), 5);
    }
}
