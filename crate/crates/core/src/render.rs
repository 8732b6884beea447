//! Plain-text PPM (P3) rendering of maps, heatmaps, paths and convergence
//! curves.

use crate::aco::Path;
use crate::error::{ConfigError, Error};
use crate::grid::{CellClass, GridMap};

pub type Rgb = [u8; 3];

/// Colors for the four cell classes and the overlays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Palette {
    pub obstacle: Rgb,
    pub road: Rgb,
    pub crop: Rgb,
    pub river: Rgb,
    /// Color of the maximum heatmap intensity.
    pub intensity: Rgb,
    pub path: Rgb,
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            obstacle: [128, 128, 128],
            road: [200, 40, 40],
            crop: [60, 170, 60],
            river: [40, 90, 210],
            intensity: [10, 30, 90],
            path: [250, 220, 40],
        }
    }
}

impl Palette {
    pub fn class(&self, class: CellClass) -> Rgb {
        match class {
            CellClass::Obstacle => self.obstacle,
            CellClass::Road => self.road,
            CellClass::Crop => self.crop,
            CellClass::River => self.river,
        }
    }
}

/// Which layer the `render` command draws over the map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overlay {
    Path,
    Pheromone,
    Irrigation,
    Drought,
}

impl std::str::FromStr for Overlay {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "path" => Ok(Overlay::Path),
            "pheromone" => Ok(Overlay::Pheromone),
            "irrigation" => Ok(Overlay::Irrigation),
            "drought" => Ok(Overlay::Drought),
            other => Err(ConfigError::new("overlay", format!("expected path, pheromone, irrigation or drought, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderStyle {
    /// Side of one cell in pixels.
    pub cell_size: usize,
    pub palette: Palette,
    pub overlay: Overlay,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle { cell_size: 8, palette: Palette::default(), overlay: Overlay::Irrigation }
    }
}

impl RenderStyle {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.cell_size == 0 {
            return Err(ConfigError::new("cell_size", "must be at least 1 pixel"));
        }
        Ok(())
    }
}

/// An RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

impl Image {
    pub fn new(width: usize, height: usize, fill: Rgb) -> Self {
        Image { width, height, pixels: vec![fill; width * height] }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, color: Rgb) {
        self.pixels[y * self.width + x] = color;
    }

    fn fill_cell(&mut self, row: usize, col: usize, size: usize, color: Rgb) {
        for y in row * size..(row + 1) * size {
            for x in col * size..(col + 1) * size {
                self.set(x, y, color);
            }
        }
    }

    /// Plain-text `P3` document, one pixel row per line.
    pub fn to_ppm(&self) -> String {
        let mut out = format!("P3\n{} {}\n255\n", self.width, self.height);
        for row in self.pixels.chunks(self.width.max(1)) {
            let line: Vec<String> = row.iter().map(|[r, g, b]| format!("{r} {g} {b}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

fn lerp(a: Rgb, b: Rgb, t: f64) -> Rgb {
    let mix = |x: u8, y: u8| (f64::from(x) + (f64::from(y) - f64::from(x)) * t).round() as u8;
    [mix(a[0], b[0]), mix(a[1], b[1]), mix(a[2], b[2])]
}

/// Cell classes in their palette colors.
pub fn render_map(map: &GridMap, style: &RenderStyle) -> Result<Image, Error> {
    style.validate()?;
    let s = style.cell_size;
    let mut img = Image::new(map.width() * s, map.height() * s, style.palette.road);
    for at in map.coords() {
        img.fill_cell(at.row, at.col, s, style.palette.class(map.class(at)));
    }
    Ok(img)
}

/// Map render with every cell blended toward the intensity color in
/// proportion to `intensities[i] / max`. Zero leaves the class color.
pub fn render_heatmap(map: &GridMap, intensities: &[f64], style: &RenderStyle) -> Result<Image, Error> {
    if intensities.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if intensities.len() != map.len() {
        return Err(ConfigError::new("intensities", format!("expected {} cells, got {}", map.len(), intensities.len())).into());
    }
    if intensities.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(ConfigError::new("intensities", "must be finite and non-negative").into());
    }
    let mut img = render_map(map, style)?;
    let max = intensities.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(img);
    }
    for at in map.coords() {
        let v = intensities[map.index(at)];
        if v > 0.0 {
            let base = style.palette.class(map.class(at));
            img.fill_cell(at.row, at.col, style.cell_size, lerp(base, style.palette.intensity, v / max));
        }
    }
    Ok(img)
}

/// Paints the cells of `path` in the path color.
pub fn overlay_path(img: &mut Image, path: &Path, style: &RenderStyle) {
    for c in &path.cells {
        img.fill_cell(c.row, c.col, style.cell_size, style.palette.path);
    }
}

/// Line chart of one or more series on a white canvas: x is the generation,
/// y spans the finite range of all series. Non-finite points are skipped.
pub fn render_series(series: &[Vec<f64>], width: usize, height: usize, colors: &[Rgb]) -> Result<Image, Error> {
    if width < 2 || height < 2 {
        return Err(ConfigError::new("size", "plot needs at least 2x2 pixels").into());
    }
    let finite = series.iter().flatten().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > hi {
        return Err(Error::EmptyGrid);
    }
    let mut img = Image::new(width, height, [255, 255, 255]);
    let span = if hi > lo { hi - lo } else { 1.0 };
    for (k, s) in series.iter().enumerate() {
        let color = colors.get(k % colors.len().max(1)).copied().unwrap_or([0, 0, 0]);
        let steps = s.len().saturating_sub(1).max(1) as f64;
        let mut prev: Option<(usize, usize)> = None;
        for (i, &v) in s.iter().enumerate() {
            if !v.is_finite() {
                prev = None;
                continue;
            }
            let x = (i as f64 / steps * (width - 1) as f64).round() as usize;
            let y = ((hi - v) / span * (height - 1) as f64).round() as usize;
            if let Some((px, py)) = prev {
                for xx in px..=x {
                    img.set(xx, py, color);
                }
                for yy in py.min(y)..=py.max(y) {
                    img.set(x, yy, color);
                }
            }
            img.set(x, y, color);
            prev = Some((x, y));
        }
    }
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{parse_map, Coord};

    fn style(size: usize) -> RenderStyle {
        RenderStyle { cell_size: size, ..Default::default() }
    }

    #[test]
    fn zero_intensities_equal_plain_render() {
        let m = parse_map("S.#\n..c\n.~G\n").unwrap();
        let plain = render_map(&m, &style(2)).unwrap();
        assert_eq!(render_heatmap(&m, &[0.0; 9], &style(2)).unwrap(), plain);
    }

    #[test]
    fn single_peak_saturates_one_block() {
        let m = parse_map("S.#\n..c\n.~G\n").unwrap();
        let mut v = vec![0.0; 9];
        v[5] = 4.0;
        let st = style(3);
        let img = render_heatmap(&m, &v, &st).unwrap();
        let plain = render_map(&m, &st).unwrap();
        let changed: Vec<usize> = (0..img.pixels.len()).filter(|&i| img.pixels[i] != plain.pixels[i]).collect();
        assert_eq!(changed.len(), 9);
        assert!(changed.iter().all(|&i| img.pixels[i] == st.palette.intensity));
        assert_eq!(img.get(6, 3), st.palette.intensity);
    }

    #[test]
    fn rejects_bad_grids() {
        let m = parse_map("S.\n.G\n").unwrap();
        assert!(matches!(render_heatmap(&m, &[], &style(1)), Err(Error::EmptyGrid)));
        assert!(render_heatmap(&m, &[1.0; 3], &style(1)).is_err());
        assert!(render_heatmap(&m, &[1.0, -1.0, 0.0, 0.0], &style(1)).is_err());
        assert!(render_map(&m, &style(0)).is_err());
    }

    #[test]
    fn ppm_layout() {
        let m = parse_map("S#\n.G\n").unwrap();
        let ppm = render_map(&m, &style(1)).unwrap().to_ppm();
        assert_eq!(ppm, "P3\n2 2\n255\n200 40 40 128 128 128\n200 40 40 200 40 40\n");
    }

    #[test]
    fn path_overlay_paints_cells() {
        let m = parse_map("S..\n...\n..G\n").unwrap();
        let st = style(1);
        let mut img = render_map(&m, &st).unwrap();
        overlay_path(&mut img, &Path::from_cells(vec![Coord::new(0, 0), Coord::new(1, 1), Coord::new(2, 2)]), &st);
        assert_eq!(img.get(1, 1), st.palette.path);
        assert_eq!(img.get(1, 0), st.palette.road);
    }

    #[test]
    fn series_plot_spans_canvas() {
        let img = render_series(&[vec![10.0, 5.0, 5.0]], 11, 6, &[[0, 0, 0]]).unwrap();
        assert_eq!(img.get(0, 0), [0, 0, 0]);
        assert_eq!(img.get(10, 5), [0, 0, 0]);
        assert!(render_series(&[vec![f64::INFINITY]], 4, 4, &[[0, 0, 0]]).is_err());
    }
}
