use std::path::Path;

use rand::Rng;

use super::grid::{transition_graph, GridMdpWorld, GridOptions};
use crate::error::{GooseError, Result};
use crate::gp::KernelSpec;

const MAX_PAIR_ATTEMPTS: usize = 100;

/// Terrain heights on a square-celled grid.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightWorld {
    pub width: usize,
    pub height: usize,
    /// Row-major heights in meters.
    pub heights: Vec<f64>,
    /// Grid step in meters.
    pub step: f64,
    /// Steepest admissible slope in degrees.
    pub threshold_deg: f64,
}

/// Parses whitespace-separated heights, one grid row per line. Blank lines
/// are skipped.
pub fn parse_heightmap(text: &str) -> Result<(usize, usize, Vec<f64>)> {
    let mut width = None;
    let mut rows = 0;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let before = values.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| GooseError::parse(line_no, format!("not a number: {tok:?}")))?;
            if !v.is_finite() {
                return Err(GooseError::parse(line_no, "non-finite height"));
            }
            values.push(v);
        }
        let cols = values.len() - before;
        match width {
            None => width = Some(cols),
            Some(w) if w != cols => {
                return Err(GooseError::parse(line_no, format!("expected {w} columns, found {cols}")));
            }
            _ => {}
        }
        rows += 1;
    }
    let width = width.ok_or_else(|| GooseError::parse(0, "empty heightmap"))?;
    Ok((width, rows, values))
}

/// Reads a heightmap with the default 10 m step and 25 degree threshold.
pub fn load_heightmap(path: &Path) -> Result<HeightWorld> {
    let text = std::fs::read_to_string(path)?;
    let (width, height, heights) = parse_heightmap(&text)?;
    HeightWorld::new(width, height, heights, 10.0, 25.0)
}

impl HeightWorld {
    pub fn new(width: usize, height: usize, heights: Vec<f64>, step: f64, threshold_deg: f64) -> Result<Self> {
        if width < 2 || height < 2 || heights.len() != width * height {
            return Err(GooseError::invalid(format!(
                "{} heights do not form a {width}x{height} grid of at least 2x2",
                heights.len()
            )));
        }
        if !(step > 0.0) || !(threshold_deg > 0.0 && threshold_deg < 90.0) {
            return Err(GooseError::invalid("step must be positive and the threshold in (0, 90)"));
        }
        Ok(Self {
            width,
            height,
            heights,
            step,
            threshold_deg,
        })
    }

    /// `tan(threshold) - |H(a) - H(b)| / d`; the move is safe iff this is
    /// non-negative.
    pub fn slope_feature(&self, a: usize, b: usize) -> f64 {
        self.threshold_deg.to_radians().tan() - (self.heights[a] - self.heights[b]).abs() / self.step
    }

    /// Default options for planning on this terrain: Matérn-5/2 prior with
    /// 30 m lengthscale and standard deviation `tan(10°)`, centred on the
    /// flat-ground value `tan(threshold)`, and 0.001 measurement noise.
    pub fn options(&self, epsilon: f64) -> GridOptions {
        let sd = 10f64.to_radians().tan();
        GridOptions {
            width: self.width,
            height: self.height,
            cell_size: self.step,
            prior_mean: self.threshold_deg.to_radians().tan(),
            kernel: KernelSpec::matern52(30.0, sd * sd).expect("valid kernel"),
            noise_std: 0.001,
            epsilon,
            min_seed_q: 0.0,
        }
    }

    /// Planning instance on this terrain with a random source/target pair.
    ///
    /// Steepness across and along a row are different functions of
    /// position, so moves are embedded as `(midpoint, orientation)` with the
    /// two orientations ten lengthscales apart, i.e. effectively independent.
    pub fn world<R: Rng>(&self, opts: &GridOptions, rng: &mut R) -> Result<GridMdpWorld> {
        let (planar, moves) = transition_graph(self.width, self.height, self.step)?;
        let gap = 10.0 * opts.kernel.lengthscale();
        let points: Vec<f64> = moves
            .iter()
            .enumerate()
            .flat_map(|(i, &(a, b))| {
                let p = planar.point(i);
                let vertical = a / self.width != b / self.width;
                [p[0], p[1], if vertical { gap } else { 0.0 }]
            })
            .collect();
        let graph = planar.with_points(3, points)?;
        let q: Vec<f64> = moves.iter().map(|&(a, b)| self.slope_feature(a, b)).collect();
        for _ in 0..MAX_PAIR_ATTEMPTS {
            if let Some(w) = GridMdpWorld::from_constraint(opts, graph.clone(), moves.clone(), q.clone(), rng)? {
                return Ok(w);
            }
        }
        Err(GooseError::invalid("terrain has no admissible source/target pair"))
    }
}
