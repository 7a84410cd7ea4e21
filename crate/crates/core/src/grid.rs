//! Construction and sampling of the Poisson grid and its Cox transmitter
//! process, plus the blockage path gain between points.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ChannelModel, GridParams};
use crate::rng::{derive, stream};

/// Mean number of transmitters per unit volume.
pub fn avg_density(params: &GridParams) -> f64 {
    let per_room: f64 = (0..params.n).map(|i| params.edge_mult() * params.ratio(i)).sum();
    let wall_density: f64 = params.mu.iter().product();
    per_room * wall_density
}

/// One transmitter on a room edge.
///
/// The edge is the line parallel to axis `axis` through the wall
/// coordinates `line` (one coordinate per axis `!= axis`, in ascending
/// axis order). `room_sel` picks which of the `2^{n-1}` adjacent rooms
/// the transmitter serves; all results depend only on the summed edge
/// density, but keeping the selector enables room-conditioned queries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseStation {
    pub axis: usize,
    pub line: Vec<f64>,
    pub pos: f64,
    pub room_sel: u32,
}

/// A sampled Poisson grid restricted to a finite observation window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRealization {
    /// Schema version of the serialized form.
    pub version: u32,
    pub params: GridParams,
    /// Closed window interval per axis.
    pub window: Vec<(f64, f64)>,
    /// Wall coordinates per axis, strictly increasing.
    pub walls: Vec<Vec<f64>>,
    pub bs: Vec<BaseStation>,
}

pub const GRID_SCHEMA_VERSION: u32 = 1;

impl GridRealization {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grid serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: GridRealization =
            serde_json::from_str(s).map_err(|e| Error::InvalidParams(format!("bad grid JSON: {e}")))?;
        if g.version != GRID_SCHEMA_VERSION {
            return Err(Error::InvalidParams(format!(
                "unsupported grid schema version {}",
                g.version
            )));
        }
        g.params.validate()?;
        Ok(g)
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.window.len()
            && x.iter()
                .zip(&self.window)
                .all(|(&xi, &(lo, hi))| xi >= lo && xi <= hi)
    }
}

/// Sample walls and transmitters inside `window`. Deterministic given
/// `seed`: wall and edge processes draw from streams derived per object.
pub fn sample_realization(
    params: &GridParams,
    window: &[(f64, f64)],
    seed: u64,
) -> Result<GridRealization> {
    params.validate()?;
    if window.len() != params.n {
        return Err(Error::Dimension { expected: params.n, got: window.len() });
    }
    if window.iter().any(|&(lo, hi)| !(hi > lo) || !lo.is_finite() || !hi.is_finite()) {
        return Err(Error::EmptyWindow);
    }

    let mut walls = Vec::with_capacity(params.n);
    for axis in 0..params.n {
        walls.push(sample_axis_walls(params, window, axis, seed)?);
    }

    let mut bs = Vec::new();
    for axis in 0..params.n {
        if params.lambda[axis] == 0.0 {
            continue;
        }
        // Edge lines parallel to `axis` are intersections of one wall from
        // every other axis.
        let other_axes: Vec<usize> = (0..params.n).filter(|&a| a != axis).collect();
        let mut line = vec![0.0f64; other_axes.len()];
        let mut line_idx = vec![0usize; other_axes.len()];
        let (lo, hi) = window[axis];
        let len = hi - lo;
        let total_rate = params.edge_mult() * params.lambda[axis] * len;
        let n_lines: usize = other_axes.iter().map(|&a| walls[a].len()).product();
        for flat in 0..n_lines {
            let mut rem = flat;
            for (q, &a) in other_axes.iter().enumerate() {
                let w = walls[a].len();
                line_idx[q] = rem % w;
                line[q] = walls[a][line_idx[q]];
                rem /= w;
            }
            let mut rng = derive(seed, stream::EDGES, (axis * n_lines + flat) as u64);
            let count = Poisson::new(total_rate)
                .map_err(|e| Error::InvalidParams(format!("edge rate: {e}")))?
                .sample(&mut rng) as usize;
            for _ in 0..count {
                bs.push(BaseStation {
                    axis,
                    line: line.clone(),
                    pos: rng.random_range(lo..hi),
                    room_sel: rng.random_range(0..params.edge_mult() as u32) + 1,
                });
            }
        }
    }

    Ok(GridRealization {
        version: GRID_SCHEMA_VERSION,
        params: params.clone(),
        window: window.to_vec(),
        walls,
        bs,
    })
}

fn sample_axis_walls(
    params: &GridParams,
    window: &[(f64, f64)],
    axis: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let (lo, hi) = window[axis];
    let rate = params.mu[axis] * (hi - lo);
    // Exact coincidence of two walls has probability zero; redraw on the
    // (f64-collision) event instead of constructing an invalid grid.
    for attempt in 0..16 {
        let mut rng = derive(seed, stream::WALLS, (axis as u64) << 8 | attempt);
        let count = Poisson::new(rate)
            .map_err(|e| Error::InvalidParams(format!("wall rate: {e}")))?
            .sample(&mut rng) as usize;
        let mut coords: Vec<f64> = (0..count).map(|_| rng.random_range(lo..hi)).collect();
        coords.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if coords.windows(2).all(|w| w[0] < w[1]) {
            return Ok(coords);
        }
    }
    Err(Error::InvalidParams("could not sample distinct wall coordinates".into()))
}

/// Number of axis-`i` walls strictly between `x` and `y` (open segment),
/// for every axis.
pub fn wall_counts(x: &[f64], y: &[f64], g: &GridRealization) -> Result<Vec<u64>> {
    if !g.contains(x) || !g.contains(y) {
        return Err(Error::OutOfWindow);
    }
    let mut counts = Vec::with_capacity(g.walls.len());
    for (axis, axis_walls) in g.walls.iter().enumerate() {
        let (a, b) = if x[axis] <= y[axis] { (x[axis], y[axis]) } else { (y[axis], x[axis]) };
        // Strict inequalities: endpoints sitting exactly on a wall do not
        // count it.
        let lo = axis_walls.partition_point(|&w| w <= a);
        let hi = axis_walls.partition_point(|&w| w < b);
        counts.push((hi - lo) as u64);
    }
    Ok(counts)
}

/// Blockage path gain from `x` to `y` with unit transmit power:
/// `h * prod_i K_i^{N_i}` with the `0^0 = 1` convention.
pub fn path_gain(
    x: &[f64],
    y: &[f64],
    g: &GridRealization,
    ch: ChannelModel,
    seed: u64,
) -> Result<f64> {
    let counts = wall_counts(x, y, g)?;
    let mut gain = 1.0;
    for (axis, &n) in counts.iter().enumerate() {
        if n > 0 {
            gain *= g.params.k[axis].powi(n.min(i32::MAX as u64) as i32);
        }
    }
    let h = match ch {
        ChannelModel::NoFading => 1.0,
        ChannelModel::Rayleigh => {
            let mut rng = derive(seed, stream::FADE, 0);
            rand_distr::Exp::new(1.0).unwrap().sample(&mut rng)
        }
    };
    Ok(h * gain)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> GridParams {
        GridParams::symmetric(3, 1.0, 0.1, 0.3).unwrap()
    }

    fn window(n: usize, half: f64) -> Vec<(f64, f64)> {
        vec![(-half, half); n]
    }

    #[test]
    fn avg_density_examples() {
        assert!((avg_density(&p3()) - 1.2).abs() < 1e-15);
        assert_eq!(avg_density(&GridParams::symmetric(3, 1.0, 0.0, 0.3).unwrap()), 0.0);
        let p = GridParams::new(vec![1.0, 2.0], vec![0.1, 0.2], vec![0.0, 0.0]).unwrap();
        assert!((avg_density(&p) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn sampling_is_deterministic() {
        let w = window(3, 4.0);
        let a = sample_realization(&p3(), &w, 42).unwrap();
        let b = sample_realization(&p3(), &w, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_realization(&p3(), &w, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_lambda_means_no_bs() {
        let p = GridParams::symmetric(3, 1.0, 0.0, 0.3).unwrap();
        let g = sample_realization(&p, &window(3, 4.0), 1).unwrap();
        assert!(g.bs.is_empty());
    }

    #[test]
    fn rejects_bad_windows() {
        assert!(sample_realization(&p3(), &window(2, 4.0), 1).is_err());
        assert!(sample_realization(&p3(), &[(0.0, 0.0), (0.0, 1.0), (0.0, 1.0)], 1).is_err());
    }

    #[test]
    fn wall_count_conventions() {
        let mut g = sample_realization(&p3(), &window(3, 4.0), 7).unwrap();
        g.walls[0] = vec![1.0, 2.0];
        g.walls[1] = vec![];
        g.walls[2] = vec![];
        let x = [0.5, 0.0, 0.0];
        let y = [2.5, 0.0, 0.0];
        assert_eq!(wall_counts(&x, &y, &g).unwrap(), vec![2, 0, 0]);
        // Open segment: x = y crosses nothing even when placed on a wall.
        assert_eq!(wall_counts(&y, &y, &g).unwrap(), vec![0, 0, 0]);
        // Endpoint exactly on a wall coordinate: that wall is not counted.
        let on_wall = [1.0, 0.0, 0.0];
        assert_eq!(wall_counts(&on_wall, &[0.5, 0.0, 0.0], &g).unwrap(), vec![0, 0, 0]);
        assert_eq!(wall_counts(&on_wall, &[2.5, 0.0, 0.0], &g).unwrap(), vec![1, 0, 0]);
        let outside = [9.0, 0.0, 0.0];
        assert!(wall_counts(&outside, &y, &g).is_err());
    }

    #[test]
    fn path_gain_examples() {
        let mut g = sample_realization(&p3(), &window(3, 4.0), 7).unwrap();
        g.walls[0] = vec![1.0, 2.0];
        g.walls[1] = vec![];
        g.walls[2] = vec![];
        g.params.k = vec![0.1, 0.1, 0.1];
        let x = [0.5, 0.0, 0.0];
        let same_room = path_gain(&x, &[0.9, 0.1, 0.1], &g, ChannelModel::NoFading, 0).unwrap();
        assert_eq!(same_room, 1.0);
        let two_walls = path_gain(&x, &[2.5, 0.0, 0.0], &g, ChannelModel::NoFading, 0).unwrap();
        assert!((two_walls - 0.01).abs() < 1e-15);
        // K = 0 blocks perfectly, but 0^0 = 1 keeps the same room intact.
        g.params.k = vec![0.0, 0.0, 0.0];
        assert_eq!(path_gain(&x, &[2.5, 0.0, 0.0], &g, ChannelModel::NoFading, 0).unwrap(), 0.0);
        assert_eq!(path_gain(&x, &[0.9, 0.0, 0.0], &g, ChannelModel::NoFading, 0).unwrap(), 1.0);
    }

    #[test]
    fn monotone_blockage_along_a_ray() {
        let g = sample_realization(&p3(), &window(3, 6.0), 11).unwrap();
        let x = [-5.0, -4.5, -5.5];
        let dir = [1.0, 0.8, 1.1];
        let mut prev = vec![0u64; 3];
        for t in [1.0, 2.0, 4.0, 8.0] {
            let y: Vec<f64> = (0..3).map(|i| x[i] + dir[i] * t).collect();
            let counts = wall_counts(&x, &y, &g).unwrap();
            for i in 0..3 {
                assert!(counts[i] >= prev[i]);
            }
            prev = counts;
        }
    }

    #[test]
    fn json_round_trip() {
        let g = sample_realization(&p3(), &window(3, 2.0), 3).unwrap();
        let back = GridRealization::from_json(&g.to_json()).unwrap();
        assert_eq!(g, back);
    }
}
