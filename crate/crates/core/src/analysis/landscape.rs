//! Two-dimensional energy landscapes of the simplified surface, sampled on
//! a grid at a chosen time.

use rayon::prelude::*;

use crate::energy::{simplified_energy, simplified_objective};
use crate::error::{Error, Result};
use crate::optimizer::Objective;
use crate::store::PatternStore;
use crate::vector::{squared_distance, FrameVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// Nodes per axis, endpoints included.
    pub resolution: usize,
}

impl GridSpec {
    pub fn square(half_width: f64, resolution: usize) -> Self {
        Self {
            x_min: -half_width,
            x_max: half_width,
            y_min: -half_width,
            y_max: half_width,
            resolution,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.x_max <= self.x_min || self.y_max <= self.y_min {
            return Err(Error::param(format!("invalid grid bounds {self:?}")));
        }
        if self.resolution < 2 {
            return Err(Error::param("grid resolution must be at least 2"));
        }
        Ok(())
    }

    pub fn x(&self, ix: usize) -> f64 {
        node(self.x_min, self.x_max, ix, self.resolution)
    }

    pub fn y(&self, iy: usize) -> f64 {
        node(self.y_min, self.y_max, iy, self.resolution)
    }

    pub fn cell_width(&self) -> (f64, f64) {
        let steps = (self.resolution - 1) as f64;
        (
            (self.x_max - self.x_min) / steps,
            (self.y_max - self.y_min) / steps,
        )
    }
}

fn node(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

/// Energies on a grid, row-major with `x` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeGrid {
    pub spec: GridSpec,
    pub t: f64,
    pub values: Vec<f64>,
}

impl LandscapeGrid {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.spec.resolution + ix]
    }

    /// Grid node with the lowest energy (first in row-major order on ties).
    pub fn argmin(&self) -> (f64, f64, f64) {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v < self.values[best] {
                best = i;
            }
        }
        let n = self.spec.resolution;
        (
            self.spec.x(best % n),
            self.spec.y(best / n),
            self.values[best],
        )
    }

    /// CSV with a `# t=<value>` comment line, then `x,y,energy` rows.
    pub fn to_csv(&self) -> String {
        let n = self.spec.resolution;
        let mut out = format!("# t={}\nx,y,energy\n", self.t);
        for iy in 0..n {
            for ix in 0..n {
                out.push_str(&format!(
                    "{},{},{}\n",
                    self.spec.x(ix),
                    self.spec.y(iy),
                    self.value(ix, iy)
                ));
            }
        }
        out
    }
}

/// Samples an arbitrary 2-D energy on `grid`.
pub fn sample_grid<F>(grid: &GridSpec, energy: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    grid.validate()?;
    let n = grid.resolution;
    (0..n * n)
        .into_par_iter()
        .map(|i| energy(&[grid.x(i % n), grid.y(i / n)]))
        .collect()
}

/// Simplified-surface energies at time `t` over `grid`; the store must be 2-D.
pub fn landscape_grid(
    store: &PatternStore,
    beta: f64,
    lambda: f64,
    sigma: f64,
    t: f64,
    grid: &GridSpec,
) -> Result<LandscapeGrid> {
    if store.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            actual: store.dim(),
        });
    }
    let objective = simplified_objective(store, t, beta, lambda, sigma)?;
    let values = sample_grid(grid, |p| objective.energy(p))?;
    Ok(LandscapeGrid {
        spec: *grid,
        t,
        values,
    })
}

/// Index of the stored pattern nearest (Euclidean) to `point`; lowest index on ties.
pub fn nearest_pattern(store: &PatternStore, point: &[f64]) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (k, p) in store.iter().enumerate() {
        let dist = squared_distance(p, point);
        if dist < best_dist {
            best = k;
            best_dist = dist;
        }
    }
    best
}

/// Energy change at a fixed state when the surface switches from
/// `t_from` to `t_to`: `E(s, t_to) - E(s, t_from)`.
pub fn surface_jump(
    store: &PatternStore,
    beta: f64,
    lambda: f64,
    sigma: f64,
    s_at: &FrameVector,
    t_from: usize,
    t_to: usize,
) -> Result<f64> {
    let to = simplified_energy(s_at, t_to as f64, store, beta, lambda, sigma)?;
    let from = simplified_energy(s_at, t_from as f64, store, beta, lambda, sigma)?;
    Ok(to - from)
}

/// The six-vector planar instance used to visualize morphing surfaces,
/// normalized to `‖s‖ = √2`.
pub fn planar_demo_store() -> PatternStore {
    let raw = [
        [1.0, 0.0],
        [0.0, 1.0],
        [1.0, 1.0],
        [-1.0, 0.0],
        [0.0, -1.0],
        [-1.0, -1.0],
    ];
    let frames = raw
        .iter()
        .map(|v| FrameVector::new(v.to_vec()).expect("finite"))
        .collect();
    PatternStore::normalized(frames).expect("nonzero vectors")
}

/// Parameters of the planar demo: `(λ, β, σ)` with `σ² = 1/2`.
pub const PLANAR_DEMO_PARAMS: (f64, f64, f64) = (1.0, 100.0, std::f64::consts::FRAC_1_SQRT_2);

/// Grid that contains every well of the planar demo (they sit near `2·s^(k)`).
pub fn planar_demo_grid() -> GridSpec {
    GridSpec::square(3.0, 61)
}
