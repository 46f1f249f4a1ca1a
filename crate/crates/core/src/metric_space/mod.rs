//! Finite metric measure spaces.
//!
//! A space is a finite point set with a metric, positive point masses summing to one
//! and diameter normalized to one. Point-cloud spaces keep their coordinates and
//! evaluate distances on demand; range queries go through cached bucket grids so
//! that ball and neighborhood scans stay close to output size. Spaces given by an
//! explicit distance matrix are scanned linearly.

mod generators;
mod index;
mod load;
mod regularity;

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub use generators::{make_space, SpaceSpec};
pub use index::BucketGrid;
pub use load::{load_space, parse_point_cloud, PointCloud};
pub use regularity::{estimate_regularity, RegularityEstimate};

#[derive(Clone, Debug)]
enum Geometry {
    /// `d(x, y) = |x - y|^exponent` over coordinates scaled to Euclidean diameter 1.
    Power {
        dim: usize,
        coords: Vec<f64>,
        exponent: f64,
        lo: [f64; 3],
        hi: [f64; 3],
    },
    Matrix {
        data: Vec<f64>,
    },
}

/// An immutable finite metric measure space of diameter 1.
#[derive(Clone, Debug)]
pub struct MetricMeasureSpace {
    label: String,
    len: usize,
    geometry: Geometry,
    weights: Vec<f64>,
    resolution: f64,
    coincident_pairs: usize,
    point_grids: Vec<OnceLock<BucketGrid>>,
}

/// An open ball: member point ids (ascending) and total mass.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub members: Vec<usize>,
    pub measure: f64,
}

impl MetricMeasureSpace {
    /// Builds a space from raw coordinates (`dim` values per point) with metric
    /// `|x - y|^exponent`. Coordinates are rescaled so the diameter is 1 and weights are
    /// renormalized to total mass 1.
    pub fn from_coordinates(
        label: impl Into<String>,
        dim: usize,
        coords: Vec<f64>,
        weights: Option<Vec<f64>>,
        exponent: f64,
    ) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::param("coords", "length must be a positive multiple of dim"));
        }
        if !(exponent > 0.0 && exponent <= 1.0) {
            return Err(Error::param("exponent", format!("{exponent} is outside (0, 1]")));
        }
        crate::error::ensure_finite(&coords)?;
        let len = coords.len() / dim;
        if len < 2 {
            return Err(Error::Degenerate("a space needs at least two points".into()));
        }
        let diameter = euclidean_diameter(dim, &coords);
        if diameter <= 0.0 {
            return Err(Error::Degenerate("all points coincide".into()));
        }
        Self::from_normalized(label, dim, coords.iter().map(|c| c / diameter).collect(), weights, exponent)
    }

    /// Like [`from_coordinates`](Self::from_coordinates) but trusts the caller that the
    /// Euclidean diameter of `coords` is already 1.
    pub(crate) fn from_normalized(
        label: impl Into<String>,
        dim: usize,
        coords: Vec<f64>,
        weights: Option<Vec<f64>>,
        exponent: f64,
    ) -> Result<Self> {
        let len = coords.len() / dim;
        let weights = normalize_weights(weights, len)?;
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        if dim <= 3 {
            for d in 0..dim {
                lo[d] = coords.iter().skip(d).step_by(dim).copied().fold(f64::INFINITY, f64::min);
                hi[d] = coords.iter().skip(d).step_by(dim).copied().fold(f64::NEG_INFINITY, f64::max);
            }
        }
        let (euclid_resolution, coincident_pairs) = euclidean_resolution(dim, &coords, lo, hi);
        let levels = grid_levels(euclid_resolution);
        Ok(Self {
            label: label.into(),
            len,
            geometry: Geometry::Power {
                dim,
                coords,
                exponent,
                lo,
                hi,
            },
            weights,
            resolution: euclid_resolution.powf(exponent),
            coincident_pairs,
            point_grids: (0..levels).map(|_| OnceLock::new()).collect(),
        })
    }

    /// Builds a space from a full symmetric distance matrix (row-major, `n * n`).
    ///
    /// The matrix is rescaled to diameter 1. Symmetry, the zero diagonal and the
    /// triangle inequality are checked exhaustively (tolerance `1e-9`).
    pub fn from_matrix(label: impl Into<String>, n: usize, data: Vec<f64>, weights: Option<Vec<f64>>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::LengthMismatch {
                what: "distance matrix",
                expected: n * n,
                actual: data.len(),
            });
        }
        if n < 2 {
            return Err(Error::Degenerate("a space needs at least two points".into()));
        }
        crate::error::ensure_finite(&data)?;
        let diameter = data.iter().copied().fold(0.0, f64::max);
        if diameter <= 0.0 {
            return Err(Error::Degenerate("all points coincide".into()));
        }
        let data: Vec<f64> = data.iter().map(|d| d / diameter).collect();
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::param("distance matrix", format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let dij = data[i * n + j];
                if dij < 0.0 || (dij - data[j * n + i]).abs() > 1e-12 {
                    return Err(Error::param("distance matrix", format!("asymmetric or negative at ({i}, {j})")));
                }
                for k in 0..n {
                    if dij > data[i * n + k] + data[k * n + j] + 1e-9 {
                        return Err(Error::param(
                            "distance matrix",
                            format!("triangle inequality fails for ({i}, {j}, {k})"),
                        ));
                    }
                }
            }
        }
        let mut resolution = f64::INFINITY;
        let mut coincident_pairs = 0;
        for i in 0..n {
            for j in i + 1..n {
                let d = data[i * n + j];
                if d == 0.0 {
                    coincident_pairs += 1;
                } else {
                    resolution = resolution.min(d);
                }
            }
        }
        Ok(Self {
            label: label.into(),
            len: n,
            geometry: Geometry::Matrix { data },
            weights: normalize_weights(weights, n)?,
            resolution,
            coincident_pairs,
            point_grids: Vec::new(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Smallest positive pairwise distance.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// Number of unordered point pairs at distance 0.
    pub fn coincident_pairs(&self) -> usize {
        self.coincident_pairs
    }

    /// Deepest filling level whose nets still change: the largest `N` with
    /// `2^{-N} >= 2h`.
    pub fn max_depth(&self) -> usize {
        (1.0 / (2.0 * self.resolution)).log2().floor().max(0.0) as usize
    }

    /// Ambient dimension for point-cloud spaces.
    pub fn dim(&self) -> Option<usize> {
        match &self.geometry {
            Geometry::Power { dim, .. } => Some(*dim),
            Geometry::Matrix { .. } => None,
        }
    }

    /// Normalized coordinates of point `i` (Euclidean diameter of the cloud is 1).
    pub fn coords(&self, i: usize) -> Option<&[f64]> {
        match &self.geometry {
            Geometry::Power { dim, coords, .. } => Some(&coords[i * dim..(i + 1) * dim]),
            Geometry::Matrix { .. } => None,
        }
    }

    /// Snowflake exponent of the metric (1 for plain Euclidean clouds).
    pub fn exponent(&self) -> Option<f64> {
        match &self.geometry {
            Geometry::Power { exponent, .. } => Some(*exponent),
            Geometry::Matrix { .. } => None,
        }
    }

    /// `(dim, normalized coordinates, exponent)` for point-cloud spaces.
    pub(crate) fn point_cloud(&self) -> Option<(usize, &[f64], f64)> {
        match &self.geometry {
            Geometry::Power {
                dim, coords, exponent, ..
            } => Some((*dim, coords, *exponent)),
            Geometry::Matrix { .. } => None,
        }
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.geometry {
            Geometry::Power {
                dim, coords, exponent, ..
            } => {
                let e = euclid(&coords[i * dim..(i + 1) * dim], &coords[j * dim..(j + 1) * dim]);
                if *exponent == 1.0 {
                    e
                } else {
                    e.powf(*exponent)
                }
            }
            Geometry::Matrix { data } => data[i * self.len + j],
        }
    }

    /// Converts a metric radius into the Euclidean radius of the same ball.
    fn euclid_radius(&self, r: f64) -> f64 {
        match &self.geometry {
            Geometry::Power { exponent, .. } if *exponent != 1.0 => r.powf(1.0 / exponent),
            _ => r,
        }
    }

    fn grid_for(&self, euclid_r: f64) -> &BucketGrid {
        let Geometry::Power {
            dim, coords, lo, hi, ..
        } = &self.geometry
        else {
            unreachable!("bucket grids exist only for point clouds")
        };
        let top = self.point_grids.len() - 1;
        let k = if euclid_r >= 1.0 {
            0
        } else {
            ((1.0 / euclid_r).log2().floor() as usize + 2).min(top)
        };
        self.point_grids[k].get_or_init(|| {
            let mut grid = BucketGrid::new(*dim, *lo, *hi, 0.5f64.powi(k as i32));
            for i in 0..self.len {
                grid.insert(i as u32, &coords[i * dim..(i + 1) * dim]);
            }
            grid
        })
    }

    /// Calls `f(j, d(center, j))` for every point with `d(center, j) < r`, in an order
    /// that is fixed for a given space.
    pub fn for_each_within(&self, center: usize, r: f64, mut f: impl FnMut(usize, f64)) {
        match &self.geometry {
            Geometry::Matrix { data } => {
                let row = &data[center * self.len..(center + 1) * self.len];
                for (j, &d) in row.iter().enumerate() {
                    if d < r {
                        f(j, d);
                    }
                }
            }
            Geometry::Power { dim, coords, .. } => {
                let er = self.euclid_radius(r);
                let x = &coords[center * dim..(center + 1) * dim];
                if er > 1.0 {
                    for j in 0..self.len {
                        f(j, self.dist(center, j));
                    }
                    return;
                }
                self.grid_for(er).for_each_candidate(x, er, |j| {
                    let j = j as usize;
                    let d = self.dist(center, j);
                    if d < r {
                        f(j, d);
                    }
                });
            }
        }
    }

    /// The open ball `B(center, r) = {y : d(center, y) < r}`.
    pub fn ball(&self, center: usize, r: f64) -> Result<Ball> {
        if center >= self.len {
            return Err(Error::param("center", format!("point {center} is not in the space")));
        }
        if !(r > 0.0) {
            return Err(Error::param("r", format!("radius {r} must be positive")));
        }
        let mut members = Vec::new();
        self.for_each_within(center, r, |j, _| members.push(j));
        members.sort_unstable();
        let measure = members.iter().map(|&j| self.weights[j]).sum();
        Ok(Ball { members, measure })
    }

    /// Total mass of a point set.
    pub fn measure_of(&self, ids: &[usize]) -> f64 {
        ids.iter().map(|&j| self.weights[j]).sum()
    }

    /// Weighted `L^1` norm `sum_x w_x |g(x)|`.
    pub fn l1_norm(&self, g: &[f64]) -> f64 {
        g.iter().zip(&self.weights).map(|(v, w)| w * v.abs()).sum()
    }

    /// Weighted `L^p` norm.
    pub fn lp_norm(&self, g: &[f64], p: f64) -> f64 {
        let s: f64 = g.iter().zip(&self.weights).map(|(v, w)| w * v.abs().powf(p)).sum();
        s.powf(1.0 / p)
    }

    /// Weighted mean `sum_x w_x g(x)` (total mass is 1).
    pub fn mean(&self, g: &[f64]) -> f64 {
        g.iter().zip(&self.weights).map(|(v, w)| w * v).sum()
    }

    /// A spatial index over a subset of the points (e.g. the centers of one filling level).
    pub fn subset_index(&self, ids: &[usize], typical_radius: f64) -> SubsetIndex {
        let grid = match &self.geometry {
            Geometry::Power { dim, coords, lo, hi, .. } => {
                let cell = self.euclid_radius(typical_radius.max(self.resolution)).min(1.0);
                let mut grid = BucketGrid::new(*dim, *lo, *hi, cell);
                for (pos, &i) in ids.iter().enumerate() {
                    grid.insert(pos as u32, &coords[i * dim..(i + 1) * dim]);
                }
                Some(grid)
            }
            Geometry::Matrix { .. } => None,
        };
        SubsetIndex {
            ids: ids.to_vec(),
            grid,
        }
    }

    /// Calls `f(pos, id, d)` for every subset member with `d(center, id) < r`, where
    /// `pos` is the member's position in the subset.
    pub fn for_each_in_subset(
        &self,
        index: &SubsetIndex,
        center: usize,
        r: f64,
        mut f: impl FnMut(usize, usize, f64),
    ) {
        let mut visit = |pos: usize| {
            let id = index.ids[pos];
            let d = self.dist(center, id);
            if d < r {
                f(pos, id, d);
            }
        };
        match (&index.grid, &self.geometry) {
            (Some(grid), Geometry::Power { dim, coords, .. }) => {
                let er = self.euclid_radius(r);
                if er > 1.0 {
                    (0..index.ids.len()).for_each(visit);
                } else {
                    grid.for_each_candidate(&coords[center * dim..(center + 1) * dim], er, |pos| {
                        visit(pos as usize)
                    });
                }
            }
            _ => (0..index.ids.len()).for_each(visit),
        }
    }

    /// An empty incremental index for greedy net construction at separation `r`.
    pub fn incremental_index(&self, r: f64) -> SubsetIndex {
        self.subset_index(&[], r)
    }

    /// Inserts point `id` into an incremental index.
    pub fn insert_into(&self, index: &mut SubsetIndex, id: usize) {
        let pos = index.ids.len();
        index.ids.push(id);
        if let (Some(grid), Geometry::Power { dim, coords, .. }) = (&mut index.grid, &self.geometry) {
            grid.insert(pos as u32, &coords[id * dim..(id + 1) * dim]);
        }
    }

    /// Whether any indexed point lies at distance `< r` from `center`.
    pub fn any_in_subset(&self, index: &SubsetIndex, center: usize, r: f64) -> bool {
        let mut found = false;
        // the closure can't short-circuit the scan; candidate sets are small here
        self.for_each_in_subset(index, center, r, |_, _, _| found = true);
        found
    }
}

/// Spatial index over a subset of a space's points.
#[derive(Clone, Debug)]
pub struct SubsetIndex {
    ids: Vec<usize>,
    grid: Option<BucketGrid>,
}

impl SubsetIndex {
    pub fn ids(&self) -> &[usize] {
        &self.ids
    }
}

#[inline]
fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn euclidean_diameter(dim: usize, coords: &[f64]) -> f64 {
    let n = coords.len() / dim;
    let mut best: f64 = 0.0;
    for i in 0..n {
        let a = &coords[i * dim..(i + 1) * dim];
        for j in i + 1..n {
            let b = &coords[j * dim..(j + 1) * dim];
            let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            best = best.max(sq);
        }
    }
    best.sqrt()
}

/// Minimal positive Euclidean distance and the number of coincident pairs.
fn euclidean_resolution(dim: usize, coords: &[f64], lo: [f64; 3], hi: [f64; 3]) -> (f64, usize) {
    let n = coords.len() / dim;
    let mut cell = 2.0 * (n as f64).powf(-1.0 / dim as f64);
    loop {
        let mut grid = BucketGrid::new(dim, lo, hi, cell);
        for i in 0..n {
            grid.insert(i as u32, &coords[i * dim..(i + 1) * dim]);
        }
        let mut best = f64::INFINITY;
        let mut coincident = 0;
        for i in 0..n {
            let x = &coords[i * dim..(i + 1) * dim];
            grid.for_each_candidate(x, cell, |j| {
                let j = j as usize;
                if j > i {
                    let d = euclid(x, &coords[j * dim..(j + 1) * dim]);
                    if d == 0.0 {
                        coincident += 1;
                    } else if d < best {
                        best = d;
                    }
                }
            });
        }
        if best < cell || cell >= 2.0 {
            return (best, coincident);
        }
        cell *= 2.0;
    }
}

fn grid_levels(euclid_resolution: f64) -> usize {
    let finest = (2.0 / euclid_resolution).log2().ceil().clamp(0.0, 30.0) as usize;
    finest + 1
}

fn normalize_weights(weights: Option<Vec<f64>>, len: usize) -> Result<Vec<f64>> {
    match weights {
        None => Ok(vec![1.0 / len as f64; len]),
        Some(w) => {
            if w.len() != len {
                return Err(Error::LengthMismatch {
                    what: "weights",
                    expected: len,
                    actual: w.len(),
                });
            }
            if let Some(i) = w.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(Error::param("weights", format!("weight {} at point {i} is not positive", w[i])));
            }
            let total: f64 = w.iter().sum();
            Ok(w.iter().map(|x| x / total).collect())
        }
    }
}
