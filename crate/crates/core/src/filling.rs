//! Hyperbolic fillings built from nested maximal separated nets.
//!
//! Level `n >= 1` holds one ball `B(z, 2^{1-n})` per point `z` of a maximal
//! `2^{-n}`-separated net `Z_n`; level 0 is the whole space. Two balls are joined when
//! their levels differ by at most one and `d(z, z') < r + r'`.

use std::ops::Range;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric_space::{MetricMeasureSpace, SubsetIndex};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallVertex {
    pub id: usize,
    pub level: usize,
    /// `None` for the root, which stands for the whole space.
    pub center: Option<usize>,
    pub radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OrientedEdge {
    pub minus: usize,
    pub plus: usize,
}

/// Serialized form of a filling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FillingRecord {
    pub levels: usize,
    pub vertices: Vec<BallVertex>,
    pub edges: Vec<OrientedEdge>,
    pub seed: u64,
    pub space_label: String,
}

/// Radius of the balls on level `n`.
pub fn level_radius(n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        0.5f64.powi(n as i32 - 1)
    }
}

/// Net separation on level `n >= 1`.
pub fn level_separation(n: usize) -> f64 {
    0.5f64.powi(n as i32)
}

#[derive(Clone, Debug)]
pub struct HyperbolicFilling {
    space_label: String,
    num_points: usize,
    seed: u64,
    max_level: usize,
    vertices: Vec<BallVertex>,
    level_start: Vec<usize>,
    edges: Vec<OrientedEdge>,
    adj_offsets: Vec<usize>,
    adj: Vec<usize>,
    ball_offsets: Vec<usize>,
    ball_members: Vec<u32>,
    ball_measure: Vec<f64>,
    center_index: Vec<Option<SubsetIndex>>,
}

/// Builds the filling of `space` down to level `max_level`, with the greedy net order
/// drawn from `seed`.
pub fn build_filling(space: &MetricMeasureSpace, max_level: usize, seed: u64) -> Result<HyperbolicFilling> {
    if space.is_empty() {
        return Err(Error::Degenerate("empty space".into()));
    }
    if space.coincident_pairs() > 0 {
        return Err(Error::Degenerate(format!(
            "{} coincident point pair(s); separated nets are undefined",
            space.coincident_pairs()
        )));
    }
    if max_level > space.max_depth() {
        return Err(Error::DepthTooLarge {
            requested: max_level,
            max: space.max_depth(),
            resolution: space.resolution(),
        });
    }
    let mut order: Vec<usize> = (0..space.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut vertices = vec![BallVertex {
        id: 0,
        level: 0,
        center: None,
        radius: 1.0,
    }];
    let mut level_start = vec![0, 1];
    for n in 1..=max_level {
        let sep = level_separation(n);
        let mut index = space.incremental_index(sep);
        for &p in &order {
            if !space.any_in_subset(&index, p, sep) {
                space.insert_into(&mut index, p);
            }
        }
        let mut net = index.ids().to_vec();
        net.sort_unstable();
        for z in net {
            vertices.push(BallVertex {
                id: vertices.len(),
                level: n,
                center: Some(z),
                radius: level_radius(n),
            });
        }
        level_start.push(vertices.len());
    }

    let center_index = center_indices(space, &vertices, &level_start);
    let mut edges = Vec::new();
    if max_level >= 1 {
        edges.extend((level_start[1]..level_start[2]).map(|w| OrientedEdge { minus: 0, plus: w }));
    }
    for n in 1..=max_level {
        for v in &vertices[level_start[n]..level_start[n + 1]] {
            let c = v.center.expect("non-root vertex");
            for m in [n, n + 1] {
                if m > max_level {
                    continue;
                }
                let reach = v.radius + level_radius(m);
                let index = center_index[m].as_ref().expect("level index");
                space.for_each_in_subset(index, c, reach, |pos, _, _| {
                    let w = level_start[m] + pos;
                    if m > n || w > v.id {
                        edges.push(OrientedEdge { minus: v.id, plus: w });
                    }
                });
            }
        }
    }
    edges.sort_unstable();

    let mut filling = HyperbolicFilling {
        space_label: space.label().to_string(),
        num_points: space.len(),
        seed,
        max_level,
        vertices,
        level_start,
        edges,
        adj_offsets: Vec::new(),
        adj: Vec::new(),
        ball_offsets: Vec::new(),
        ball_members: Vec::new(),
        ball_measure: Vec::new(),
        center_index,
    };
    filling.index_adjacency();
    filling.index_balls(space);
    Ok(filling)
}

fn center_indices(space: &MetricMeasureSpace, vertices: &[BallVertex], level_start: &[usize]) -> Vec<Option<SubsetIndex>> {
    (0..level_start.len() - 1)
        .map(|n| {
            (n > 0).then(|| {
                let ids: Vec<usize> = vertices[level_start[n]..level_start[n + 1]]
                    .iter()
                    .map(|v| v.center.expect("non-root vertex"))
                    .collect();
                space.subset_index(&ids, level_radius(n))
            })
        })
        .collect()
}

impl HyperbolicFilling {
    fn index_adjacency(&mut self) {
        let nv = self.vertices.len();
        let mut degree = vec![0usize; nv];
        for e in &self.edges {
            degree[e.minus] += 1;
            degree[e.plus] += 1;
        }
        let mut offsets = vec![0usize; nv + 1];
        for v in 0..nv {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![0usize; offsets[nv]];
        for e in &self.edges {
            adj[fill[e.minus]] = e.plus;
            fill[e.minus] += 1;
            adj[fill[e.plus]] = e.minus;
            fill[e.plus] += 1;
        }
        for v in 0..nv {
            adj[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        self.adj_offsets = offsets;
        self.adj = adj;
    }

    fn index_balls(&mut self, space: &MetricMeasureSpace) {
        let mut offsets = Vec::with_capacity(self.vertices.len() + 1);
        let mut members: Vec<u32> = Vec::new();
        let mut measure = Vec::with_capacity(self.vertices.len());
        offsets.push(0);
        let mut scratch = Vec::new();
        for v in &self.vertices {
            scratch.clear();
            match v.center {
                None => scratch.extend(0..space.len() as u32),
                Some(c) => {
                    space.for_each_within(c, v.radius, |j, _| scratch.push(j as u32));
                    scratch.sort_unstable();
                }
            }
            measure.push(scratch.iter().map(|&j| space.weight(j as usize)).sum());
            members.extend_from_slice(&scratch);
            offsets.push(members.len());
        }
        self.ball_offsets = offsets;
        self.ball_members = members;
        self.ball_measure = measure;
    }

    pub fn space_label(&self) -> &str {
        &self.space_label
    }

    /// Number of points of the underlying space.
    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[BallVertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &BallVertex {
        &self.vertices[v]
    }

    /// Vertex ids on level `n`.
    pub fn level_range(&self, n: usize) -> Range<usize> {
        self.level_start[n]..self.level_start[n + 1]
    }

    /// `#V_n` for `n = 0..=N`.
    pub fn level_sizes(&self) -> Vec<usize> {
        (0..=self.max_level).map(|n| self.level_range(n).len()).collect()
    }

    /// The net `Z_n` (ascending point ids); empty for `n = 0`.
    pub fn net(&self, n: usize) -> Vec<usize> {
        self.vertices[self.level_range(n)].iter().filter_map(|v| v.center).collect()
    }

    pub fn edges(&self) -> &[OrientedEdge] {
        &self.edges
    }

    /// Neighbours of `v` in the undirected graph, ascending.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.adj_offsets[v]..self.adj_offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj_offsets[v + 1] - self.adj_offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertices.len()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Maximal vertex degree on each level.
    pub fn max_degree_per_level(&self) -> Vec<usize> {
        (0..=self.max_level)
            .map(|n| self.level_range(n).map(|v| self.degree(v)).max().unwrap_or(0))
            .collect()
    }

    /// Points of the open ball of vertex `v`, ascending.
    pub fn ball(&self, v: usize) -> &[u32] {
        &self.ball_members[self.ball_offsets[v]..self.ball_offsets[v + 1]]
    }

    /// `|B|` for vertex `v`.
    pub fn ball_measure(&self, v: usize) -> f64 {
        self.ball_measure[v]
    }

    pub fn ball_measures(&self) -> &[f64] {
        &self.ball_measure
    }

    /// Spatial index of the centers on level `n >= 1`; positions are offsets into
    /// [`level_range`](Self::level_range).
    pub fn center_index(&self, n: usize) -> Option<&SubsetIndex> {
        self.center_index.get(n).and_then(Option::as_ref)
    }

    /// Whether the graph is connected.
    pub fn is_connected(&self) -> bool {
        let nv = self.vertices.len();
        let mut seen = vec![false; nv];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == nv
    }

    fn check_space(&self, space: &MetricMeasureSpace) -> Result<()> {
        if space.len() != self.num_points {
            return Err(Error::LengthMismatch {
                what: "space points",
                expected: self.num_points,
                actual: space.len(),
            });
        }
        Ok(())
    }

    pub fn to_record(&self) -> FillingRecord {
        FillingRecord {
            levels: self.max_level + 1,
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            seed: self.seed,
            space_label: self.space_label.clone(),
        }
    }

    /// Rebuilds a filling from its record over the space it was built on.
    pub fn from_record(record: &FillingRecord, space: &MetricMeasureSpace) -> Result<Self> {
        let bad = |reason: String| Error::param("filling record", reason);
        if record.levels == 0 {
            return Err(bad("no levels".into()));
        }
        let max_level = record.levels - 1;
        let mut level_start = vec![0usize];
        let mut current = 0usize;
        for (i, v) in record.vertices.iter().enumerate() {
            if v.id != i {
                return Err(bad(format!("vertex {i} has id {}", v.id)));
            }
            if v.level < current || v.level > max_level {
                return Err(bad(format!("vertex {i} is out of level order")));
            }
            while current < v.level {
                level_start.push(i);
                current += 1;
            }
            match (v.level, v.center) {
                (0, None) if i == 0 => {}
                (0, _) => return Err(bad("level 0 must hold exactly the root".into())),
                (_, Some(c)) if c < space.len() => {}
                _ => return Err(bad(format!("vertex {i} has no valid center"))),
            }
            if (v.radius - level_radius(v.level)).abs() > 1e-12 {
                return Err(bad(format!("vertex {i} has radius {}", v.radius)));
            }
        }
        while current < max_level + 1 {
            level_start.push(record.vertices.len());
            current += 1;
        }
        level_start.push(record.vertices.len());
        level_start.truncate(max_level + 2);
        let nv = record.vertices.len();
        if nv == 0 {
            return Err(bad("no vertices".into()));
        }
        for e in &record.edges {
            if e.minus >= nv || e.plus >= nv || e.minus == e.plus {
                return Err(bad(format!("invalid edge {} -> {}", e.minus, e.plus)));
            }
            let (a, b) = (&record.vertices[e.minus], &record.vertices[e.plus]);
            if a.level > b.level || b.level - a.level > 1 || (a.level == b.level && e.minus > e.plus) {
                return Err(bad(format!("edge {} -> {} violates the orientation rule", e.minus, e.plus)));
            }
        }
        let mut edges = record.edges.clone();
        edges.sort_unstable();
        let mut filling = HyperbolicFilling {
            space_label: record.space_label.clone(),
            num_points: space.len(),
            seed: record.seed,
            max_level,
            vertices: record.vertices.clone(),
            center_index: center_indices(space, &record.vertices, &level_start),
            level_start,
            edges,
            adj_offsets: Vec::new(),
            adj: Vec::new(),
            ball_offsets: Vec::new(),
            ball_members: Vec::new(),
            ball_measure: Vec::new(),
        };
        filling.index_adjacency();
        filling.index_balls(space);
        Ok(filling)
    }
}

/// Maps every vertex of `src` to the vertex of `dst` on the same level whose center is
/// nearest to its own (ties to the smaller id). The root maps to the root.
pub fn nearest_ball_map(
    space: &MetricMeasureSpace,
    src: &HyperbolicFilling,
    dst: &HyperbolicFilling,
) -> Result<Vec<usize>> {
    src.check_space(space)?;
    dst.check_space(space)?;
    if dst.max_level < src.max_level {
        return Err(Error::LevelMismatch(format!(
            "source has {} levels, target only {}",
            src.max_level + 1,
            dst.max_level + 1
        )));
    }
    let mut map = Vec::with_capacity(src.num_vertices());
    for v in src.vertices() {
        let Some(c) = v.center else {
            map.push(0);
            continue;
        };
        let index = dst.center_index(v.level).expect("level index");
        let start = dst.level_range(v.level).start;
        let mut best = (f64::INFINITY, usize::MAX);
        // nets are maximal, so some target center lies within the separation radius
        space.for_each_in_subset(index, c, level_separation(v.level) * (1.0 + 1e-12), |pos, _, d| {
            let w = start + pos;
            if d < best.0 || (d == best.0 && w < best.1) {
                best = (d, w);
            }
        });
        if best.1 == usize::MAX {
            return Err(Error::Degenerate(format!(
                "target net on level {} is not maximal near point {c}",
                v.level
            )));
        }
        map.push(best.1);
    }
    Ok(map)
}
