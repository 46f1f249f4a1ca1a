//! Operators between point functions on the space and vertex functions on a filling.
//!
//! Vertex functions are slices indexed by vertex id, edge functions are indexed like
//! [`HyperbolicFilling::edges`], and point functions like the points of the space.

use std::sync::OnceLock;

use crate::error::{ensure_finite, Error, Result};
use crate::filling::{level_radius, HyperbolicFilling};
use crate::metric_space::MetricMeasureSpace;

/// Dilation factor of the balls in the maximal operator and in the oscillation functional.
pub const DILATION: f64 = 8.0;

/// Bump support as a fraction of the ball radius.
const BUMP_FRACTION: f64 = 0.75;

fn check_len(what: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { what, expected, actual })
    }
}

/// `u(B) = (1/|B|) sum_{x in B} w_x f(x)`.
pub fn poisson_extend(space: &MetricMeasureSpace, filling: &HyperbolicFilling, f: &[f64]) -> Result<Vec<f64>> {
    check_len("point function", space.len(), f.len())?;
    ensure_finite(f)?;
    Ok((0..filling.num_vertices())
        .map(|v| {
            let s: f64 = filling.ball(v).iter().map(|&j| space.weight(j as usize) * f[j as usize]).sum();
            s / filling.ball_measure(v)
        })
        .collect())
}

/// `du(e) = u(e_+) - u(e_-)`.
pub fn edge_gradient(filling: &HyperbolicFilling, u: &[f64]) -> Result<Vec<f64>> {
    check_len("vertex function", filling.num_vertices(), u.len())?;
    Ok(filling.edges().iter().map(|e| u[e.plus] - u[e.minus]).collect())
}

/// `d~u(B) = sum_{B' ~ B} |u(B') - u(B)|`.
pub fn vertex_gradient(filling: &HyperbolicFilling, u: &[f64]) -> Result<Vec<f64>> {
    check_len("vertex function", filling.num_vertices(), u.len())?;
    Ok((0..filling.num_vertices())
        .map(|v| filling.neighbors(v).iter().map(|&w| (u[w] - u[v]).abs()).sum())
        .collect())
}

/// A Lipschitz partition of unity subordinate to the balls of one level, stored
/// point-major: for every point the vertices whose bump is positive there.
#[derive(Clone, Debug)]
pub struct PartitionOfUnity {
    level: usize,
    offsets: Vec<usize>,
    entries: Vec<(u32, f64)>,
    lip: OnceLock<Vec<f64>>,
}

/// Builds `psi_B = phi_B / sum phi` on level `n`, with tent bumps
/// `phi_B(x) = max(0, 1 - d(x, z_B) / (0.75 * r_B))`.
pub fn partition_of_unity(
    space: &MetricMeasureSpace,
    filling: &HyperbolicFilling,
    n: usize,
) -> Result<PartitionOfUnity> {
    check_len("space points", filling.num_points(), space.len())?;
    if n > filling.max_level() {
        return Err(Error::LevelMismatch(format!(
            "level {n} requested from a filling of depth {}",
            filling.max_level()
        )));
    }
    let mut offsets = Vec::with_capacity(space.len() + 1);
    let mut entries = Vec::new();
    offsets.push(0);
    if n == 0 {
        for _ in 0..space.len() {
            entries.push((0, 1.0));
            offsets.push(entries.len());
        }
    } else {
        let support = BUMP_FRACTION * level_radius(n);
        let start = filling.level_range(n).start;
        let index = filling.center_index(n).expect("level index");
        let mut row: Vec<(u32, f64)> = Vec::new();
        for x in 0..space.len() {
            row.clear();
            space.for_each_in_subset(index, x, support, |pos, _, d| {
                row.push(((start + pos) as u32, 1.0 - d / support));
            });
            row.sort_unstable_by_key(|e| e.0);
            let total: f64 = row.iter().map(|e| e.1).sum();
            if !(total > 0.0) {
                return Err(Error::Degenerate(format!(
                    "bumps on level {n} vanish at point {x}; the net is not maximal"
                )));
            }
            entries.extend(row.iter().map(|&(v, phi)| (v, phi / total)));
            offsets.push(entries.len());
        }
    }
    Ok(PartitionOfUnity {
        level: n,
        offsets,
        entries,
        lip: OnceLock::new(),
    })
}

impl PartitionOfUnity {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn num_points(&self) -> usize {
        self.offsets.len() - 1
    }

    /// `(vertex, psi_vertex(x))` for every vertex whose function is positive at `x`.
    pub fn row(&self, x: usize) -> &[(u32, f64)] {
        &self.entries[self.offsets[x]..self.offsets[x + 1]]
    }

    /// `psi_v` as a dense point function.
    pub fn function(&self, v: usize) -> Vec<f64> {
        (0..self.num_points())
            .map(|x| {
                self.row(x)
                    .iter()
                    .find(|e| e.0 as usize == v)
                    .map_or(0.0, |e| e.1)
            })
            .collect()
    }

    /// Upper bounds for `Lip(psi_B)` per vertex (0 off this level). Pairs closer than
    /// the ball radius are scanned; farther pairs are bounded by `max psi_B / r`.
    pub fn lipschitz_bounds(&self, space: &MetricMeasureSpace, filling: &HyperbolicFilling) -> &[f64] {
        self.lip.get_or_init(|| {
            let nv = filling.num_vertices();
            let mut bounds = vec![0.0; nv];
            if self.level == 0 {
                return bounds;
            }
            let reach = level_radius(self.level);
            let mut support: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nv];
            for x in 0..self.num_points() {
                for &(v, psi) in self.row(x) {
                    support[v as usize].push((x, psi));
                }
            }
            let mut dense = vec![0.0; self.num_points()];
            for (v, supp) in support.iter().enumerate() {
                if supp.is_empty() {
                    continue;
                }
                for &(x, psi) in supp {
                    dense[x] = psi;
                }
                let peak = supp.iter().map(|e| e.1).fold(0.0, f64::max);
                let mut lip: f64 = peak / reach;
                for &(x, psi) in supp {
                    space.for_each_within(x, reach, |y, d| {
                        if d > 0.0 {
                            lip = lip.max((psi - dense[y]).abs() / d);
                        }
                    });
                }
                for &(x, _) in supp {
                    dense[x] = 0.0;
                }
                bounds[v] = lip;
            }
            bounds
        })
    }
}

/// `T_n u = sum_{B in V_n} u(B) psi_B`.
pub fn level_smooth(u: &[f64], pou: &PartitionOfUnity) -> Vec<f64> {
    (0..pou.num_points())
        .map(|x| pou.row(x).iter().map(|&(v, psi)| u[v as usize] * psi).sum())
        .collect()
}

/// Partitions of unity for every level of one filling.
#[derive(Clone, Debug)]
pub struct TraceOperator {
    levels: Vec<PartitionOfUnity>,
    weights: Vec<f64>,
    num_vertices: usize,
}

/// Result of [`TraceOperator::apply`].
#[derive(Clone, Debug)]
pub struct Trace {
    /// `T_N u` on the deepest level.
    pub values: Vec<f64>,
    /// `sum_{n < N} ||T_{n+1} u - T_n u||_{L^1}`.
    pub tail: f64,
}

impl TraceOperator {
    pub fn new(space: &MetricMeasureSpace, filling: &HyperbolicFilling) -> Result<Self> {
        let levels = (0..=filling.max_level())
            .map(|n| partition_of_unity(space, filling, n))
            .collect::<Result<_>>()?;
        Ok(Self {
            levels,
            weights: space.weights().to_vec(),
            num_vertices: filling.num_vertices(),
        })
    }

    pub fn partition(&self, n: usize) -> &PartitionOfUnity {
        &self.levels[n]
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn smooth(&self, u: &[f64], n: usize) -> Vec<f64> {
        level_smooth(u, &self.levels[n])
    }

    pub fn apply(&self, u: &[f64]) -> Result<Trace> {
        check_len("vertex function", self.num_vertices, u.len())?;
        let mut current = self.smooth(u, 0);
        let mut tail = 0.0;
        for n in 1..self.levels.len() {
            let next = self.smooth(u, n);
            tail += next
                .iter()
                .zip(&current)
                .zip(&self.weights)
                .map(|((a, b), w)| w * (a - b).abs())
                .sum::<f64>();
            current = next;
        }
        Ok(Trace { values: current, tail })
    }
}

/// The trace `T_N u` with its telescoping tail, building the partitions on the fly.
pub fn trace(space: &MetricMeasureSpace, filling: &HyperbolicFilling, u: &[f64]) -> Result<Trace> {
    TraceOperator::new(space, filling)?.apply(u)
}

/// `(Mu)(B) = sum |B'|/|B| |u(B')|` over `B'` on levels at least `level(B)` with
/// `8B' ∩ 8B ≠ ∅`.
pub fn filling_maximal(space: &MetricMeasureSpace, filling: &HyperbolicFilling, u: &[f64]) -> Result<Vec<f64>> {
    check_len("vertex function", filling.num_vertices(), u.len())?;
    check_len("space points", filling.num_points(), space.len())?;
    let measure = filling.ball_measures();
    let total: f64 = u.iter().zip(measure).map(|(x, m)| m * x.abs()).sum();
    let mut out = vec![0.0; u.len()];
    out[0] = total / measure[0];
    for v in 1..filling.num_vertices() {
        let b = filling.vertex(v);
        let c = b.center.expect("non-root vertex");
        let mut s = 0.0;
        for m in b.level..=filling.max_level() {
            let start = filling.level_range(m).start;
            let index = filling.center_index(m).expect("level index");
            let reach = DILATION * (b.radius + level_radius(m));
            space.for_each_in_subset(index, c, reach, |pos, _, _| {
                let w = start + pos;
                s += measure[w] * u[w].abs();
            });
        }
        out[v] = s / measure[v];
    }
    Ok(out)
}

/// `(Df)(B) = (1/|8B|) sum_{x in 8B} w_x |f(x) - f_B|` with `f_B` the average over `B`.
pub fn mean_oscillation(space: &MetricMeasureSpace, filling: &HyperbolicFilling, f: &[f64]) -> Result<Vec<f64>> {
    let averages = poisson_extend(space, filling, f)?;
    Ok((0..filling.num_vertices())
        .map(|v| {
            let fb = averages[v];
            match filling.vertex(v).center {
                None => space.l1_norm(&f.iter().map(|x| x - fb).collect::<Vec<_>>()),
                Some(c) => {
                    let mut mass = 0.0;
                    let mut s = 0.0;
                    space.for_each_within(c, DILATION * filling.vertex(v).radius, |j, _| {
                        mass += space.weight(j);
                        s += space.weight(j) * (f[j] - fb).abs();
                    });
                    s / mass
                }
            }
        })
        .collect())
}
