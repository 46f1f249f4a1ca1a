//! Seeded test-function families on metric spaces, on periodic grids and on filling
//! vertices.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use weakfill_core::euclidean::{GridFunction, GridSpec};
use weakfill_core::filling::HyperbolicFilling;
use weakfill_core::metric_space::MetricMeasureSpace;
use weakfill_core::transfer::poisson_extend;

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Cycles through bumps, coordinates, distances and trigonometric sums.
    Mixed,
    Bumps,
    Coordinates,
    Distances,
    Trig,
    /// One Gaussian of width 1/4 at the center of the bounding box.
    CenteredBump,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 6] = [
        FamilyKind::Mixed,
        FamilyKind::Bumps,
        FamilyKind::Coordinates,
        FamilyKind::Distances,
        FamilyKind::Trig,
        FamilyKind::CenteredBump,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Mixed => "mixed",
            FamilyKind::Bumps => "bumps",
            FamilyKind::Coordinates => "coordinates",
            FamilyKind::Distances => "distances",
            FamilyKind::Trig => "trig",
            FamilyKind::CenteredBump => "centered_bump",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown function family `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub count: usize,
    pub seed: u64,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, count: usize, seed: u64) -> Self {
        Self { kind, count, seed }
    }
}

/// A named sample of a function on the points of a space or on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    pub name: String,
    pub values: Vec<f64>,
}

/// Per-function stream so that function `i` does not depend on `count`.
fn stream(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64 + 1);
    rng
}

enum Shape {
    Bump { center: Vec<f64>, width: f64 },
    Coordinate { axis: usize, sign: f64 },
    Distance { center: Vec<f64> },
    Trig { terms: Vec<(Vec<f64>, f64, f64)> },
}

impl Shape {
    fn draw(kind: FamilyKind, i: usize, dim: usize, rng: &mut ChaCha8Rng) -> Shape {
        let kind = match kind {
            FamilyKind::Mixed => [FamilyKind::Bumps, FamilyKind::Coordinates, FamilyKind::Distances, FamilyKind::Trig][i % 4],
            k => k,
        };
        match kind {
            FamilyKind::Bumps => Shape::Bump {
                center: (0..dim).map(|_| rng.gen_range(0.25..0.75)).collect(),
                width: rng.gen_range(0.15..0.35),
            },
            FamilyKind::Coordinates => Shape::Coordinate {
                axis: rng.gen_range(0..dim),
                sign: if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
            },
            FamilyKind::Distances => Shape::Distance {
                center: (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect(),
            },
            FamilyKind::Trig => Shape::Trig {
                terms: (0..3)
                    .map(|_| {
                        let k: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2i32..=2) as f64).collect();
                        (k, rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.3..1.0))
                    })
                    .collect(),
            },
            FamilyKind::CenteredBump | FamilyKind::Mixed => Shape::Bump {
                center: vec![0.5; dim],
                width: 0.25,
            },
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            Shape::Bump { .. } => "bump",
            Shape::Coordinate { .. } => "coord",
            Shape::Distance { .. } => "dist",
            Shape::Trig { .. } => "trig",
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let dist2 = |c: &[f64]| x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        match self {
            Shape::Bump { center, width } => (-dist2(center) / (2.0 * width * width)).exp(),
            Shape::Coordinate { axis, sign } => sign * x[*axis],
            Shape::Distance { center } => dist2(center).sqrt(),
            Shape::Trig { terms } => terms
                .iter()
                .map(|(k, phase, amp)| {
                    let arg: f64 = k.iter().zip(x).map(|(k, x)| k * x).sum();
                    amp * (2.0 * PI * arg + phase).cos()
                })
                .sum(),
        }
    }
}

/// Coordinates rescaled so the bounding box of the space becomes `[0, 1]^dim`.
fn unit_box(space: &MetricMeasureSpace) -> Result<(usize, Vec<f64>)> {
    let dim = space
        .dim()
        .ok_or_else(|| HarnessError::Config(format!("space `{}` has no coordinates", space.label())))?;
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for i in 0..space.len() {
        for (k, &c) in space.coords(i).expect("coordinates").iter().enumerate() {
            lo[k] = lo[k].min(c);
            hi[k] = hi[k].max(c);
        }
    }
    let mut out = Vec::with_capacity(dim * space.len());
    for i in 0..space.len() {
        for (k, &c) in space.coords(i).expect("coordinates").iter().enumerate() {
            let span = hi[k] - lo[k];
            out.push(if span > 0.0 { (c - lo[k]) / span } else { 0.5 });
        }
    }
    Ok((dim, out))
}

/// Samples the family on the points of `space`. Function `i` is defined on the unit box
/// independently of the resolution, so the same spec on refined grids samples the same
/// functions.
pub fn space_family(space: &MetricMeasureSpace, spec: &FamilySpec) -> Result<Vec<TestFunction>> {
    let (dim, unit) = unit_box(space)?;
    let count = if spec.kind == FamilyKind::CenteredBump { 1 } else { spec.count };
    Ok((0..count)
        .map(|i| {
            let shape = Shape::draw(spec.kind, i, dim, &mut stream(spec.seed, i));
            TestFunction {
                name: format!("{}-{i}", shape.tag()),
                values: unit.chunks(dim).map(|x| shape.eval(x)).collect(),
            }
        })
        .collect())
}

/// Smooth functions on a periodic grid: Gaussians, compactly supported bumps and
/// modulated Gaussians, with centers in the middle half of the box and unit-order widths.
pub fn grid_family(grid: &GridSpec, count: usize, seed: u64) -> Result<Vec<(String, GridFunction)>> {
    let reach = (grid.half_width / 8.0).min(4.0);
    (0..count)
        .map(|i| {
            let mut rng = stream(seed, i);
            let center: Vec<f64> = (0..grid.dim).map(|_| rng.gen_range(-reach..reach)).collect();
            let width = rng.gen_range(0.5..1.5) * (grid.half_width / 4.0).min(1.0);
            let freq = rng.gen_range(2.0..6.0) / width;
            let kind = i % 3;
            let name = ["gauss", "compact", "wave"][kind];
            let f = GridFunction::from_fn(*grid, |x| {
                let r2: f64 = x.iter().zip(&center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>() / (width * width);
                match kind {
                    0 => (-r2).exp(),
                    1 if r2 < 1.0 => (-1.0 / (1.0 - r2)).exp() * std::f64::consts::E,
                    1 => 0.0,
                    _ => (-r2).exp() * (freq * (x[0] - center[0])).cos(),
                }
            })?;
            Ok((format!("{name}-{i}"), f))
        })
        .collect()
}

/// Vertex functions with a finite but varied gradient: extensions of space functions,
/// the same with noise decaying like `2^{-level}`, and pure level-scaled noise.
pub fn vertex_family(
    space: &MetricMeasureSpace,
    filling: &HyperbolicFilling,
    count: usize,
    seed: u64,
) -> Result<Vec<TestFunction>> {
    let smooth = space_family(space, &FamilySpec::new(FamilyKind::Mixed, count.div_ceil(3), seed))?;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = stream(seed ^ 0x5eed, i);
        let kind = i % 3;
        let base = match kind {
            2 => vec![0.0; filling.num_vertices()],
            _ => poisson_extend(space, filling, &smooth[i / 3].values)?,
        };
        let amp = [0.0, 0.2, 1.0][kind];
        let values = base
            .iter()
            .zip(filling.vertices())
            .map(|(b, v)| b + amp * 0.5f64.powi(v.level as i32) * rng.gen_range(-1.0..1.0))
            .collect();
        let name = ["extension", "perturbed", "noise"][kind];
        out.push(TestFunction {
            name: format!("{name}-{i}"),
            values,
        });
    }
    Ok(out)
}
