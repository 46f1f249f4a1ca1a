//! Deterministic test-space generators.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::MetricMeasureSpace;
use crate::error::{Error, Result};

/// A generator descriptor, written `name:arg[:arg]`, e.g. `square_grid:64` or
/// `snowflake_interval:256:0.5`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SpaceSpec {
    IntervalGrid { m: usize },
    SquareGrid { m: usize },
    CircleGrid { m: usize },
    SnowflakeInterval { m: usize, epsilon: f64 },
    SierpinskiCarpet { level: usize },
}

impl SpaceSpec {
    fn validate(&self) -> Result<()> {
        match *self {
            SpaceSpec::IntervalGrid { m } | SpaceSpec::SquareGrid { m } | SpaceSpec::CircleGrid { m } => {
                if m < 2 {
                    return Err(Error::param("m", format!("{m} points per axis (need at least 2)")));
                }
            }
            SpaceSpec::SnowflakeInterval { m, epsilon } => {
                if m < 2 {
                    return Err(Error::param("m", format!("{m} points (need at least 2)")));
                }
                if !(epsilon > 0.0 && epsilon <= 1.0) {
                    return Err(Error::param("epsilon", format!("{epsilon} is outside (0, 1]")));
                }
            }
            SpaceSpec::SierpinskiCarpet { level } => {
                if level < 1 {
                    return Err(Error::param("level", "carpet level must be at least 1"));
                }
                if level > 7 {
                    return Err(Error::param("level", format!("level {level} has too many points")));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::IntervalGrid { m } => write!(f, "interval_grid:{m}"),
            SpaceSpec::SquareGrid { m } => write!(f, "square_grid:{m}"),
            SpaceSpec::CircleGrid { m } => write!(f, "circle_grid:{m}"),
            SpaceSpec::SnowflakeInterval { m, epsilon } => write!(f, "snowflake_interval:{m}:{epsilon}"),
            SpaceSpec::SierpinskiCarpet { level } => write!(f, "sierpinski_carpet:{level}"),
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let int = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .ok_or_else(|| Error::param("space", format!("`{s}` is missing an argument")))?
                .trim()
                .parse()
                .map_err(|_| Error::param("space", format!("`{s}` has a non-integer argument")))
        };
        let spec = match (parts[0], parts.len()) {
            ("interval_grid", 2) => SpaceSpec::IntervalGrid { m: int(1)? },
            ("square_grid", 2) => SpaceSpec::SquareGrid { m: int(1)? },
            ("circle_grid", 2) => SpaceSpec::CircleGrid { m: int(1)? },
            ("sierpinski_carpet", 2) => SpaceSpec::SierpinskiCarpet { level: int(1)? },
            ("snowflake_interval", 3) => SpaceSpec::SnowflakeInterval {
                m: int(1)?,
                epsilon: parts[2]
                    .trim()
                    .parse()
                    .map_err(|_| Error::param("space", format!("`{s}` has a non-numeric exponent")))?,
            },
            _ => return Err(Error::param("space", format!("unknown space descriptor `{s}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl TryFrom<String> for SpaceSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SpaceSpec> for String {
    fn from(spec: SpaceSpec) -> String {
        spec.to_string()
    }
}

/// Builds the space named by `spec`, with uniform weights and diameter 1.
pub fn make_space(spec: &SpaceSpec) -> Result<MetricMeasureSpace> {
    spec.validate()?;
    let label = spec.to_string();
    match *spec {
        SpaceSpec::IntervalGrid { m } => {
            MetricMeasureSpace::from_normalized(label, 1, unit_grid(m), None, 1.0)
        }
        SpaceSpec::SnowflakeInterval { m, epsilon } => {
            MetricMeasureSpace::from_normalized(label, 1, unit_grid(m), None, epsilon)
        }
        SpaceSpec::SquareGrid { m } => {
            let axis = unit_grid(m);
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let mut coords = Vec::with_capacity(2 * m * m);
            for &y in &axis {
                for &x in &axis {
                    coords.push(x * s);
                    coords.push(y * s);
                }
            }
            MetricMeasureSpace::from_normalized(label, 2, coords, None, 1.0)
        }
        SpaceSpec::CircleGrid { m } => {
            let chord = 2.0 * (PI * (m / 2) as f64 / m as f64).sin();
            let mut coords = Vec::with_capacity(2 * m);
            for i in 0..m {
                let a = 2.0 * PI * i as f64 / m as f64;
                coords.push(a.cos() / chord);
                coords.push(a.sin() / chord);
            }
            MetricMeasureSpace::from_normalized(label, 2, coords, None, 1.0)
        }
        SpaceSpec::SierpinskiCarpet { level } => {
            let side = 3usize.pow(level as u32);
            let scale = 1.0 / (std::f64::consts::SQRT_2 * (1.0 - 1.0 / side as f64));
            let mut coords = Vec::with_capacity(2 * 8usize.pow(level as u32));
            for j in 0..side {
                for i in 0..side {
                    if carpet_keeps(i, j) {
                        coords.push((i as f64 + 0.5) / side as f64 * scale);
                        coords.push((j as f64 + 0.5) / side as f64 * scale);
                    }
                }
            }
            MetricMeasureSpace::from_normalized(label, 2, coords, None, 1.0)
        }
    }
}

fn unit_grid(m: usize) -> Vec<f64> {
    (0..m).map(|i| i as f64 / (m - 1) as f64).collect()
}

/// A cell survives unless some ternary digit position is the middle one on both axes.
fn carpet_keeps(mut i: usize, mut j: usize) -> bool {
    while i > 0 || j > 0 {
        if i % 3 == 1 && j % 3 == 1 {
            return false;
        }
        i /= 3;
        j /= 3;
    }
    true
}
