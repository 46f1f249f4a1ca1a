//! Point-cloud ingestion.

use std::path::Path;

use super::MetricMeasureSpace;
use crate::error::{Error, Result};

/// Coordinates and optional weights parsed from point-cloud text.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    pub dim: usize,
    pub coords: Vec<f64>,
    pub weights: Option<Vec<f64>>,
}

/// Parses one point per line: whitespace-separated coordinates, an optional trailing
/// `w=<weight>` token, `#` starting a comment. Either every point carries a weight or
/// none does.
pub fn parse_point_cloud(text: &str, path: &Path) -> Result<PointCloud> {
    let err = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut dim = None;
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    let mut points = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens: Vec<&str> = content.split_whitespace().collect();
        let weight = match tokens.last().and_then(|t| t.strip_prefix("w=")) {
            Some(w) => {
                let w: f64 = w.parse().map_err(|_| err(line, format!("bad weight `{w}`")))?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(err(line, format!("weight {w} must be positive")));
                }
                tokens.pop();
                Some(w)
            }
            None => None,
        };
        if tokens.is_empty() {
            return Err(err(line, "no coordinates".into()));
        }
        match dim {
            None => dim = Some(tokens.len()),
            Some(d) if d != tokens.len() => {
                return Err(err(line, format!("expected {d} coordinates, found {}", tokens.len())));
            }
            _ => {}
        }
        for t in tokens {
            let v: f64 = t.parse().map_err(|_| err(line, format!("bad coordinate `{t}`")))?;
            if !v.is_finite() {
                return Err(err(line, format!("non-finite coordinate `{t}`")));
            }
            coords.push(v);
        }
        match (weight, points == weights.len()) {
            (Some(w), true) => weights.push(w),
            (None, _) if weights.is_empty() => {}
            _ => return Err(err(line, "weights must be given for every point or for none".into())),
        }
        points += 1;
    }
    if !weights.is_empty() && weights.len() != points {
        return Err(err(text.lines().count(), "weights must be given for every point or for none".into()));
    }
    let dim = dim.ok_or_else(|| err(0, "no points".into()))?;
    Ok(PointCloud {
        dim,
        coords,
        weights: (!weights.is_empty()).then_some(weights),
    })
}

/// Reads a point-cloud file into a Euclidean space of diameter 1.
pub fn load_space(path: impl AsRef<Path>) -> Result<MetricMeasureSpace> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let cloud = parse_point_cloud(&text, path)?;
    if cloud.coords.len() / cloud.dim < 2 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            reason: "a space needs at least two points".into(),
        });
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "points".into());
    let space = MetricMeasureSpace::from_coordinates(label, cloud.dim, cloud.coords, cloud.weights, 1.0)?;
    if space.coincident_pairs() > 0 {
        log::warn!(
            "{}: {} duplicate point pair(s); fillings cannot be built on this space",
            path.display(),
            space.coincident_pairs()
        );
    }
    Ok(space)
}
