//! Empirical Ahlfors-regularity fit `|B(x, r)| ~ r^Q`.

use serde::{Deserialize, Serialize};

use super::MetricMeasureSpace;
use crate::error::{Error, Result};

const CENTERS: usize = 64;
const RADII: usize = 12;
const NEIGHBOR_RANK: usize = 8;
const R_MAX: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityEstimate {
    pub q: f64,
    pub lower_const: f64,
    pub upper_const: f64,
    pub fit_range: (f64, f64),
}

/// Fits `log |B(x, r)|` against `log r` over stride-sampled centers and a geometric
/// radius grid. The lower end of the grid is the median distance to the eighth nearest
/// neighbour, so every fitted ball holds several points.
pub fn estimate_regularity(space: &MetricMeasureSpace) -> Result<RegularityEstimate> {
    let n = space.len();
    if n < 16 {
        return Err(Error::param("space", format!("{n} points (need at least 16)")));
    }
    let stride = (n / CENTERS).max(1);
    let offset = stride / 2;
    let centers: Vec<usize> = (0..CENTERS.min(n)).map(|k| (offset + k * stride).min(n - 1)).collect();

    // per center: distances sorted ascending with cumulative mass
    let profiles: Vec<(Vec<f64>, Vec<f64>)> = centers
        .iter()
        .map(|&c| {
            let mut pairs: Vec<(f64, f64)> = (0..n).map(|j| (space.dist(c, j), space.weight(j))).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut acc = 0.0;
            let cumulative = pairs
                .iter()
                .map(|&(_, w)| {
                    acc += w;
                    acc
                })
                .collect();
            (pairs.into_iter().map(|p| p.0).collect(), cumulative)
        })
        .collect();

    let mut ranks: Vec<f64> = profiles.iter().map(|(d, _)| d[NEIGHBOR_RANK.min(n - 1)]).collect();
    ranks.sort_by(f64::total_cmp);
    let r_min = ranks[ranks.len() / 2];
    let r_max = R_MAX.max(4.0 * r_min).min(1.0);
    if !(r_min > 0.0 && r_min < r_max) {
        return Err(Error::Degenerate("no usable radius range for a regularity fit".into()));
    }

    let measure = |profile: &(Vec<f64>, Vec<f64>), r: f64| {
        let k = profile.0.partition_point(|&d| d < r);
        if k == 0 {
            0.0
        } else {
            profile.1[k - 1]
        }
    };
    let radii: Vec<f64> = (0..RADII)
        .map(|k| r_min * (r_max / r_min).powf(k as f64 / (RADII - 1) as f64))
        .collect();
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = radii
        .iter()
        .map(|&r| profiles.iter().map(|p| measure(p, r).ln()).sum::<f64>() / profiles.len() as f64)
        .collect();
    let mx = xs.iter().sum::<f64>() / RADII as f64;
    let my = ys.iter().sum::<f64>() / RADII as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let q = sxy / sxx;
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::Degenerate("ball measures do not grow with the radius".into()));
    }

    let mut lower_const = f64::INFINITY;
    let mut upper_const: f64 = 0.0;
    for p in &profiles {
        for &r in &radii {
            let c = measure(p, r) / r.powf(q);
            lower_const = lower_const.min(c);
            upper_const = upper_const.max(c);
        }
    }
    Ok(RegularityEstimate {
        q,
        lower_const,
        upper_const,
        fit_range: (r_min, r_max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_space::{make_space, SpaceSpec};

    fn q_of(spec: &str) -> RegularityEstimate {
        estimate_regularity(&make_space(&spec.parse::<SpaceSpec>().unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn interval_is_one_dimensional() {
        let e = q_of("interval_grid:1024");
        assert!((e.q - 1.0).abs() < 0.05, "{e:?}");
        assert!(e.lower_const <= e.upper_const);
    }

    #[test]
    fn square_is_two_dimensional() {
        let e = q_of("square_grid:64");
        assert!((e.q - 2.0).abs() < 0.1, "{e:?}");
    }

    #[test]
    fn snowflaking_doubles_the_dimension() {
        let e = q_of("snowflake_interval:1024:0.5");
        assert!((e.q - 2.0).abs() < 0.1, "{e:?}");
        let e = q_of("snowflake_interval:256:0.5");
        assert!((e.q - 2.0).abs() < 0.2, "{e:?}");
    }

    #[test]
    fn carpet_dimension() {
        let e = q_of("sierpinski_carpet:4");
        let expected = 8f64.ln() / 3f64.ln();
        assert!((e.q - expected).abs() < 0.1 * expected, "{e:?}");
    }

    #[test]
    fn circle_is_one_dimensional() {
        let e = q_of("circle_grid:1024");
        assert!((e.q - 1.0).abs() < 0.1, "{e:?}");
    }

    #[test]
    fn small_spaces_are_rejected() {
        let s = make_space(&SpaceSpec::IntervalGrid { m: 15 }).unwrap();
        assert!(estimate_regularity(&s).is_err());
    }
}
