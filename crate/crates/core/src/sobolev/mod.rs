//! Boundary seminorms: the filling seminorm `||d(Pf)||_{l^{p,oo}}`, the fractional
//! Hajłasz seminorm, the Hardy–Littlewood maximal function, a discrete pointwise
//! Lipschitz constant and an empirical Poincaré constant.

mod hajlasz;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::filling::HyperbolicFilling;
use crate::metric_space::MetricMeasureSpace;
use crate::seq_norms::weak_norm;
use crate::transfer::{edge_gradient, poisson_extend};

pub use hajlasz::{hajlasz_seminorm, HajlaszOptions, HajlaszSolution};

/// `||d(Pf)||_{l^{p,oo}}`, `p > 1`.
pub fn ap_seminorm(space: &MetricMeasureSpace, filling: &HyperbolicFilling, f: &[f64], p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::InvalidExponent { p, requirement: "p > 1" });
    }
    let u = poisson_extend(space, filling, f)?;
    weak_norm(&edge_gradient(filling, &u)?, p)
}

fn check_point_function(space: &MetricMeasureSpace, g: &[f64]) -> Result<()> {
    if g.len() != space.len() {
        return Err(Error::LengthMismatch {
            what: "point function",
            expected: space.len(),
            actual: g.len(),
        });
    }
    ensure_finite(g)
}

/// `(Mg)(x) = max` of the average of `|g|` over balls `B(c, r)` containing `x`, with `c`
/// ranging over all points and `r` over the attained distances.
pub fn hl_maximal(space: &MetricMeasureSpace, g: &[f64]) -> Result<Vec<f64>> {
    check_point_function(space, g)?;
    let m = space.len();
    let mut out: Vec<f64> = g.iter().map(|v| v.abs()).collect();
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(m);
    let mut best = vec![0.0; m];
    for c in 0..m {
        order.clear();
        order.extend((0..m).map(|y| (space.dist(c, y), y)));
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        // average over each prefix that ends a distance tie group; distances equal up
        // to rounding count as ties
        let mut mass = 0.0;
        let mut integral = 0.0;
        let mut k = 0;
        while k < m {
            let d = order[k].0 * (1.0 + 1e-12);
            let start = k;
            while k < m && order[k].0 <= d {
                let y = order[k].1;
                mass += space.weight(y);
                integral += space.weight(y) * g[y].abs();
                k += 1;
            }
            for e in &mut best[start..k] {
                *e = integral / mass;
            }
        }
        // a point is in every ball whose prefix reaches it: suffix maxima
        let mut running: f64 = 0.0;
        for k in (0..m).rev() {
            running = running.max(best[k]);
            let y = order[k].1;
            if running > out[y] {
                out[y] = running;
            }
        }
    }
    Ok(out)
}

/// `max { |f(y) - f(x)| / d(x, y) : 0 < d(x, y) <= h }`, a finite-scale stand-in for
/// `Lip_x f`.
pub fn pointwise_lip(space: &MetricMeasureSpace, f: &[f64], h: f64) -> Result<Vec<f64>> {
    check_point_function(space, f)?;
    if !(h >= space.resolution()) {
        return Err(Error::param(
            "h",
            format!("scale {h} is below the resolution {} of the space", space.resolution()),
        ));
    }
    let reach = h * (1.0 + 1e-12);
    Ok((0..space.len())
        .map(|x| {
            let mut best: f64 = 0.0;
            space.for_each_within(x, reach, |y, d| {
                if d > 0.0 {
                    best = best.max((f[y] - f[x]).abs() / d);
                }
            });
            best
        })
        .collect())
}

/// Default scale of [`pointwise_lip`]: one and a half times the resolution, so grid
/// diagonals are included.
pub fn default_lip_scale(space: &MetricMeasureSpace) -> f64 {
    1.5 * space.resolution()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareOptions {
    /// Scale for the discrete Lipschitz constant; `None` uses [`default_lip_scale`].
    pub h: Option<f64>,
    /// Number of stride-sampled ball centers.
    pub centers: usize,
    /// Geometric radius grid from `r_min_factor * resolution` up to `r_max`.
    pub radii: usize,
    pub r_min_factor: f64,
    pub r_max: f64,
    /// Oscillations below this are treated as zero.
    pub zero_tol: f64,
}

impl Default for PoincareOptions {
    fn default() -> Self {
        Self {
            h: None,
            centers: 32,
            radii: 6,
            r_min_factor: 4.0,
            r_max: 0.5,
            zero_tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareReport {
    pub p: f64,
    pub dilation: f64,
    /// Largest `LHS / RHS` over tested balls and functions.
    pub empirical_constant: f64,
    pub median_ratio: f64,
    pub h: f64,
    pub balls_tested: usize,
    /// Balls where the right side vanished while the left did not.
    pub violations: usize,
}

/// Evaluates `(1/|B|) int_B |f - f_B| <= C R ((1/|LB|) int_{LB} (Lip f)^p)^{1/p}` over
/// sampled balls and every function of `family`, reporting the worst ratio.
pub fn check_poincare(
    space: &MetricMeasureSpace,
    p: f64,
    dilation: f64,
    family: &[Vec<f64>],
    options: &PoincareOptions,
) -> Result<PoincareReport> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent { p, requirement: "p >= 1" });
    }
    if !(dilation >= 1.0) {
        return Err(Error::param("dilation", format!("{dilation} must be at least 1")));
    }
    let h = options.h.unwrap_or_else(|| default_lip_scale(space));
    let m = space.len();
    let stride = (m / options.centers.max(1)).max(1);
    let centers: Vec<usize> = (0..m).step_by(stride).take(options.centers.max(1)).collect();
    let r_min = (options.r_min_factor * space.resolution()).min(options.r_max);
    let radii: Vec<f64> = (0..options.radii.max(1))
        .map(|k| {
            let t = if options.radii > 1 { k as f64 / (options.radii - 1) as f64 } else { 1.0 };
            r_min * (options.r_max / r_min).powf(t)
        })
        .collect();

    let mut ratios = Vec::new();
    let mut violations = 0;
    let mut balls = 0;
    for f in family {
        let lip = pointwise_lip(space, f, h)?;
        let lip_p: Vec<f64> = lip.iter().map(|l| l.powf(p)).collect();
        for &c in &centers {
            for &r in &radii {
                let ball = space.ball(c, r)?;
                let mean: f64 = ball.members.iter().map(|&j| space.weight(j) * f[j]).sum::<f64>() / ball.measure;
                let lhs: f64 =
                    ball.members.iter().map(|&j| space.weight(j) * (f[j] - mean).abs()).sum::<f64>() / ball.measure;
                let big = space.ball(c, dilation * r)?;
                let avg: f64 = big.members.iter().map(|&j| space.weight(j) * lip_p[j]).sum::<f64>() / big.measure;
                let rhs = r * avg.powf(1.0 / p);
                balls += 1;
                if lhs <= options.zero_tol {
                    ratios.push(0.0);
                } else if rhs <= 0.0 {
                    violations += 1;
                } else {
                    ratios.push(lhs / rhs);
                }
            }
        }
    }
    ratios.sort_by(f64::total_cmp);
    Ok(PoincareReport {
        p,
        dilation,
        empirical_constant: ratios.last().copied().unwrap_or(0.0),
        median_ratio: if ratios.is_empty() { 0.0 } else { ratios[ratios.len() / 2] },
        h,
        balls_tested: balls,
        violations,
    })
}
