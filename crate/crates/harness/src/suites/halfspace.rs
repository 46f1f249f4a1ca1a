//! Extensions of periodic grid functions to the upper half-space.

use weakfill_core::euclidean::{
    geometric_levels, halfspace_weak_norm, hyperbolic_gradient, kernel_gradient_norms, poisson_extend_halfspace,
    GridFunction, GridSpec, Kernel,
};

use super::values;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::families::grid_family;
use crate::report::{Check, Comparison, NormReport, RatioSummary, Trend};

/// `exp(1 - 1/(1 - |x|^2))` on the unit ball; in every Sobolev space.
pub fn smooth_bump(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 < 1.0 {
        (1.0 - 1.0 / (1.0 - r2)).exp()
    } else {
        0.0
    }
}

/// `(|x|^{-1/4} - 1)_+` with `|x|` floored at `h/2`; its gradient is not square
/// integrable on the plane.
pub fn cusp(x: &[f64], h: f64) -> f64 {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(h / 2.0);
    (r.powf(-0.25) - 1.0).max(0.0)
}

pub(super) fn halfspace(config: &ExperimentConfig, report: &mut NormReport) -> Result<Vec<Check>> {
    let mut checks = decay(config, report)?;
    checks.extend(gradient(config, report)?);
    checks.extend(kernels(config, report)?);
    Ok(checks)
}

/// `||t^{s/p} u||_{L^{p,oo}(mu_s)} / ||f||_p` on the line.
fn decay(config: &ExperimentConfig, report: &mut NormReport) -> Result<Vec<Check>> {
    let sec = &config.halfspace.decay;
    let s = config.s.expect("validated");
    let p = config.p;
    let levels = geometric_levels(sec.t0, sec.levels)?;
    let mut table: Vec<Vec<f64>> = Vec::new();
    let mut names = Vec::new();
    for &m in &sec.resolutions {
        let grid = GridSpec::new(1, m, sec.half_width)?;
        let case = format!("decay m={m}");
        let mut column = Vec::new();
        names.clear();
        for (name, f) in grid_family(&grid, config.halfspace.functions, config.family.seed)? {
            let ratio = (|| -> weakfill_core::Result<(f64, f64)> {
                let u = poisson_extend_halfspace(&f, &levels, s)?.scaled_by_power(s / p)?;
                Ok((halfspace_weak_norm(&u, p)?, f.lp_norm(p)?))
            })();
            match ratio {
                Ok((weak, lp)) => {
                    column.push(weak / lp);
                    report.push_row(
                        case.clone(),
                        name.clone(),
                        values([("weak", weak), ("lp", lp), ("ratio", weak / lp)]),
                    );
                }
                Err(e) => {
                    column.push(f64::NAN);
                    report.push_failure(case.clone(), name.clone(), e);
                }
            }
            names.push(name);
        }
        report
            .ratios
            .push(RatioSummary::from_ratios(format!("weak/lp m={m}"), column.clone(), 0));
        table.push(column);
    }
    let bound = table.iter().flatten().cloned().fold(0.0, f64::max);
    let mut drift: f64 = 0.0;
    for pair in table.windows(2) {
        for (a, b) in pair[0].iter().zip(&pair[1]) {
            drift = drift.max((b / a - 1.0).abs());
        }
    }
    Ok(vec![
        Check::new("decay ratio", bound, Comparison::AtMost, config.threshold("decay_bound")),
        Check::new(
            "decay ratio change under doubling",
            drift,
            Comparison::AtMost,
            config.threshold("decay_stability"),
        ),
    ])
}

/// Weak `L^2(t^{-3} dx dt)` norm of `t |grad u|` on the plane, levels anchored to the grid.
fn gradient(config: &ExperimentConfig, report: &mut NormReport) -> Result<Vec<Check>> {
    let sec = &config.halfspace.gradient;
    let mut bump = Vec::new();
    let mut cusps = Vec::new();
    for &m in &sec.resolutions {
        let grid = GridSpec::new(2, m, sec.half_width)?;
        let h = grid.spacing();
        let levels = geometric_levels(sec.t0_cells * h, sec.levels)?;
        let case = format!("gradient m={m}");
        let functions = [
            ("bump", GridFunction::from_fn(grid, smooth_bump)?),
            ("cusp", GridFunction::from_fn(grid, |x| cusp(x, h))?),
        ];
        for (name, f) in functions {
            let u = poisson_extend_halfspace(&f, &levels, 2.0)?;
            let w = halfspace_weak_norm(&hyperbolic_gradient(&u)?, 2.0)?;
            report.push_row(
                case.clone(),
                name,
                values([("weak_gradient", w), ("gradient_l2", f.gradient_lp_norm(2.0)?)]),
            );
            if name == "bump" {
                bump.push(w);
            } else {
                cusps.push(w);
            }
        }
    }
    let xs: Vec<f64> = sec.resolutions.iter().map(|&m| (m as f64).log2()).collect();
    report.trends.push(Trend::new("bump weak gradient", "log2 m", xs.clone(), bump.clone()));
    report.trends.push(Trend::new("cusp weak gradient", "log2 m", xs, cusps.clone()));
    let drift = bump.windows(2).map(|w| (w[1] / w[0] - 1.0).abs()).fold(0.0, f64::max);
    let growth = cusps.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min);
    Ok(vec![
        Check::new(
            "bump gradient change under refinement",
            drift,
            Comparison::AtMost,
            config.threshold("gradient_stability"),
        ),
        Check::new(
            "cusp gradient growth per doubling",
            growth,
            Comparison::AtLeast,
            config.threshold("cusp_growth"),
        ),
    ])
}

/// `(||f||_p + max_t ||grad u(., t)||_p) / (||f||_p + ||grad f||_p)` for ball and tent
/// kernels.
fn kernels(config: &ExperimentConfig, report: &mut NormReport) -> Result<Vec<Check>> {
    let sec = &config.halfspace.kernels;
    let p = config.p;
    let grid = GridSpec::new(2, sec.resolution, sec.half_width)?;
    let levels = geometric_levels(sec.t0, sec.levels)?;
    let family = grid_family(&grid, config.halfspace.functions, config.family.seed)?;
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for kernel in [Kernel::ball_indicator(), Kernel::tent()] {
        let case = format!("kernel {}", kernel.name());
        let mut ratios = Vec::new();
        for (name, f) in &family {
            let row = (|| -> weakfill_core::Result<(f64, f64, f64)> {
                let sup = kernel_gradient_norms(f, &kernel, &levels, p)?
                    .into_iter()
                    .fold(0.0, f64::max);
                Ok((f.lp_norm(p)?, f.gradient_lp_norm(p)?, sup))
            })();
            match row {
                Ok((lp, grad, sup)) => {
                    let ratio = (lp + sup) / (lp + grad);
                    ratios.push(ratio);
                    report.push_row(
                        case.clone(),
                        name.clone(),
                        values([("lp", lp), ("gradient_lp", grad), ("sup_extension_gradient", sup), ("ratio", ratio)]),
                    );
                }
                Err(e) => report.push_failure(case.clone(), name.clone(), e),
            }
        }
        let summary = RatioSummary::from_ratios(case, ratios, 0);
        lo = lo.min(summary.min);
        hi = hi.max(summary.max);
        report.ratios.push(summary);
    }
    Ok(vec![
        Check::new("kernel ratio lower", lo, Comparison::AtLeast, config.threshold("kernel_low")),
        Check::new("kernel ratio upper", hi, Comparison::AtMost, config.threshold("kernel_high")),
    ])
}
