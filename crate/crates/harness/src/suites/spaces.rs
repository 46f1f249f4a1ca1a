//! Suites comparing seminorms on generated metric spaces.

use std::collections::BTreeMap;

use weakfill_core::filling::{build_filling, nearest_ball_map, HyperbolicFilling};
use weakfill_core::metric_space::MetricMeasureSpace;
use weakfill_core::seq_norms::weak_norm;
use weakfill_core::sobolev::{ap_seminorm, hajlasz_seminorm, HajlaszOptions};
use weakfill_core::transfer::{edge_gradient, poisson_extend};

use super::{nominal_dimension, space_with_depth, values, with_resolution};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::families::space_family;
use crate::report::{Check, Comparison, NormReport, RatioSummary, Trend};

fn hajlasz_options(config: &ExperimentConfig) -> HajlaszOptions {
    HajlaszOptions {
        tol: config.hajlasz_tol,
        ..HajlaszOptions::default()
    }
}

/// `max(r, 1/r)`.
fn two_sided(r: f64) -> f64 {
    r.max(1.0 / r)
}

/// Filling and Hajłasz seminorms of one function; the ratio is `ap / hajlasz`.
fn compare_one(
    space: &MetricMeasureSpace,
    filling: &HyperbolicFilling,
    deepest: Option<&HyperbolicFilling>,
    f: &[f64],
    alpha: f64,
    config: &ExperimentConfig,
) -> weakfill_core::Result<BTreeMap<String, f64>> {
    let ap = ap_seminorm(space, filling, f, config.p)?;
    let sol = hajlasz_seminorm(space, f, alpha, config.p, &hajlasz_options(config))?;
    let mut row = values([
        ("ap", ap),
        ("hajlasz", sol.seminorm),
        ("hajlasz_lower", sol.lower_bound),
        ("gap", sol.gap),
        ("converged", if sol.converged { 1.0 } else { 0.0 }),
    ]);
    if sol.seminorm > 0.0 {
        row.insert("ratio".into(), ap / sol.seminorm);
    }
    if let Some(deep) = deepest {
        row.insert("ap_deepest".into(), ap_seminorm(space, deep, f, config.p)?);
    }
    Ok(row)
}

pub(super) fn thm_main(config: &ExperimentConfig, report: &mut NormReport) -> Result<Vec<Check>> {
    let mut spaces = Vec::new();
    for &m in &config.resolutions {
        spaces.push((m, space_with_depth(&with_resolution(&config.space, m), config.depth)?));
    }
    let alpha = config.alpha.unwrap_or(1.0);
    let seed = config.seeds[0];
    let mut per_function: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut medians = Vec::new();
    let mut worst: f64 = 0.0;
    let mut max_gap: f64 = 0.0;
    for (m, (space, depth)) in &spaces {
        report.metadata.h = Some(space.resolution());
        report.metadata.depth = Some(*depth);
        let filling = build_filling(space, *depth, seed)?;
        let deepest = (space.max_depth() != *depth)
            .then(|| build_filling(space, space.max_depth(), seed))
            .transpose()?;
        let case = format!("m={m}");
        let mut ratios = Vec::new();
        for tf in space_family(space, &config.family)? {
            match compare_one(space, &filling, deepest.as_ref(), &tf.values, alpha, config) {
                Ok(row) => {
                    if let Some(&r) = row.get("ratio") {
                        ratios.push(r);
                        worst = worst.max(two_sided(r));
                        per_function.entry(tf.name.clone()).or_default().push(r);
                    }
                    max_gap = max_gap.max(row["gap"]);
                    report.push_row(case.clone(), tf.name, row);
                }
                Err(e) => report.push_failure(case.clone(), tf.name, e),
            }
        }
        let summary = RatioSummary::from_ratios(format!("ap/hajlasz {case}"), ratios, 0);
        medians.push(summary.median);
        report.ratios.push(summary);
    }
    let xs: Vec<f64> = config.resolutions.iter().map(|&m| (m as f64).log2()).collect();
    report.trends.push(Trend::new("median ap/hajlasz", "log2 m", xs, medians));
    let spreads: Vec<f64> = per_function
        .values()
        .filter(|r| r.len() == config.resolutions.len())
        .map(|r| r.iter().cloned().fold(f64::MIN, f64::max) / r.iter().cloned().fold(f64::MAX, f64::min))
        .collect();
    let spread = spreads.iter().cloned().fold(0.0, f64::max);
    report.ratios.push(RatioSummary::from_ratios("resolution spread", spreads, 0));
    report.diagnostics.insert("hajlasz_max_gap".into(), max_gap);
    Ok(vec![
        Check::new("two-sided ap/hajlasz", worst, Comparison::AtMost, config.threshold("ratio_bound")),
        Check::new(
            "ratio spread across resolutions",
            spread,
            Comparison::AtMost,
            config.threshold("resolution_spread"),
        ),
    ])
}

pub(super) fn haj_incl(config: &ExperimentConfig, report: &mut NormReport) -> Result<Vec<Check>> {
    let (space, depth) = space_with_depth(&config.space, config.depth)?;
    let alpha = config.alpha.unwrap_or(nominal_dimension(&config.space) / config.p);
    report.metadata.h = Some(space.resolution());
    report.metadata.depth = Some(depth);
    report.diagnostics.insert("alpha".into(), alpha);
    let filling = build_filling(&space, depth, config.seeds[0])?;
    let mut ratios = Vec::new();
    for tf in space_family(&space, &config.family)? {
        match compare_one(&space, &filling, None, &tf.values, alpha, config) {
            Ok(row) => {
                ratios.extend(row.get("ratio").copied());
                report.push_row("inclusion", tf.name, row);
            }
            Err(e) => report.push_failure("inclusion", tf.name, e),
        }
    }
    let summary = RatioSummary::from_ratios("ap/hajlasz", ratios, 0);
    let worst = summary.max;
    report.ratios.push(summary);
    Ok(vec![Check::new(
        "ap/hajlasz",
        worst,
        Comparison::AtMost,
        config.threshold("ratio_bound"),
    )])
}

pub(super) fn fill_indep(config: &ExperimentConfig, report: &mut NormReport) -> Result<Vec<Check>> {
    let (space, depth) = space_with_depth(&config.space, config.depth)?;
    report.metadata.h = Some(space.resolution());
    report.metadata.depth = Some(depth);
    let fillings = config
        .seeds
        .iter()
        .map(|&s| build_filling(&space, depth, s))
        .collect::<weakfill_core::Result<Vec<_>>>()?;
    let mut spreads = Vec::new();
    for tf in space_family(&space, &config.family)? {
        let mut aps = Vec::new();
        for (seed, filling) in config.seeds.iter().zip(&fillings) {
            match ap_seminorm(&space, filling, &tf.values, config.p) {
                Ok(ap) => {
                    aps.push(ap);
                    report.push_row(format!("seed={seed}"), tf.name.clone(), values([("ap", ap)]));
                }
                Err(e) => report.push_failure(format!("seed={seed}"), tf.name.clone(), e),
            }
        }
        let lo = aps.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = aps.iter().cloned().fold(0.0, f64::max);
        if lo > 0.0 && aps.len() == fillings.len() {
            spreads.push(hi / lo);
        }
    }
    let summary = RatioSummary::from_ratios("max/min ap over seeds", spreads, 0);
    let worst = summary.max;
    report.ratios.push(summary);
    Ok(vec![Check::new(
        "cross-seed ratio",
        worst,
        Comparison::AtMost,
        config.threshold("ratio_bound"),
    )])
}

/// `||d_X(w o phi)||` for `w` on the target filling.
fn pullback_norm(src: &HyperbolicFilling, map: &[usize], w: &[f64], p: f64) -> weakfill_core::Result<f64> {
    let pulled: Vec<f64> = map.iter().map(|&v| w[v]).collect();
    weak_norm(&edge_gradient(src, &pulled)?, p)
}

pub(super) fn qi_invariance(config: &ExperimentConfig, report: &mut NormReport) -> Result<Vec<Check>> {
    let (space, depth) = space_with_depth(&config.space, config.depth)?;
    report.metadata.h = Some(space.resolution());
    report.metadata.depth = Some(depth);
    let base = build_filling(&space, depth, config.seeds[0])?;
    let family = space_family(&space, &config.family)?;
    let mut pulled_vs_source = Vec::new();
    let mut pulled_vs_target = Vec::new();
    for &seed in &config.seeds[1..] {
        let other = build_filling(&space, depth, seed)?;
        let forward = nearest_ball_map(&space, &base, &other)?;
        let backward = nearest_ball_map(&space, &other, &base)?;
        let case = format!("seeds={}/{seed}", config.seeds[0]);
        for tf in &family {
            let row = (|| -> weakfill_core::Result<BTreeMap<String, f64>> {
                let u = poisson_extend(&space, &base, &tf.values)?;
                let w = poisson_extend(&space, &other, &tf.values)?;
                let ap_base = weak_norm(&edge_gradient(&base, &u)?, config.p)?;
                let ap_other = weak_norm(&edge_gradient(&other, &w)?, config.p)?;
                let pulled_base = pullback_norm(&base, &forward, &w, config.p)?;
                let pulled_other = pullback_norm(&other, &backward, &u, config.p)?;
                Ok(values([
                    ("ap_base", ap_base),
                    ("ap_other", ap_other),
                    ("pullback_to_base", pulled_base),
                    ("pullback_to_other", pulled_other),
                ]))
            })();
            match row {
                Ok(row) => {
                    pulled_vs_source.push((row["pullback_to_base"], row["ap_other"]));
                    pulled_vs_source.push((row["pullback_to_other"], row["ap_base"]));
                    pulled_vs_target.push((row["pullback_to_base"], row["ap_base"]));
                    pulled_vs_target.push((row["pullback_to_other"], row["ap_other"]));
                    report.push_row(case.clone(), tf.name.clone(), row);
                }
                Err(e) => report.push_failure(case.clone(), tf.name.clone(), e),
            }
        }
    }
    let worst = |pairs: &[(f64, f64)]| {
        pairs
            .iter()
            .filter(|(a, b)| *a > 0.0 && *b > 0.0)
            .map(|(a, b)| two_sided(a / b))
            .fold(0.0, f64::max)
    };
    let (ws, wt) = (worst(&pulled_vs_source), worst(&pulled_vs_target));
    report
        .ratios
        .push(RatioSummary::of("pullback / seminorm of the pulled function", pulled_vs_source));
    report
        .ratios
        .push(RatioSummary::of("pullback / seminorm on the same filling", pulled_vs_target));
    let bound = config.threshold("ratio_bound");
    Ok(vec![
        Check::new("pullback against source filling", ws, Comparison::AtMost, bound),
        Check::new("pullback against own filling", wt, Comparison::AtMost, bound),
    ])
}

pub(super) fn subcritical(config: &ExperimentConfig, report: &mut NormReport) -> Result<Vec<Check>> {
    let deepest = *config.depths.iter().max().expect("validated");
    let (space, _) = space_with_depth(&config.space, Some(deepest))?;
    report.metadata.h = Some(space.resolution());
    report.metadata.depth = Some(deepest);
    let q = nominal_dimension(&config.space);
    let fillings = config
        .depths
        .iter()
        .map(|&n| build_filling(&space, n, config.seeds[0]))
        .collect::<weakfill_core::Result<Vec<_>>>()?;
    let xs: Vec<f64> = config.depths.iter().map(|&n| n as f64).collect();
    let mut checks = Vec::new();
    for tf in space_family(&space, &config.family)? {
        let mut slopes = Vec::new();
        for &p in &config.exponents {
            let mut ys = Vec::new();
            for (n, filling) in config.depths.iter().zip(&fillings) {
                match ap_seminorm(&space, filling, &tf.values, p) {
                    Ok(ap) => {
                        ys.push(ap);
                        report.push_row(format!("N={n} p={p}"), tf.name.clone(), values([("ap", ap)]));
                    }
                    Err(e) => report.push_failure(format!("N={n} p={p}"), tf.name.clone(), e),
                }
            }
            if ys.len() != xs.len() {
                continue;
            }
            let trend = Trend::new(format!("{} p={p}", tf.name), "N", xs.clone(), ys);
            let target = (q / p - 1.0).max(0.0);
            let tol = if p < q {
                config.threshold("slope_tol_subcritical")
            } else {
                config.threshold("slope_tol_critical")
            };
            checks.push(Check::new(
                format!("{} p={p} slope - {target:.4}", tf.name),
                trend.slope - target,
                Comparison::AbsAtMost,
                tol,
            ));
            slopes.push((p, trend.slope));
            report.trends.push(trend);
        }
        if let (Some(&(p0, s0)), Some(&(p1, s1))) = (slopes.first(), slopes.last()) {
            if slopes.len() > 1 {
                report
                    .diagnostics
                    .insert(format!("{} slope difference p={p0} vs p={p1}", tf.name), s0 - s1);
                report.diagnostics.insert(
                    format!("{} expected difference p={p0} vs p={p1}", tf.name),
                    (q / p0 - 1.0).max(0.0) - (q / p1 - 1.0).max(0.0),
                );
            }
        }
    }
    Ok(checks)
}
