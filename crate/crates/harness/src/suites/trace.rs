//! Trace of the Poisson extension and the vertex-function bounds around it.

use serde::{Deserialize, Serialize};
use weakfill_core::filling::{build_filling, HyperbolicFilling};
use weakfill_core::metric_space::MetricMeasureSpace;
use weakfill_core::seq_norms::weak_norm;
use weakfill_core::sobolev::ap_seminorm;
use weakfill_core::transfer::{edge_gradient, filling_maximal, poisson_extend, TraceOperator};

use super::{space_with_depth, values};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::families::{space_family, vertex_family};
use crate::report::{Check, Comparison, NormReport, RatioSummary};

/// Weak-norm ratios of one vertex function `u`, all relative to `||du||` except the
/// maximal bound, which is relative to `||u||`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModoutRatios {
    pub gradient: f64,
    /// `||u - P(TR u)|| / ||du||`.
    pub residual: f64,
    /// `||d(P(TR u))|| / ||du||`.
    pub extension_gradient: f64,
    /// `||Mu|| / ||u||`.
    pub maximal: f64,
}

pub fn modout_ratios(
    space: &MetricMeasureSpace,
    filling: &HyperbolicFilling,
    trace: &TraceOperator,
    u: &[f64],
    p: f64,
) -> weakfill_core::Result<ModoutRatios> {
    let du = weak_norm(&edge_gradient(filling, u)?, p)?;
    let extended = poisson_extend(space, filling, &trace.apply(u)?.values)?;
    let residual: Vec<f64> = u.iter().zip(&extended).map(|(a, b)| a - b).collect();
    let m = weak_norm(&filling_maximal(space, filling, u)?, p)?;
    Ok(ModoutRatios {
        gradient: du,
        residual: weak_norm(&residual, p)? / du,
        extension_gradient: weak_norm(&edge_gradient(filling, &extended)?, p)? / du,
        maximal: m / weak_norm(u, p)?,
    })
}

pub(super) fn trace_roundtrip(config: &ExperimentConfig, report: &mut NormReport) -> Result<Vec<Check>> {
    let deepest = *config.depths.iter().max().expect("validated");
    let (space, _) = space_with_depth(&config.space, Some(deepest))?;
    report.metadata.h = Some(space.resolution());
    report.metadata.depth = Some(deepest);
    let filling = build_filling(&space, deepest, config.seeds[0])?;
    let trace = TraceOperator::new(&space, &filling)?;
    let mut monotone = true;
    let mut final_fraction: f64 = 0.0;
    let mut recovery = Vec::new();
    for tf in space_family(&space, &config.family)? {
        let f = &tf.values;
        let u = poisson_extend(&space, &filling, f)?;
        let mean = space.mean(f);
        let spread = space.l1_norm(&f.iter().map(|v| v - mean).collect::<Vec<_>>());
        let mut previous = f64::INFINITY;
        let mut last = f64::NAN;
        for &n in &config.depths {
            let smoothed = trace.smooth(&u, n);
            let err = space.l1_norm(&smoothed.iter().zip(f).map(|(a, b)| a - b).collect::<Vec<_>>());
            monotone &= err < previous;
            previous = err;
            last = if spread > 0.0 { err / spread } else { f64::NAN };
            report.push_row(
                format!("N={n}"),
                tf.name.clone(),
                values([("l1_error", err), ("relative_error", last), ("l1_deviation", spread)]),
            );
        }
        final_fraction = final_fraction.max(last);
        let ap = ap_seminorm(&space, &filling, f, config.p)?;
        recovery.push((spread, ap));
    }
    report
        .ratios
        .push(RatioSummary::of("||f - mean f||_1 / ||d(Pf)||", recovery));

    let mut residual = Vec::new();
    let mut gradient = Vec::new();
    let mut maximal = Vec::new();
    for tf in vertex_family(&space, &filling, config.vertex_functions, config.seeds[0])? {
        match modout_ratios(&space, &filling, &trace, &tf.values, config.p) {
            Ok(r) => {
                residual.push(r.residual);
                gradient.push(r.extension_gradient);
                maximal.push(r.maximal);
                report.push_row(
                    "vertex",
                    tf.name,
                    values([
                        ("du", r.gradient),
                        ("residual_ratio", r.residual),
                        ("extension_gradient_ratio", r.extension_gradient),
                        ("maximal_ratio", r.maximal),
                    ]),
                );
            }
            Err(e) => report.push_failure("vertex", tf.name, e),
        }
    }
    let mut checks = vec![
        Check::holds("trace error decreases with depth", monotone),
        Check::new(
            "relative trace error at the deepest level",
            final_fraction,
            Comparison::AtMost,
            config.threshold("final_fraction"),
        ),
    ];
    for (name, key, ratios) in [
        ("||u - P(TR u)|| / ||du||", "modout_residual", residual),
        ("||d P(TR u)|| / ||du||", "modout_gradient", gradient),
        ("||Mu|| / ||u||", "maximal_bound", maximal),
    ] {
        if ratios.is_empty() {
            continue;
        }
        let summary = RatioSummary::from_ratios(name, ratios, 0);
        checks.push(Check::new(name, summary.max, Comparison::AtMost, config.threshold(key)));
        report.ratios.push(summary);
    }
    Ok(checks)
}
