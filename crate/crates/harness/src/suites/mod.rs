//! Suite drivers. Each fills a [`NormReport`] and returns the checks it evaluated.

mod halfspace;
mod spaces;
mod trace;

use std::time::Instant;

use weakfill_core::metric_space::{make_space, MetricMeasureSpace, SpaceSpec};

use crate::catalog::SuiteId;
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::report::NormReport;

pub use trace::{modout_ratios, ModoutRatios};

/// Runs the suite named by `config`, writing `report.json` and `report.csv` into
/// `config.output_dir` when it is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<NormReport> {
    config.validate()?;
    let id = config.suite()?;
    let start = Instant::now();
    let mut report = NormReport::new(config);
    log::info!("running {id} [{}]", report.config_hash);
    let checks = match id {
        SuiteId::ThmMain => spaces::thm_main(config, &mut report)?,
        SuiteId::HajIncl => spaces::haj_incl(config, &mut report)?,
        SuiteId::FillIndep => spaces::fill_indep(config, &mut report)?,
        SuiteId::QiInvariance => spaces::qi_invariance(config, &mut report)?,
        SuiteId::Subcritical => spaces::subcritical(config, &mut report)?,
        SuiteId::TraceRoundtrip => trace::trace_roundtrip(config, &mut report)?,
        SuiteId::Halfspace => halfspace::halfspace(config, &mut report)?,
    };
    report.finish(checks);
    report.metadata.wall_time_s = start.elapsed().as_secs_f64();
    if let Some(dir) = &config.output_dir {
        report.write(dir)?;
    }
    Ok(report)
}

/// Ahlfors dimension of the generated spaces.
pub fn nominal_dimension(spec: &SpaceSpec) -> f64 {
    match *spec {
        SpaceSpec::IntervalGrid { .. } | SpaceSpec::CircleGrid { .. } => 1.0,
        SpaceSpec::SquareGrid { .. } => 2.0,
        SpaceSpec::SnowflakeInterval { epsilon, .. } => 1.0 / epsilon,
        SpaceSpec::SierpinskiCarpet { .. } => 8f64.ln() / 3f64.ln(),
    }
}

fn with_resolution(spec: &SpaceSpec, m: usize) -> SpaceSpec {
    match *spec {
        SpaceSpec::IntervalGrid { .. } => SpaceSpec::IntervalGrid { m },
        SpaceSpec::CircleGrid { .. } => SpaceSpec::CircleGrid { m },
        SpaceSpec::SnowflakeInterval { epsilon, .. } => SpaceSpec::SnowflakeInterval { m, epsilon },
        SpaceSpec::SierpinskiCarpet { .. } => SpaceSpec::SierpinskiCarpet { level: m },
        SpaceSpec::SquareGrid { .. } => SpaceSpec::SquareGrid { m },
    }
}

/// Builds the space and checks that it resolves `depth` (or picks its deepest level).
fn space_with_depth(spec: &SpaceSpec, depth: Option<usize>) -> Result<(MetricMeasureSpace, usize)> {
    let space = make_space(spec)?;
    let max = space.max_depth();
    match depth {
        Some(d) if d > max => Err(HarnessError::Config(format!(
            "depth {d} exceeds the deepest level {max} resolved by {spec}"
        ))),
        Some(0) => Err(HarnessError::Config("depth must be positive".into())),
        Some(d) => Ok((space, d)),
        None if max == 0 => Err(HarnessError::Config(format!("{spec} resolves no filling level"))),
        None => Ok((space, max)),
    }
}

fn values<const N: usize>(pairs: [(&str, f64); N]) -> std::collections::BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
