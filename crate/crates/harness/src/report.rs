//! Suite output: per-function rows, ratio statistics, refinement trends and threshold
//! checks, written as `report.json` and `report.csv`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// Resolution, seed, depth or section the row belongs to, e.g. `m=64`.
    pub case: String,
    pub function: String,
    pub values: BTreeMap<String, f64>,
    /// Numeric failure of this row; the remaining rows are still computed.
    pub error: Option<String>,
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    pub name: String,
    pub count: usize,
    /// Ratios dropped because the denominator vanished.
    pub skipped: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl RatioSummary {
    /// Statistics of `num / den` over pairs with a nonzero denominator.
    pub fn of(name: impl Into<String>, pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut ratios = Vec::new();
        let mut skipped = 0;
        for (num, den) in pairs {
            if den != 0.0 && num.is_finite() && den.is_finite() {
                ratios.push(num / den);
            } else {
                skipped += 1;
            }
        }
        Self::from_ratios(name, ratios, skipped)
    }

    pub fn from_ratios(name: impl Into<String>, mut ratios: Vec<f64>, skipped: usize) -> Self {
        ratios.sort_by(f64::total_cmp);
        let (min, median, max) = match ratios.len() {
            0 => (f64::NAN, f64::NAN, f64::NAN),
            n if n % 2 == 1 => (ratios[0], ratios[n / 2], ratios[n - 1]),
            n => (ratios[0], 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]), ratios[n - 1]),
        };
        RatioSummary {
            name: name.into(),
            count: ratios.len(),
            skipped,
            min,
            median,
            max,
        }
    }
}

/// Values against a refinement parameter with the least-squares slope of `log2 y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trend {
    pub name: String,
    pub x_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub slope: f64,
}

impl Trend {
    pub fn new(name: impl Into<String>, x_label: impl Into<String>, x: Vec<f64>, y: Vec<f64>) -> Self {
        let logs: Vec<f64> = y.iter().map(|v| v.log2()).collect();
        let slope = fit_slope(&x, &logs);
        Trend {
            name: name.into(),
            x_label: x_label.into(),
            x,
            y,
            slope,
        }
    }
}

/// Least-squares slope of `y` against `x`; NaN for fewer than two points.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    if n < 2 {
        return f64::NAN;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let sxy: f64 = (0..n).map(|i| (x[i] - mx) * (y[i] - my)).sum();
    let sxx: f64 = (0..n).map(|i| (x[i] - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    AtLeast,
    /// `|value| <= threshold`.
    AbsAtMost,
    /// Structural yes/no checks, encoded as 1 for true.
    Holds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, comparison: Comparison, threshold: f64) -> Self {
        let passed = match comparison {
            Comparison::AtMost => value <= threshold,
            Comparison::AtLeast => value >= threshold,
            Comparison::AbsAtMost => value.abs() <= threshold,
            Comparison::Holds => value == 1.0,
        };
        Check {
            name: name.into(),
            value,
            comparison,
            threshold,
            passed,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, Comparison::Holds, 1.0)
    }

    pub fn describe(&self) -> String {
        let op = match self.comparison {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
            Comparison::AbsAtMost => "|.| <=",
            Comparison::Holds => "holds",
        };
        let verdict = if self.passed { "pass" } else { "FAIL" };
        match self.comparison {
            Comparison::Holds => format!("{verdict} {}", self.name),
            _ => format!("{verdict} {}: {:.6} {op} {}", self.name, self.value, self.threshold),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub space: String,
    pub seeds: Vec<u64>,
    /// Resolution of the (finest) space, if the suite uses one.
    pub h: Option<f64>,
    pub depth: Option<usize>,
    pub wall_time_s: f64,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub experiment: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub metadata: Metadata,
    pub rows: Vec<Row>,
    pub ratios: Vec<RatioSummary>,
    pub trends: Vec<Trend>,
    /// Named scalars that are reported but not checked.
    pub diagnostics: BTreeMap<String, f64>,
    pub thresholds: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl NormReport {
    pub fn new(config: &ExperimentConfig) -> Self {
        NormReport {
            experiment: config.experiment.clone(),
            config_hash: config.hash(),
            config: config.clone(),
            metadata: Metadata {
                space: config.space.to_string(),
                seeds: config.seeds.clone(),
                h: None,
                depth: config.depth,
                wall_time_s: 0.0,
                version: env!("CARGO_PKG_VERSION").into(),
            },
            rows: Vec::new(),
            ratios: Vec::new(),
            trends: Vec::new(),
            diagnostics: BTreeMap::new(),
            thresholds: config.thresholds.clone(),
            checks: Vec::new(),
            passed: false,
        }
    }

    pub fn push_row(&mut self, case: impl Into<String>, function: impl Into<String>, values: BTreeMap<String, f64>) {
        self.rows.push(Row {
            case: case.into(),
            function: function.into(),
            values,
            error: None,
            config_hash: self.config_hash.clone(),
        });
    }

    pub fn push_failure(&mut self, case: impl Into<String>, function: impl Into<String>, error: impl ToString) {
        let error = error.to_string();
        log::warn!("row failed: {error}");
        self.rows.push(Row {
            case: case.into(),
            function: function.into(),
            values: BTreeMap::new(),
            error: Some(error),
            config_hash: self.config_hash.clone(),
        });
    }

    /// Value `key` of the row for `(case, function)`, if it was computed.
    pub fn value(&self, case: &str, function: &str, key: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.case == case && r.function == function)
            .and_then(|r| r.values.get(key).copied())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Records the checks; the report passes when every check does and no row failed.
    pub fn finish(&mut self, checks: Vec<Check>) {
        let rows_ok = self.rows.iter().all(|r| r.error.is_none());
        let mut checks = checks;
        if !rows_ok {
            checks.push(Check::holds("all rows computed", false));
        }
        self.passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        self.checks = checks;
    }

    /// Per-row CSV: one column per value name (sorted), blank where a row lacks it.
    pub fn to_csv(&self) -> String {
        let keys: BTreeSet<&str> = self.rows.iter().flat_map(|r| r.values.keys().map(String::as_str)).collect();
        let mut out = String::from("config_hash,case,function");
        for k in &keys {
            out.push(',');
            out.push_str(k);
        }
        out.push_str(",error\n");
        for r in &self.rows {
            write!(out, "{},{},{}", r.config_hash, csv_field(&r.case), csv_field(&r.function)).unwrap();
            for k in &keys {
                out.push(',');
                if let Some(v) = r.values.get(*k) {
                    write!(out, "{v:e}").unwrap();
                }
            }
            out.push(',');
            if let Some(e) = &r.error {
                out.push_str(&csv_field(e));
            }
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} [{}] {} in {:.1}s\n",
            self.experiment,
            self.config_hash,
            if self.passed { "PASSED" } else { "FAILED" },
            self.metadata.wall_time_s
        );
        for r in &self.ratios {
            writeln!(
                out,
                "  ratio {}: min {:.4} median {:.4} max {:.4} (n={})",
                r.name, r.min, r.median, r.max, r.count
            )
            .unwrap();
        }
        for t in &self.trends {
            writeln!(out, "  trend {}: slope {:.4} per {}", t.name, t.slope, t.x_label).unwrap();
        }
        for (k, v) in &self.diagnostics {
            writeln!(out, "  {k} = {v:.6}").unwrap();
        }
        for c in &self.checks {
            writeln!(out, "  {}", c.describe()).unwrap();
        }
        out
    }

    /// Writes `report.json` and `report.csv` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        let json = dir.join("report.json");
        std::fs::write(&json, serde_json::to_string_pretty(self)?).map_err(|e| HarnessError::io(&json, e))?;
        let csv = dir.join("report.csv");
        std::fs::write(&csv, self.to_csv()).map_err(|e| HarnessError::io(&csv, e))?;
        Ok(())
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::SuiteId;

    #[test]
    fn ratio_summary_skips_zero_denominators() {
        let s = RatioSummary::of("r", [(1.0, 2.0), (3.0, 0.0), (4.0, 1.0), (2.0, 2.0)]);
        assert_eq!(s.count, 3);
        assert_eq!(s.skipped, 1);
        assert_eq!((s.min, s.median, s.max), (0.5, 1.0, 4.0));
        let even = RatioSummary::from_ratios("e", vec![4.0, 1.0, 2.0, 3.0], 0);
        assert_eq!(even.median, 2.5);
        assert!(RatioSummary::of("none", [(1.0, 0.0)]).max.is_nan());
    }

    #[test]
    fn slope_of_a_geometric_sequence() {
        let t = Trend::new("g", "N", vec![3.0, 4.0, 5.0], vec![1.0, 2.0, 4.0]);
        assert!((t.slope - 1.0).abs() < 1e-12);
        assert!(fit_slope(&[1.0], &[1.0]).is_nan());
    }

    #[test]
    fn checks_and_failed_rows() {
        assert!(Check::new("a", 1.0, Comparison::AtMost, 1.0).passed);
        assert!(!Check::new("a", 0.9, Comparison::AtLeast, 1.0).passed);
        assert!(Check::new("a", -0.05, Comparison::AbsAtMost, 0.1).passed);
        let mut r = NormReport::new(&ExperimentConfig::default_for(SuiteId::FillIndep));
        r.push_row("seed=0", "f", BTreeMap::from([("ap".into(), 1.0)]));
        r.finish(vec![Check::holds("ok", true)]);
        assert!(r.passed);
        r.push_failure("seed=1", "f", "no convergence");
        r.finish(vec![Check::holds("ok", true)]);
        assert!(!r.passed);
    }

    #[test]
    fn csv_has_one_column_per_value() {
        let mut r = NormReport::new(&ExperimentConfig::default_for(SuiteId::FillIndep));
        r.push_row("seed=0", "f,g", BTreeMap::from([("b".into(), 0.5), ("a".into(), 1.0)]));
        r.push_row("seed=1", "h", BTreeMap::from([("a".into(), 2.0)]));
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "config_hash,case,function,a,b,error");
        assert!(lines[1].ends_with(",seed=0,\"f,g\",1e0,5e-1,"));
        assert!(lines[2].ends_with(",seed=1,h,2e0,,"));
    }
}
