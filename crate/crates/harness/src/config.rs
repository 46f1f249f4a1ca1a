//! Experiment configuration: JSON documents overlaid on per-suite defaults.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use weakfill_core::metric_space::SpaceSpec;

use crate::catalog::{find_suite, SuiteId};
use crate::error::{HarnessError, Result};
use crate::families::{FamilyKind, FamilySpec};

/// Settings of the half-space suite, one block per section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceConfig {
    /// Smooth functions drawn per section.
    pub functions: usize,
    pub decay: DecaySection,
    pub gradient: GradientSection,
    pub kernels: KernelSection,
}

/// Weak norm of `t^{s/p} u` on a line, compared with `||f||_{L^p}` under grid doubling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySection {
    pub resolutions: Vec<usize>,
    pub half_width: f64,
    pub t0: f64,
    pub levels: usize,
}

/// Weak `L^{n}` norm of the hyperbolic gradient on the plane for a smooth bump and a
/// cusp. The top level is `t0_cells` grid spacings, so all levels refine with the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradientSection {
    pub resolutions: Vec<usize>,
    pub half_width: f64,
    pub t0_cells: f64,
    pub levels: usize,
}

/// Ball and tent kernel extensions on the plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    pub resolution: usize,
    pub half_width: f64,
    pub t0: f64,
    pub levels: usize,
}

impl Default for HalfspaceConfig {
    fn default() -> Self {
        Self {
            functions: 10,
            decay: DecaySection {
                resolutions: vec![4096, 8192],
                half_width: 64.0,
                t0: 1.0 / 16.0,
                levels: 10,
            },
            gradient: GradientSection {
                resolutions: vec![32, 64, 128],
                half_width: 4.0,
                t0_cells: 16.0,
                levels: 8,
            },
            kernels: KernelSection {
                resolution: 128,
                half_width: 4.0,
                t0: 2.0,
                levels: 6,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub space: SpaceSpec,
    /// Filling depth; `None` uses the deepest level the space resolves.
    pub depth: Option<usize>,
    pub seeds: Vec<u64>,
    pub p: f64,
    /// Weight exponent of the half-space measure.
    pub s: Option<f64>,
    /// Hölder exponent of the Hajłasz seminorm; `None` means `Q/p`.
    pub alpha: Option<f64>,
    pub family: FamilySpec,
    pub output_dir: Option<PathBuf>,
    /// Points per axis for suites that refine the space.
    pub resolutions: Vec<usize>,
    /// Filling depths for suites that refine the filling.
    pub depths: Vec<usize>,
    /// Extra exponents for suites that compare several `p`.
    pub exponents: Vec<f64>,
    pub hajlasz_tol: f64,
    /// Random vertex functions for the filling-side bounds.
    pub vertex_functions: usize,
    pub halfspace: HalfspaceConfig,
    pub thresholds: BTreeMap<String, f64>,
}

fn thresholds(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

impl ExperimentConfig {
    /// The configuration a suite runs with when nothing is overridden.
    pub fn default_for(id: SuiteId) -> Self {
        let mut c = ExperimentConfig {
            experiment: id.as_str().into(),
            space: SpaceSpec::SquareGrid { m: 64 },
            depth: None,
            seeds: vec![0],
            p: 2.0,
            s: None,
            alpha: None,
            family: FamilySpec::new(FamilyKind::Mixed, 10, 0),
            output_dir: None,
            resolutions: Vec::new(),
            depths: Vec::new(),
            exponents: Vec::new(),
            hajlasz_tol: 1e-2,
            vertex_functions: 0,
            halfspace: HalfspaceConfig::default(),
            thresholds: BTreeMap::new(),
        };
        match id {
            SuiteId::ThmMain => {
                c.depth = Some(4);
                c.alpha = Some(1.0);
                c.family.count = 20;
                c.resolutions = vec![32, 64, 128];
                c.thresholds = thresholds(&[("ratio_bound", 64.0), ("resolution_spread", 2.0)]);
            }
            SuiteId::HajIncl => {
                c.space = SpaceSpec::SquareGrid { m: 32 };
                c.p = 3.0;
                c.thresholds = thresholds(&[("ratio_bound", 64.0)]);
            }
            SuiteId::FillIndep => {
                c.seeds = vec![0, 1, 2];
                c.thresholds = thresholds(&[("ratio_bound", 16.0)]);
            }
            SuiteId::QiInvariance => {
                c.seeds = vec![0, 1];
                c.thresholds = thresholds(&[("ratio_bound", 16.0)]);
            }
            SuiteId::Subcritical => {
                c.space = SpaceSpec::SquareGrid { m: 128 };
                c.depths = vec![3, 4, 5, 6];
                c.exponents = vec![1.5, 2.0];
                c.family = FamilySpec::new(FamilyKind::CenteredBump, 1, 0);
                c.thresholds = thresholds(&[("slope_tol_critical", 0.1), ("slope_tol_subcritical", 0.15)]);
            }
            SuiteId::TraceRoundtrip => {
                c.depths = vec![3, 4, 5];
                c.family = FamilySpec::new(FamilyKind::Bumps, 10, 0);
                c.vertex_functions = 50;
                c.thresholds = thresholds(&[
                    ("final_fraction", 0.05),
                    ("maximal_bound", 512.0),
                    ("modout_gradient", 1.5),
                    ("modout_residual", 0.5),
                ]);
            }
            SuiteId::Halfspace => {
                c.s = Some(1.0);
                c.thresholds = thresholds(&[
                    ("cusp_growth", 1.1),
                    ("decay_bound", 2.0),
                    ("decay_stability", 0.1),
                    ("gradient_stability", 0.15),
                    ("kernel_high", 1.25),
                    ("kernel_low", 0.9),
                ]);
            }
        }
        c
    }

    /// Parses a JSON document. Fields it leaves out take the defaults of the suite named
    /// by its `experiment` field; `thresholds` and `halfspace` merge key by key.
    pub fn from_json(text: &str) -> Result<Self> {
        let overlay: Value = serde_json::from_str(text)?;
        let id = overlay
            .get("experiment")
            .and_then(Value::as_str)
            .ok_or_else(|| HarnessError::Config("missing string field `experiment`".into()))?;
        let mut base = serde_json::to_value(Self::default_for(find_suite(id)?))?;
        merge(&mut base, overlay, 0);
        let config: Self = serde_json::from_value(base).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn suite(&self) -> Result<SuiteId> {
        find_suite(&self.experiment)
    }

    pub fn threshold(&self, key: &str) -> f64 {
        self.thresholds[key]
    }

    /// Checks everything that can fail before any computation starts.
    pub fn validate(&self) -> Result<()> {
        let id = self.suite()?;
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if !(self.p.is_finite() && self.p > 1.0) {
            return bad(format!("p = {} must exceed 1", self.p));
        }
        if let Some(a) = self.alpha {
            if !(a.is_finite() && a > 0.0) {
                return bad(format!("alpha = {a} must be positive"));
            }
        }
        if let Some(s) = self.s {
            if !(s.is_finite() && s > 0.0) {
                return bad(format!("s = {s} must be positive"));
            }
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.family.count == 0 {
            return bad("the function family is empty".into());
        }
        if !(self.hajlasz_tol > 0.0 && self.hajlasz_tol < 1.0) {
            return bad(format!("hajlasz_tol = {} must lie in (0, 1)", self.hajlasz_tol));
        }
        let expected = Self::default_for(id).thresholds;
        for key in self.thresholds.keys() {
            if !expected.contains_key(key) {
                return bad(format!("threshold `{key}` does not apply to `{}`", self.experiment));
            }
        }
        for key in expected.keys() {
            if !self.thresholds.contains_key(key) {
                return bad(format!("threshold `{key}` is missing"));
            }
        }
        match id {
            SuiteId::ThmMain if self.resolutions.is_empty() => bad("thm-main needs resolutions".into()),
            SuiteId::ThmMain if !matches!(self.space, SpaceSpec::SquareGrid { .. } | SpaceSpec::IntervalGrid { .. }) => {
                bad("thm-main refines grid spaces only".into())
            }
            SuiteId::FillIndep | SuiteId::QiInvariance if self.seeds.len() < 2 => {
                bad(format!("{} compares fillings and needs two seeds", self.experiment))
            }
            SuiteId::Subcritical if self.depths.len() < 2 || self.exponents.is_empty() => {
                bad("subcritical needs at least two depths and one exponent".into())
            }
            SuiteId::Subcritical if self.exponents.iter().any(|&p| !(p > 1.0)) => {
                bad("subcritical exponents must exceed 1".into())
            }
            SuiteId::TraceRoundtrip if self.depths.is_empty() || self.depths.contains(&0) => {
                bad("trace-roundtrip needs positive depths".into())
            }
            SuiteId::Halfspace => self.validate_halfspace(),
            _ => Ok(()),
        }
    }

    fn validate_halfspace(&self) -> Result<()> {
        let h = &self.halfspace;
        let bad = |msg: &str| Err(HarnessError::Config(format!("halfspace: {msg}")));
        if h.functions == 0 {
            return bad("functions must be positive");
        }
        if h.decay.resolutions.len() < 2 || h.gradient.resolutions.len() < 2 {
            return bad("decay and gradient sections refine at least once");
        }
        if h.gradient.levels < 2 || h.kernels.levels == 0 || h.decay.levels == 0 {
            return bad("too few levels");
        }
        if h.decay.t0 > h.decay.half_width || h.kernels.t0 > h.kernels.half_width {
            return bad("top level exceeds the half width");
        }
        if self.s.is_none() {
            return bad("s is required");
        }
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form, ignoring the
    /// output directory.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(&Sha256::digest(&bytes)[..8])
    }
}

fn merge(base: &mut Value, overlay: Value, depth: usize) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) if depth < 3 => {
            for (k, v) in o {
                let nested = matches!(k.as_str(), "thresholds" | "halfspace" | "decay" | "gradient" | "kernels" | "family");
                match b.get_mut(&k) {
                    Some(slot) if nested => merge(slot, v, depth + 1),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}
