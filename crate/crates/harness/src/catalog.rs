//! The fixed set of experiment suites and the statements they test.

use std::fmt;

use serde::Serialize;

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SuiteId {
    ThmMain,
    HajIncl,
    FillIndep,
    Subcritical,
    QiInvariance,
    TraceRoundtrip,
    Halfspace,
}

impl SuiteId {
    pub const ALL: [SuiteId; 7] = [
        SuiteId::ThmMain,
        SuiteId::HajIncl,
        SuiteId::FillIndep,
        SuiteId::Subcritical,
        SuiteId::QiInvariance,
        SuiteId::TraceRoundtrip,
        SuiteId::Halfspace,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteId::ThmMain => "thm-main",
            SuiteId::HajIncl => "haj-incl",
            SuiteId::FillIndep => "fill-indep",
            SuiteId::Subcritical => "subcritical",
            SuiteId::QiInvariance => "qi-invariance",
            SuiteId::TraceRoundtrip => "trace-roundtrip",
            SuiteId::Halfspace => "halfspace",
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn find_suite(id: &str) -> Result<SuiteId> {
    SuiteId::ALL
        .into_iter()
        .find(|s| s.as_str() == id)
        .ok_or_else(|| HarnessError::Config(format!("unknown experiment `{id}` (see `list`)")))
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteInfo {
    pub id: SuiteId,
    pub title: &'static str,
    /// The statement the suite measures.
    pub statement: &'static str,
    /// What the suite checks, in terms of the threshold names of its config.
    pub checks: &'static str,
}

pub fn list_experiments() -> Vec<SuiteInfo> {
    SuiteId::ALL.into_iter().map(info).collect()
}

fn info(id: SuiteId) -> SuiteInfo {
    let (title, statement, checks) = match id {
        SuiteId::ThmMain => (
            "critical comparability",
            "On an Ahlfors Q-regular space with a Q-Poincare inequality the weak-type filling \
             space A^Q equals the Hajlasz space M^{1,Q}, with comparability of seminorms.",
            "ap/hajlasz and its reciprocal stay below ratio_bound at every resolution; the \
             per-function ratio varies by less than resolution_spread across resolutions",
        ),
        SuiteId::HajIncl => (
            "Hajlasz inclusion",
            "For p > 1 and alpha = Q/p, M^{alpha,p} is contained in A^p and the A^p seminorm \
             is bounded by a constant times the Hajlasz seminorm.",
            "ap/hajlasz stays below ratio_bound",
        ),
        SuiteId::FillIndep => (
            "filling independence",
            "For p > 1 the space A^p and its seminorm up to constants do not depend on the \
             hyperbolic filling used to define them.",
            "the ratio of the largest to the smallest seminorm over filling seeds stays below \
             ratio_bound",
        ),
        SuiteId::Subcritical => (
            "subcritical collapse",
            "For p < Q the space A^p consists only of constant functions: the filling seminorm \
             of a nonconstant function grows like 2^{(Q/p - 1)N} with the depth N, while at \
             p >= Q it stays bounded.",
            "the log2 slope against depth is within slope_tol_subcritical of Q/p - 1 for p < Q \
             and within slope_tol_critical of 0 otherwise",
        ),
        SuiteId::QiInvariance => (
            "quasi-isometry invariance",
            "Quasi-isometric graphs have isomorphic weak-type Sobolev spaces: pulling a vertex \
             function back along the nearest-ball map between two fillings distorts the weak \
             norm of its gradient by a bounded factor.",
            "pullback seminorms relative to both fillings' seminorms stay below ratio_bound",
        ),
        SuiteId::TraceRoundtrip => (
            "trace of the extension",
            "The trace of the Poisson extension recovers the function, f = TR(Pf); a vertex \
             function differs from the extension of its trace by a weak-type sequence \
             controlled by its gradient; the filling maximal operator is bounded on weak l^p.",
            "||T_N(Pf) - f||_1 decreases in N and ends below final_fraction of ||f - mean f||_1; \
             modout_residual, modout_gradient and maximal_bound cap the vertex-function ratios",
        ),
        SuiteId::Halfspace => (
            "upper half-space",
            "For the Poisson extension u of f in L^p, t^{s/p}u lies in weak L^p of \
             t^{-(s+1)} dx dt with norm controlled by ||f||_p; for f in W^{1,n} the hyperbolic \
             gradient lies in weak L^n; kernels with a finite first moment give \
             ||f||_{W^{1,p}} ~ ||f||_p + sup_t ||grad u(., t)||_p.",
            "decay ratios stay below decay_bound and move by less than decay_stability under \
             refinement; the bump gradient norm moves by less than gradient_stability while the \
             cusp grows by at least cusp_growth per doubling; kernel ratios lie in \
             [kernel_low, kernel_high]",
        ),
    };
    SuiteInfo {
        id,
        title,
        statement,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_seven_distinct_entries() {
        let list = list_experiments();
        assert_eq!(list.len(), 7);
        assert!(list.iter().any(|s| s.id.as_str() == "thm-main"));
        let mut ids: Vec<_> = list.iter().map(|s| s.id).collect();
        ids.dedup();
        assert_eq!(ids.len(), 7);
    }

    #[test]
    fn ids_round_trip() {
        for s in list_experiments() {
            assert_eq!(find_suite(s.id.as_str()).unwrap(), s.id);
            assert!(!s.statement.is_empty());
        }
        assert!(find_suite("thm_main").is_err());
    }
}
