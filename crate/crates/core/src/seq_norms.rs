//! Weak-type and strong norms of finite real sequences.
//!
//! Both weak-type functionals depend only on the non-increasing rearrangement
//! `|s|_(1) >= |s|_(2) >= ...` of the absolute values, so everything here is a
//! sort followed by a linear scan:
//!
//! ```text
//! ||s||*          = max_k  k^{1/p} |s|_(k)
//! ||s||_{l^{p,oo}} = max_n  n^{-1+1/p} (|s|_(1) + ... + |s|_(n))
//! ```
//!
//! The first is the smallest `C` with `#{|x_n| > lambda} <= (C/lambda)^p` for every
//! `lambda > 0`; the second is the (equivalent) norm. Empty sequences have norm 0.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// A finite sequence of finite reals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteSequence(Vec<f64>);

impl FiniteSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        ensure_finite(&values)?;
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weak_pair(&self, p: f64) -> Result<WeakNormPair> {
        WeakNormPair::of(&self.0, p)
    }
}

/// `||s||*` together with `||s||_{l^{p,oo}}` for the same exponent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakNormPair {
    pub star: f64,
    pub norm: f64,
    pub p: f64,
}

impl WeakNormPair {
    pub fn of(values: &[f64], p: f64) -> Result<Self> {
        check_strict_exponent(p)?;
        ensure_finite(values)?;
        let sorted = sorted_abs_desc(values);
        Ok(Self {
            star: star_of_sorted(&sorted, p),
            norm: weak_of_sorted(&sorted, p),
            p,
        })
    }

    /// `norm / star`, or `None` for the zero sequence.
    pub fn ratio(&self) -> Option<f64> {
        (self.star > 0.0).then(|| self.norm / self.star)
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent {
            p,
            requirement: "p >= 1",
        })
    }
}

fn check_strict_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent {
            p,
            requirement: "p > 1",
        })
    }
}

/// Absolute values sorted non-increasingly. Sort is stable, so ties keep index order.
pub fn sorted_abs_desc(values: &[f64]) -> Vec<f64> {
    let mut abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    abs.sort_by(|a, b| b.total_cmp(a));
    abs
}

fn star_of_sorted(sorted: &[f64], p: f64) -> f64 {
    let inv_p = 1.0 / p;
    sorted
        .iter()
        .enumerate()
        .map(|(i, a)| ((i + 1) as f64).powf(inv_p) * a)
        .fold(0.0, f64::max)
}

fn weak_of_sorted(sorted: &[f64], p: f64) -> f64 {
    let exponent = -1.0 + 1.0 / p;
    let mut prefix = 0.0;
    let mut best: f64 = 0.0;
    for (i, a) in sorted.iter().enumerate() {
        prefix += a;
        best = best.max(((i + 1) as f64).powf(exponent) * prefix);
    }
    best
}

/// `||s||*`: the infimal constant in the weak-type tail bound.
pub fn weak_star_norm(values: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    ensure_finite(values)?;
    Ok(star_of_sorted(&sorted_abs_desc(values), p))
}

/// The weak-type norm `||s||_{l^{p,oo}}`, `p > 1`.
pub fn weak_norm(values: &[f64], p: f64) -> Result<f64> {
    check_strict_exponent(p)?;
    ensure_finite(values)?;
    Ok(weak_of_sorted(&sorted_abs_desc(values), p))
}

/// The usual `l^p` norm. Rescales by the largest entry so large inputs don't overflow.
pub fn lp_norm(values: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    ensure_finite(values)?;
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = values.iter().map(|v| (v.abs() / scale).powf(p)).sum();
    Ok(scale * sum.powf(1.0 / p))
}

/// Weighted weak-type functional: the least `C` with `mu{|v| > lambda} <= (C/lambda)^p`
/// where cell `i` carries mass `weights[i]`.
///
/// Cells are sorted by `|v|` descending and `max_k m_k^{1/p} |v|_(k)` is returned, with
/// `m_k` the cumulative mass of the first `k` cells. With unit weights this is
/// [`weak_star_norm`].
pub fn weighted_weak_star(values: &[f64], weights: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    if values.len() != weights.len() {
        return Err(Error::LengthMismatch {
            what: "weights",
            expected: values.len(),
            actual: weights.len(),
        });
    }
    ensure_finite(values)?;
    if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::param(
            "weights",
            format!("weight {} at index {i} is not a finite nonnegative number", weights[i]),
        ));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()));
    let inv_p = 1.0 / p;
    let mut mass = 0.0;
    let mut best: f64 = 0.0;
    for i in order {
        mass += weights[i];
        best = best.max(mass.powf(inv_p) * values[i].abs());
    }
    Ok(best)
}

/// The provable comparability constant `p / (p - 1)` bounding `||s|| / ||s||*`.
///
/// From `|s|_(k) <= ||s||* k^{-1/p}` and `sum_{k<=n} k^{-1/p} <= n^{1-1/p} p/(p-1)`.
pub fn comparability_bound(p: f64) -> f64 {
    p / (p - 1.0)
}

/// Constant in `||s||_{l^r} <= C m^{1/r-1/p} ||s||_{l^{p,oo}}` for sequences of length `m`,
/// `1 <= r < p`: `C = (p/(p-r))^{1/r}`. For `r = p` the bound is `(1 + ln m)^{1/p}` with
/// constant 1.
pub fn log_factor_constant(p: f64, r: f64) -> f64 {
    (p / (p - r)).powf(1.0 / r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// `sup_lambda lambda * #{|x| > lambda}^{1/p}` over a dense grid of thresholds plus
    /// left limits at every distinct absolute value.
    fn threshold_scan_star(values: &[f64], p: f64) -> f64 {
        let mut levels: Vec<f64> = values.iter().map(|v| v.abs()).filter(|a| *a > 0.0).collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let mut best: f64 = 0.0;
        for &a in &levels {
            let lambda = a * (1.0 - 1e-12);
            let count = values.iter().filter(|v| v.abs() > lambda).count() as f64;
            best = best.max(lambda * count.powf(1.0 / p));
        }
        best
    }

    fn subset_weak_norm(values: &[f64], p: f64) -> f64 {
        let n = values.len();
        let mut best: f64 = 0.0;
        for mask in 1u32..(1 << n) {
            let k = mask.count_ones() as f64;
            let sum: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| values[i].abs()).sum();
            best = best.max(k.powf(-1.0 + 1.0 / p) * sum);
        }
        best
    }

    #[test]
    fn empty_sequence_has_zero_norms() {
        assert_eq!(weak_star_norm(&[], 2.0).unwrap(), 0.0);
        assert_eq!(weak_norm(&[], 2.0).unwrap(), 0.0);
        assert_eq!(lp_norm(&[], 1.0).unwrap(), 0.0);
    }

    #[test]
    fn star_examples() {
        assert_eq!(weak_star_norm(&[3.0, 1.0], 1.0).unwrap(), 3.0);
        assert_eq!(threshold_scan_star(&[3.0, 1.0], 1.0), 3.0 * (1.0 - 1e-12));

        let harmonic: Vec<f64> = (1..=100).map(|k| (k as f64).powf(-0.5)).collect();
        let star = weak_star_norm(&harmonic, 2.0).unwrap();
        assert!((star - 1.0).abs() < 1e-12, "{star}");
        assert!((threshold_scan_star(&harmonic, 2.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn weak_norm_examples() {
        assert_eq!(weak_norm(&[0.0, 0.0, 0.0], 2.0).unwrap(), 0.0);
        let v = weak_norm(&[1.0, 1.0], 2.0).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(subset_weak_norm(&[1.0, 1.0], 2.0), v);
        assert_eq!(weak_norm(&[-4.5], 3.0).unwrap(), 4.5);
    }

    #[test]
    fn lp_examples() {
        assert_eq!(lp_norm(&[3.0, 4.0], 2.0).unwrap(), 5.0);
        assert_eq!(lp_norm(&[1.0; 4], 1.0).unwrap(), 4.0);
        let direct = (1f64 + 1f64).powf(1.0 / 3.0);
        assert!((lp_norm(&[1.0, 1.0], 3.0).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_exponents_and_entries() {
        assert!(matches!(weak_star_norm(&[1.0], 0.5), Err(Error::InvalidExponent { .. })));
        assert!(matches!(weak_norm(&[1.0], 1.0), Err(Error::InvalidExponent { .. })));
        assert!(matches!(lp_norm(&[1.0], 0.9), Err(Error::InvalidExponent { .. })));
        assert!(matches!(
            weak_star_norm(&[1.0, f64::NAN], 2.0),
            Err(Error::NonFinite { index: 1, .. })
        ));
        assert!(matches!(weak_norm(&[f64::INFINITY], 2.0), Err(Error::NonFinite { .. })));
        assert!(FiniteSequence::new(vec![0.0, f64::NEG_INFINITY]).is_err());
    }

    #[test]
    fn weighted_star_single_cell() {
        let v = weighted_weak_star(&[0.0, 1.0, 0.0], &[0.5, 0.25, 0.25], 2.0).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert_eq!(weighted_weak_star(&[0.0; 3], &[1.0; 3], 2.0).unwrap(), 0.0);
        assert!(weighted_weak_star(&[1.0], &[1.0, 2.0], 2.0).is_err());
    }

    #[test]
    fn small_sequences_match_subset_enumeration() {
        let alphabet = [-2.0, -1.0, 0.0, 1.0, 2.0];
        for len in 0..=5usize {
            for code in 0..5usize.pow(len as u32) {
                let mut c = code;
                let s: Vec<f64> = (0..len)
                    .map(|_| {
                        let v = alphabet[c % 5];
                        c /= 5;
                        v
                    })
                    .collect();
                for p in [1.5, 2.0, 3.0] {
                    assert_eq!(weak_norm(&s, p).unwrap(), subset_weak_norm(&s, p), "{s:?}");
                }
            }
        }
    }

    fn sequence() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1e3f64..1e3, 0..200)
    }

    proptest! {
        #[test]
        fn star_never_exceeds_norm(s in sequence(), p in 1.01f64..6.0) {
            let pair = WeakNormPair::of(&s, p).unwrap();
            prop_assert!(pair.star <= pair.norm * (1.0 + 1e-12));
            prop_assert!(pair.norm <= comparability_bound(p) * pair.star * (1.0 + 1e-12));
        }

        #[test]
        fn star_matches_threshold_scan(s in prop::collection::vec(-10f64..10.0, 0..40), p in 1.0f64..4.0) {
            let closed = weak_star_norm(&s, p).unwrap();
            let scan = threshold_scan_star(&s, p);
            prop_assert!((closed - scan).abs() <= 1e-9 * closed.max(1.0));
        }

        #[test]
        fn norms_are_homogeneous(s in sequence(), a in -50f64..50.0, p in 1.1f64..4.0) {
            let scaled: Vec<f64> = s.iter().map(|x| a * x).collect();
            for (lhs, rhs) in [
                (weak_star_norm(&scaled, p).unwrap(), weak_star_norm(&s, p).unwrap()),
                (weak_norm(&scaled, p).unwrap(), weak_norm(&s, p).unwrap()),
                (lp_norm(&scaled, p).unwrap(), lp_norm(&s, p).unwrap()),
            ] {
                prop_assert!((lhs - a.abs() * rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
            }
        }

        #[test]
        fn lp_is_monotone_in_exponent(s in sequence(), p in 1.0f64..4.0, dq in 0.0f64..4.0) {
            let q = p + dq;
            prop_assert!(lp_norm(&s, q).unwrap() <= lp_norm(&s, p).unwrap() * (1.0 + 1e-12));
        }

        #[test]
        fn log_factor_bounds_hold(s in prop::collection::vec(-10f64..10.0, 1..300), p in 1.2f64..4.0) {
            let w = weak_norm(&s, p).unwrap();
            prop_assume!(w > 0.0);
            let m = s.len() as f64;
            let normalized: Vec<f64> = s.iter().map(|x| x / w).collect();
            prop_assert!(lp_norm(&normalized, p).unwrap() <= (1.0 + m.ln()).powf(1.0 / p) * (1.0 + 1e-12));
            let r = 1.0;
            let bound = log_factor_constant(p, r) * m.powf(1.0 / r - 1.0 / p);
            prop_assert!(lp_norm(&normalized, r).unwrap() <= bound * (1.0 + 1e-12));
        }

        #[test]
        fn star_is_lower_semicontinuous(s in prop::collection::vec(-5f64..5.0, 1..50), p in 1.0f64..3.0) {
            // s_k -> s pointwise with a perturbation decaying like 1/k
            let limit = weak_star_norm(&s, p).unwrap();
            let tail: f64 = (200..260)
                .map(|k| {
                    let sk: Vec<f64> = s
                        .iter()
                        .enumerate()
                        .map(|(i, x)| x + ((i + k) as f64).sin() / k as f64)
                        .collect();
                    weak_star_norm(&sk, p).unwrap()
                })
                .fold(f64::INFINITY, f64::min);
            prop_assert!(limit <= tail + 1.0 / 200.0 * (s.len() as f64).powf(1.0 / p) + 1e-9);
        }
    }
}
