//! The fractional Hajłasz seminorm
//! `inf { ||g||_{L^p} : |f(x) - f(y)| <= d(x, y)^alpha (g(x) + g(y)) }`.
//!
//! The convex program `min sum w_x g_x^p` subject to `g_x + g_y >= c_xy` is solved in
//! the dual by relaxed coordinate ascent over a working set of pair constraints. Full
//! pair scans add the most violated pairs per point until none remain; a final scan
//! lifts `g` symmetrically on any leftover violation, so the returned `g` is always
//! feasible. The dual objective gives a lower bound and hence a certified gap.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::metric_space::MetricMeasureSpace;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HajlaszOptions {
    /// Target relative gap between the seminorm and its certified lower bound.
    pub tol: f64,
    /// Violated pairs added per point on each full scan.
    pub pairs_per_point: usize,
    /// Over-relaxation factor of the coordinate steps, in `(0, 2)`.
    pub relaxation: f64,
    /// Cap on full pair scans.
    pub max_scans: usize,
    /// Cap on coordinate updates over the whole solve.
    pub max_updates: u64,
}

impl Default for HajlaszOptions {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            pairs_per_point: 4,
            relaxation: 1.6,
            max_scans: 60,
            max_updates: 2_000_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HajlaszSolution {
    pub g: Vec<f64>,
    /// `||g||_{L^p}` of the returned (feasible) `g`.
    pub seminorm: f64,
    /// Certified lower bound for the infimum.
    pub lower_bound: f64,
    pub alpha: f64,
    pub p: f64,
    /// `1 - lower_bound / seminorm`.
    pub gap: f64,
    /// Whether `gap <= tol` was reached within the caps.
    pub converged: bool,
    pub scans: usize,
    pub working_pairs: usize,
}

/// Pair costs `c_xy = |f(x) - f(y)| / d(x, y)^alpha`.
trait PairCost {
    fn len(&self) -> usize;
    /// Whether `c_xy > bound` (`bound >= 0`).
    fn exceeds(&self, x: usize, y: usize, bound: f64) -> bool;
    fn cost(&self, x: usize, y: usize) -> f64;
}

/// `d^alpha` is the Euclidean distance of the stored coordinates, so comparisons can
/// be made on squares.
struct EuclidCost<'a, const D: usize> {
    coords: &'a [f64],
    f: &'a [f64],
}

impl<const D: usize> EuclidCost<'_, D> {
    #[inline(always)]
    fn sq(&self, x: usize, y: usize) -> f64 {
        let a = &self.coords[x * D..x * D + D];
        let b = &self.coords[y * D..y * D + D];
        let mut s = 0.0;
        for k in 0..D {
            let t = a[k] - b[k];
            s += t * t;
        }
        s
    }
}

impl<const D: usize> PairCost for EuclidCost<'_, D> {
    fn len(&self) -> usize {
        self.f.len()
    }

    #[inline(always)]
    fn exceeds(&self, x: usize, y: usize, bound: f64) -> bool {
        let df = self.f[x] - self.f[y];
        df * df > self.sq(x, y) * bound * bound
    }

    #[inline(always)]
    fn cost(&self, x: usize, y: usize) -> f64 {
        (self.f[x] - self.f[y]).abs() / self.sq(x, y).sqrt()
    }
}

struct GeneralCost<'a> {
    space: &'a MetricMeasureSpace,
    f: &'a [f64],
    alpha: f64,
}

impl PairCost for GeneralCost<'_> {
    fn len(&self) -> usize {
        self.f.len()
    }

    #[inline]
    fn exceeds(&self, x: usize, y: usize, bound: f64) -> bool {
        self.cost(x, y) > bound
    }

    #[inline]
    fn cost(&self, x: usize, y: usize) -> f64 {
        let df = (self.f[x] - self.f[y]).abs();
        if df == 0.0 {
            0.0
        } else {
            df / self.space.dist(x, y).powf(self.alpha)
        }
    }
}

/// Per-point objective `h_x(g)` through its conjugate: the minimizer `g_x(s)` of
/// `h_x(g) - s g` and the value `min_g h_x(g) - s g`.
#[derive(Clone, Copy, Debug)]
enum Penalty {
    /// `w g^p`, `p > 1`.
    Power { p: f64 },
    /// `w g + mu w g^2 / 2`, a smoothing of the `p = 1` objective.
    Smoothed { mu: f64 },
}

impl Penalty {
    #[inline]
    fn primal(self, s: f64, w: f64) -> f64 {
        match self {
            Penalty::Power { p } => {
                if s <= 0.0 {
                    0.0
                } else if p == 2.0 {
                    s / (2.0 * w)
                } else {
                    (s / (p * w)).powf(1.0 / (p - 1.0))
                }
            }
            Penalty::Smoothed { mu } => ((s - w) / (mu * w)).max(0.0),
        }
    }

    #[inline]
    fn slope(self, s: f64, w: f64) -> f64 {
        match self {
            Penalty::Power { p } => {
                if s <= 0.0 {
                    if p < 2.0 {
                        0.0
                    } else if p == 2.0 {
                        1.0 / (2.0 * w)
                    } else {
                        f64::INFINITY
                    }
                } else {
                    let q = 1.0 / (p - 1.0);
                    q * (1.0 / (p * w)).powf(q) * s.powf(q - 1.0)
                }
            }
            Penalty::Smoothed { mu } => {
                if s > w {
                    1.0 / (mu * w)
                } else {
                    0.0
                }
            }
        }
    }

    /// `min_g h(g) - s g`.
    fn conjugate_value(self, s: f64, w: f64) -> f64 {
        match self {
            Penalty::Power { p } => {
                let g = self.primal(s, w);
                -(p - 1.0) * w * g.powf(p)
            }
            Penalty::Smoothed { mu } => {
                let g = self.primal(s, w);
                -0.5 * mu * w * g * g
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Constraint {
    x: u32,
    y: u32,
    c: f64,
    lambda: f64,
}

struct State<'a> {
    weights: &'a [f64],
    penalty: Penalty,
    s: Vec<f64>,
    g: Vec<f64>,
    pairs: Vec<Constraint>,
    seen: HashSet<u64>,
    updates: u64,
}

#[inline]
fn key(x: usize, y: usize) -> u64 {
    let (a, b) = if x < y { (x, y) } else { (y, x) };
    ((a as u64) << 32) | b as u64
}

impl State<'_> {
    fn add(&mut self, x: usize, y: usize, c: f64) {
        if c > 0.0 && self.seen.insert(key(x, y)) {
            self.pairs.push(Constraint {
                x: x as u32,
                y: y as u32,
                c,
                lambda: 0.0,
            });
        }
    }

    /// Step `t >= -lambda` making `g_x(s_x + t) + g_y(s_y + t) = c`, or `-lambda` when the
    /// constraint holds with `lambda = 0`.
    fn exact_step(&self, k: &Constraint) -> f64 {
        let (x, y) = (k.x as usize, k.y as usize);
        let (wx, wy) = (self.weights[x], self.weights[y]);
        let (sx, sy) = (self.s[x], self.s[y]);
        let pen = self.penalty;
        let total = |t: f64| pen.primal(sx + t, wx) + pen.primal(sy + t, wy);
        let lo = -k.lambda;
        if total(lo) >= k.c {
            return lo;
        }
        match pen {
            Penalty::Power { p } if p == 2.0 => {
                let t = (k.c - self.g[x] - self.g[y]) / (0.5 / wx + 0.5 / wy);
                return t.max(lo);
            }
            Penalty::Smoothed { mu } => {
                // piecewise linear: each term switches on at t = w - s
                let mut knees = [(wx - sx, 1.0 / (mu * wx)), (wy - sy, 1.0 / (mu * wy))];
                if knees[0].0 > knees[1].0 {
                    knees.swap(0, 1);
                }
                let mut t = lo;
                let mut value = total(lo);
                for &(b, _) in &knees {
                    if b <= t {
                        continue;
                    }
                    let slope: f64 = knees.iter().filter(|e| e.0 <= t).map(|e| e.1).sum();
                    if slope > 0.0 {
                        let step = t + (k.c - value) / slope;
                        if step <= b {
                            return step;
                        }
                    }
                    t = b;
                    value = total(b);
                }
                return t + (k.c - value) / (knees[0].1 + knees[1].1);
            }
            _ => {}
        }
        // bracket, then safeguarded Newton on the nondecreasing map t -> total(t)
        let mut a = lo;
        let mut b = lo.abs().max((sx + sy).max(wx + wy) * 1e-3).max(1e-300);
        while total(b) < k.c {
            a = b;
            b *= 2.0;
        }
        let mut t = 0.5 * (a + b);
        for _ in 0..60 {
            let r = total(t) - k.c;
            if r.abs() <= 1e-14 * k.c {
                break;
            }
            if r < 0.0 {
                a = t;
            } else {
                b = t;
            }
            let slope = pen.slope(sx + t, wx) + pen.slope(sy + t, wy);
            let newton = t - r / slope;
            t = if slope.is_finite() && slope > 0.0 && newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if b - a <= 1e-15 * b.abs().max(1e-300) {
                break;
            }
        }
        t
    }

    /// One relaxed sweep; returns the largest KKT residual seen before each update.
    fn sweep(&mut self, omega: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.pairs.len() {
            let k = self.pairs[i];
            let (x, y) = (k.x as usize, k.y as usize);
            let slack = self.g[x] + self.g[y] - k.c;
            let residual = if k.lambda > 0.0 { slack.abs() } else { (-slack).max(0.0) };
            worst = worst.max(residual);
            if residual == 0.0 {
                continue;
            }
            let t = self.exact_step(&k);
            let lambda = (k.lambda + omega * t).max(0.0);
            let delta = lambda - k.lambda;
            if delta != 0.0 {
                self.pairs[i].lambda = lambda;
                self.s[x] += delta;
                self.s[y] += delta;
                self.g[x] = self.penalty.primal(self.s[x], self.weights[x]);
                self.g[y] = self.penalty.primal(self.s[y], self.weights[y]);
            }
        }
        self.updates += self.pairs.len() as u64;
        worst
    }

    fn dual_value(&self) -> f64 {
        let linear: f64 = self.pairs.iter().map(|k| k.lambda * k.c).sum();
        let conj: f64 = self
            .s
            .iter()
            .zip(self.weights)
            .map(|(&s, &w)| self.penalty.conjugate_value(s, w))
            .sum();
        linear + conj
    }

    fn refresh_primal(&mut self) {
        for x in 0..self.s.len() {
            self.g[x] = self.penalty.primal(self.s[x], self.weights[x]);
        }
    }
}

/// Adds up to `k` most violated pairs per point (violation above `threshold`); returns
/// how many new pairs were added.
fn scan<C: PairCost>(cost: &C, state: &mut State<'_>, threshold: f64, k: usize) -> usize {
    let m = cost.len();
    let mut best: Vec<Vec<(f64, u32)>> = vec![Vec::with_capacity(k); m];
    let offer = |list: &mut Vec<(f64, u32)>, v: f64, partner: usize| {
        if list.len() < k {
            list.push((v, partner as u32));
        } else if let Some((i, _)) = list
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
            .filter(|(_, e)| e.0 < v)
        {
            list[i] = (v, partner as u32);
        }
    };
    for x in 0..m {
        let bx = state.g[x] + threshold;
        for y in x + 1..m {
            let bound = bx + state.g[y];
            if cost.exceeds(x, y, bound) {
                let v = cost.cost(x, y) - state.g[x] - state.g[y];
                offer(&mut best[x], v, y);
                offer(&mut best[y], v, x);
            }
        }
    }
    let before = state.pairs.len();
    for (x, list) in best.iter().enumerate() {
        for &(_, y) in list {
            let c = cost.cost(x, y as usize);
            state.add(x, y as usize, c);
        }
    }
    state.pairs.len() - before
}

/// Lifts `g` so that every pair constraint holds; one pass suffices since lifts only
/// increase `g`.
fn repair<C: PairCost>(cost: &C, g: &mut [f64]) {
    let m = cost.len();
    for x in 0..m {
        for y in x + 1..m {
            if cost.exceeds(x, y, g[x] + g[y]) {
                let excess = cost.cost(x, y) - g[x] - g[y];
                if excess > 0.0 {
                    let lift = 0.5 * excess * (1.0 + 1e-12);
                    g[x] += lift;
                    g[y] += lift;
                }
            }
        }
    }
}

/// Largest closed-form optimum of a single-pair problem, a lower bound for the objective.
fn pair_lower_bound(weights: &[f64], p: f64, pairs: &[Constraint]) -> f64 {
    let single = |x: usize, y: usize, c: f64| -> f64 {
        let (wx, wy) = (weights[x], weights[y]);
        if p == 1.0 {
            c * wx.min(wy)
        } else {
            let q = 1.0 / (p - 1.0);
            c.powf(p) * (wx.powf(-q) + wy.powf(-q)).powf(-(p - 1.0))
        }
    };
    pairs
        .iter()
        .map(|k| single(k.x as usize, k.y as usize, k.c))
        .fold(0.0, f64::max)
}

fn objective(g: &[f64], weights: &[f64], p: f64) -> f64 {
    g.iter().zip(weights).map(|(v, w)| w * v.powf(p)).sum()
}

/// Computes the Hajłasz seminorm `||f||_{M^{alpha,p}}` with a certified gap.
pub fn hajlasz_seminorm(
    space: &MetricMeasureSpace,
    f: &[f64],
    alpha: f64,
    p: f64,
    options: &HajlaszOptions,
) -> Result<HajlaszSolution> {
    if f.len() != space.len() {
        return Err(Error::LengthMismatch {
            what: "point function",
            expected: space.len(),
            actual: f.len(),
        });
    }
    ensure_finite(f)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param("alpha", format!("{alpha} must be positive")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent { p, requirement: "p >= 1" });
    }
    if !(options.tol > 0.0) || !(options.relaxation > 0.0 && options.relaxation < 2.0) || options.pairs_per_point == 0 {
        return Err(Error::param("options", format!("{options:?}")));
    }
    if space.coincident_pairs() > 0 {
        return Err(Error::Degenerate("coincident points make pair costs infinite".into()));
    }
    match space.point_cloud() {
        Some((dim, coords, eps)) if (eps * alpha - 1.0).abs() < 1e-12 => match dim {
            1 => solve(&EuclidCost::<1> { coords, f }, space, alpha, p, options),
            2 => solve(&EuclidCost::<2> { coords, f }, space, alpha, p, options),
            3 => solve(&EuclidCost::<3> { coords, f }, space, alpha, p, options),
            _ => solve(&GeneralCost { space, f, alpha }, space, alpha, p, options),
        },
        _ => solve(&GeneralCost { space, f, alpha }, space, alpha, p, options),
    }
}

fn solve<C: PairCost>(
    cost: &C,
    space: &MetricMeasureSpace,
    alpha: f64,
    p: f64,
    options: &HajlaszOptions,
) -> Result<HajlaszSolution> {
    let m = cost.len();
    let weights = space.weights();
    let done = |g: Vec<f64>, lower: f64, converged: bool, scans: usize, pairs: usize| {
        let value = objective(&g, weights, p);
        let seminorm = value.powf(1.0 / p);
        let lower_bound = lower.max(0.0).min(value).powf(1.0 / p);
        let gap = if seminorm > 0.0 { 1.0 - lower_bound / seminorm } else { 0.0 };
        HajlaszSolution {
            g,
            seminorm,
            lower_bound,
            alpha,
            p,
            gap,
            converged: converged || gap <= options.tol,
            scans,
            working_pairs: pairs,
        }
    };

    let mut cmax: f64 = 0.0;
    let mut near = Vec::new();
    let reach = 3.0 * space.resolution();
    for x in 0..m {
        space.for_each_within(x, reach, |y, _| {
            if y > x {
                let c = cost.cost(x, y);
                cmax = cmax.max(c);
                near.push((x, y, c));
            }
        });
    }
    let mut state = State {
        weights,
        penalty: if p > 1.0 {
            Penalty::Power { p }
        } else {
            Penalty::Smoothed { mu: 1.0 }
        },
        s: vec![0.0; m],
        g: vec![0.0; m],
        pairs: Vec::new(),
        seen: HashSet::new(),
        updates: 0,
    };
    for (x, y, c) in near {
        state.add(x, y, c);
    }
    // seed with the globally steepest pairs so the scale of g is right from the start
    let added = scan(cost, &mut state, 0.0, options.pairs_per_point);
    state.pairs.iter().for_each(|k| cmax = cmax.max(k.c));
    if added == 0 && state.pairs.is_empty() {
        return Ok(done(vec![0.0; m], 0.0, true, 1, 0));
    }
    if p == 1.0 {
        state.penalty = Penalty::Smoothed { mu: 4.0 / cmax };
    }

    let mut eps = options.tol * cmax;
    let mut scans = 1;
    let mut best_lower = pair_lower_bound(weights, p, &state.pairs);
    let mut best_g: Option<Vec<f64>> = None;
    let mut best_value = f64::INFINITY;
    loop {
        // inner coordinate ascent on the working set
        let mut stall = 0;
        let mut last = f64::INFINITY;
        while state.updates < options.max_updates {
            let worst = state.sweep(options.relaxation);
            if worst <= eps {
                break;
            }
            if worst > 0.999 * last {
                stall += 1;
                if stall > 200 {
                    break;
                }
            } else {
                stall = 0;
            }
            last = worst;
        }
        state.refresh_primal();

        if scans < options.max_scans {
            scans += 1;
            let added = scan(cost, &mut state, eps, options.pairs_per_point);
            if added > 0 && state.updates < options.max_updates {
                continue;
            }
        }

        let lower = match state.penalty {
            Penalty::Power { .. } => state.dual_value(),
            Penalty::Smoothed { .. } => {
                // scale the multipliers into the feasible region of the linear dual
                let theta = state
                    .s
                    .iter()
                    .zip(weights)
                    .filter(|(s, _)| **s > 0.0)
                    .map(|(s, w)| w / s)
                    .fold(1.0, f64::min);
                theta * state.pairs.iter().map(|k| k.lambda * k.c).sum::<f64>()
            }
        };
        best_lower = best_lower.max(lower);
        let mut g = state.g.clone();
        repair(cost, &mut g);
        let value = objective(&g, weights, p);
        if value < best_value {
            best_value = value;
            best_g = Some(g);
        }
        let gap = if best_value > 0.0 {
            1.0 - (best_lower.min(best_value) / best_value).powf(1.0 / p)
        } else {
            0.0
        };
        if gap <= options.tol {
            return Ok(done(best_g.unwrap(), best_lower, true, scans, state.pairs.len()));
        }
        if scans >= options.max_scans || state.updates >= options.max_updates {
            return Ok(done(best_g.unwrap(), best_lower, false, scans, state.pairs.len()));
        }
        eps *= 0.25;
        if let Penalty::Smoothed { mu } = state.penalty {
            state.penalty = Penalty::Smoothed { mu: mu * 0.25 };
            state.refresh_primal();
        }
    }
}
