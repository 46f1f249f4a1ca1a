use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::field::HalfSpaceField;
use super::grid::{magnitude, GridFunction, GridSpec, Spectrum};

type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Radial averaging kernel `k(y) = profile(|y|)`.
#[derive(Clone)]
pub struct Kernel {
    name: String,
    profile: Profile,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel").field("name", &self.name).finish()
    }
}

const BALL_SLACK: f64 = 1e-12;

impl Kernel {
    /// Indicator of the closed unit ball; extension by ball averages.
    pub fn ball_indicator() -> Self {
        Self::radial("ball", |r| if r <= 1.0 + BALL_SLACK { 1.0 } else { 0.0 })
    }

    /// `(1 - |y|)_+`.
    pub fn tent() -> Self {
        Self::radial("tent", |r| (1.0 - r).max(0.0))
    }

    pub fn radial(name: impl Into<String>, profile: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Kernel {
            name: name.into(),
            profile: Arc::new(profile),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.profile)(r)
    }

    /// `int (1 + |x|) k(x) dx` over `R^dim`, rejecting kernels that are negative,
    /// unbounded, vanish identically or have an infinite first moment.
    pub fn first_moment(&self, dim: usize) -> Result<f64> {
        let sphere = if dim == 1 { 2.0 } else { 2.0 * std::f64::consts::PI };
        let integrand = |r: f64| {
            let k = self.eval(r);
            (k, (1.0 + r) * k * r.powi(dim as i32 - 1))
        };
        let mut pieces = Vec::new();
        let mut bound: f64 = 0.0;
        let mut edges = vec![0.0];
        edges.extend((0..=40).map(|i| 2f64.powi(i)));
        const STEPS: usize = 2048;
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let dr = (b - a) / STEPS as f64;
            let mut acc = 0.0;
            for i in 0..STEPS {
                let r = a + (i as f64 + 0.5) * dr;
                let (k, v) = integrand(r);
                if !(k.is_finite() && k >= 0.0) {
                    return Err(Error::param("kernel", format!("{} takes the value {k} at radius {r}", self.name)));
                }
                bound = bound.max(k);
                acc += v;
            }
            pieces.push(sphere * acc * dr);
        }
        let total: f64 = pieces.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::param("kernel", format!("{} has first moment {total}", self.name)));
        }
        let last = pieces[pieces.len() - 1] + pieces[pieces.len() - 2];
        if last > 1e-6 * total {
            return Err(Error::param(
                "kernel",
                format!("{} has a divergent first moment (far-field share {:.2e})", self.name, last / total),
            ));
        }
        log::debug!("kernel {} bounded by {bound}, first moment {total}", self.name);
        Ok(total)
    }

    /// Samples `k(y / t)` at the minimum-image offsets, normalized to unit discrete mass.
    fn sampled(&self, grid: &GridSpec, t: f64) -> Result<Vec<f64>> {
        let mut w: Vec<f64> = (0..grid.len())
            .map(|idx| {
                let y = grid.offset(idx);
                self.eval((y[0] * y[0] + y[1] * y[1]).sqrt() / t)
            })
            .collect();
        let mass: f64 = w.iter().sum();
        if !(mass > 0.0) {
            return Err(Error::Degenerate(format!(
                "kernel {} has no mass on the grid at t = {t}",
                self.name
            )));
        }
        w.iter_mut().for_each(|v| *v /= mass);
        Ok(w)
    }
}

fn check_levels(grid: &GridSpec, t_levels: &[f64]) -> Result<()> {
    if let Some(&t) = t_levels.iter().find(|&&t| !(t > 0.0 && t <= grid.half_width)) {
        return Err(Error::param(
            "t_levels",
            format!("level {t} outside (0, {}]", grid.half_width),
        ));
    }
    Ok(())
}

/// `u(x, t) = sum_y f(x - y) k(y/t) / sum_y k(y/t)` on the periodic grid, weighted by the
/// hyperbolic measure (`s = n`).
pub fn kernel_extend(f: &GridFunction, kernel: &Kernel, t_levels: &[f64]) -> Result<HalfSpaceField> {
    let grid = *f.grid();
    kernel.first_moment(grid.dim)?;
    check_levels(&grid, t_levels)?;
    let spectrum = Spectrum::of(f);
    let mut values = Vec::with_capacity(grid.len() * t_levels.len());
    for &t in t_levels {
        let w = kernel.sampled(&grid, t)?;
        values.extend(spectrum.convolve(&Spectrum::from_values(grid, &w)));
    }
    HalfSpaceField::new(grid, t_levels.to_vec(), grid.dim as f64, values)
}

/// Components `(d_1 u, .., d_n u, d_t u)` of the kernel extension at height `t`.
///
/// The `t` derivative uses `d_t u = -sum_i (d_i f) * v_i` with `v_i(y) = (y_i/t) k_t(y)`,
/// valid for any bounded kernel with a finite first moment.
pub fn kernel_gradient(f: &GridFunction, kernel: &Kernel, t: f64) -> Result<Vec<GridFunction>> {
    let grid = *f.grid();
    kernel.first_moment(grid.dim)?;
    check_levels(&grid, &[t])?;
    let w = kernel.sampled(&grid, t)?;
    let k_spec = Spectrum::from_values(grid, &w);
    let mut components = Vec::with_capacity(grid.dim + 1);
    let mut dt = vec![0.0; grid.len()];
    for axis in 0..grid.dim {
        let df = f.derivative(axis)?;
        let df_spec = Spectrum::of(&df);
        components.push(GridFunction::new(grid, df_spec.convolve(&k_spec))?);
        let v: Vec<f64> = w
            .iter()
            .enumerate()
            .map(|(idx, wi)| grid.offset(idx)[axis] / t * wi)
            .collect();
        for (acc, x) in dt.iter_mut().zip(df_spec.convolve(&Spectrum::from_values(grid, &v))) {
            *acc -= x;
        }
    }
    components.push(GridFunction::new(grid, dt)?);
    Ok(components)
}

/// `|| |grad_{x,t} u|(., t) ||_{L^p}` for every level.
pub fn kernel_gradient_norms(f: &GridFunction, kernel: &Kernel, t_levels: &[f64], p: f64) -> Result<Vec<f64>> {
    t_levels
        .iter()
        .map(|&t| magnitude(&kernel_gradient(f, kernel, t)?)?.lp_norm(p))
        .collect()
}
