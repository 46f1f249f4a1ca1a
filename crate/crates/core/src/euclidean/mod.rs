//! Poisson extensions of periodic grid functions to the upper half-space, weak-type
//! norms against `t^{-(s+1)} dx dt`, Riesz transforms, hyperbolic gradients and
//! extensions by compactly supported averaging kernels.

mod field;
mod grid;
mod io;
mod kernels;

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};

pub use field::{band_mass, geometric_levels, HalfSpaceField};
pub use grid::{magnitude, GridFunction, GridSpec};
pub use io::{read_field_csv, read_grid_csv, write_field_csv, write_grid_csv};
pub use kernels::{kernel_extend, kernel_gradient, kernel_gradient_norms, Kernel};

use grid::{check_axis, Spectrum};

/// Kernel tail mass above which the extension warns.
pub const TAIL_WARNING: f64 = 1e-3;

/// `P_t(x) = c_n t / (t^2 + |x|^2)^{(n+1)/2}` with `n = x.len()`.
pub fn poisson_kernel(x: &[f64], t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::param("t", format!("must be positive, got {t}")));
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    match x.len() {
        1 => Ok(t / (PI * (t * t + r2))),
        2 => Ok(t / (2.0 * PI * (t * t + r2).powf(1.5))),
        n => Err(Error::param("x", format!("dimension {n} is not supported"))),
    }
}

/// Mass of `P_t` outside the ball of radius `r` in `R^n`.
pub fn poisson_tail_mass(dim: usize, t: f64, r: f64) -> f64 {
    if dim == 1 {
        1.0 - 2.0 / PI * (r / t).atan()
    } else {
        t / (t * t + r * r).sqrt()
    }
}

/// `u(x, t) = (P_t * f)(x)` at every level, through the multiplier `exp(-t|xi|)` of the
/// periodized kernel, which has unit mass exactly.
pub fn poisson_extend_halfspace(f: &GridFunction, t_levels: &[f64], s: f64) -> Result<HalfSpaceField> {
    let grid = *f.grid();
    if let Some(&t) = t_levels.iter().find(|&&t| t > grid.half_width) {
        return Err(Error::param(
            "t_levels",
            format!("level {t} exceeds the half width {}", grid.half_width),
        ));
    }
    let spectrum = Spectrum::of(f);
    let mut values = Vec::with_capacity(grid.len() * t_levels.len());
    for &t in t_levels {
        if !(t > 0.0) {
            return Err(Error::param("t_levels", format!("level {t} is not positive")));
        }
        values.extend(spectrum.apply(|xi, _| {
            let k = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            Complex64::new((-t * k).exp(), 0.0)
        }));
    }
    if let Some(&t0) = t_levels.iter().max_by(|a, b| a.total_cmp(b)) {
        let tail = poisson_tail_mass(grid.dim, t0, grid.half_width);
        if tail > TAIL_WARNING {
            log::warn!(
                "Poisson kernel at t = {t0} puts mass {tail:.3e} outside the box of half width {}",
                grid.half_width
            );
        }
    }
    HalfSpaceField::new(grid, t_levels.to_vec(), s, values)
}

/// Smallest `C` with `mu({|F| > lambda}) <= C^p / lambda^p` for the cell masses of `field`.
pub fn halfspace_weak_norm(field: &HalfSpaceField, p: f64) -> Result<f64> {
    crate::seq_norms::weighted_weak_star(field.values(), &field.weights(), p)
}

/// Multiplier `-i xi_j / |xi|`, zero on the mean and on the Nyquist modes of `axis`.
pub fn riesz_transform(f: &GridFunction, axis: usize) -> Result<GridFunction> {
    check_axis(f.grid(), axis)?;
    let spectrum = Spectrum::of(f);
    GridFunction::new(
        *f.grid(),
        spectrum.apply(|xi, nyquist| {
            let k = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            if k == 0.0 || nyquist[axis] {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -xi[axis] / k)
            }
        }),
    )
}

/// `t |grad u|` per cell, spatial derivatives spectral and the `t` derivative by
/// three-point differences on the (possibly nonuniform) levels.
pub fn hyperbolic_gradient(u: &HalfSpaceField) -> Result<HalfSpaceField> {
    let levels = u.t_levels();
    let nl = levels.len();
    if nl < 2 {
        return Err(Error::param("t_levels", "the hyperbolic gradient needs at least two levels"));
    }
    let grid = *u.grid();
    let mut out = Vec::with_capacity(u.values().len());
    for j in 0..nl {
        let level = u.level_function(j)?;
        let mut sq: Vec<f64> = vec![0.0; grid.len()];
        for d in level.gradient()? {
            for (acc, v) in sq.iter_mut().zip(d.values()) {
                *acc += v * v;
            }
        }
        let dt = t_derivative(u, j);
        let t = levels[j];
        out.extend(sq.iter().zip(dt).map(|(s, d)| t * (s + d * d).sqrt()));
    }
    HalfSpaceField::new(grid, levels.to_vec(), u.s(), out)
}

/// Second-order difference weights for the derivative at `x[k]` from the samples `x`.
fn fd_weights(x: [f64; 3], k: usize) -> [f64; 3] {
    let mut w = [0.0; 3];
    for i in 0..3 {
        // derivative of the Lagrange basis polynomial l_i at x[k]
        let denom: f64 = (0..3).filter(|&a| a != i).map(|a| x[i] - x[a]).product();
        let num: f64 = (0..3)
            .filter(|&a| a != i)
            .map(|a| {
                (0..3)
                    .filter(|&b| b != i && b != a)
                    .map(|b| x[k] - x[b])
                    .product::<f64>()
            })
            .sum();
        w[i] = num / denom;
    }
    w
}

fn t_derivative(u: &HalfSpaceField, j: usize) -> Vec<f64> {
    let levels = u.t_levels();
    let nl = levels.len();
    if nl == 2 {
        let (a, b) = (u.level(0), u.level(1));
        let dt = levels[0] - levels[1];
        return a.iter().zip(b).map(|(x, y)| (x - y) / dt).collect();
    }
    let (idx, k) = if j == 0 {
        ([0, 1, 2], 0)
    } else if j == nl - 1 {
        ([nl - 3, nl - 2, nl - 1], 2)
    } else {
        ([j - 1, j, j + 1], 1)
    };
    let w = fd_weights([levels[idx[0]], levels[idx[1]], levels[idx[2]]], k);
    let (a, b, c) = (u.level(idx[0]), u.level(idx[1]), u.level(idx[2]));
    (0..a.len()).map(|i| w[0] * a[i] + w[1] * b[i] + w[2] * c[i]).collect()
}

/// Centered maximal function: the largest average of `|f|` over periodic cubes of half
/// width `k h`, `0 <= k < m/2`, centered at each grid point.
pub fn grid_maximal(f: &GridFunction) -> Result<GridFunction> {
    let grid = *f.grid();
    let m = grid.m;
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let kmax = m.div_ceil(2);
    let mut best = abs.clone();
    let window_sums = |line: &[f64], k: usize| -> Vec<f64> {
        let mut prefix = vec![0.0; 3 * m + 1];
        for i in 0..3 * m {
            prefix[i + 1] = prefix[i] + line[i % m];
        }
        (0..m).map(|i| prefix[i + m + k + 1] - prefix[i + m - k]).collect()
    };
    for k in 1..kmax {
        let count = (2 * k + 1) as f64;
        if grid.dim == 1 {
            let sums = window_sums(&abs, k);
            for (b, s) in best.iter_mut().zip(sums) {
                *b = b.max(s / count);
            }
        } else {
            let mut rows = vec![0.0; m * m];
            for r in 0..m {
                rows[r * m..(r + 1) * m].copy_from_slice(&window_sums(&abs[r * m..(r + 1) * m], k));
            }
            let mut column = vec![0.0; m];
            for c in 0..m {
                for r in 0..m {
                    column[r] = rows[r * m + c];
                }
                for (r, s) in window_sums(&column, k).into_iter().enumerate() {
                    let b = &mut best[r * m + c];
                    *b = b.max(s / (count * count));
                }
            }
        }
    }
    GridFunction::new(grid, best)
}

#[cfg(test)]
mod tests;
