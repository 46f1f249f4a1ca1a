use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Uniform periodic grid `x_i = -L + i * 2L/m` on `[-L, L)^n`, row-major with the last
/// axis fastest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub m: usize,
    pub half_width: f64,
}

impl GridSpec {
    pub fn new(dim: usize, m: usize, half_width: f64) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::param("dim", format!("only dimensions 1 and 2 are supported, got {dim}")));
        }
        if m < 2 {
            return Err(Error::param("m", format!("need at least 2 points per axis, got {m}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::param("half_width", format!("must be positive and finite, got {half_width}")));
        }
        Ok(GridSpec { dim, m, half_width })
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.m as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// Per-axis indices of a flat index.
    pub fn axes(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.m, idx % self.m]
        }
    }

    pub fn point(&self, idx: usize) -> [f64; 2] {
        let [a, b] = self.axes(idx);
        if self.dim == 1 {
            [self.coordinate(a), 0.0]
        } else {
            [self.coordinate(a), self.coordinate(b)]
        }
    }

    /// Signed index offset of `i` in `(-m/2, m/2]`.
    pub(crate) fn wrapped(&self, i: usize) -> isize {
        let m = self.m as isize;
        let i = i as isize;
        if i > m / 2 {
            i - m
        } else {
            i
        }
    }

    /// Minimum-image displacement of a flat index from the origin index.
    pub(crate) fn offset(&self, idx: usize) -> [f64; 2] {
        let [a, b] = self.axes(idx);
        let h = self.spacing();
        if self.dim == 1 {
            [self.wrapped(a) as f64 * h, 0.0]
        } else {
            [self.wrapped(a) as f64 * h, self.wrapped(b) as f64 * h]
        }
    }

    /// Angular wavenumber `pi k / L` for FFT index `i`, and whether it is the Nyquist mode.
    pub(crate) fn wavenumber(&self, i: usize) -> (f64, bool) {
        let nyquist = self.m % 2 == 0 && i == self.m / 2;
        (std::f64::consts::PI * self.wrapped(i) as f64 / self.half_width, nyquist)
    }
}

/// Real samples on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: GridSpec,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                what: "grid samples",
                expected: grid.len(),
                actual: values.len(),
            });
        }
        ensure_finite(&values)?;
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len())
            .map(|idx| {
                let x = grid.point(idx);
                f(&x[..grid.dim])
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: GridSpec, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.len()])
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidExponent { p, requirement: "p >= 1" });
        }
        let s: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        Ok((s * self.grid.cell_volume()).powf(1.0 / p))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Spectral partial derivative along `axis` (0-based).
    pub fn derivative(&self, axis: usize) -> Result<Self> {
        check_axis(&self.grid, axis)?;
        let spectrum = Spectrum::of(self);
        Self::new(
            self.grid,
            spectrum.apply(|xi, nyquist| {
                if nyquist[axis] {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, xi[axis])
                }
            }),
        )
    }

    pub fn gradient(&self) -> Result<Vec<Self>> {
        (0..self.dim()).map(|axis| self.derivative(axis)).collect()
    }

    /// `|| |grad f| ||_{L^p}` with spectral derivatives.
    pub fn gradient_lp_norm(&self, p: f64) -> Result<f64> {
        magnitude(&self.gradient()?)?.lp_norm(p)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.grid == other.grid
    }
}

/// Pointwise Euclidean norm of a list of components on a common grid.
pub fn magnitude(components: &[GridFunction]) -> Result<GridFunction> {
    let first = components
        .first()
        .ok_or_else(|| Error::Degenerate("no components".into()))?;
    if components.iter().any(|c| !c.same_grid(first)) {
        return Err(Error::param("components", "components live on different grids"));
    }
    let values = (0..first.len())
        .map(|i| components.iter().map(|c| c.values[i] * c.values[i]).sum::<f64>().sqrt())
        .collect();
    GridFunction::new(first.grid, values)
}

pub(crate) fn check_axis(grid: &GridSpec, axis: usize) -> Result<()> {
    if axis < grid.dim {
        Ok(())
    } else {
        Err(Error::param("axis", format!("axis {axis} out of range for dimension {}", grid.dim)))
    }
}

fn transpose(data: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in i + 1..m {
            data.swap(i * m + j, j * m + i);
        }
    }
}

fn fft(grid: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse {
        planner.plan_fft_inverse(grid.m)
    } else {
        planner.plan_fft_forward(grid.m)
    };
    plan.process(data);
    if grid.dim == 2 {
        transpose(data, grid.m);
        plan.process(data);
        transpose(data, grid.m);
    }
}

/// Discrete Fourier coefficients of a grid function, reusable across multipliers.
pub(crate) struct Spectrum {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub(crate) fn of(f: &GridFunction) -> Self {
        Self::from_values(f.grid, &f.values)
    }

    pub(crate) fn from_values(grid: GridSpec, values: &[f64]) -> Self {
        let mut coeffs: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft(&grid, &mut coeffs, false);
        Spectrum { grid, coeffs }
    }

    /// Real part of the inverse transform of `coeffs * multiplier(xi, nyquist)`.
    pub(crate) fn apply(&self, multiplier: impl Fn([f64; 2], [bool; 2]) -> Complex64) -> Vec<f64> {
        let g = &self.grid;
        let axis: Vec<(f64, bool)> = (0..g.m).map(|i| g.wavenumber(i)).collect();
        let mut data: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let [a, b] = g.axes(idx);
                let (xa, na) = axis[a];
                let (xb, nb) = if g.dim == 2 { axis[b] } else { (0.0, false) };
                c * multiplier([xa, xb], [na, nb])
            })
            .collect();
        self.finish(&mut data)
    }

    /// Real part of the inverse transform of the pointwise product with another spectrum.
    pub(crate) fn convolve(&self, kernel: &Spectrum) -> Vec<f64> {
        let mut data: Vec<Complex64> = self.coeffs.iter().zip(&kernel.coeffs).map(|(a, b)| a * b).collect();
        self.finish(&mut data)
    }

    fn finish(&self, data: &mut [Complex64]) -> Vec<f64> {
        fft(&self.grid, data, true);
        let scale = 1.0 / data.len() as f64;
        data.iter().map(|c| c.re * scale).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_geometry() {
        let g = GridSpec::new(2, 8, 2.0).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.cell_volume(), 0.25);
        assert_eq!(g.point(9), [-1.5, -1.5]);
        assert_eq!(g.offset(7), [0.0, -0.5]);
        assert_eq!(g.wavenumber(4), (PI * 4.0 / 2.0, true));
        assert_eq!(g.wavenumber(5).0, -PI * 3.0 / 2.0);
        assert!(GridSpec::new(3, 8, 1.0).is_err());
        assert!(GridSpec::new(1, 1, 1.0).is_err());
        assert!(GridSpec::new(1, 8, 0.0).is_err());
    }

    #[test]
    fn spectral_derivative_of_a_mode_is_exact() {
        let g = GridSpec::new(2, 32, PI).unwrap();
        let f = GridFunction::from_fn(g, |x| (3.0 * x[0] - 2.0 * x[1]).sin()).unwrap();
        let d0 = f.derivative(0).unwrap();
        let d1 = f.derivative(1).unwrap();
        for idx in 0..g.len() {
            let x = g.point(idx);
            let c = (3.0 * x[0] - 2.0 * x[1]).cos();
            assert!((d0.values()[idx] - 3.0 * c).abs() < 1e-11);
            assert!((d1.values()[idx] + 2.0 * c).abs() < 1e-11);
        }
        assert!(f.derivative(2).is_err());
    }

    #[test]
    fn lp_norm_of_constant() {
        let g = GridSpec::new(1, 16, 1.0).unwrap();
        let f = GridFunction::constant(g, 3.0).unwrap();
        assert!((f.lp_norm(2.0).unwrap() - 3.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((f.mean() - 3.0).abs() < 1e-15);
        assert_eq!(f.gradient_lp_norm(2.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_samples() {
        let g = GridSpec::new(1, 4, 1.0).unwrap();
        assert!(GridFunction::new(g, vec![0.0; 3]).is_err());
        assert!(GridFunction::new(g, vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
    }
}
