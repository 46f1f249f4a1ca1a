use crate::error::{ensure_finite, Error, Result};

use super::grid::{GridFunction, GridSpec};

/// `t_j = t0 2^{-j}` for `j = 0..count`.
pub fn geometric_levels(t0: f64, count: usize) -> Result<Vec<f64>> {
    if !(t0.is_finite() && t0 > 0.0) {
        return Err(Error::param("t0", format!("must be positive, got {t0}")));
    }
    Ok((0..count).map(|j| t0 * 0.5f64.powi(j as i32)).collect())
}

/// `int_{t/sqrt2}^{sqrt2 t} tau^{-(s+1)} d tau`, the dyadic band around `t`; `s = 0`
/// gives `ln 2`.
pub fn band_mass(t: f64, s: f64) -> f64 {
    let a = t / std::f64::consts::SQRT_2;
    let b = t * std::f64::consts::SQRT_2;
    if s == 0.0 {
        (b / a).ln()
    } else {
        (a.powf(-s) - b.powf(-s)) / s
    }
}

/// Samples `u(x, t_j)` on a grid times a list of levels, with cell masses of
/// `t^{-(s+1)} dx dt` over the dyadic band of each level.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpaceField {
    grid: GridSpec,
    t_levels: Vec<f64>,
    s: f64,
    values: Vec<f64>,
    level_weights: Vec<f64>,
}

impl HalfSpaceField {
    /// `values` is level-major: level `j` occupies `values[j * n .. (j + 1) * n]`.
    pub fn new(grid: GridSpec, t_levels: Vec<f64>, s: f64, values: Vec<f64>) -> Result<Self> {
        if t_levels.is_empty() {
            return Err(Error::param("t_levels", "at least one level is required"));
        }
        if let Some(&t) = t_levels.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(Error::param("t_levels", format!("level {t} is not positive")));
        }
        if t_levels.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::param("t_levels", "levels must be strictly decreasing"));
        }
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::param("s", format!("weight exponent must be nonnegative, got {s}")));
        }
        let expected = grid.len() * t_levels.len();
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                what: "field samples",
                expected,
                actual: values.len(),
            });
        }
        ensure_finite(&values)?;
        let cell = grid.cell_volume();
        let level_weights = t_levels.iter().map(|&t| cell * band_mass(t, s)).collect();
        Ok(HalfSpaceField {
            grid,
            t_levels,
            s,
            values,
            level_weights,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn t_levels(&self) -> &[f64] {
        &self.t_levels
    }

    pub fn num_levels(&self) -> usize {
        self.t_levels.len()
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn level(&self, j: usize) -> &[f64] {
        let n = self.grid.len();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn level_function(&self, j: usize) -> Result<GridFunction> {
        GridFunction::new(self.grid, self.level(j).to_vec())
    }

    /// `mu_s` mass of every cell on level `j`.
    pub fn level_weight(&self, j: usize) -> f64 {
        self.level_weights[j]
    }

    /// Cell masses in the layout of [`values`](Self::values).
    pub fn weights(&self) -> Vec<f64> {
        let n = self.grid.len();
        self.level_weights
            .iter()
            .flat_map(|&w| std::iter::repeat_n(w, n))
            .collect()
    }

    /// Same samples measured against `t^{-(s+1)} dx dt`.
    pub fn reweighted(&self, s: f64) -> Result<Self> {
        Self::new(self.grid, self.t_levels.clone(), s, self.values.clone())
    }

    /// `t^a u(x, t)`.
    pub fn scaled_by_power(&self, a: f64) -> Result<Self> {
        let n = self.grid.len();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| self.t_levels[i / n].powf(a) * v)
            .collect();
        Self::new(self.grid, self.t_levels.clone(), self.s, values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_masses_tile_the_axis() {
        let levels = geometric_levels(1.0, 6).unwrap();
        let total: f64 = levels.iter().map(|&t| band_mass(t, 2.0)).sum();
        let a = levels[0] * std::f64::consts::SQRT_2;
        let b = levels[5] / std::f64::consts::SQRT_2;
        assert!((total - (b.powi(-2) - a.powi(-2)) / 2.0).abs() < 1e-9 * total);
        assert!((band_mass(1.0, 0.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn weights_follow_levels() {
        let g = GridSpec::new(1, 4, 1.0).unwrap();
        let f = HalfSpaceField::new(g, vec![0.5, 0.25], 1.0, vec![0.0; 8]).unwrap();
        let w = f.weights();
        assert_eq!(w.len(), 8);
        assert_eq!(w[0], 0.5 * band_mass(0.5, 1.0));
        assert_eq!(w[4], 0.5 * band_mass(0.25, 1.0));
        assert!(w[4] > w[0]);
    }

    #[test]
    fn rejects_malformed_fields() {
        let g = GridSpec::new(1, 4, 1.0).unwrap();
        assert!(HalfSpaceField::new(g, vec![], 1.0, vec![]).is_err());
        assert!(HalfSpaceField::new(g, vec![0.25, 0.5], 1.0, vec![0.0; 8]).is_err());
        assert!(HalfSpaceField::new(g, vec![0.5], -1.0, vec![0.0; 4]).is_err());
        assert!(HalfSpaceField::new(g, vec![0.5], 1.0, vec![0.0; 5]).is_err());
        assert!(geometric_levels(0.0, 3).is_err());
    }

    #[test]
    fn power_scaling() {
        let g = GridSpec::new(1, 2, 1.0).unwrap();
        let f = HalfSpaceField::new(g, vec![1.0, 0.25], 1.0, vec![1.0; 4]).unwrap();
        let h = f.scaled_by_power(0.5).unwrap();
        assert_eq!(h.values(), &[1.0, 1.0, 0.5, 0.5]);
    }
}
