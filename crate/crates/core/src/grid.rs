//! Real functions on [0,1] sampled on a uniform grid, with trapezoid
//! quadrature throughout.

use crate::{Error, Result};

/// Minimum number of intervals; coarser grids make the quadrature error
/// dominate every tolerance in this crate.
pub const MIN_M: usize = 16;

/// Samples at `x_j = j/M`, `j = 0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < MIN_M + 1 {
            return Err(Error::Domain(format!(
                "grid needs at least {} nodes, got {}",
                MIN_M + 1,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite grid value".into()));
        }
        Ok(Self { values })
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..=m).map(|j| f(j as f64 / m as f64)).collect())
    }

    pub fn constant(m: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; m + 1])
    }

    /// Number of intervals `M` (node count − 1).
    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.m() as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 / self.m() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Trapezoid weight of node `j` (`Δx/2` at the ends, `Δx` inside).
    pub fn weight(&self, j: usize) -> f64 {
        if j == 0 || j == self.m() {
            0.5 * self.dx()
        } else {
            self.dx()
        }
    }

    /// `∫₀¹ f dx` by the composite trapezoid rule.
    pub fn integral(&self) -> f64 {
        (0..=self.m()).map(|j| self.weight(j) * self.values[j]).sum()
    }

    /// `∫₀¹ f(x) g(f, x) dx` for a pointwise integrand.
    pub fn integral_of(&self, f: impl Fn(usize, f64) -> f64) -> f64 {
        (0..=self.m()).map(|j| self.weight(j) * f(j, self.values[j])).sum()
    }

    /// Forward cumulative integral: node `j` holds `∫₀^{x_j} f`.
    pub fn cumulative(&self) -> GridFunction {
        let m = self.m();
        let dx = self.dx();
        let mut out = vec![0.0; m + 1];
        for j in 1..=m {
            out[j] = out[j - 1] + 0.5 * dx * (self.values[j - 1] + self.values[j]);
        }
        GridFunction { values: out }
    }

    /// Reverse primitive: node `j` holds `−∫_{x_j}^1 f` (so the last node is 0).
    pub fn reverse_primitive_neg(&self) -> GridFunction {
        let m = self.m();
        let dx = self.dx();
        let mut out = vec![0.0; m + 1];
        for j in (0..m).rev() {
            out[j] = out[j + 1] - 0.5 * dx * (self.values[j] + self.values[j + 1]);
        }
        GridFunction { values: out }
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn sup_diff(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Linear interpolation at arbitrary `x ∈ [0,1]`.
    pub fn interp(&self, x: f64) -> f64 {
        let m = self.m();
        let t = (x.clamp(0.0, 1.0)) * m as f64;
        let j = (t.floor() as usize).min(m - 1);
        let frac = t - j as f64;
        self.values[j] * (1.0 - frac) + self.values[j + 1] * frac
    }

    /// Pointwise map.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction { values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise combination of two grids of equal size.
    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        if self.values.len() != other.values.len() {
            return Err(Error::Domain("grid size mismatch".into()));
        }
        Ok(GridFunction {
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_integral_is_second_order() {
        let f = |x: f64| (std::f64::consts::PI * x).sin();
        let exact = 2.0 / std::f64::consts::PI;
        let coarse = (GridFunction::from_fn(64, f).unwrap().integral() - exact).abs();
        let fine = (GridFunction::from_fn(128, f).unwrap().integral() - exact).abs();
        assert!(fine < coarse / 3.5, "not second order: {coarse} vs {fine}");
    }

    #[test]
    fn cumulative_and_reverse_primitive() {
        let g = GridFunction::constant(32, 2.0).unwrap();
        let c = g.cumulative();
        assert!((c.values()[32] - 2.0).abs() < 1e-14);
        assert!((c.interp(0.5) - 1.0).abs() < 1e-14);
        let r = g.reverse_primitive_neg();
        assert!((r.values()[0] + 2.0).abs() < 1e-14);
        assert!(r.values()[32].abs() < 1e-15);
        // derivative relationship: reverse(x) = forward(x) − forward(1)
        let gf = GridFunction::from_fn(32, |x| x * x).unwrap();
        let (f, b) = (gf.cumulative(), gf.reverse_primitive_neg());
        for j in 0..=32 {
            assert!((b.values()[j] - (f.values()[j] - f.values()[32])).abs() < 1e-14);
        }
    }

    #[test]
    fn size_guard() {
        assert!(GridFunction::new(vec![0.0; 10]).is_err());
        assert!(GridFunction::new(vec![f64::NAN; 20]).is_err());
    }

    #[test]
    fn interpolation_hits_nodes() {
        let g = GridFunction::from_fn(20, |x| 3.0 * x - 1.0).unwrap();
        for j in 0..=20 {
            assert!((g.interp(j as f64 / 20.0) - (3.0 * j as f64 / 20.0 - 1.0)).abs() < 1e-12);
        }
        assert!((g.interp(0.333) - (3.0 * 0.333 - 1.0)).abs() < 1e-12);
    }
}
