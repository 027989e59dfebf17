//! Sampled real fields, quadrature and Lᵖ norms.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{FlowError, Result};
use crate::grid::Grid1D;

/// Real values sampled at the nodes of a [`Grid1D`].
#[derive(Debug, Clone)]
pub struct Field {
    grid: Grid1D,
    values: Vec<f64>,
}

/// The norms exposed by [`lp_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

impl Field {
    /// Wraps node values; rejects wrong lengths and non-finite entries.
    pub fn new(grid: &Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(FlowError::LengthMismatch {
                expected: grid.n_points(),
                got: values.len(),
            });
        }
        let field = Self {
            grid: grid.clone(),
            values,
        };
        field.ensure_finite()?;
        Ok(field)
    }

    pub(crate) fn from_raw(grid: &Grid1D, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_points());
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn zeros(grid: &Grid1D) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Grid1D, c: f64) -> Self {
        Self::from_raw(grid, vec![c; grid.n_points()])
    }

    /// Samples `f` at the grid nodes.
    pub fn from_fn(grid: &Grid1D, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
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

    pub fn ensure_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(FlowError::NonFinite { index }),
            None => Ok(()),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Self::from_raw(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        assert!(self.grid.same_as(&other.grid), "fields on different grids");
        Self::from_raw(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// `self + a * other`
    pub fn axpy(&self, a: f64, other: &Field) -> Field {
        self.zip_with(other, |x, y| x + a * y)
    }

    pub fn square(&self) -> Field {
        self.map(|v| v * v)
    }

    /// Trapezoid quadrature over one period (`Δ Σ f_j`).
    pub fn integral(&self) -> f64 {
        self.grid.spacing() * self.values.iter().sum::<f64>()
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Sup-norm difference to another field on the same grid.
    pub fn sup_distance(&self, other: &Field) -> f64 {
        assert!(self.grid.same_as(&other.grid), "fields on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Largest |u| over the outermost 5% of nodes on each side of the box.
    pub fn tail_amplitude(&self) -> f64 {
        let n = self.values.len();
        let band = (n / 20).max(1);
        self.values[..band]
            .iter()
            .chain(&self.values[n - band..])
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Discrete Lᵖ norm: trapezoid quadrature for p ∈ {1, 2}, node maximum for ∞.
pub fn lp_norm(f: &Field, p: Norm) -> f64 {
    let dx = f.grid.spacing();
    match p {
        Norm::L1 => dx * f.values.iter().map(|v| v.abs()).sum::<f64>(),
        Norm::L2 => (dx * f.values.iter().map(|v| v * v).sum::<f64>()).sqrt(),
        Norm::LInf => f.sup(),
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Field {
    type Output = Field;
    fn mul(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a * b)
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        self.map(|a| a * rhs)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.map(|a| -a)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{PI, SQRT_2};

    use super::*;

    #[test]
    fn sine_norms() {
        let g = Grid1D::periodic(256).unwrap();
        let f = Field::from_fn(&g, |x| (2.0 * PI * x).sin());
        assert!((lp_norm(&f, Norm::L2) - 1.0 / SQRT_2).abs() < 1e-14);
        assert!((lp_norm(&f, Norm::LInf) - 1.0).abs() < 1e-14);
        assert!((lp_norm(&f, Norm::L1) - 2.0 / PI).abs() < 1e-4);
    }

    #[test]
    fn zero_field_norms_vanish() {
        let g = Grid1D::line(64, 5.0).unwrap();
        let z = Field::zeros(&g);
        for p in [Norm::L1, Norm::L2, Norm::LInf] {
            assert_eq!(lp_norm(&z, p), 0.0);
        }
    }

    #[test]
    fn constructor_validates() {
        let g = Grid1D::periodic(16).unwrap();
        assert!(matches!(
            Field::new(&g, vec![0.0; 15]),
            Err(FlowError::LengthMismatch { .. })
        ));
        let mut v = vec![0.0; 16];
        v[4] = f64::NAN;
        assert!(matches!(
            Field::new(&g, v),
            Err(FlowError::NonFinite { index: 4 })
        ));
    }

    #[test]
    fn tail_band_covers_both_ends() {
        let g = Grid1D::line(100, 10.0).unwrap();
        let mut f = Field::zeros(&g);
        f.values_mut()[97] = -3.0;
        assert_eq!(f.tail_amplitude(), 3.0);
        f.values_mut()[50] = 10.0;
        assert_eq!(f.tail_amplitude(), 3.0);
    }
}
