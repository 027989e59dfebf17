//! Uniform grids on the unit circle or on a truncated real line.
//!
//! Both geometries are handled as periodic boxes: the circle has period 1,
//! the line `[-L, L)` is embedded in a box of period `2L`. Every grid
//! carries its FFT plans and lazily builds the Green's kernel table.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::kernel::KernelTable;

/// Smallest admissible grid.
pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Periodic,
    Line,
}

struct GridInner {
    kind: DomainKind,
    n_points: usize,
    extent: f64,
    origin: f64,
    spacing: f64,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kernel: OnceLock<KernelTable>,
}

/// A uniform grid. Cloning is cheap; clones share plans and kernel cache.
#[derive(Clone)]
pub struct Grid1D {
    inner: Arc<GridInner>,
}

impl Grid1D {
    /// Builds a grid. `halfwidth` is ignored for [`DomainKind::Periodic`].
    pub fn new(kind: DomainKind, n_points: usize, halfwidth: f64) -> Result<Self> {
        if n_points < MIN_POINTS {
            return Err(FlowError::GridTooCoarse {
                n_points,
                min: MIN_POINTS,
            });
        }
        let (extent, origin) = match kind {
            DomainKind::Periodic => (1.0, 0.0),
            DomainKind::Line => {
                if !(halfwidth.is_finite() && halfwidth > 0.0) {
                    return Err(FlowError::InvalidHalfwidth(halfwidth));
                }
                (2.0 * halfwidth, -halfwidth)
            }
        };
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n_points);
        let inverse = planner.plan_fft_inverse(n_points);
        let base = 2.0 * PI / extent;
        let wavenumbers = (0..n_points)
            .map(|j| base * signed_mode(j, n_points) as f64)
            .collect();
        Ok(Self {
            inner: Arc::new(GridInner {
                kind,
                n_points,
                extent,
                origin,
                spacing: extent / n_points as f64,
                wavenumbers,
                forward,
                inverse,
                kernel: OnceLock::new(),
            }),
        })
    }

    pub fn periodic(n_points: usize) -> Result<Self> {
        Self::new(DomainKind::Periodic, n_points, 1.0)
    }

    pub fn line(n_points: usize, halfwidth: f64) -> Result<Self> {
        Self::new(DomainKind::Line, n_points, halfwidth)
    }

    pub fn kind(&self) -> DomainKind {
        self.inner.kind
    }

    pub fn n_points(&self) -> usize {
        self.inner.n_points
    }

    /// Total length of the (periodic) box.
    pub fn extent(&self) -> f64 {
        self.inner.extent
    }

    /// Half of the box length: `L` on the line, `1/2` on the circle.
    pub fn halfwidth(&self) -> f64 {
        0.5 * self.inner.extent
    }

    pub fn origin(&self) -> f64 {
        self.inner.origin
    }

    pub fn spacing(&self) -> f64 {
        self.inner.spacing
    }

    pub fn node(&self, j: usize) -> f64 {
        self.inner.origin + j as f64 * self.inner.spacing
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points()).map(|j| self.node(j)).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.inner.wavenumbers
    }

    /// Largest derivative order the spectral operators accept.
    pub fn max_derivative_order(&self) -> usize {
        self.inner.n_points / 4
    }

    pub(crate) fn check_order(&self, order: usize) -> Result<()> {
        let max = self.max_derivative_order();
        if order > max {
            return Err(FlowError::DerivativeOrder { order, max });
        }
        Ok(())
    }

    pub(crate) fn forward_plan(&self) -> &Arc<dyn Fft<f64>> {
        &self.inner.forward
    }

    pub(crate) fn inverse_plan(&self) -> &Arc<dyn Fft<f64>> {
        &self.inner.inverse
    }

    /// Green's kernel samples for this grid, built on first use.
    pub fn kernel_table(&self) -> &KernelTable {
        self.inner.kernel.get_or_init(|| KernelTable::new(self))
    }

    pub fn same_as(&self, other: &Grid1D) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self == other
    }
}

impl PartialEq for Grid1D {
    fn eq(&self, other: &Self) -> bool {
        self.inner.kind == other.inner.kind
            && self.inner.n_points == other.inner.n_points
            && self.inner.extent == other.inner.extent
    }
}

impl fmt::Debug for Grid1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid1D")
            .field("kind", &self.inner.kind)
            .field("n_points", &self.inner.n_points)
            .field("extent", &self.inner.extent)
            .field("spacing", &self.inner.spacing)
            .finish()
    }
}

/// Maps an FFT bin to its signed mode number; the Nyquist bin is reported as `+N/2`.
pub(crate) fn signed_mode(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_nodes_are_unit_fractions() {
        let g = Grid1D::periodic(256).unwrap();
        assert_eq!(g.spacing(), 1.0 / 256.0);
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(3), 3.0 / 256.0);
        assert_eq!(g.extent(), 1.0);
        assert_eq!(g.spacing() * g.n_points() as f64, g.extent());
    }

    #[test]
    fn line_nodes_span_symmetric_box() {
        let g = Grid1D::line(1024, 20.0).unwrap();
        let dx = 40.0 / 1024.0;
        assert_eq!(g.spacing(), dx);
        assert_eq!(g.node(0), -20.0);
        assert!((g.node(1023) - (20.0 - dx)).abs() < 1e-12);
    }

    #[test]
    fn coarse_and_degenerate_grids_rejected() {
        assert!(matches!(
            Grid1D::periodic(8),
            Err(FlowError::GridTooCoarse { n_points: 8, .. })
        ));
        assert!(Grid1D::line(64, 0.0).is_err());
        assert!(Grid1D::line(64, -3.0).is_err());
        assert!(Grid1D::line(64, f64::NAN).is_err());
    }

    #[test]
    fn wavenumbers_follow_fft_order() {
        let g = Grid1D::periodic(16).unwrap();
        let k = g.wavenumbers();
        assert_eq!(k[0], 0.0);
        assert!((k[1] - 2.0 * PI).abs() < 1e-15);
        assert!((k[8] - 16.0 * PI).abs() < 1e-12);
        assert!((k[15] + 2.0 * PI).abs() < 1e-15);
    }
}
