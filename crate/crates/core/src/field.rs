//! Complex-valued states sampled on a [`Grid1D`], and their Lebesgue norms.

use crate::grid::Grid1D;
use crate::{Error, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// A complex function sampled on a periodic grid. Immutable once built;
/// constructors reject non-finite samples.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid1D>,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Arc<Grid1D>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::GridMismatch(values.len(), grid.n_points()));
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Field { grid, values })
    }

    /// Sample a scalar function on the grid.
    pub fn from_fn(grid: &Arc<Grid1D>, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = (0..grid.n_points()).map(|j| f(grid.x(j))).collect();
        Field::new(Arc::clone(grid), values)
    }

    pub fn zero(grid: &Arc<Grid1D>) -> Self {
        Field {
            grid: Arc::clone(grid),
            values: vec![Complex64::ZERO; grid.n_points()],
        }
    }

    /// `amp * exp(-(x-center)^2/(2 width^2)) * exp(i momentum x)`.
    pub fn gaussian(grid: &Arc<Grid1D>, amp: f64, center: f64, width: f64, momentum: f64) -> Result<Self> {
        Field::from_fn(grid, |x| {
            let u = (x - center) / width;
            Complex64::from_polar((-0.5 * u * u).exp() * amp, momentum * x)
        })
    }

    #[inline]
    pub fn grid(&self) -> &Arc<Grid1D> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Unchecked constructor for internal arithmetic whose inputs are
    /// already validated fields.
    pub(crate) fn from_values_unchecked(grid: Arc<Grid1D>, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_points());
        Field { grid, values }
    }

    pub fn scale(&self, c: Complex64) -> Field {
        Field {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.check_same_grid(other)?;
        Ok(Field {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.check_same_grid(other)?;
        Ok(Field {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid.same_grid(other.grid()) {
            Ok(())
        } else {
            Err(Error::GridMismatch(
                self.grid.n_points(),
                other.grid().n_points(),
            ))
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `L^2` norm with the grid quadrature weight.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.grid.dx()).sqrt()
    }

    /// Largest sample magnitude on the outer 10% of the box, relative to the
    /// overall maximum. Schwartz-class states must keep this small for the
    /// periodic truncation to stand in for the real line.
    pub fn boundary_decay_ratio(&self) -> f64 {
        let n = self.grid.n_points();
        let edge = n / 20; // 5% on each side = outer 10%
        let max_all = self.sup_norm();
        if max_all == 0.0 {
            return 0.0;
        }
        let max_edge = self
            .values
            .iter()
            .take(edge)
            .chain(self.values.iter().skip(n - edge))
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        max_edge / max_all
    }
}

/// `(sum |f(x_j)|^p dx)^(1/p)` for finite `p >= 1`, `max_j |f(x_j)|` for
/// `p = infinity`. On a periodic grid the left Riemann sum coincides with the
/// trapezoid rule, and is spectrally accurate for band-limited integrands.
pub fn lebesgue_norm(f: &Field, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    if p.is_infinite() {
        return Ok(f.sup_norm());
    }
    let dx = f.grid().dx();
    if p == 2.0 {
        return Ok(f.l2_norm());
    }
    let s: f64 = f.values().iter().map(|v| v.norm().powf(p)).sum();
    Ok((s * dx).powf(1.0 / p))
}
