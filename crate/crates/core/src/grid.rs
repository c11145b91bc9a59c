//! Periodic spatial grid and its discrete frequency lattice.

use crate::{Error, Result};
use rustfft::{Fft, FftPlanner};
use std::fmt;
use std::sync::Arc;

/// Uniform periodic grid on `[-L, L)` with `n` points (power of two).
///
/// The frequency lattice is `(pi/L) * {-n/2, ..., n/2 - 1}`, stored in FFT
/// order (`0, 1, ..., n/2-1, -n/2, ..., -1`) to match transform bins.
pub struct Grid1D {
    n: usize,
    half_width: f64,
    dx: f64,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl Grid1D {
    pub fn new(n_points: usize, half_width: f64) -> Result<Arc<Self>> {
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(Error::BadGridSize(n_points));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::BadHalfWidth(half_width));
        }
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Grid1D {
            n: n_points,
            half_width,
            dx: 2.0 * half_width / n_points as f64,
            fft_fwd: planner.plan_fft_forward(n_points),
            fft_inv: planner.plan_fft_inverse(n_points),
        }))
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Spatial sample point `x_j = -L + j*dx`.
    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Signed integer mode index of FFT bin `k` (`0..n/2`, then `-n/2..-1`).
    #[inline]
    pub fn mode(&self, k: usize) -> i64 {
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// Frequency of FFT bin `k`: `xi_k = (pi/L) * mode(k)`.
    #[inline]
    pub fn xi(&self, k: usize) -> f64 {
        std::f64::consts::PI / self.half_width * self.mode(k) as f64
    }

    /// Frequency lattice in FFT bin order.
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.xi(k)).collect()
    }

    /// Frequency lattice sorted in monotone order `-n/2 .. n/2-1`.
    pub fn frequencies_sorted(&self) -> Vec<f64> {
        let step = std::f64::consts::PI / self.half_width;
        (0..self.n)
            .map(|j| (j as i64 - (self.n / 2) as i64) as f64 * step)
            .collect()
    }

    pub(crate) fn fft_forward(&self) -> &Arc<dyn Fft<f64>> {
        &self.fft_fwd
    }

    pub(crate) fn fft_inverse(&self) -> &Arc<dyn Fft<f64>> {
        &self.fft_inv
    }

    pub fn same_grid(&self, other: &Grid1D) -> bool {
        self.n == other.n && self.half_width == other.half_width
    }
}

impl fmt::Debug for Grid1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid1D")
            .field("n_points", &self.n)
            .field("half_width", &self.half_width)
            .field("dx", &self.dx)
            .finish()
    }
}

impl PartialEq for Grid1D {
    fn eq(&self, other: &Self) -> bool {
        self.same_grid(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dx_times_n_is_exactly_2l() {
        for &(n, l) in &[(8usize, 1.0f64), (256, 16.0), (1024, 12.5)] {
            let g = Grid1D::new(n, l).unwrap();
            assert_eq!(g.dx() * n as f64, 2.0 * l);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid1D::new(0, 1.0).is_err());
        assert!(Grid1D::new(100, 1.0).is_err());
        assert!(Grid1D::new(64, 0.0).is_err());
        assert!(Grid1D::new(64, f64::NAN).is_err());
    }

    #[test]
    fn frequency_lattice_symmetric_up_to_nyquist() {
        let g = Grid1D::new(16, 2.0).unwrap();
        let sorted = g.frequencies_sorted();
        assert!(sorted.windows(2).all(|w| w[0] < w[1]));
        // every positive frequency has its negative partner; the single
        // Nyquist mode -n/2 is the only unpaired one
        for j in 1..8 {
            assert_eq!(sorted[8 + j], -sorted[8 - j]);
        }
        assert_eq!(sorted[0], -8.0 * std::f64::consts::PI / 2.0);
        // FFT-order lattice hits the same values
        let mut fft_order = g.frequencies();
        fft_order.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in fft_order.iter().zip(&sorted) {
            assert_eq!(a, b);
        }
    }
}
