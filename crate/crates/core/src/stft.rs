//! Short-time Fourier transform with a sliding window on the grid.
//!
//! `V_g f(x, xi) = integral e^{-i xi y} conj(g(y - x)) f(y) dy`, discretized
//! with the grid quadrature weight and periodic wrap of the window. With all
//! `n` translates and all `n` lattice frequencies the discrete Gabor system
//! is a tight frame: the frame operator is exactly `||g||_2^2 * Id`, so
//! synthesis with the dual window `g / ||g||_2^2` inverts analysis on the
//! lattice. That identity is what the splitter relies on for exact
//! reconstruction of thresholded coefficient sets.

use crate::field::Field;
use crate::grid::Grid1D;
use crate::{Error, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// Analysis window; must be nonzero and effectively supported in the box.
#[derive(Debug, Clone)]
pub struct Window {
    profile: Field,
    norm_l2: f64,
}

impl Window {
    pub fn new(profile: Field) -> Result<Self> {
        let norm_l2 = profile.l2_norm();
        if norm_l2 == 0.0 {
            return Err(Error::BadWindow("window is identically zero".into()));
        }
        let decay = profile.boundary_decay_ratio();
        if decay > 1e-10 {
            return Err(Error::BadWindow(format!(
                "window magnitude at the box edge is {decay:.2e} of its max; needs < 1e-10"
            )));
        }
        Ok(Window { profile, norm_l2 })
    }

    /// The default window: L2-normalized Gaussian `e^{-x^2/2} / pi^{1/4}`.
    pub fn gaussian(grid: &Arc<Grid1D>) -> Result<Self> {
        let raw = Field::gaussian(grid, 1.0, 0.0, 1.0, 0.0)?;
        let norm = raw.l2_norm();
        Window::new(raw.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn profile(&self) -> &Field {
        &self.profile
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm_l2
    }

    pub fn grid(&self) -> &Arc<Grid1D> {
        self.profile.grid()
    }
}

/// Dense STFT coefficient matrix: rows are window positions `x_j`, columns
/// are FFT-order lattice frequencies `xi_k`.
pub struct StftMatrix {
    grid: Arc<Grid1D>,
    /// Row-major `n x n`: entry `[j][k] = V_g f(x_j, xi_k)`.
    data: Vec<Complex64>,
}

impl StftMatrix {
    #[inline]
    pub fn value(&self, j: usize, k: usize) -> Complex64 {
        self.data[j * self.grid.n_points() + k]
    }

    pub fn grid(&self) -> &Arc<Grid1D> {
        &self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, j: usize) -> &[Complex64] {
        let n = self.grid.n_points();
        &self.data[j * n..(j + 1) * n]
    }

    /// Frobenius-type norm with the `dx dxi` quadrature weight.
    pub fn l2_weighted(&self) -> f64 {
        let g = &self.grid;
        let w = g.dx() * std::f64::consts::PI / g.half_width();
        (self.data.iter().map(|v| v.norm_sqr()).sum::<f64>() * w).sqrt()
    }
}

/// Compute `V_g f` for every grid translate and every lattice frequency.
/// Each fixed-x slice is one FFT of `y -> conj(g(y-x)) f(y)`.
pub fn stft(f: &Field, window: &Window) -> Result<StftMatrix> {
    f.check_same_grid(window.profile())?;
    let grid = Arc::clone(f.grid());
    let n = grid.n_points();
    let dx = grid.dx();
    let g = window.profile().values();
    let fv = f.values();
    let fft = grid.fft_forward().clone();

    let mut data = vec![Complex64::ZERO; n * n];
    let mut buf = vec![Complex64::ZERO; n];
    let mut scratch = vec![Complex64::ZERO; fft.get_inplace_scratch_len()];
    for j in 0..n {
        // h(y_m) = conj(g(y_m - x_j)) f(y_m), periodic index wrap
        for m in 0..n {
            let gm = g[(m + n - j) % n];
            buf[m] = gm.conj() * fv[m];
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        // continuum quadrature: dx * sum_m e^{-i xi_k y_m} h_m
        //                     = dx * (-1)^mode(k) * FFT_k(h)
        let row = &mut data[j * n..(j + 1) * n];
        for k in 0..n {
            let sign = if grid.mode(k) % 2 == 0 { 1.0 } else { -1.0 };
            row[k] = buf[k] * (dx * sign);
        }
    }
    Ok(StftMatrix { grid, data })
}

/// Synthesize a field from (a masked copy of) an STFT matrix using the
/// canonical dual window of the tight lattice frame.
///
/// `f(y_m) = dx dxi / (2 pi ||g||_2^2) * sum_{j,k} V(x_j, xi_k)
///            g(y_m - x_j) e^{i xi_k y_m}`
///
/// With the full matrix this reproduces the analyzed field to roundoff.
pub fn istft(matrix_data: &[Complex64], grid: &Arc<Grid1D>, window: &Window) -> Result<Field> {
    let n = grid.n_points();
    if matrix_data.len() != n * n {
        return Err(Error::Format(format!(
            "coefficient matrix has {} entries, expected {}",
            matrix_data.len(),
            n * n
        )));
    }
    let dx = grid.dx();
    let dxi = std::f64::consts::PI / grid.half_width();
    let scale = dx * dxi / (2.0 * std::f64::consts::PI * window.norm_l2().powi(2));
    let g = window.profile().values();
    let ifft = grid.fft_inverse().clone();

    // sum over k first: s_j(y_m) = sum_k V(x_j, xi_k) e^{i xi_k y_m}
    //                            = n/sqrt-free inverse FFT with (-1)^k undone
    let mut acc = vec![Complex64::ZERO; n];
    let mut buf = vec![Complex64::ZERO; n];
    let mut scratch = vec![Complex64::ZERO; ifft.get_inplace_scratch_len()];
    for j in 0..n {
        let row = &matrix_data[j * n..(j + 1) * n];
        for k in 0..n {
            let sign = if grid.mode(k) % 2 == 0 { 1.0 } else { -1.0 };
            buf[k] = row[k] * sign;
        }
        ifft.process_with_scratch(&mut buf, &mut scratch);
        // accumulate g(y_m - x_j) * s_j(y_m)
        for m in 0..n {
            let gm = g[(m + n - j) % n];
            acc[m] += gm * buf[m];
        }
    }
    for v in &mut acc {
        *v *= scale;
    }
    Field::new(Arc::clone(grid), acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibrate::seeded_field;
    use crate::grid::Grid1D;

    #[test]
    fn zero_field_gives_zero_matrix() {
        let g = Grid1D::new(64, 8.0).unwrap();
        let w = Window::gaussian(&g).unwrap();
        let m = stft(&Field::zero(&g), &w).unwrap();
        assert!(m.data().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn gaussian_stft_matches_closed_form() {
        // f = g = e^{-x^2/2}: |V| = sqrt(pi) e^{-(x^2+xi^2)/4}, scaled by the
        // window normalization 1/pi^{1/4}
        let g = Grid1D::new(256, 12.0).unwrap();
        let w = Window::gaussian(&g).unwrap();
        let f = Field::gaussian(&g, 1.0, 0.0, 1.0, 0.0).unwrap();
        let m = stft(&f, &w).unwrap();
        let c = std::f64::consts::PI.powf(0.25); // sqrt(pi)/pi^{1/4}
        for (j, k) in [(128, 0), (140, 3), (100, 250), (64, 17), (200, 130)] {
            let x = g.x(j);
            let xi = g.xi(k);
            let want = c * (-(x * x + xi * xi) / 4.0).exp();
            let got = m.value(j, k).norm();
            assert!(
                (got - want).abs() < 1e-10,
                "({j},{k}): got {got}, want {want}"
            );
        }
    }

    #[test]
    fn stft_covariant_under_translation() {
        let g = Grid1D::new(128, 8.0).unwrap();
        let w = Window::gaussian(&g).unwrap();
        let x0 = 16.0 * g.dx();
        let f = Field::gaussian(&g, 1.0, x0, 1.0, 0.0).unwrap();
        let m = stft(&f, &w).unwrap();
        // max over x of the column-l2 profile should sit at x0
        let n = g.n_points();
        let mut best = (0usize, 0.0f64);
        for j in 0..n {
            let rownorm: f64 = m.row(j).iter().map(|v| v.norm_sqr()).sum();
            if rownorm > best.1 {
                best = (j, rownorm);
            }
        }
        assert!((g.x(best.0) - x0).abs() <= g.dx() / 2.0);
    }

    #[test]
    fn synthesis_inverts_analysis() {
        let g = Grid1D::new(128, 8.0).unwrap();
        let w = Window::gaussian(&g).unwrap();
        let f = seeded_field(&g, 5);
        let m = stft(&f, &w).unwrap();
        let back = istft(m.data(), &g, &w).unwrap();
        let err = back.sub(&f).unwrap().l2_norm() / f.l2_norm();
        assert!(err < 1e-12, "reconstruction error {err}");
    }

    #[test]
    fn row_column_energy_bookkeeping_agrees() {
        let g = Grid1D::new(64, 8.0).unwrap();
        let w = Window::gaussian(&g).unwrap();
        let f = seeded_field(&g, 9);
        let m = stft(&f, &w).unwrap();
        let n = g.n_points();
        let by_rows: f64 = (0..n)
            .map(|j| m.row(j).iter().map(|v| v.norm_sqr()).sum::<f64>())
            .sum();
        let by_cols: f64 = (0..n)
            .map(|k| (0..n).map(|j| m.value(j, k).norm_sqr()).sum::<f64>())
            .sum();
        assert!((by_rows - by_cols).abs() <= 1e-12 * by_rows);
    }

    #[test]
    fn rejects_window_field_grid_mismatch() {
        let g1 = Grid1D::new(64, 8.0).unwrap();
        let g2 = Grid1D::new(128, 8.0).unwrap();
        let w = Window::gaussian(&g1).unwrap();
        let f = Field::zero(&g2);
        assert!(stft(&f, &w).is_err());
    }

    #[test]
    fn rejects_degenerate_windows() {
        let g = Grid1D::new(64, 2.0).unwrap();
        assert!(Window::new(Field::zero(&g)).is_err());
        // wide Gaussian on a tiny box: no boundary decay
        let wide = Field::gaussian(&g, 1.0, 0.0, 4.0, 0.0).unwrap();
        assert!(Window::new(wide).is_err());
    }
}
