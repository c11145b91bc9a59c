//! Independent reference computations used by the test and verification
//! suites. Nothing here shares code paths with the implementations it
//! checks: the integrator is a classical RK4 on the spectral ODE system,
//! the transform quadratures evaluate the defining integrals directly, and
//! the feasibility scan transliterates the gate inequalities afresh.

use crate::engine::Nonlinearity;
use crate::field::Field;
use crate::grid::Grid1D;
use crate::scheduler::{rat_int, Rat};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use std::sync::Arc;

/// Fourth-order Runge-Kutta on the full spectral ODE system
/// `u_t = i u_xx + i sign |u|^2 u`, with `steps` uniform steps.
pub fn rk4_spectral_nls(phi: &Field, sign: Nonlinearity, delta: f64, steps: usize) -> Field {
    let grid = Arc::clone(phi.grid());
    let n = grid.n_points();
    let fft = grid.fft_forward().clone();
    let ifft = grid.fft_inverse().clone();
    let mut scratch =
        vec![Complex64::ZERO; fft.get_inplace_scratch_len().max(ifft.get_inplace_scratch_len())];
    let xi_sq: Vec<f64> = (0..n).map(|k| grid.xi(k) * grid.xi(k)).collect();
    let s = sign.sign();
    let dt = delta / steps as f64;
    let inv_n = 1.0 / n as f64;

    let rhs = |u: &[Complex64], scratch: &mut Vec<Complex64>| -> Vec<Complex64> {
        // i u_xx via multiplier, i s |u|^2 u pointwise
        let mut hat = u.to_vec();
        fft.process_with_scratch(&mut hat, scratch);
        for (h, &w) in hat.iter_mut().zip(&xi_sq) {
            *h *= Complex64::new(0.0, -w * inv_n);
        }
        ifft.process_with_scratch(&mut hat, scratch);
        for (h, &z) in hat.iter_mut().zip(u) {
            *h += Complex64::new(0.0, s * z.norm_sqr()) * z;
        }
        hat
    };

    let mut u = phi.values().to_vec();
    for _ in 0..steps {
        let k1 = rhs(&u, &mut scratch);
        let u2: Vec<Complex64> = u.iter().zip(&k1).map(|(a, b)| a + b * (0.5 * dt)).collect();
        let k2 = rhs(&u2, &mut scratch);
        let u3: Vec<Complex64> = u.iter().zip(&k2).map(|(a, b)| a + b * (0.5 * dt)).collect();
        let k3 = rhs(&u3, &mut scratch);
        let u4: Vec<Complex64> = u.iter().zip(&k3).map(|(a, b)| a + b * dt).collect();
        let k4 = rhs(&u4, &mut scratch);
        for i in 0..n {
            u[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
    Field::from_values_unchecked(grid, u)
}

/// Direct Simpson quadrature of the windowed transform integral
/// `V_g f(x, xi) = integral e^{-i xi y} conj(g(y - x)) f(y) dy` over
/// `[-span, span]`, for scalar probe functions given as closures.
pub fn stft_quadrature(
    f: &dyn Fn(f64) -> Complex64,
    g: &dyn Fn(f64) -> Complex64,
    x: f64,
    xi: f64,
    span: f64,
    intervals: usize,
) -> Complex64 {
    let m = intervals + intervals % 2; // even
    let h = 2.0 * span / m as f64;
    let mut acc = Complex64::ZERO;
    for j in 0..=m {
        let y = -span + j as f64 * h;
        let weight = if j == 0 || j == m {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let phase = Complex64::from_polar(1.0, -xi * y);
        acc += phase * g(y - x).conj() * f(y) * weight;
    }
    acc * (h / 3.0)
}

/// Independent least-feasible-`Q` scan: retests every gate inequality as
/// printed, in exact rationals, from `Q = 2` upward.
pub fn brute_force_least_q(r: &Rat, alpha: &Rat, q_max: u32) -> Option<u32> {
    for q_int in 2..=q_max {
        let q = rat_int(q_int as i64);
        if gates_as_printed(&q, r, alpha) {
            return Some(q_int);
        }
    }
    None
}

fn gates_as_printed(q: &Rat, r: &Rat, alpha: &Rat) -> bool {
    let one = Rat::one();
    let two = rat_int(2);
    let three = rat_int(3);
    let four = rat_int(4);
    let six = rat_int(6);

    // (6r - r^2) Q^2 > 2 alpha [(11 r^2 - 19 r + 6) Q^2 - 14 r^2 Q - 24 r^2]
    let lhs = (six.clone() * r - r.clone() * r) * q * q;
    let rhs = two.clone()
        * alpha
        * ((rat_int(11) * r * r - rat_int(19) * r + six.clone()) * q * q
            - rat_int(14) * r * r * q
            - rat_int(24) * r * r);
    if lhs <= rhs {
        return false;
    }
    // first table: q > 3 and max{3, 2q/(q-2)} < r < min{q, 4q/(q-2)}
    if *q <= three {
        return false;
    }
    let lo = {
        let c = two.clone() * q / (q.clone() - &two);
        if c > three {
            c
        } else {
            three.clone()
        }
    };
    let hi = {
        let c = four.clone() * q / (q.clone() - &two);
        if c < *q {
            c
        } else {
            q.clone()
        }
    };
    if !(*r > lo && *r < hi) {
        return false;
    }
    // second table: q > 4/3 and 3 < r < 6
    if *q <= four.clone() / three.clone() || *r <= three || *r >= six {
        return false;
    }
    // 5Qr - 6Q - 12r > 0
    let pos = rat_int(5) * q * r - six.clone() * q - rat_int(12) * r;
    if !pos.is_positive() {
        return false;
    }
    // beta = 6(r-2)Q / (5Qr - 6Q - 12r) in (0, 1)
    let beta = six * (r.clone() - two) * q / pos;
    beta.is_positive() && beta < one
}

/// Trapezoid quadrature of `integral |f|^p` for a scalar function on a
/// uniform mesh, as a cross-check for grid norms.
pub fn lp_norm_quadrature(f: &dyn Fn(f64) -> Complex64, p: f64, span: f64, points: usize) -> f64 {
    let h = 2.0 * span / points as f64;
    let mut acc = 0.0;
    for j in 0..points {
        let x = -span + (j as f64 + 0.5) * h;
        acc += f(x).norm().powf(p) * h;
    }
    acc.powf(1.0 / p)
}
