//! The cubic interaction terms.

use crate::field::Field;
use crate::Result;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Sign of the cubic term: focusing `+1` or defocusing `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Nonlinearity {
    Focusing,
    Defocusing,
}

impl Nonlinearity {
    pub fn sign(self) -> f64 {
        match self {
            Nonlinearity::Focusing => 1.0,
            Nonlinearity::Defocusing => -1.0,
        }
    }

    pub fn from_sign(s: i32) -> crate::Result<Self> {
        match s {
            1 => Ok(Nonlinearity::Focusing),
            -1 => Ok(Nonlinearity::Defocusing),
            _ => Err(crate::Error::Config(format!("sign must be +1 or -1, got {s}"))),
        }
    }
}

#[inline]
pub(crate) fn cubic(z: Complex64) -> Complex64 {
    z * z.norm_sqr()
}

/// `G(v, w) = |v+w|^2 (v+w) - |v|^2 v`, pointwise.
pub fn g_nonlinear(v: &Field, w: &Field) -> Result<Field> {
    v.check_same_grid(w)?;
    let values = v
        .values()
        .iter()
        .zip(w.values())
        .map(|(&a, &b)| cubic(a + b) - cubic(a))
        .collect();
    Ok(Field::from_values_unchecked(Arc::clone(v.grid()), values))
}

/// `G~(v, w1, w2) = G(v, w1) - G(v, w2)`, pointwise.
pub fn g_tilde(v: &Field, w1: &Field, w2: &Field) -> Result<Field> {
    v.check_same_grid(w1)?;
    v.check_same_grid(w2)?;
    let values = v
        .values()
        .iter()
        .zip(w1.values())
        .zip(w2.values())
        .map(|((&a, &b1), &b2)| cubic(a + b1) - cubic(a + b2))
        .collect();
    Ok(Field::from_values_unchecked(Arc::clone(v.grid()), values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibrate::seeded_field;
    use crate::grid::Grid1D;

    #[test]
    fn collapses_when_w_is_zero() {
        let g = Grid1D::new(64, 4.0).unwrap();
        let v = seeded_field(&g, 1);
        let z = Field::zero(&g);
        let out = g_nonlinear(&v, &z).unwrap();
        assert!(out.sup_norm() == 0.0);
    }

    #[test]
    fn collapses_to_cubic_when_v_is_zero() {
        let g = Grid1D::new(64, 4.0).unwrap();
        let w = seeded_field(&g, 2);
        let out = g_nonlinear(&Field::zero(&g), &w).unwrap();
        for (x, y) in out.values().iter().zip(w.values()) {
            assert_eq!(*x, cubic(*y));
        }
    }

    #[test]
    fn matches_independent_scalar_evaluation() {
        // cross-check one sample by long-hand complex arithmetic
        let g = Grid1D::new(64, 4.0).unwrap();
        let v = seeded_field(&g, 3);
        let w = seeded_field(&g, 4);
        let out = g_nonlinear(&v, &w).unwrap();
        let j = 17;
        let (a, b) = (v.values()[j], w.values()[j]);
        let s_re = a.re + b.re;
        let s_im = a.im + b.im;
        let s_sq = s_re * s_re + s_im * s_im;
        let a_sq = a.re * a.re + a.im * a.im;
        let want = Complex64::new(s_sq * s_re - a_sq * a.re, s_sq * s_im - a_sq * a.im);
        assert!((out.values()[j] - want).norm() < 1e-14);
    }

    #[test]
    fn g_tilde_antisymmetric_and_degenerate_cases() {
        let g = Grid1D::new(64, 4.0).unwrap();
        let v = seeded_field(&g, 5);
        let w1 = seeded_field(&g, 6);
        let z = Field::zero(&g);
        assert_eq!(g_tilde(&v, &w1, &w1).unwrap().sup_norm(), 0.0);
        let a = g_tilde(&v, &w1, &z).unwrap();
        let b = g_nonlinear(&v, &w1).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn g_tilde_pointwise_bound_with_provable_constant() {
        // |G~| <= 12 (|v|^2 + |w1|^2 + |w2|^2) |w1 - w2| pointwise (mean
        // value bound with crude Cauchy splits). The extremal ratio is ~4.5,
        // reached as w1 -> w2 = v/2 with aligned phases; the constant 3 that
        // sometimes gets quoted for this bound is too small.
        let g = Grid1D::new(64, 4.0).unwrap();
        let mut worst: f64 = 0.0;
        for seed in 0..40u64 {
            let v = seeded_field(&g, seed);
            let w1 = seeded_field(&g, seed + 1000);
            let w2 = seeded_field(&g, seed + 2000);
            let gt = g_tilde(&v, &w1, &w2).unwrap();
            for j in 0..g.n_points() {
                let m = v.values()[j].norm_sqr()
                    + w1.values()[j].norm_sqr()
                    + w2.values()[j].norm_sqr();
                let dw = (w1.values()[j] - w2.values()[j]).norm();
                let lhs = gt.values()[j].norm();
                assert!(lhs <= 12.0 * m * dw * (1.0 + 1e-12) + 1e-300);
                if m * dw > 0.0 {
                    worst = worst.max(lhs / (m * dw));
                }
            }
        }
        // the aligned near-degenerate configuration approaches 4.5
        let v = Field::from_fn(&g, |_| Complex64::new(1.0, 0.0)).unwrap();
        let w2 = v.scale(Complex64::new(0.5, 0.0));
        let w1 = v.scale(Complex64::new(0.5 + 1e-7, 0.0));
        let gt = g_tilde(&v, &w1, &w2).unwrap();
        let m = 1.0 + 2.0 * 0.25;
        let dw = 1e-7;
        let ratio = gt.values()[0].norm() / (m * dw);
        assert!((ratio - 4.5).abs() < 1e-3, "extremal ratio {ratio}");
        assert!(worst <= 4.5 + 1e-6, "random corpus worst {worst}");
    }
}
