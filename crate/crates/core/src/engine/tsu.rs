//! Numerical verification of the two inhomogeneous-term estimates that drive
//! the contraction argument: the Duhamel integral of `G~(v, w1, w2)` is
//! measured in `L^q_T L^r` and in `L^infty_T L^2` and compared against the
//! calibrated right-hand sides with their power-of-`T` prefactors.

use super::nonlinear::g_tilde;
use crate::propagator::duhamel_all_instants;
use crate::trajectory::{mixed_norm, Trajectory};
use crate::{Error, Result};
use serde::Serialize;

/// Left/right evaluations for both estimates; ratios above 1 mean the
/// calibrated constant failed to cover this triple.
#[derive(Debug, Clone, Serialize)]
pub struct TsuReport {
    pub t_horizon: f64,
    pub q: f64,
    pub r: f64,
    pub c_q: f64,
    pub lhs_mixed: f64,
    pub rhs_mixed: f64,
    pub ratio_mixed: f64,
    pub lhs_sup_l2: f64,
    pub rhs_sup_l2: f64,
    pub ratio_sup_l2: f64,
}

impl TsuReport {
    pub fn calibration_ok(&self) -> bool {
        self.ratio_mixed <= 1.0 && self.ratio_sup_l2 <= 1.0
    }

    /// Largest bracket ratio with the constant divided out; suprema of these
    /// over a probe corpus are what the calibration records as `c_Q`.
    pub fn required_constant(&self) -> f64 {
        let a = if self.rhs_mixed > 0.0 {
            self.lhs_mixed / (self.rhs_mixed / self.c_q)
        } else {
            0.0
        };
        let b = if self.rhs_sup_l2 > 0.0 {
            self.lhs_sup_l2 / (self.rhs_sup_l2 / self.c_q)
        } else {
            0.0
        };
        a.max(b)
    }
}

fn hypotheses_hold(q: f64, r: f64) -> Result<()> {
    if !(q > 3.0) {
        return Err(Error::Hypothesis(format!("need q > 3, got q = {q}")));
    }
    let lower = (2.0 * q / (q - 2.0)).max(3.0);
    let upper = (4.0 * q / (q - 2.0)).min(q);
    if !(r > lower && r < upper) {
        return Err(Error::Hypothesis(format!(
            "need max(3, 2q/(q-2)) < r < min(q, 4q/(q-2)): r = {r} outside ({lower}, {upper})"
        )));
    }
    Ok(())
}

/// Evaluate both estimates for the triple `(v, w1, w2)` over `[0, T]`, where
/// `T` is the common final time of the trajectories.
pub fn verify_tsu_bounds(
    v: &Trajectory,
    w1: &Trajectory,
    w2: &Trajectory,
    q: f64,
    r: f64,
    c_q: f64,
) -> Result<TsuReport> {
    hypotheses_hold(q, r)?;
    if v.times() != w1.times() || v.times() != w2.times() {
        return Err(Error::Format(
            "tsu verification needs trajectories on shared instants".into(),
        ));
    }
    let t_horizon = v.final_time();

    // Duhamel of G~ on the stored instants
    let src_states = v
        .states()
        .iter()
        .zip(w1.states())
        .zip(w2.states())
        .map(|((vs, w1s), w2s)| g_tilde(vs, w1s, w2s))
        .collect::<Result<Vec<_>>>()?;
    let src = Trajectory::new(v.times().to_vec(), src_states)?;
    let duh = Trajectory::new(v.times().to_vec(), duhamel_all_instants(&src))?;

    let lhs_mixed = mixed_norm(&duh, q, r)?;
    let lhs_sup_l2 = mixed_norm(&duh, f64::INFINITY, 2.0)?;

    let q_admissible = 4.0 * r / (r - 2.0);
    let v_str = mixed_norm(v, q_admissible, r)?;
    let w1_n = mixed_norm(w1, q, r)?;
    let w2_n = mixed_norm(w2, q, r)?;
    let dw_n = mixed_norm(&w1.zip_sub(w2)?, q, r)?;

    let pow_mixed_w = (2.0 * r * q - 2.0 * q - 4.0 * r) / (2.0 * r * q);
    let rhs_mixed = c_q
        * (t_horizon.sqrt() * v_str * v_str * dw_n
            + t_horizon.powf(pow_mixed_w) * (w1_n * w1_n + w2_n * w2_n) * dw_n);

    let pow_sup_v = (3.0 * q * r - 4.0 * r - 2.0 * q) / (4.0 * q * r);
    let pow_sup_w = (5.0 * q * r - 6.0 * q - 12.0 * r) / (4.0 * r * q);
    let rhs_sup_l2 = c_q
        * (t_horizon.powf(pow_sup_v) * v_str * v_str * dw_n
            + t_horizon.powf(pow_sup_w) * (w1_n * w1_n + w2_n * w2_n) * dw_n);

    let ratio = |lhs: f64, rhs: f64| if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(TsuReport {
        t_horizon,
        q,
        r,
        c_q,
        lhs_mixed,
        rhs_mixed,
        ratio_mixed: ratio(lhs_mixed, rhs_mixed),
        lhs_sup_l2,
        rhs_sup_l2,
        ratio_sup_l2: ratio(lhs_sup_l2, rhs_sup_l2),
    })
}
