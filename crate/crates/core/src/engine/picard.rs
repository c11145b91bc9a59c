//! Banach fixed point for the perturbed equation
//! `i w_t + w_xx +- G(v, w) = 0`, `w(0) = psi`.
//!
//! The operator is `T w = e^{it d^2} psi +- i Duh(G(v, w))`; iterates start
//! from the free evolution of the data and live on the instants of the
//! supplied `v` trajectory. Convergence is declared by the successive
//! difference in the ball's own mixed norm.

use super::nonlinear::{g_nonlinear, Nonlinearity};
use crate::field::Field;
use crate::propagator::{duhamel_all_instants, free_evolve};
use crate::trajectory::{mixed_norm, Trajectory};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, Copy)]
pub struct PicardConfig {
    pub max_iters: usize,
    /// Successive-iterate tolerance in the `L^Q_t L^r_x` norm.
    pub tol: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig {
            max_iters: 40,
            tol: 1e-10,
        }
    }
}

/// Per-solve diagnostics, serialized into run reports.
#[derive(Debug, Clone, Serialize)]
pub struct SolverDiagnostics {
    pub contraction_factor: f64,
    pub iterations: usize,
    pub ball_bound: f64,
    pub ball_norm: f64,
    pub residual: f64,
}

pub struct PicardOutcome {
    pub w: Trajectory,
    pub diagnostics: SolverDiagnostics,
}

fn apply_operator(
    psi_free: &[Field],
    v: &Trajectory,
    w: &Trajectory,
    sign: Nonlinearity,
) -> Result<Trajectory> {
    // source G(v(t), w(t)) on the shared instants
    let times = v.times().to_vec();
    let src_states: Vec<Field> = v
        .states()
        .iter()
        .zip(w.states())
        .map(|(vs, ws)| g_nonlinear(vs, ws))
        .collect::<Result<_>>()?;
    let src = Trajectory::new(times.clone(), src_states)?;
    let integrals = duhamel_all_instants(&src);
    let pm_i = Complex64::new(0.0, sign.sign());
    let states: Vec<Field> = psi_free
        .iter()
        .zip(integrals)
        .map(|(free, duh)| free.add(&duh.scale(pm_i)))
        .collect::<Result<_>>()?;
    Trajectory::new(times, states)
}

/// Iterate `T` to its fixed point inside the mixed-norm ball of radius
/// `ball_bound`. Returns the fixed point, the measured first-step contraction
/// ratio, and the iteration count. Errors: `NonContractive` when the
/// measured ratio reaches 1, `BallEscape` when the fixed point leaves the
/// ball, `MaxIters` on exhaustion.
pub fn picard_solve_perturbed(
    psi: &Field,
    v: &Trajectory,
    sign: Nonlinearity,
    q_exp: f64,
    r_exp: f64,
    ball_bound: f64,
    cfg: &PicardConfig,
) -> Result<PicardOutcome> {
    psi.check_same_grid(v.state(0))?;
    let psi_free: Vec<Field> = v.times().iter().map(|&t| free_evolve(psi, t)).collect();
    let w0 = Trajectory::new(v.times().to_vec(), psi_free.clone())?;

    let mut w_prev = w0;
    let mut w_cur = apply_operator(&psi_free, v, &w_prev, sign)?;
    let gap0 = mixed_norm(&w_cur.zip_sub(&w_prev)?, q_exp, r_exp)?;
    let mut iterations = 1usize;
    let mut contraction_factor = 0.0f64;

    if gap0 > cfg.tol {
        let mut gap_prev = gap0;
        loop {
            if iterations >= cfg.max_iters {
                return Err(Error::MaxIters(cfg.max_iters));
            }
            let w_next = apply_operator(&psi_free, v, &w_cur, sign)?;
            let gap = mixed_norm(&w_next.zip_sub(&w_cur)?, q_exp, r_exp)?;
            iterations += 1;
            if iterations == 2 {
                // ratio ||T w1 - T w0|| / ||w1 - w0||
                contraction_factor = gap / gap0;
                if contraction_factor >= 1.0 {
                    return Err(Error::NonContractive(contraction_factor));
                }
            }
            w_prev = w_cur;
            w_cur = w_next;
            if gap < cfg.tol {
                break;
            }
            if gap > gap_prev && gap > 10.0 * cfg.tol {
                return Err(Error::NonContractive(gap / gap_prev));
            }
            gap_prev = gap;
        }
    }

    let ball_norm = mixed_norm(&w_cur, q_exp, r_exp)?;
    if ball_norm > ball_bound * (1.0 + 1e-9) {
        return Err(Error::BallEscape {
            norm: ball_norm,
            bound: ball_bound,
        });
    }
    // fixed-point residual ||T w - w||
    let t_w = apply_operator(&psi_free, v, &w_cur, sign)?;
    let residual = mixed_norm(&t_w.zip_sub(&w_cur)?, q_exp, r_exp)?;
    Ok(PicardOutcome {
        w: w_cur,
        diagnostics: SolverDiagnostics {
            contraction_factor,
            iterations,
            ball_bound,
            ball_norm,
            residual,
        },
    })
}
