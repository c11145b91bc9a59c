//! The free Schrödinger group `e^{it d^2/dx^2}` and Duhamel integrals.
//!
//! The multiplier is `e^{-i t xi^2}`, the sign that solves the linear part
//! of `i u_t + u_xx = 0`. Phases are reduced modulo `2 pi` in double-double
//! arithmetic so the group law survives large `t * xi^2` products.

use crate::field::Field;
use crate::fourier::{apply_frequency_multiplier, schroedinger_phases};
use crate::modnorm::{modulation_norm, ModulationNormSpec};
use crate::stft::Window;
use crate::trajectory::{mixed_norm, Trajectory};
use crate::{Error, Result};
use num_rational::Ratio;
use serde::Serialize;

/// Strichartz-admissible pair in one dimension: `1/q + 1/(2r) = 1/4`,
/// checked exactly in rational arithmetic at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissiblePair {
    pub r: Ratio<i64>,
    pub q: Ratio<i64>,
}

impl AdmissiblePair {
    /// Companion exponent `q = 4r/(r-2)` of a given spatial exponent.
    pub fn from_r(r: Ratio<i64>) -> Result<Self> {
        let two = Ratio::from_integer(2);
        let six = Ratio::from_integer(6);
        if r < two || r > six {
            return Err(Error::Hypothesis(format!("admissible pair needs r in [2,6], got {r}")));
        }
        if r == two {
            return Err(Error::Hypothesis("r = 2 pairs with q = infinity".into()));
        }
        let q = Ratio::from_integer(4) * r / (r - two);
        let pair = AdmissiblePair { r, q };
        pair.check()?;
        Ok(pair)
    }

    pub fn new(r: Ratio<i64>, q: Ratio<i64>) -> Result<Self> {
        let pair = AdmissiblePair { r, q };
        pair.check()?;
        Ok(pair)
    }

    fn check(&self) -> Result<()> {
        let quarter = Ratio::new(1, 4);
        let lhs = self.q.recip() + (Ratio::from_integer(2) * self.r).recip();
        if lhs != quarter {
            return Err(Error::Hypothesis(format!(
                "1/q + 1/(2r) = {lhs} != 1/4 for (r, q) = ({}, {})",
                self.r, self.q
            )));
        }
        if self.q <= Ratio::from_integer(2) {
            return Err(Error::Hypothesis(format!("admissible pair needs q > 2, got {}", self.q)));
        }
        Ok(())
    }

    pub fn r_f64(&self) -> f64 {
        ratio_to_f64(self.r)
    }

    pub fn q_f64(&self) -> f64 {
        ratio_to_f64(self.q)
    }
}

pub fn ratio_to_f64(x: Ratio<i64>) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Apply the free group at time `t`.
pub fn free_evolve(f: &Field, t: f64) -> Field {
    if t == 0.0 {
        return f.clone();
    }
    let phases = schroedinger_phases(f.grid(), t);
    apply_frequency_multiplier(f, |k, _| phases[k])
}

/// One row of a measured free-evolution growth table.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthSample {
    pub t: f64,
    pub norm: f64,
}

/// Growth table of `t -> ||e^{it d^2} f||_{M_{r,r'}}` together with the least
/// constant `c` such that `norm(t) <= c (1+t)^{1/2 - 1/r} norm(0)` over the
/// sampled times. The scheduler consumes `1.1 * c` as its `c_I`.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthProbe {
    pub r: f64,
    pub samples: Vec<GrowthSample>,
    pub least_c: f64,
    /// Least-squares slope of `log norm` against `log(1+t)`.
    pub fitted_exponent: f64,
}

pub fn growth_exponent_probe(
    f: &Field,
    r: f64,
    times: &[f64],
    window: &Window,
) -> Result<GrowthProbe> {
    if times.is_empty() {
        return Err(Error::EmptyInput("growth probe needs at least one time"));
    }
    if !(r > 2.0) {
        return Err(Error::InvalidExponent(r));
    }
    let spec = ModulationNormSpec::unweighted(r, r / (r - 1.0), window.clone())?;
    let norm0 = modulation_norm(f, &spec)?;
    let exponent = 0.5 - 1.0 / r;
    let mut samples = Vec::with_capacity(times.len());
    let mut least_c = 0.0f64;
    for &t in times {
        let norm = if t == 0.0 {
            norm0
        } else {
            modulation_norm(&free_evolve(f, t), &spec)?
        };
        least_c = least_c.max(norm / ((1.0 + t.abs()).powf(exponent) * norm0));
        samples.push(GrowthSample { t, norm });
    }
    // slope of log(norm) vs log(1+t), ignoring t=0-only tables
    let fitted_exponent = fit_log_slope(&samples, norm0);
    Ok(GrowthProbe {
        r,
        samples,
        least_c,
        fitted_exponent,
    })
}

fn fit_log_slope(samples: &[GrowthSample], norm0: f64) -> f64 {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.norm > 0.0)
        .map(|s| ((1.0 + s.t.abs()).ln(), (s.norm / norm0).ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        0.0
    } else {
        (n * sxy - sx * sy) / denom
    }
}

/// `integral_0^t e^{i(t-tau) d^2} F(tau) dtau` by trapezoid quadrature on the
/// instants stored in `source`, evaluated at `t_eval` (which must be one of
/// the stored instants, or inside the range to within the local spacing).
pub fn duhamel(source: &Trajectory, t_eval: f64) -> Result<Field> {
    let times = source.times();
    let t_max = source.final_time();
    if !(0.0..=t_max * (1.0 + 1e-12) + 1e-300).contains(&t_eval) {
        return Err(Error::TimeOutOfRange { t: t_eval, max: t_max });
    }
    let grid = source.grid();
    let mut acc = Field::zero(grid);
    let mut prev: Option<(f64, Field)> = None;
    for (i, &tau) in times.iter().enumerate() {
        if tau > t_eval + 1e-14 * t_max.max(1.0) {
            break;
        }
        let term = free_evolve(source.state(i), t_eval - tau);
        if let Some((tau_prev, term_prev)) = prev {
            let h = tau - tau_prev;
            let half = 0.5 * h;
            let values = acc
                .values()
                .iter()
                .zip(term_prev.values())
                .zip(term.values())
                .map(|((a, p), c)| a + (p + c) * half)
                .collect();
            acc = Field::from_values_unchecked(std::sync::Arc::clone(grid), values);
        }
        prev = Some((tau, term));
    }
    Ok(acc)
}

/// Duhamel integral at every stored instant, sharing the per-instant work:
/// `e^{it d^2} integral_0^t e^{-i tau d^2} F(tau) dtau` with trapezoid
/// prefix sums. Index `j` of the result corresponds to `times[j]`.
pub fn duhamel_all_instants(source: &Trajectory) -> Vec<Field> {
    let times = source.times();
    let grid = source.grid();
    let n = times.len();
    let mut out = Vec::with_capacity(n);
    let mut prefix = Field::zero(grid);
    let mut prev: Option<(f64, Field)> = None;
    for (i, &tau) in times.iter().enumerate() {
        let back = free_evolve(source.state(i), -tau);
        if let Some((tau_prev, back_prev)) = prev {
            let half = 0.5 * (tau - tau_prev);
            let values = prefix
                .values()
                .iter()
                .zip(back_prev.values())
                .zip(back.values())
                .map(|((a, p), c)| a + (p + c) * half)
                .collect();
            prefix = Field::from_values_unchecked(std::sync::Arc::clone(grid), values);
        }
        out.push(free_evolve(&prefix, tau));
        prev = Some((tau, back));
    }
    out
}

/// Ratio `||e^{it d^2} phi||_{L^q_{[0,delta]} L^r} / ||phi||_2` on a uniform
/// time mesh; 0 for zero data. Suprema of these over a probe corpus feed the
/// `k_1` calibration.
pub fn strichartz_probe(
    phi: &Field,
    pair: &AdmissiblePair,
    delta: f64,
    time_samples: usize,
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Hypothesis(format!("delta must be positive, got {delta}")));
    }
    let l2 = phi.l2_norm();
    if l2 == 0.0 {
        return Ok(0.0);
    }
    let m = time_samples.max(2);
    let times: Vec<f64> = (0..m).map(|i| delta * i as f64 / (m - 1) as f64).collect();
    let states: Vec<Field> = times.iter().map(|&t| free_evolve(phi, t)).collect();
    let traj = Trajectory::new(times, states)?;
    Ok(mixed_norm(&traj, pair.q_f64(), pair.r_f64())? / l2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibrate::seeded_field;
    use crate::field::lebesgue_norm;
    use crate::fourier::{dft, second_derivative};
    use crate::grid::Grid1D;
    use num_complex::Complex64;
    use std::sync::Arc;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn t_zero_is_identity() {
        let g = Grid1D::new(128, 8.0).unwrap();
        let f = seeded_field(&g, 1);
        let e = free_evolve(&f, 0.0);
        for (a, b) in f.values().iter().zip(e.values()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn l2_isometry_at_several_times() {
        let g = Grid1D::new(1024, 16.0).unwrap();
        let f = seeded_field(&g, 2);
        let n0 = f.l2_norm();
        for t in [0.1, 1.0, 10.0] {
            let nt = free_evolve(&f, t).l2_norm();
            assert!(rel(nt, n0) < 1e-13, "t={t}: {nt} vs {n0}");
        }
    }

    #[test]
    fn group_law_holds_to_1e12() {
        let g = Grid1D::new(2048, 16.0).unwrap();
        let f = seeded_field(&g, 3);
        for (s, t) in [(0.1, 0.2), (1.5, 2.5), (4.0, 6.0)] {
            let a = free_evolve(&free_evolve(&f, s), t);
            let b = free_evolve(&f, s + t);
            let err = a.sub(&b).unwrap().l2_norm() / f.l2_norm();
            assert!(err < 1e-12, "(s,t)=({s},{t}): {err}");
        }
    }

    #[test]
    fn admissible_pair_arithmetic_is_exact() {
        let pair = AdmissiblePair::new(Ratio::from_integer(4), Ratio::from_integer(8)).unwrap();
        assert_eq!(pair.q, Ratio::from_integer(8));
        // companion construction for every rational r in (3, 4]
        for (num, den) in [(7i64, 2i64), (10, 3), (4, 1), (13, 4)] {
            let r = Ratio::new(num, den);
            let pair = AdmissiblePair::from_r(r).unwrap();
            let lhs = pair.q.recip() + (Ratio::from_integer(2) * pair.r).recip();
            assert_eq!(lhs, Ratio::new(1, 4));
        }
        assert!(AdmissiblePair::new(Ratio::from_integer(4), Ratio::from_integer(9)).is_err());
    }

    #[test]
    fn single_mode_source_matches_geometric_phase_integral() {
        // source constant in time, single frequency bin: closed-form
        // integral of e^{-i(t-tau) xi0^2} per bin
        let g = Grid1D::new(64, 4.0).unwrap();
        let k0 = 3usize;
        let xi0 = g.xi(k0);
        let f = Field::from_fn(&g, |x| Complex64::from_polar(1.0, xi0 * x)).unwrap();
        let t = 0.1;
        let m = 257usize;
        let times: Vec<f64> = (0..m).map(|i| t * i as f64 / (m - 1) as f64).collect();
        let states = vec![f.clone(); m];
        let src = Trajectory::new(times, states).unwrap();
        let got = duhamel(&src, t).unwrap();
        // exact: f * e^{-iwt} (e^{iwt} - 1)/(iw) with w = xi0^2
        let w = xi0 * xi0;
        let exact_factor = ((Complex64::i() * w * t).exp() - Complex64::ONE)
            / (Complex64::i() * w)
            * (-Complex64::i() * w * t).exp();
        let want = f.scale(exact_factor);
        let err = got.sub(&want).unwrap().l2_norm() / want.l2_norm();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn duhamel_all_instants_agrees_with_pointwise_form() {
        let g = Grid1D::new(64, 4.0).unwrap();
        let m = 17usize;
        let t_end = 0.3;
        let times: Vec<f64> = (0..m).map(|i| t_end * i as f64 / (m - 1) as f64).collect();
        let states: Vec<Field> = (0..m).map(|i| seeded_field(&g, i as u64)).collect();
        let src = Trajectory::new(times.clone(), states).unwrap();
        let all = duhamel_all_instants(&src);
        for (j, &t) in times.iter().enumerate().step_by(4) {
            let direct = duhamel(&src, t).unwrap();
            let err = all[j].sub(&direct).unwrap().l2_norm();
            let scale = direct.l2_norm().max(1e-12);
            assert!(err / scale < 1e-12, "instant {j}: {}", err / scale);
        }
    }

    #[test]
    fn duhamel_trapezoid_order_is_two() {
        let g = Grid1D::new(64, 4.0).unwrap();
        let t = 0.2;
        let make_src = |m: usize| {
            let times: Vec<f64> = (0..m).map(|i| t * i as f64 / (m - 1) as f64).collect();
            let states: Vec<Field> = times
                .iter()
                .map(|&tau| {
                    Field::from_fn(&g, |x| {
                        Complex64::new((x * 0.7 + tau).sin() * (-x * x / 4.0).exp(), tau * 0.3)
                    })
                    .unwrap()
                })
                .collect();
            Trajectory::new(times, states).unwrap()
        };
        let fine = duhamel(&make_src(513), t).unwrap();
        let e1 = duhamel(&make_src(17), t).unwrap().sub(&fine).unwrap().l2_norm();
        let e2 = duhamel(&make_src(33), t).unwrap().sub(&fine).unwrap().l2_norm();
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "observed order {order}");
    }

    #[test]
    fn duhamel_solves_inhomogeneous_equation() {
        // u = e^{it d^2} phi + Duh(F): residual of i u_t + u_xx - iF -> O(dt)
        let g = Grid1D::new(128, 8.0).unwrap();
        let phi = Field::gaussian(&g, 1.0, 0.0, 1.0, 0.0).unwrap();
        let t_end = 0.2;
        let m = 129usize;
        let times: Vec<f64> = (0..m).map(|i| t_end * i as f64 / (m - 1) as f64).collect();
        let f_src: Vec<Field> = times
            .iter()
            .map(|&tau| {
                Field::from_fn(&g, |x| {
                    Complex64::new(
                        (-x * x / 2.0).exp() * (1.0 + tau),
                        (-x * x / 3.0).exp() * tau,
                    )
                })
                .unwrap()
            })
            .collect();
        let src = Trajectory::new(times.clone(), f_src.clone()).unwrap();
        let u: Vec<Field> = times
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                free_evolve(&phi, t)
                    .add(&duhamel(&src, times[i]).unwrap())
                    .unwrap()
            })
            .collect();
        // centered residual at an interior instant
        let j = m / 2;
        let dt = times[1] - times[0];
        let ut = u[j + 1]
            .sub(&u[j - 1])
            .unwrap()
            .scale(Complex64::new(0.0, 1.0 / (2.0 * dt)));
        let uxx = second_derivative(&u[j]);
        let mut resid = ut.add(&uxx).unwrap();
        resid = resid
            .sub(&f_src[j].scale(Complex64::i()))
            .unwrap();
        let rel_resid = resid.l2_norm() / u[j].l2_norm();
        assert!(rel_resid < 0.02, "residual {rel_resid} at dt={dt}");
    }

    #[test]
    fn evolution_commutes_with_frequency_projection() {
        let g = Grid1D::new(256, 8.0).unwrap();
        let f = seeded_field(&g, 8);
        let t = 0.7;
        let hat = dft(&free_evolve(&f, t));
        let hat2 = dft(&f);
        // multiplier acts bin-by-bin: evolved spectrum = phase * spectrum
        let phases = crate::fourier::schroedinger_phases(&g, t);
        for k in 0..g.n_points() {
            let want = hat2.values()[k] * phases[k];
            let got = hat.values()[k];
            assert!((got - want).norm() <= 1e-12 * f.l2_norm());
        }
    }

    #[test]
    fn growth_probe_single_time_is_one() {
        let g = Grid1D::new(256, 10.0).unwrap();
        let w = Window::gaussian(&g).unwrap();
        let f = Field::gaussian(&g, 1.0, 0.0, 1.0, 0.0).unwrap();
        let probe = growth_exponent_probe(&f, 4.0, &[0.0], &w).unwrap();
        assert!(rel(probe.least_c, 1.0) < 1e-12);
    }

    #[test]
    fn single_bin_probe_has_constant_norm() {
        // one frequency bin: free evolution is a global phase, so every
        // norm is time-invariant and the least constant is 1
        let g = Grid1D::new(256, 10.0).unwrap();
        let w = Window::gaussian(&g).unwrap();
        let xi0 = g.xi(5);
        let f = Field::from_fn(&g, |x| Complex64::from_polar(1.0, xi0 * x)).unwrap();
        let probe = growth_exponent_probe(&f, 4.0, &[0.0, 0.5, 1.0, 2.0], &w).unwrap();
        assert!(probe.least_c <= 1.0 + 1e-9, "{}", probe.least_c);
        let spread = probe
            .samples
            .iter()
            .map(|s| s.norm)
            .fold((f64::INFINITY, 0.0f64), |acc, v| (acc.0.min(v), acc.1.max(v)));
        assert!((spread.1 - spread.0) / spread.1 < 1e-9);
    }

    #[test]
    fn strichartz_probe_basics() {
        let g = Grid1D::new(256, 10.0).unwrap();
        let pair = AdmissiblePair::new(Ratio::from_integer(4), Ratio::from_integer(8)).unwrap();
        assert_eq!(strichartz_probe(&Field::zero(&g), &pair, 0.25, 16).unwrap(), 0.0);
        let f = Field::gaussian(&g, 1.0, 0.0, 1.0, 0.0).unwrap();
        let a = strichartz_probe(&f, &pair, 0.25, 32).unwrap();
        let b = strichartz_probe(&f.scale(Complex64::new(10.0, 0.0)), &pair, 0.25, 32).unwrap();
        assert!(rel(a, b) < 1e-12, "homogeneity: {a} vs {b}");
        assert!(a > 0.0);
    }

    #[test]
    fn l2_norm_of_evolution_in_lebesgue_form() {
        // sanity: lebesgue_norm(2) of evolved field equals l2_norm
        let g = Grid1D::new(128, 8.0).unwrap();
        let f = seeded_field(&g, 13);
        let e = free_evolve(&f, 0.3);
        assert!(rel(lebesgue_norm(&e, 2.0).unwrap(), e.l2_norm()) < 1e-15);
    }
}
