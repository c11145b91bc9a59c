//! Choice of `Q`, the constant `M_0`, the step schedule `(M_k, delta_N^(k))`,
//! and the divergence predicates.
//!
//! Two divergence-flavored inequalities appear: the quadratic-in-`Q` form
//!
//! `(6r - r^2) Q^2 > 2 alpha [ (11r^2 - 19r + 6) Q^2 - 14 r^2 Q - 24 r^2 ]`
//!
//! used to pick `Q`, and the product form
//!
//! `[1 + alpha (2Qr - 4r - 2Q)/(Qr)] [1 - 6(r-2)Q/(5Qr - 6Q - 12r)] - 4 alpha > 0`
//!
//! that the step-sum divergence actually needs. Expanding exactly:
//!
//! `product_form * Qr (5Qr - 6Q - 12r) = quadratic_lhs - 12 r^2 Q`,
//!
//! so the two agree in the `Q -> infinity` limit but are NOT equivalent at
//! finite `Q`; the quadratic form is weaker by the `12 r^2 Q` term. Both are
//! evaluated exactly and reported side by side wherever they matter.

use super::exponents::{Tsu1Exponents, Tsu2Exponents};
use super::{rat, rat_int, rat_to_f64, Rat};
use crate::dd::Dd;
use crate::{Error, Result};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Precision used for the irrational-power evaluations in the schedule.
pub const PRECISION_NOTE: &str = "double-double (~31 significant digits)";

/// Calibrated constants feeding `M_0`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProofConstants {
    pub c_e: f64,
    pub c_i: f64,
    pub k1: f64,
    pub k2: f64,
    pub c_q: f64,
}

impl ProofConstants {
    pub fn all_positive(&self) -> bool {
        self.c_e > 0.0 && self.c_i > 0.0 && self.k1 > 0.0 && self.k2 > 0.0 && self.c_q > 0.0
    }
}

/// `alpha_max(r) = (6r - r^2)/(22r^2 - 38r + 12)`; accepts the closed
/// interval `[3, 4]` so the corner value at `r = 3` can be probed.
pub fn alpha_max(r: &Rat) -> Result<Rat> {
    if *r < rat_int(3) || *r > rat_int(4) {
        return Err(Error::Hypothesis(format!("alpha_max needs r in [3, 4], got {r}")));
    }
    let num = rat_int(6) * r - r.clone() * r;
    let den = rat_int(22) * r * r - rat_int(38) * r + rat_int(12);
    Ok(num / den)
}

/// Left side minus right side of the quadratic-in-`Q` inequality; positive
/// means it holds.
pub fn lim_lhs(q: &Rat, r: &Rat, alpha: &Rat) -> Rat {
    let lhs = (rat_int(6) * r - r.clone() * r) * q * q;
    let bracket = (rat_int(11) * r * r - rat_int(19) * r + rat_int(6)) * q * q
        - rat_int(14) * r * r * q
        - rat_int(24) * r * r;
    lhs - rat_int(2) * alpha * bracket
}

pub fn lim_holds(q: &Rat, r: &Rat, alpha: &Rat) -> bool {
    lim_lhs(q, r, alpha).is_positive()
}

/// Exact value of the product-form divergence expression.
pub fn fin_value(q: &Rat, r: &Rat, alpha: &Rat) -> Rat {
    let qr = q.clone() * r;
    let first = rat_int(1)
        + alpha.clone() * (rat_int(2) * &qr - rat_int(4) * r - rat_int(2) * q) / &qr;
    let den = rat_int(5) * &qr - rat_int(6) * q - rat_int(12) * r;
    let second = rat_int(1) - rat_int(6) * (r.clone() - rat_int(2)) * q / den;
    first * second - rat_int(4) * alpha
}

/// The exact corrected quadratic form: `lim_lhs - 12 r^2 Q`, which IS
/// equivalent to the product form (same sign, positive scaling).
pub fn corrected_lim_lhs(q: &Rat, r: &Rat, alpha: &Rat) -> Rat {
    lim_lhs(q, r, alpha) - rat_int(12) * r * r * q
}

fn structural_gates(q: &Rat, r: &Rat) -> bool {
    // Tsu hypotheses, positivity of 5Qr - 6Q - 12r, and beta in (0, 1)
    if Tsu1Exponents::new(q.clone(), r.clone()).is_err() {
        return false;
    }
    if Tsu2Exponents::new(q.clone(), r.clone()).is_err() {
        return false;
    }
    let pos = rat_int(5) * q * r - rat_int(6) * q - rat_int(12) * r;
    if !pos.is_positive() {
        return false;
    }
    let beta = rat_int(6) * (r.clone() - rat_int(2)) * q / &pos;
    beta.is_positive() && beta < rat_int(1)
}

/// Least integer `Q` passing the whole gate list: the quadratic divergence
/// inequality, both exponent-table hypothesis sets, `5Qr - 6Q - 12r > 0`,
/// and the summation exponent `beta in (0, 1)`.
pub fn choose_q(r: &Rat, alpha: &Rat) -> Result<u32> {
    validate_r_alpha(r, alpha)?;
    for q_int in 2u32..100_000 {
        let q = rat_int(q_int as i64);
        if structural_gates(&q, r) && lim_holds(&q, r, alpha) {
            return Ok(q_int);
        }
    }
    Err(Error::Hypothesis("no feasible Q below 100000".into()))
}

/// Least integer `Q` for which the product-form divergence expression is
/// also positive. Strictly larger than `choose_q` in general because of the
/// `12 r^2 Q` discrepancy between the two predicates.
pub fn least_q_divergent(r: &Rat, alpha: &Rat) -> Result<u32> {
    validate_r_alpha(r, alpha)?;
    for q_int in 2u32..1_000_000 {
        let q = rat_int(q_int as i64);
        if structural_gates(&q, r) && lim_holds(&q, r, alpha) && fin_value(&q, r, alpha).is_positive()
        {
            return Ok(q_int);
        }
    }
    Err(Error::Hypothesis("no divergence-positive Q below 1000000".into()))
}

fn validate_r_alpha(r: &Rat, alpha: &Rat) -> Result<()> {
    if *r <= rat_int(3) || *r > rat_int(4) {
        return Err(Error::Hypothesis(format!("need r in (3, 4], got {r}")));
    }
    let amax = alpha_max(r)?;
    if !alpha.is_positive() || *alpha >= amax {
        return Err(Error::Hypothesis(format!(
            "need alpha in (0, {amax}), got {alpha}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceReport {
    /// Sign of the product-form expression (the true divergence condition).
    pub fin_positive: bool,
    /// f64 value of the product-form expression.
    pub fin_margin: f64,
    /// Whether the quadratic-in-Q form used to pick `Q` holds.
    pub lim_positive: bool,
    /// Exact agreement of the two predicates at this point.
    pub predicates_agree: bool,
}

/// Evaluate both divergence predicates exactly at `(Q, r, alpha)`.
pub fn divergence_check(q: u32, r: &Rat, alpha: &Rat) -> DivergenceReport {
    let qr = rat_int(q as i64);
    let fin = fin_value(&qr, r, alpha);
    let fin_positive = fin.is_positive();
    let lim_positive = lim_holds(&qr, r, alpha);
    DivergenceReport {
        fin_positive,
        fin_margin: rat_to_f64(&fin),
        lim_positive,
        predicates_agree: fin_positive == lim_positive,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepOutcome {
    pub points: usize,
    pub agreements: usize,
    pub disagreements: usize,
    /// First `(Q, r, alpha)` with different truth values, if any (values as
    /// exact strings).
    pub first_counterexample: Option<(u32, String, String)>,
    /// Exact agreement count of the corrected quadratic form with the
    /// product form (expected: every point).
    pub corrected_agreements: usize,
    /// Count of points where the product form holds but the quadratic fails
    /// (expected zero: the product form is strictly stronger).
    pub fin_without_lim: usize,
}

/// Sweep the admissible region and compare the two divergence predicates in
/// exact arithmetic, point by point. `Q` is taken from `choose_q` at each
/// sampled `(r, alpha)` plus small offsets, the regime the scheme runs in.
pub fn fin_lim_agreement_sweep(points: usize, seed: u64) -> SweepOutcome {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let mut rng = StdRng::seed_from_u64(seed);
    let mut outcome = SweepOutcome {
        points: 0,
        agreements: 0,
        disagreements: 0,
        first_counterexample: None,
        corrected_agreements: 0,
        fin_without_lim: 0,
    };
    while outcome.points < points {
        // r in (3, 4] rational with a modest denominator
        let den = rng.random_range(2..40i64);
        let num = rng.random_range(3 * den + 1..=4 * den);
        let r = rat(num, den);
        let amax = alpha_max(&r).expect("r in range");
        // alpha = amax * u with u in (0.05, 0.95), rationalized
        let u_den = rng.random_range(20..400i64);
        let u_num = rng.random_range(u_den / 20 + 1..u_den * 19 / 20);
        let alpha = amax.clone() * rat(u_num, u_den);
        if !alpha.is_positive() || alpha >= amax {
            continue;
        }
        let q_base = match choose_q(&r, &alpha) {
            Ok(q) => q,
            Err(_) => continue,
        };
        for dq in [0u32, 1, 3, 10] {
            if outcome.points >= points {
                break;
            }
            let q_int = q_base + dq;
            let q = rat_int(q_int as i64);
            if !structural_gates(&q, &r) {
                continue;
            }
            outcome.points += 1;
            let fin = fin_value(&q, &r, &alpha);
            let lim = lim_lhs(&q, &r, &alpha);
            let fin_pos = fin.is_positive();
            let lim_pos = lim.is_positive();
            if fin_pos == lim_pos {
                outcome.agreements += 1;
            } else {
                outcome.disagreements += 1;
                if outcome.first_counterexample.is_none() {
                    outcome.first_counterexample =
                        Some((q_int, r.to_string(), alpha.to_string()));
                }
            }
            if fin_pos && !lim_pos {
                outcome.fin_without_lim += 1;
            }
            let corrected = corrected_lim_lhs(&q, &r, &alpha);
            if corrected.is_positive() == fin_pos {
                outcome.corrected_agreements += 1;
            }
        }
    }
    outcome
}

/// Per-inequality minimal `M_0` values; the chosen `M_0` is their max with
/// 1.05 headroom.
#[derive(Debug, Clone, Serialize)]
pub struct M0Breakdown {
    pub from_first: f64,
    pub from_second: f64,
    pub from_third: f64,
    pub from_forth: f64,
    pub from_k2: f64,
    pub m0: f64,
}

/// Solve each of the four scheduling inequalities for its minimal `M_0` in
/// closed form, take the overall max (also against `k2^4 c0^4`), and add
/// 1.05 headroom.
pub fn compute_m0(constants: &ProofConstants, c0: f64, q: u32, r: &Rat) -> Result<M0Breakdown> {
    if !constants.all_positive() || !(c0 > 0.0) {
        return Err(Error::Hypothesis("calibrated constants must be positive".into()));
    }
    let qf = q as f64;
    let rf = rat_to_f64(r);
    let quarter_pow = |e: f64| 0.25f64.powf(e);
    let five_fourth_pow = |e: f64| 1.25f64.powf(e);
    let ProofConstants { c_e, c_i, k1, k2, c_q } = *constants;

    // exponents of M_0 in each inequality, exact then converted
    let e_second = {
        let num = r.clone() * rat_int(q as i64) - rat_int(q as i64) - rat_int(2) * r;
        let den = r.clone() * rat_int(q as i64);
        if !num.is_positive() {
            return Err(Error::Hypothesis("rQ - Q - 2r <= 0".into()));
        }
        rat_to_f64(&(num / den))
    };
    let e_third = {
        let num = rat_int(3 * q as i64) * r - rat_int(4) * r - rat_int(2 * q as i64);
        let den = rat_int(4 * q as i64) * r;
        if !num.is_positive() {
            return Err(Error::Hypothesis("3Qr - 4r - 2Q <= 0".into()));
        }
        rat_to_f64(&(num / den))
    };
    let e_forth = {
        let num = rat_int(5 * q as i64) * r - rat_int(6 * q as i64) - rat_int(12) * r;
        let den = rat_int(4 * q as i64) * r;
        if !num.is_positive() {
            return Err(Error::Hypothesis("5Qr - 6Q - 12r <= 0".into()));
        }
        rat_to_f64(&(num / den))
    };

    let from_first = (12.0 * c_q * k1 * k1 * c0 * c0).powi(2);
    let from_second = (27.0 * c_q * c0 * c0 * c_e * c_e * c_i * c_i
        * quarter_pow(2.0 / qf)
        * five_fourth_pow(1.0 - 2.0 / rf))
    .powf(1.0 / e_second);
    let from_third = (12.0 * c_q * k1 * k1 * c0.powi(3) * c_e * c_i
        * quarter_pow(1.0 / qf)
        * five_fourth_pow(0.5 - 1.0 / rf))
    .powf(1.0 / e_third);
    let from_forth = (27.0 * c_q * c0.powi(3) * c_e.powi(3) * c_i.powi(3)
        * quarter_pow(3.0 / qf)
        * five_fourth_pow(1.5 - 3.0 / rf))
    .powf(1.0 / e_forth);
    let from_k2 = (k2 * c0).powi(4);

    let m0 = 1.05
        * from_first
            .max(from_second)
            .max(from_third)
            .max(from_forth)
            .max(from_k2);
    let breakdown = M0Breakdown {
        from_first,
        from_second,
        from_third,
        from_forth,
        from_k2,
        m0,
    };
    debug_assert!(m0_satisfies(&breakdown, constants, c0, q, r));
    Ok(breakdown)
}

/// Replay the four inequalities at a candidate `M_0`.
pub fn m0_satisfies(b: &M0Breakdown, constants: &ProofConstants, c0: f64, q: u32, r: &Rat) -> bool {
    let qf = q as f64;
    let rf = rat_to_f64(r);
    let ProofConstants { c_e, c_i, k1, k2, c_q } = *constants;
    let m0 = b.m0;
    let first = 12.0 * c_q * k1 * k1 * c0 * c0 <= m0.sqrt();
    let e2 = (rf * qf - qf - 2.0 * rf) / (rf * qf);
    let second = 27.0 * c_q * c0 * c0 * c_e * c_e * c_i * c_i * 0.25f64.powf(2.0 / qf)
        <= m0.powf(e2) / 1.25f64.powf(1.0 - 2.0 / rf);
    let e3 = (3.0 * qf * rf - 4.0 * rf - 2.0 * qf) / (4.0 * qf * rf);
    let third = 12.0 * c_q * k1 * k1 * c0.powi(3) * c_e * c_i * 0.25f64.powf(1.0 / qf)
        <= m0.powf(e3) / 1.25f64.powf(0.5 - 1.0 / rf);
    let e4 = (5.0 * qf * rf - 6.0 * qf - 12.0 * rf) / (4.0 * rf * qf);
    let forth = 27.0 * c_q * c0.powi(3) * c_e.powi(3) * c_i.powi(3) * 0.25f64.powf(3.0 / qf)
        <= m0.powf(e4) / 1.25f64.powf(1.5 - 3.0 / rf);
    let k2_ok = m0 >= (k2 * c0).powi(4);
    first && second && third && forth && k2_ok
}

#[derive(Debug, Clone, Serialize)]
pub struct ScheduleRow {
    pub k: usize,
    pub m_k: f64,
    pub delta_k: f64,
    pub cumulative_time: f64,
}

/// Materialized step schedule.
#[derive(Debug, Clone, Serialize)]
pub struct Schedule {
    pub q: u32,
    pub r: String,
    pub alpha: String,
    pub n_param: f64,
    pub m0: f64,
    /// Summation exponent `beta = 6(r-2)Q/(5Qr - 6Q - 12r)` as exact string.
    pub beta: String,
    pub rows: Vec<ScheduleRow>,
    /// Theoretical step count `ceil(N^{1 + alpha (2Qr-4r-2Q)/(Qr)})`.
    pub steps_total: u64,
    pub divergence: DivergenceReport,
    pub precision: &'static str,
}

/// `beta` as an exact rational with i64 parts (numerator/denominator fit
/// comfortably for every admissible input).
fn beta_exponent(q: u32, r: &Rat) -> Result<(i64, i64)> {
    let qr = rat_int(q as i64);
    let num = rat_int(6) * (r.clone() - rat_int(2)) * &qr;
    let den = rat_int(5) * &qr * r - rat_int(6) * &qr - rat_int(12) * r;
    if !den.is_positive() {
        return Err(Error::Hypothesis("5Qr - 6Q - 12r <= 0".into()));
    }
    let beta = num / den;
    let (bn, bd) = (beta.numer().to_i64(), beta.denom().to_i64());
    match (bn, bd) {
        (Some(n), Some(d)) => Ok((n, d)),
        _ => Err(Error::Hypothesis("beta exponent overflowed i64".into())),
    }
}

/// `M_k = (5+k)^beta M_0 / 5^beta`, evaluated in double-double.
pub fn m_k(m0: f64, q: u32, r: &Rat, k: usize) -> Result<f64> {
    let (bn, bd) = beta_exponent(q, r)?;
    let base = (5.0 + k as f64) / 5.0;
    let e = Dd::from_f64(bn as f64).div(Dd::from_f64(bd as f64));
    Ok(Dd::from_f64(base).ln().mul(e).exp().mul_f64(m0).to_f64())
}

/// `delta_N^(k) = M_k^{-1} N^{-4 alpha}` in double-double.
pub fn delta_k(m0: f64, q: u32, r: &Rat, alpha: &Rat, n_param: f64, k: usize) -> Result<f64> {
    let mk = m_k(m0, q, r, k)?;
    let four_alpha = rat_int(4) * alpha;
    let (an, ad) = (four_alpha.numer().to_i64(), four_alpha.denom().to_i64());
    let (an, ad) = match (an, ad) {
        (Some(a), Some(d)) => (a, d),
        _ => return Err(Error::Hypothesis("alpha exponent overflowed i64".into())),
    };
    let n_pow = Dd::from_f64(n_param)
        .ln()
        .mul(Dd::from_f64(an as f64).div(Dd::from_f64(ad as f64)))
        .exp();
    Ok(Dd::from_f64(mk).mul(n_pow).recip().to_f64())
}

/// `ceil(N^{1 + alpha (2Qr - 4r - 2Q)/(Qr)})` with a near-integer snap so
/// exact powers (N = 1, alpha -> 0) do not overshoot by one.
pub fn steps_count(n_param: f64, q: u32, r: &Rat, alpha: &Rat) -> Result<u64> {
    if !(n_param >= 1.0) {
        return Err(Error::Hypothesis(format!("steps_count needs N >= 1, got {n_param}")));
    }
    let qr = rat_int(q as i64) * r;
    let exponent = rat_int(1)
        + alpha.clone() * (rat_int(2) * &qr - rat_int(4) * r - rat_int(2 * q as i64)) / &qr;
    let (en, ed) = (exponent.numer().to_i64(), exponent.denom().to_i64());
    let (en, ed) = match (en, ed) {
        (Some(a), Some(d)) => (a, d),
        _ => return Err(Error::Hypothesis("steps exponent overflowed i64".into())),
    };
    let value = Dd::from_f64(n_param)
        .ln()
        .mul(Dd::from_f64(en as f64).div(Dd::from_f64(ed as f64)))
        .exp()
        .to_f64();
    let nearest = value.round();
    if (value - nearest).abs() < 1e-9 * nearest.max(1.0) {
        return Ok(nearest as u64);
    }
    Ok(value.ceil() as u64)
}

impl Schedule {
    /// Materialize `M_k` and `delta_N^(k)` for `k = 0..k_cap`. Refuses when
    /// the first interval would violate `delta < 1/4`, reporting the minimal
    /// admissible `N`.
    pub fn build(
        m0: f64,
        q: u32,
        r: &Rat,
        alpha: &Rat,
        n_param: f64,
        k_cap: Option<usize>,
    ) -> Result<Schedule> {
        let steps_total = steps_count(n_param, q, r, alpha)?;
        let k_count = k_cap.unwrap_or(steps_total.min(1 << 20) as usize).max(1);
        // delta_0 is the largest interval; gate delta < 1/4 there
        let d0 = delta_k(m0, q, r, alpha, n_param, 0)?;
        if d0 >= 0.25 {
            // minimal N with M_0 N^{4 alpha} > 4
            let four_alpha = 4.0 * rat_to_f64(alpha);
            let n_min = (4.0 / m0).powf(1.0 / four_alpha);
            return Err(Error::DeltaTooLarge(n_min));
        }
        let mut rows = Vec::with_capacity(k_count);
        let mut cumulative = 0.0;
        let mut prev_m = 0.0;
        for k in 0..k_count {
            let mk = m_k(m0, q, r, k)?;
            let dk = delta_k(m0, q, r, alpha, n_param, k)?;
            if k > 0 && mk <= prev_m {
                return Err(Error::Hypothesis(format!("M_{k} = {mk} not above M_{} = {prev_m}", k - 1)));
            }
            prev_m = mk;
            cumulative += dk;
            rows.push(ScheduleRow {
                k,
                m_k: mk,
                delta_k: dk,
                cumulative_time: cumulative,
            });
        }
        let (bn, bd) = beta_exponent(q, r)?;
        Ok(Schedule {
            q,
            r: r.to_string(),
            alpha: alpha.to_string(),
            n_param,
            m0,
            beta: format!("{bn}/{bd}"),
            rows,
            steps_total,
            divergence: divergence_check(q, r, alpha),
            precision: PRECISION_NOTE,
        })
    }

    /// Sum of the scheduled interval lengths over the first
    /// `steps_count(N)` steps (the executable shadow of divergence).
    pub fn partial_time_sum(
        m0: f64,
        q: u32,
        r: &Rat,
        alpha: &Rat,
        n_param: f64,
    ) -> Result<f64> {
        let steps = steps_count(n_param, q, r, alpha)?;
        let mut total = 0.0;
        for k in 0..steps as usize {
            total += delta_k(m0, q, r, alpha, n_param, k)?;
        }
        Ok(total)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,M_k,delta_k,cumulative_time\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{:.17e},{:.17e},{:.17e}\n",
                row.k, row.m_k, row.delta_k, row.cumulative_time
            ));
        }
        out
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "Q": self.q,
            "M0": self.m0,
            "steps": self.steps_total,
            "divergence_margin": self.divergence.fin_margin,
            "divergence_positive": self.divergence.fin_positive,
            "beta": self.beta,
            "precision": self.precision,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn unit_constants() -> ProofConstants {
        ProofConstants {
            c_e: 1.0,
            c_i: 1.0,
            k1: 1.0,
            k2: 1.0,
            c_q: 1.0,
        }
    }

    #[test]
    fn alpha_max_pinned_values() {
        assert_eq!(alpha_max(&rat_int(3)).unwrap(), rat(3, 32));
        assert_eq!(alpha_max(&rat_int(4)).unwrap(), rat(2, 53));
        assert_eq!(alpha_max(&rat(7, 2)).unwrap(), rat(35, 594));
        assert!(alpha_max(&rat(5, 1)).is_err());
    }

    #[test]
    fn quadratic_ratio_tends_to_alpha_max() {
        // ratio of the two sides of the quadratic inequality at Q = 10^6
        // approaches alpha_max(r)
        let r = rat(7, 2);
        let q = rat_int(1_000_000);
        let num = (rat_int(6) * &r - r.clone() * &r) * &q * &q;
        let den = rat_int(2)
            * ((rat_int(11) * &r * &r - rat_int(19) * &r + rat_int(6)) * &q * &q
                - rat_int(14) * &r * &r * &q
                - rat_int(24) * &r * &r);
        let ratio = num / den;
        let amax = alpha_max(&r).unwrap();
        let relerr = rat_to_f64(&((ratio.clone() - &amax) / &amax)).abs();
        assert!(relerr < 1e-4, "{relerr}");
    }

    #[test]
    fn choose_q_pinned_examples() {
        assert_eq!(choose_q(&rat_int(4), &rat(3, 100)).unwrap(), 25);
        assert_eq!(choose_q(&rat(7, 2), &rat(1, 50)).unwrap(), 17);
        assert!(choose_q(&rat_int(4), &rat(2, 53)).is_err()); // alpha = alpha_max
    }

    #[test]
    fn product_form_is_strictly_stronger() {
        // identity: fin * Qr(5Qr - 6Q - 12r) = lim_lhs - 12 r^2 Q, so the
        // product form at the chosen Q can be negative while the quadratic
        // form holds; the flagship example (Q, r, alpha) = (25, 4, 3/100)
        // is exactly such a point
        let (q, r, alpha) = (rat_int(25), rat_int(4), rat(3, 100));
        assert!(lim_holds(&q, &r, &alpha));
        assert!(!fin_value(&q, &r, &alpha).is_positive());
        // exact identity check
        let scale = q.clone() * &r * (rat_int(5) * &q * &r - rat_int(6) * &q - rat_int(12) * &r);
        let lhs = fin_value(&q, &r, &alpha) * scale;
        let rhs = corrected_lim_lhs(&q, &r, &alpha);
        assert_eq!(lhs, rhs);
        // one-sided implication: product form positive => quadratic positive
        assert_eq!(least_q_divergent(&rat_int(4), &rat(3, 100)).unwrap(), 109);
        assert_eq!(least_q_divergent(&rat(7, 2), &rat(1, 50)).unwrap(), 25);
    }

    #[test]
    fn divergence_margin_vanishes_at_alpha_max_large_q() {
        let r = rat_int(4);
        let alpha = alpha_max(&r).unwrap();
        let report = divergence_check(1_000_000, &r, &alpha);
        assert!(report.fin_margin.abs() < 1e-3, "{}", report.fin_margin);
    }

    #[test]
    fn m0_from_first_inequality_alone() {
        // all constants 1, c0 = 1, (Q, r) = (25, 4): the first inequality
        // demands M_0 >= 144 and dominates
        let b = compute_m0(&unit_constants(), 1.0, 25, &rat_int(4)).unwrap();
        assert!(rel(b.from_first, 144.0) < 1e-12);
        assert!(b.m0 >= 144.0);
        assert!(m0_satisfies(&b, &unit_constants(), 1.0, 25, &rat_int(4)));
    }

    #[test]
    fn m0_monotone_in_c0() {
        let a = compute_m0(&unit_constants(), 1.0, 25, &rat_int(4)).unwrap();
        let b = compute_m0(&unit_constants(), 2.0, 25, &rat_int(4)).unwrap();
        assert!(b.m0 >= a.m0);
    }

    #[test]
    fn schedule_matches_high_precision_reference() {
        // M_3 and delta_3 at (M0, Q, r, alpha, N) = (200, 25, 4, 1/50, 10),
        // reference values from 40-digit arithmetic
        let r = rat_int(4);
        let alpha = rat(1, 50);
        let m3 = m_k(200.0, 25, &r, 3).unwrap();
        assert!(rel(m3, 319.0055143431419665) < 1e-14, "{m3}");
        let d3 = delta_k(200.0, 25, &r, &alpha, 10.0, 3).unwrap();
        assert!(rel(d3, 2.6073648689595211748e-3) < 1e-12, "{d3}");
    }

    #[test]
    fn m_k_strictly_increasing_over_100_steps() {
        let r = rat(7, 2);
        let mut prev = 0.0;
        for k in 0..100 {
            let mk = m_k(150.0, 17, &r, k).unwrap();
            assert!(mk > prev, "M_{k} = {mk} <= {prev}");
            prev = mk;
        }
    }

    #[test]
    fn deltas_below_quarter_and_monotone() {
        let r = rat(7, 2);
        let alpha = rat(1, 50);
        let sched = Schedule::build(150.0, 17, &r, &alpha, 4.0, Some(16)).unwrap();
        let mut prev = f64::INFINITY;
        for row in &sched.rows {
            assert!(row.delta_k < 0.25);
            assert!(row.delta_k < prev);
            prev = row.delta_k;
        }
    }

    #[test]
    fn schedule_refuses_oversized_deltas() {
        let r = rat(7, 2);
        let alpha = rat(1, 50);
        // M0 tiny: delta_0 = 1/(M0 N^{4a}) >= 1/4 at N = 1
        let err = Schedule::build(0.5, 17, &r, &alpha, 1.0, Some(4)).unwrap_err();
        match err {
            Error::DeltaTooLarge(n_min) => assert!(n_min > 1.0),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn steps_count_pinned_examples() {
        let r = rat_int(4);
        // N = 1 -> 1
        assert_eq!(steps_count(1.0, 25, &r, &rat(1, 50)).unwrap(), 1);
        // alpha -> 0: exponent collapses to 1, count = N
        assert_eq!(steps_count(10.0, 25, &r, &rat(1, 1_000_000_000)).unwrap(), 10);
        // (Q, r, alpha, N) = (25, 4, 1/50, 10): exponent 1 + 134/5000,
        // 10^{1.0268} = 10.636 -> 11
        assert_eq!(steps_count(10.0, 25, &r, &rat(1, 50)).unwrap(), 11);
    }

    #[test]
    fn partial_sums_grow_across_n_doublings() {
        let r = rat(7, 2);
        let alpha = rat(1, 50);
        let mut prev = 0.0;
        for n in [4.0, 8.0, 16.0, 32.0, 64.0] {
            let s = Schedule::partial_time_sum(150.0, 17, &r, &alpha, n).unwrap();
            assert!(s > prev, "S({n}) = {s} <= {prev}");
            prev = s;
        }
    }

    #[test]
    fn agreement_sweep_reports_the_defect() {
        let sweep = fin_lim_agreement_sweep(60, 12345);
        // the corrected quadratic form tracks the product form everywhere
        assert_eq!(sweep.corrected_agreements, sweep.points);
        // the product form never holds without the quadratic form
        assert_eq!(sweep.fin_without_lim, 0);
        // and the two printed predicates genuinely disagree somewhere
        assert!(sweep.disagreements > 0, "expected at least one counterexample");
    }
}
