//! The full verification suite: one criterion per numbered acceptance item,
//! each reduced to named checks with pinned tolerances. `cmd_verify` prints
//! one line per criterion and exits nonzero if any verdict failed; the
//! `acceptance` integration test asserts the same results.

use crate::calibrate::{self, CalibrationInputs, CalibrationReport};
use crate::config::RunConfig;
use crate::engine::{picard_solve_perturbed, solve_cubic_nls, Nonlinearity, PicardConfig, SplitStepConfig};
use crate::field::{lebesgue_norm, Field};
use crate::fourier::{dft, idft};
use crate::grid::Grid1D;
use crate::modnorm::{modulation_norm, modulation_norm_fud, ModulationNormSpec};
use crate::oracle;
use crate::orchestrator::{compare_with_direct, run_scheme, SchemeParams, SolverSettings};
use crate::propagator::{free_evolve, growth_exponent_probe};
use crate::scheduler::{
    self, alpha_max, choose_q, compute_m0, fin_lim_agreement_sweep, rat, rat_int, Rat, Schedule,
    Tsu1Exponents, Tsu2Exponents,
};
use crate::splitter::{self, p_of_rational, split, SplitStrategy};
use crate::stft::{stft, Window};
use crate::trajectory::Trajectory;
use crate::Result;
use num_complex::Complex64;
use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::sync::Arc;

/// Roof for the measured band of STFT-norm / frequency-decomposition-norm
/// ratios over the probe corpus. The two realizations differ by window and
/// quadrature conventions; the measured band at the shipped corpus sits
/// well inside [1, 8], and a ratio spread beyond this roof would mean one
/// implementation is broken rather than differently normalized.
pub const EQUIVALENCE_BAND_ROOF: f64 = 25.0;

#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: String,
    pub passed: bool,
    pub lines: Vec<CheckLine>,
}

impl CriterionResult {
    fn new(id: usize, title: &str) -> Self {
        CriterionResult {
            id,
            title: title.into(),
            passed: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.passed &= passed;
        self.lines.push(CheckLine {
            name: name.into(),
            passed,
            detail,
        });
    }

    pub fn summary_line(&self) -> String {
        format!(
            "[{}] criterion {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title
        )
    }

    pub fn failed_lines(&self) -> Vec<String> {
        self.lines
            .iter()
            .filter(|l| !l.passed)
            .map(|l| format!("  [FAIL] {}: {}", l.name, l.detail))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub criteria: Vec<CriterionResult>,
    pub all_passed: bool,
    pub config_hash: String,
    pub calibration: CalibrationReport,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Random admissible `(q, r)` for the exponent tables: `q > 3` and
/// `max(3, 2q/(q-2)) < r < min(q, 4q/(q-2))`, both rational.
fn random_admissible_qr(rng: &mut StdRng) -> (Rat, Rat) {
    loop {
        let qd = rng.random_range(1..12i64);
        let qn = rng.random_range(4 * qd..30 * qd);
        let q = rat(qn, qd);
        if q <= rat_int(3) {
            continue;
        }
        let two = rat_int(2);
        let lower = {
            let c = two.clone() * &q / (q.clone() - &two);
            if c > rat_int(3) {
                c
            } else {
                rat_int(3)
            }
        };
        let upper = {
            let c = rat_int(4) * &q / (q.clone() - &two);
            if c < q {
                c
            } else {
                q.clone()
            }
        };
        if lower >= upper {
            continue;
        }
        // r = lower + u (upper - lower), u in (0.1, 0.9) rational
        let ud = rng.random_range(10..60i64);
        let un = rng.random_range(ud / 10 + 1..ud * 9 / 10);
        let r = lower.clone() + rat(un, ud) * (upper.clone() - &lower);
        if r > lower && r < upper && r < rat_int(6) && r > rat_int(3) {
            return (q, r);
        }
    }
}

/// Criterion 1: the exact algebra suite.
pub fn criterion_1_exact_algebra(seed: u64) -> CriterionResult {
    let mut c = CriterionResult::new(1, "exact exponent algebra");

    // pinned corner values
    let p = p_of_rational(rat_int(3), rat(3, 32));
    c.check(
        "p(3, 3/32) = 35/17",
        p.as_ref().map(|v| *v == rat(35, 17)).unwrap_or(false),
        format!("{p:?}"),
    );
    let am = alpha_max(&rat_int(3));
    c.check(
        "alpha_max(3) = 3/32",
        am.as_ref().map(|v| *v == rat(3, 32)).unwrap_or(false),
        format!("{am:?}"),
    );

    // Hölder identities on 50 random admissible pairs, exact
    let mut rng = StdRng::seed_from_u64(seed);
    let mut all_sums_exact = true;
    let mut chains_b2 = true; // B2 = beta2 (printed, true)
    let mut chains_b1 = true; // B1 = 2 beta1 (printed, misattached)
    let mut chains_corrected = true; // B2 = 2 beta1
    let mut tilde_sums_exact = true;
    let mut tilde_gamma_chain = true; // gamma~ = 2 beta1~ (printed, misattached)
    let mut tilde_corrected = true; // B2~ = beta2~ = 2 beta1~
    let one = Rat::one();
    for _ in 0..50 {
        let (q, r) = random_admissible_qr(&mut rng);
        let t1 = match Tsu1Exponents::new(q.clone(), r.clone()) {
            Ok(t) => t,
            Err(e) => {
                all_sums_exact = false;
                c.check("tsu1 construction", false, format!("({q}, {r}): {e}"));
                continue;
            }
        };
        all_sums_exact &= t1.b1.recip() + t1.b2.recip() + t1.b3.recip() == one;
        all_sums_exact &= t1.beta1.recip() + t1.beta2.recip() + t1.beta3.recip() == one;
        chains_b2 &= t1.b2 == t1.beta2;
        chains_b1 &= t1.b1 == rat_int(2) * &t1.beta1;
        chains_corrected &= t1.b2 == rat_int(2) * &t1.beta1;
        let t2 = match Tsu2Exponents::new(q.clone(), r.clone()) {
            Ok(t) => t,
            Err(e) => {
                tilde_sums_exact = false;
                c.check("tsu2 construction", false, format!("({q}, {r}): {e}"));
                continue;
            }
        };
        tilde_sums_exact &= t2.b1.recip() + t2.b2.recip() + t2.b3.recip() == one;
        tilde_sums_exact &= t2.beta1.recip() + t2.beta2.recip() + t2.beta3.recip() == one;
        tilde_gamma_chain &= t2.gamma_tilde == rat_int(2) * &t2.beta1;
        tilde_corrected &= t2.b2 == t2.beta2 && t2.b2 == rat_int(2) * &t2.beta1;
    }
    c.check(
        "Hölder sums 1/B1+1/B2+1/B3 = 1 and 1/b1+1/b2+1/b3 = 1, 50 random pairs, exact",
        all_sums_exact,
        "both triples sum to 1 in exact rationals".into(),
    );
    c.check(
        "tilde Hölder sums exact",
        tilde_sums_exact,
        "both tilde triples sum to 1 in exact rationals".into(),
    );
    c.check("B2 = beta2 exact", chains_b2, "as printed".into());
    c.check(
        "B1 = 2 beta1 exact (as printed)",
        chains_b1,
        "printed chain attaches '= 2 beta1' to the wrong line: the Hölder \
         constraints force B2 = 2 beta1 (verified exact below); B1 = 2 beta1 \
         would need q(r-2) = 2r, the boundary of the admissible region"
            .into(),
    );
    c.check(
        "corrected chain B2 = 2 beta1 exact",
        chains_corrected,
        "holds at every sampled pair".into(),
    );
    c.check(
        "gamma~ = 2 beta1~ exact (as printed)",
        tilde_gamma_chain,
        "printed chain misattached: 2 gamma~ beta1~ = q forces \
         B2~ = beta2~ = 2 beta1~, and gamma~ = 2 beta1~ would pin q = 16r^2/(5r-6)^2"
            .into(),
    );
    c.check(
        "corrected chain B2~ = beta2~ = 2 beta1~ exact",
        tilde_corrected,
        "holds at every sampled pair".into(),
    );

    // divergence predicates on a 200-point sweep
    let sweep = fin_lim_agreement_sweep(200, seed.wrapping_add(99));
    c.check(
        "product form (fin) <=> quadratic form (lim) on 200-point sweep, exact",
        sweep.disagreements == 0,
        format!(
            "{} of {} points disagree (first: Q={}, r={}, alpha={}); exact identity \
             fin * Qr(5Qr-6Q-12r) = lim_lhs - 12 r^2 Q makes the quadratic form \
             weaker by the 12 r^2 Q term, so equivalence fails at finite Q",
            sweep.disagreements,
            sweep.points,
            sweep
                .first_counterexample
                .as_ref()
                .map(|c| c.0.to_string())
                .unwrap_or_default(),
            sweep
                .first_counterexample
                .as_ref()
                .map(|c| c.1.clone())
                .unwrap_or_default(),
            sweep
                .first_counterexample
                .as_ref()
                .map(|c| c.2.clone())
                .unwrap_or_default(),
        ),
    );
    c.check(
        "corrected equivalence (lim_lhs - 12 r^2 Q > 0) <=> (fin) on the sweep, exact",
        sweep.corrected_agreements == sweep.points,
        format!("{} of {} agree", sweep.corrected_agreements, sweep.points),
    );
    c.check(
        "one-sided implication (fin) => (lim) on the sweep, exact",
        sweep.fin_without_lim == 0,
        "the product form is strictly stronger".into(),
    );
    c
}

/// Criterion 2: scheduler behavior.
pub fn criterion_2_scheduler(cfg: &RunConfig, m0: f64) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(2, "scheduler");
    let mut rng = StdRng::seed_from_u64(cfg.calibration.seed.wrapping_add(2));

    // choose_Q against the independent brute-force scan on 50 random (r, alpha)
    let mut all_match = true;
    let mut mismatches = Vec::new();
    for _ in 0..50 {
        let rd = rng.random_range(2..30i64);
        let rn = rng.random_range(3 * rd + 1..=4 * rd);
        let r = rat(rn, rd);
        let amax = alpha_max(&r)?;
        let ud = rng.random_range(10..200i64);
        let un = rng.random_range(1..ud * 9 / 10);
        let alpha = amax * rat(un, ud);
        let chosen = choose_q(&r, &alpha)?;
        let scanned = oracle::brute_force_least_q(&r, &alpha, 100_000);
        if scanned != Some(chosen) {
            all_match = false;
            mismatches.push(format!("(r={r}, alpha={alpha}): {chosen} vs {scanned:?}"));
        }
    }
    c.check(
        "choose_Q equals brute-force least-Q on 50 random (r, alpha)",
        all_match,
        if mismatches.is_empty() {
            "all agree".into()
        } else {
            mismatches.join("; ")
        },
    );

    let r = cfg.r_rational()?;
    let alpha = cfg.alpha_rational()?;
    let q = match cfg.q_override() {
        Some(q) => q,
        None => choose_q(&r, &alpha)?,
    };

    // M_k strictly increasing
    let mut increasing = true;
    let mut prev = 0.0;
    for k in 0..100 {
        let mk = scheduler::m_k(m0, q, &r, k)?;
        increasing &= mk > prev;
        prev = mk;
    }
    c.check(
        "M_k strictly increasing over k = 0..99",
        increasing,
        format!("M_99 = {prev:.6e}"),
    );

    // every delta < 1/4
    let sched = Schedule::build(m0, q, &r, &alpha, cfg.params.n, Some(64))?;
    let max_delta = sched.rows.iter().map(|row| row.delta_k).fold(0.0, f64::max);
    c.check(
        "every delta_N^(k) < 1/4",
        max_delta < 0.25,
        format!("max delta = {max_delta:.3e}"),
    );

    // executable divergence shadow: partial sums strictly increasing
    let mut prev_sum = 0.0;
    let mut sums_increasing = true;
    let mut sums = Vec::new();
    for n in [4.0, 8.0, 16.0, 32.0, 64.0] {
        let s = Schedule::partial_time_sum(m0, q, &r, &alpha, n)?;
        sums_increasing &= s > prev_sum;
        sums.push(format!("S({n}) = {s:.6e}"));
        prev_sum = s;
    }
    c.check(
        "partial time sums S(N) strictly increasing over N = 4, 8, 16, 32, 64",
        sums_increasing,
        sums.join(", "),
    );
    Ok(c)
}

/// Criterion 3: the analysis core.
pub fn criterion_3_analysis_core(cfg: &RunConfig, calibration: &CalibrationReport) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(3, "analysis core (transforms and norms)");
    let seed = cfg.calibration.seed;
    let grid = Grid1D::new(2048, 16.0)?;

    // DFT unitarity and inversion at 1e-13
    let mut worst_parseval = 0.0f64;
    let mut worst_inverse = 0.0f64;
    for s in 0..5 {
        let f = calibrate::seeded_field(&grid, seed.wrapping_add(s));
        let hat = dft(&f);
        worst_parseval = worst_parseval.max(rel(hat.l2_norm(), f.l2_norm()));
        let back = idft(&hat);
        worst_inverse =
            worst_inverse.max(back.sub(&f)?.l2_norm() / f.l2_norm());
    }
    c.check(
        "DFT unitarity within 1e-13",
        worst_parseval < 1e-13,
        format!("worst Parseval deviation {worst_parseval:.3e}"),
    );
    c.check(
        "idft(dft(f)) = f within 1e-13",
        worst_inverse < 1e-13,
        format!("worst inversion error {worst_inverse:.3e}"),
    );

    // free evolution: isometry at 1e-13, group law at 1e-12
    let mut worst_iso = 0.0f64;
    let mut worst_group = 0.0f64;
    for s in 0..3 {
        let f = calibrate::seeded_field(&grid, seed.wrapping_add(10 + s));
        for t in [0.1, 1.0, 10.0] {
            worst_iso = worst_iso.max(rel(free_evolve(&f, t).l2_norm(), f.l2_norm()));
        }
        for (a, b) in [(0.1, 0.3), (1.0, 2.0), (4.0, 6.0)] {
            let x = free_evolve(&free_evolve(&f, a), b);
            let y = free_evolve(&f, a + b);
            worst_group = worst_group.max(x.sub(&y)?.l2_norm() / f.l2_norm());
        }
    }
    c.check(
        "free evolution is an L^2 isometry within 1e-13",
        worst_iso < 1e-13,
        format!("worst deviation {worst_iso:.3e}"),
    );
    c.check(
        "free evolution group law within 1e-12",
        worst_group < 1e-12,
        format!("worst composition error {worst_group:.3e}"),
    );

    // Gaussian L^2 norm = pi^(1/4) within 1e-8
    let gauss = Field::gaussian(&grid, 1.0, 0.0, 1.0, 0.0)?;
    let l2 = gauss.l2_norm();
    let want = std::f64::consts::PI.powf(0.25);
    c.check(
        "Gaussian L^2 norm = pi^(1/4) within 1e-8",
        rel(l2, want) < 1e-8,
        format!("{l2:.15} vs {want:.15}"),
    );

    // STFT against direct quadrature at 25 probe points, 1e-8 absolute
    let window = Window::gaussian(&grid)?;
    let matrix = stft(&gauss, &window)?;
    let norm_win = 1.0 / std::f64::consts::PI.powf(0.25);
    let f_fn = |y: f64| Complex64::new((-0.5 * y * y).exp(), 0.0);
    let g_fn = move |y: f64| Complex64::new(norm_win * (-0.5 * y * y).exp(), 0.0);
    let mut worst_stft = 0.0f64;
    let n = grid.n_points();
    let mut rng = StdRng::seed_from_u64(seed.wrapping_add(31));
    for _ in 0..25 {
        let j = rng.random_range(n / 4..3 * n / 4);
        let k = rng.random_range(0..n);
        let x = grid.x(j);
        let xi = grid.xi(k);
        if xi.abs() > 12.0 {
            // quadrature oracle resolution budget; transform is ~1e-40 there
            continue;
        }
        let got = matrix.value(j, k);
        let want = oracle::stft_quadrature(&f_fn, &g_fn, x, xi, 16.0, 1 << 14);
        worst_stft = worst_stft.max((got - want).norm());
    }
    c.check(
        "STFT matches direct quadrature within 1e-8 at 25 probes",
        worst_stft < 1e-8,
        format!("worst absolute deviation {worst_stft:.3e}"),
    );

    // M_{2,2} proportional to L^2 with spread < 1e-6 over 20 fields
    let spec22 = ModulationNormSpec::unweighted(2.0, 2.0, window.clone())?;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for s in 0..20u64 {
        let f = calibrate::seeded_field(&grid, seed.wrapping_add(100 + s));
        let ratio = modulation_norm(&f, &spec22)? / f.l2_norm();
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    c.check(
        "M_{2,2} norm proportional to L^2: relative spread < 1e-6 over 20 fields",
        (hi - lo) / lo < 1e-6,
        format!(
            "window constant {:.12} (sqrt(2 pi) = {:.12}), spread {:.3e}",
            0.5 * (lo + hi),
            (2.0 * std::f64::consts::PI).sqrt(),
            (hi - lo) / lo
        ),
    );

    // the two modulation-norm realizations stay inside a reported band
    let band = calibration.equivalence_band;
    c.check(
        "STFT-norm / frequency-decomposition-norm ratio confined to a band",
        band[0] > 0.0 && band[1] / band[0] < EQUIVALENCE_BAND_ROOF,
        format!(
            "measured band [{:.4}, {:.4}] over {} probes (roof {})",
            band[0], band[1], calibration.probe_count, EQUIVALENCE_BAND_ROOF
        ),
    );
    Ok(c)
}

/// Criterion 4: the polynomial growth law of the free group.
pub fn criterion_4_growth(cfg: &RunConfig) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(4, "free-evolution growth in M_{4,4/3}");
    let _ = cfg;
    let grid = Grid1D::new(2048, 256.0)?;
    let window = Window::gaussian(&grid)?;
    let probe = Field::gaussian(&grid, 1.0, 0.0, 1.0, 0.0)?;
    let times = [0.0, 0.5, 1.0, 2.0, 4.0, 7.0, 12.0, 20.0];
    let growth = growth_exponent_probe(&probe, 4.0, &times, &window)?;
    let roof = 0.5 - 0.25 + 0.05;
    c.check(
        "fitted growth exponent <= 1/2 - 1/4 + 0.05 over t in [0, 20]",
        growth.fitted_exponent <= roof,
        format!(
            "fitted exponent {:.4} (roof {roof}), least prefactor {:.4}",
            growth.fitted_exponent, growth.least_c
        ),
    );
    // sanity: norms grow at all (free dispersion spreads the Gaussian)
    let first = growth.samples.first().map(|s| s.norm).unwrap_or(0.0);
    let last = growth.samples.last().map(|s| s.norm).unwrap_or(0.0);
    c.check(
        "modulation norm grows along the orbit",
        last > first,
        format!("norm(0) = {first:.4}, norm(20) = {last:.4}"),
    );
    Ok(c)
}

/// Criterion 5: solver behavior at scheme scale.
pub fn criterion_5_solvers(
    cfg: &RunConfig,
    constants: &scheduler::ProofConstants,
    m0: f64,
) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(5, "solvers (split-step and Picard)");
    let grid = Grid1D::new(cfg.grid.n_points, cfg.grid.half_width)?;
    let gauss = Field::gaussian(&grid, 1.0, 0.0, 1.0, 0.0)?;

    // mass conservation over a scheme-scale window
    let r = cfg.r_rational()?;
    let alpha = cfg.alpha_rational()?;
    let q = match cfg.q_override() {
        Some(q) => q,
        None => choose_q(&r, &alpha)?,
    };
    let delta0 = scheduler::delta_k(m0, q, &r, &alpha, cfg.params.n, 0)?;
    let cfg_ss = SplitStepConfig {
        substeps: cfg.solver.substeps,
        ..Default::default()
    };
    let mut worst_drift = 0.0f64;
    for sign in [Nonlinearity::Defocusing, Nonlinearity::Focusing] {
        let traj = solve_cubic_nls(&gauss, sign, delta0.max(1e-8), &cfg_ss)?;
        for s in traj.states() {
            worst_drift = worst_drift.max(rel(s.l2_norm(), gauss.l2_norm()));
        }
    }
    c.check(
        "mass conserved within 1e-10 over scheme-scale windows, both signs",
        worst_drift < 1e-10,
        format!("worst drift {worst_drift:.3e} over delta_0 = {delta0:.3e}"),
    );

    // split-step vs 100x-finer RK4 oracle at delta = 0.1
    let mut worst_err = 0.0f64;
    for sign in [Nonlinearity::Defocusing, Nonlinearity::Focusing] {
        let traj = solve_cubic_nls(&gauss, sign, 0.1, &cfg_ss)?;
        let fine = oracle::rk4_spectral_nls(&gauss, sign, 0.1, cfg.solver.substeps * 100);
        worst_err = worst_err.max(traj.final_state().sub(&fine)?.l2_norm());
    }
    c.check(
        "split-step agrees with the 100x-finer brute-force integrator within 1e-6",
        worst_err <= 1e-6,
        format!("worst L^2 difference {worst_err:.3e} on Gaussian data, delta = 0.1"),
    );

    // Picard at scheduler-provided delta: contraction and ball membership
    let window = Window::gaussian(&grid)?;
    let r_f = scheduler::rat_to_f64(&r);
    let psi = Field::gaussian(&grid, 0.2, 0.0, 1.5, 2.0)?;
    let psi_mod = modulation_norm(
        &psi,
        &ModulationNormSpec::unweighted(r_f, r_f / (r_f - 1.0), window.clone())?,
    )?;
    // scale psi onto the budget c0/N
    let target = cfg.params.c0 / cfg.params.n;
    let psi = psi.scale(Complex64::new(0.9 * target / psi_mod, 0.0));
    let phi = Field::gaussian(&grid, 0.9, 0.0, 1.0, 0.0)?;
    let v = solve_cubic_nls(&phi, cfg.sign()?, delta0, &cfg_ss)?;
    let ball = 3.0 * cfg.params.c0 * constants.c_e * constants.c_i
        * 0.25f64.powf(1.0 / q as f64)
        * (1.0 + 2.0 / 4.0).powf(0.5 - 1.0 / r_f)
        / cfg.params.n;
    let picard = picard_solve_perturbed(
        &psi,
        &v,
        cfg.sign()?,
        q as f64,
        r_f,
        ball,
        &PicardConfig {
            tol: cfg.solver.tol,
            max_iters: cfg.solver.max_iters,
        },
    )?;
    c.check(
        "Picard contraction factor < 2/3 at the scheduled delta",
        picard.diagnostics.contraction_factor < 2.0 / 3.0,
        format!(
            "measured factor {:.3e} in {} iterations",
            picard.diagnostics.contraction_factor, picard.diagnostics.iterations
        ),
    );
    c.check(
        "fixed point stays in the prescribed ball",
        picard.diagnostics.ball_norm <= picard.diagnostics.ball_bound,
        format!(
            "||w|| = {:.3e} vs bound {:.3e}",
            picard.diagnostics.ball_norm, picard.diagnostics.ball_bound
        ),
    );
    c.check(
        "fixed-point residual below 2 tol",
        picard.diagnostics.residual <= 2.0 * cfg.solver.tol,
        format!("residual {:.3e}", picard.diagnostics.residual),
    );
    Ok(c)
}

/// Criterion 6: the end-to-end scheme run.
pub fn criterion_6_end_to_end(
    cfg: &RunConfig,
    constants: &scheduler::ProofConstants,
) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(6, "end-to-end scheme run");
    let grid = Grid1D::new(cfg.grid.n_points, cfg.grid.half_width)?;
    let window = Window::gaussian(&grid)?;
    let u0 = Field::gaussian(&grid, 1.0, 0.0, 1.0, 0.0)?;
    let params = SchemeParams {
        r: rat(7, 2),
        alpha: rat(1, 50),
        c0: cfg.params.c0,
        n_param: 4.0,
        sign: Nonlinearity::Defocusing,
        q_override: None,
        strategy: SplitStrategy::GaborThreshold,
    };
    let settings = SolverSettings {
        substeps: cfg.solver.substeps,
        picard_tol: cfg.solver.tol,
        picard_max_iters: cfg.solver.max_iters,
    };
    let outcome = run_scheme(&u0, &params, constants, &settings, 3, &window)?;
    c.check(
        "every StepRecord verdict true over 3 steps",
        outcome.report.all_verdicts_ok,
        {
            let bad: Vec<String> = outcome
                .report
                .records
                .iter()
                .filter(|r| !r.verdicts.all_ok())
                .map(|r| format!("step {} fails: {:?}", r.k, r.verdicts))
                .collect();
            if bad.is_empty() {
                format!("{} steps, all inequalities hold", outcome.report.records.len())
            } else {
                bad.join("; ")
            }
        },
    );
    let small_ok = outcome
        .report
        .records
        .iter()
        .all(|r| r.small_lhs <= r.small_rhs);
    c.check(
        "deviation from the linear evolution within 2 N^{-1-alpha(Qr-4r-2Q)/(Qr)}",
        small_ok,
        outcome
            .report
            .records
            .iter()
            .map(|r| format!("step {}: {:.3e} <= {:.3e}", r.k, r.small_lhs, r.small_rhs))
            .collect::<Vec<_>>()
            .join(", "),
    );
    let budget_ok = outcome
        .report
        .records
        .iter()
        .all(|r| r.verdicts.phi_budget_ok && r.verdicts.phi_next_budget_ok);
    c.check(
        "the L^2 budget chain (incoming and outgoing) holds at every step",
        budget_ok,
        "c0 N^alpha + 2k N^{-1-...} and the 2 c0 N^alpha roof".into(),
    );

    // comparison against the direct solve, with refinement table
    let compare = compare_with_direct(&u0, &params, constants, &settings, 3, &window)?;
    c.check(
        "v + w matches the direct solve within 1e-4 (sup-in-time L^2)",
        compare.distance <= 1e-4,
        format!("distance {:.3e}", compare.distance),
    );
    c.check(
        "distance decreases under substep refinement (or sits at the roundoff floor)",
        compare.decreasing,
        format!("table {:?}", compare.table),
    );
    c.check(
        "scheme residual within 10x of the direct solve's residual",
        compare.residual_scheme <= 10.0 * compare.residual_direct.max(1e-14),
        format!(
            "scheme {:.3e}, direct {:.3e}",
            compare.residual_scheme, compare.residual_direct
        ),
    );
    Ok(c)
}

/// Criterion 7: splitter certificates.
pub fn criterion_7_splitter(cfg: &RunConfig) -> Result<CriterionResult> {
    let mut c = CriterionResult::new(7, "splitter certificates");
    let grid = Grid1D::new(cfg.grid.n_points.min(1024), cfg.grid.half_width)?;
    let window = Window::gaussian(&grid)?;

    // degenerate split: data already within the L^2 budget
    let u0 = Field::gaussian(&grid, 1.0, 0.0, 1.0, 0.0)?;
    let degenerate = split(
        &u0,
        cfg.params.n,
        0.02,
        cfg.params.c0,
        3.5,
        SplitStrategy::GaborThreshold,
        &window,
    )?;
    c.check(
        "degenerate L^2-only split accepted",
        degenerate.certificate.threshold == 0.0 && degenerate.psi.l2_norm() < 1e-10,
        format!(
            "phi_l2 = {:.6}, psi = {:.3e}",
            degenerate.certificate.phi_l2,
            degenerate.psi.l2_norm()
        ),
    );

    // nontrivial split on a composite state (forces thresholding)
    let wide_grid = Grid1D::new(2048, 64.0)?;
    let wide_window = Window::gaussian(&wide_grid)?;
    let composite = nontrivial_split_data(&wide_grid)?;
    let result = split(
        &composite,
        4.0,
        0.02,
        2.0,
        3.5,
        SplitStrategy::GaborThreshold,
        &wide_window,
    )?;
    let recon = result
        .phi
        .add(&result.psi)?
        .sub(&composite)?
        .l2_norm()
        / composite.l2_norm();
    c.check(
        "reconstruction phi + psi = u0 within 1e-12",
        recon <= 1e-12,
        format!("relative L^2 error {recon:.3e}"),
    );
    c.check(
        "nontrivial threshold engaged",
        result.certificate.threshold > 0.0 && result.psi.l2_norm() > 1e-6,
        format!(
            "threshold {:.4}, ||psi||_2 = {:.4}",
            result.certificate.threshold,
            result.psi.l2_norm()
        ),
    );
    let confirmed = splitter::recheck_certificate(&result, &wide_window, 1.05)?;
    c.check(
        "certificates confirmed by the independent norm implementation within 5%",
        confirmed,
        format!(
            "phi_l2 = {:.4} <= {:.4}, psi_mod = {:.4} <= {:.4}",
            result.certificate.phi_l2,
            result.certificate.phi_bound,
            result.certificate.psi_mod,
            result.certificate.psi_bound
        ),
    );
    Ok(c)
}

/// A state whose degenerate split fails but whose Gabor threshold split is
/// feasible: a compact core plus a wide, frequency-shifted envelope whose
/// coefficient mass is individually small.
pub fn nontrivial_split_data(grid: &Arc<Grid1D>) -> Result<Field> {
    let core = Field::gaussian(grid, 1.52, 0.0, 1.0, 0.0)?;
    let envelope = Field::from_fn(grid, |x| {
        Complex64::from_polar(0.22 / (0.35 * x).cosh(), 2.0 * x)
    })?;
    core.add(&envelope)
}

/// Run every criterion from a single calibration pass.
pub fn run_all(cfg: &RunConfig) -> Result<VerifyReport> {
    let r = cfg.r_rational()?;
    let alpha = cfg.alpha_rational()?;
    let q = match cfg.q_override() {
        Some(q) => q,
        None => choose_q(&r, &alpha)?,
    };
    let r_small = rational_to_small(&r)?;
    let mut inputs = CalibrationInputs::standard(r_small, q, cfg.calibration.seed)?;
    inputs.corpus_size = cfg.calibration.corpus_size;
    let calibration = calibrate::calibrate(&inputs)?;
    let constants = calibration.constants;
    let m0 = compute_m0(&constants, cfg.params.c0, q, &r)?.m0;

    let criteria = vec![
        criterion_1_exact_algebra(cfg.calibration.seed),
        criterion_2_scheduler(cfg, m0)?,
        criterion_3_analysis_core(cfg, &calibration)?,
        criterion_4_growth(cfg)?,
        criterion_5_solvers(cfg, &constants, m0)?,
        criterion_6_end_to_end(cfg, &constants)?,
        criterion_7_splitter(cfg)?,
    ];
    let all_passed = criteria.iter().all(|c| c.passed);
    Ok(VerifyReport {
        criteria,
        all_passed,
        config_hash: cfg.hash(),
        calibration,
    })
}

/// Convert the exact rational to the small-rational form the admissible-pair
/// machinery uses.
pub fn rational_to_small(r: &Rat) -> Result<num_rational::Ratio<i64>> {
    use num_traits::ToPrimitive;
    match (r.numer().to_i64(), r.denom().to_i64()) {
        (Some(n), Some(d)) => Ok(num_rational::Ratio::new(n, d)),
        _ => Err(crate::Error::Config(format!("rational {r} too large"))),
    }
}

/// Trajectory of free evolutions, for probe work in tests and the CLI.
pub fn free_orbit(f: &Field, times: &[f64]) -> Result<Trajectory> {
    let states = times.iter().map(|&t| free_evolve(f, t)).collect();
    Trajectory::new(times.to_vec(), states)
}
