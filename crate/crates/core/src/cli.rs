//! Command surface. Every subcommand reads the same configuration (TOML
//! file plus dotted-key flag overrides), writes reports under the output
//! directory, and exits 0 on success, 1 on any failed verdict, 2 on
//! configuration errors.

use crate::calibrate::{self, CalibrationInputs};
use crate::config::RunConfig;
use crate::engine::{picard_solve_perturbed, solve_cubic_nls, PicardConfig, SplitStepConfig};
use crate::field::{lebesgue_norm, Field};
use crate::grid::Grid1D;
use crate::io;
use crate::modnorm::{modulation_norm, modulation_norm_fud, ModulationNormSpec};
use crate::orchestrator::{run_scheme, SchemeParams, SolverSettings};
use crate::propagator::free_evolve;
use crate::scheduler::{choose_q, compute_m0, rat_to_f64, Schedule};
use crate::splitter::split;
use crate::stft::Window;
use crate::trajectory::Trajectory;
use crate::verify;
use crate::{Error, Result};
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT_FAILED: i32 = 1;
pub const EXIT_CONFIG_ERROR: i32 = 2;

/// Recognized dotted configuration keys, used to accept `--<key> <value>`
/// overrides on every subcommand.
pub const CONFIG_KEYS: &[&str] = &[
    "grid.n_points",
    "grid.half_width",
    "params.r",
    "params.alpha",
    "params.c0",
    "params.n",
    "params.sign",
    "params.q_override",
    "params.strategy",
    "params.k_cap",
    "solver.substeps",
    "solver.tol",
    "solver.max_iters",
    "io.output_dir",
    "io.emit_csv",
    "calibration.seed",
    "calibration.corpus_size",
    "calibration.constants_path",
];

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("serialization: {e}")))?;
    std::fs::write(path, text)?;
    Ok(())
}

fn load_input_field(cfg: &RunConfig, input: &Option<PathBuf>) -> Result<Field> {
    match input {
        Some(path) => io::read_field(path),
        None => {
            // the shipped fixture: the unit Gaussian on the configured grid
            let grid = Grid1D::new(cfg.grid.n_points, cfg.grid.half_width)?;
            Field::gaussian(&grid, 1.0, 0.0, 1.0, 0.0)
        }
    }
}

fn constants_for(cfg: &RunConfig) -> Result<crate::calibrate::CalibrationReport> {
    if !cfg.calibration.constants_path.is_empty() {
        let text = std::fs::read_to_string(&cfg.calibration.constants_path)?;
        let report: crate::calibrate::CalibrationReport = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("constants file: {e}")))?;
        return Ok(report);
    }
    let r = cfg.r_rational()?;
    let q = match cfg.q_override() {
        Some(q) => q,
        None => choose_q(&r, &cfg.alpha_rational()?)?,
    };
    let mut inputs = CalibrationInputs::standard(verify::rational_to_small(&r)?, q, cfg.calibration.seed)?;
    inputs.corpus_size = cfg.calibration.corpus_size;
    calibrate::calibrate(&inputs)
}

pub fn cmd_schedule(cfg: &RunConfig) -> Result<i32> {
    let r = cfg.r_rational()?;
    let alpha = cfg.alpha_rational()?;
    let q = match cfg.q_override() {
        Some(q) => q,
        None => choose_q(&r, &alpha)?,
    };
    let calibration = constants_for(cfg)?;
    let m0 = compute_m0(&calibration.constants, cfg.params.c0, q, &r)?.m0;
    let k_cap = cfg.params.k_cap.max(1);
    let schedule = Schedule::build(m0, q, &r, &alpha, cfg.params.n, Some(k_cap))?;
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("schedule.csv"), schedule.to_csv())?;
    let mut summary = schedule.summary_json();
    summary["config_hash"] = cfg.hash().into();
    summary["constants"] = serde_json::to_value(&calibration.constants)
        .map_err(|e| Error::Config(e.to_string()))?;
    write_json(&dir.join("schedule.json"), &summary)?;
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    eprintln!("schedule written to {}", dir.display());
    Ok(EXIT_OK)
}

pub fn cmd_norms(cfg: &RunConfig, input: &Option<PathBuf>) -> Result<i32> {
    let field = load_input_field(cfg, input)?;
    let grid = Arc::clone(field.grid());
    let window = Window::gaussian(&grid)?;
    let r = rat_to_f64(&cfg.r_rational()?);
    let r_conj = r / (r - 1.0);
    let mut rows = serde_json::Map::new();
    for p in [1.0, 2.0, 4.0, f64::INFINITY] {
        let key = if p.is_infinite() { "lebesgue_inf".into() } else { format!("lebesgue_{p}") };
        rows.insert(key, lebesgue_norm(&field, p)?.into());
    }
    for (p, q, label) in [
        (2.0, 2.0, "modulation_2_2".to_string()),
        (r, r_conj, format!("modulation_r_rconj(r={r})")),
        (4.0, 4.0 / 3.0, "modulation_4_4/3".to_string()),
    ] {
        let spec = ModulationNormSpec::unweighted(p, q, window.clone())?;
        rows.insert(label, modulation_norm(&field, &spec)?.into());
    }
    rows.insert(
        "modulation_fud_r_rconj".into(),
        modulation_norm_fud(&field, r, r_conj)?.into(),
    );
    rows.insert("l2_over_m22_window_constant".into(), {
        let spec = ModulationNormSpec::unweighted(2.0, 2.0, window.clone())?;
        let m = modulation_norm(&field, &spec)?;
        (m / field.l2_norm().max(1e-300)).into()
    });
    let report = serde_json::json!({
        "config_hash": cfg.hash(),
        "grid": io::grid_meta(&grid),
        "norms": rows,
    });
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    let dir = cfg.output_dir();
    write_json(&dir.join("norms.json"), &report)?;
    Ok(EXIT_OK)
}

pub fn cmd_split(cfg: &RunConfig, input: &Option<PathBuf>) -> Result<i32> {
    let field = load_input_field(cfg, input)?;
    let grid = Arc::clone(field.grid());
    let window = Window::gaussian(&grid)?;
    let result = split(
        &field,
        cfg.params.n,
        rat_to_f64(&cfg.alpha_rational()?),
        cfg.params.c0,
        rat_to_f64(&cfg.r_rational()?),
        cfg.strategy()?,
        &window,
    )?;
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir)?;
    io::write_field(&dir.join("phi.csv"), &result.phi)?;
    io::write_field(&dir.join("psi.csv"), &result.psi)?;
    let mut cert = serde_json::to_value(&result.certificate)
        .map_err(|e| Error::Config(e.to_string()))?;
    cert["config_hash"] = cfg.hash().into();
    write_json(&dir.join("split.json"), &cert)?;
    println!("{}", serde_json::to_string_pretty(&cert).unwrap());
    Ok(EXIT_OK)
}

pub fn cmd_evolve(cfg: &RunConfig, input: &Option<PathBuf>, kind: &str) -> Result<i32> {
    let field = load_input_field(cfg, input)?;
    let delta = {
        // scheme-scale interval from the schedule
        let r = cfg.r_rational()?;
        let alpha = cfg.alpha_rational()?;
        let q = match cfg.q_override() {
            Some(q) => q,
            None => choose_q(&r, &alpha)?,
        };
        let calibration = constants_for(cfg)?;
        let m0 = compute_m0(&calibration.constants, cfg.params.c0, q, &r)?.m0;
        crate::scheduler::delta_k(m0, q, &r, &alpha, cfg.params.n, 0)?
    };
    let traj = match kind {
        "nls" => solve_cubic_nls(
            &field,
            cfg.sign()?,
            delta,
            &SplitStepConfig {
                substeps: cfg.solver.substeps,
                ..Default::default()
            },
        )?,
        "free" => {
            let m = cfg.solver.substeps;
            let times: Vec<f64> = (0..=m).map(|i| delta * i as f64 / m as f64).collect();
            let states = times.iter().map(|&t| free_evolve(&field, t)).collect();
            Trajectory::new(times, states)?
        }
        "picard" => {
            // zero background: the perturbed solver reduces to the plain NLS
            let m = cfg.solver.substeps;
            let times: Vec<f64> = (0..=m).map(|i| delta * i as f64 / m as f64).collect();
            let grid = Arc::clone(field.grid());
            let v = Trajectory::new(times, vec![Field::zero(&grid); m + 1])?;
            let r = rat_to_f64(&cfg.r_rational()?);
            let q = match cfg.q_override() {
                Some(q) => q,
                None => choose_q(&cfg.r_rational()?, &cfg.alpha_rational()?)?,
            };
            let out = picard_solve_perturbed(
                &field,
                &v,
                cfg.sign()?,
                q as f64,
                r,
                f64::INFINITY,
                &PicardConfig {
                    tol: cfg.solver.tol,
                    max_iters: cfg.solver.max_iters,
                },
            )?;
            eprintln!(
                "picard: {} iterations, contraction factor {:.3e}",
                out.diagnostics.iterations, out.diagnostics.contraction_factor
            );
            out.w
        }
        other => {
            return Err(Error::Config(format!(
                "unknown evolve kind '{other}' (expected nls, free, or picard)"
            )))
        }
    };
    let dir = cfg.output_dir().join(format!("trajectory_{kind}"));
    io::write_trajectory(&dir, &traj)?;
    eprintln!(
        "wrote {} instants over [0, {:.6e}] to {}",
        traj.len(),
        traj.final_time(),
        dir.display()
    );
    Ok(EXIT_OK)
}

pub fn cmd_run(cfg: &RunConfig) -> Result<i32> {
    let calibration = constants_for(cfg)?;
    let grid = Grid1D::new(cfg.grid.n_points, cfg.grid.half_width)?;
    let window = Window::gaussian(&grid)?;
    let u0 = Field::gaussian(&grid, 1.0, 0.0, 1.0, 0.0)?;
    let params = SchemeParams {
        r: cfg.r_rational()?,
        alpha: cfg.alpha_rational()?,
        c0: cfg.params.c0,
        n_param: cfg.params.n,
        sign: cfg.sign()?,
        q_override: cfg.q_override(),
        strategy: cfg.strategy()?,
    };
    let settings = SolverSettings {
        substeps: cfg.solver.substeps,
        picard_tol: cfg.solver.tol,
        picard_max_iters: cfg.solver.max_iters,
    };
    let outcome = run_scheme(
        &u0,
        &params,
        &calibration.constants,
        &settings,
        cfg.params.k_cap.max(1),
        &window,
    )?;
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir)?;
    let mut report = serde_json::to_value(&outcome.report)
        .map_err(|e| Error::Config(e.to_string()))?;
    report["config_hash"] = cfg.hash().into();
    report["calibration_provenance"] = if cfg.calibration.constants_path.is_empty() {
        format!("calibrated in-run (seed {})", calibration.seed).into()
    } else {
        cfg.calibration.constants_path.clone().into()
    };
    write_json(&dir.join("run.json"), &report)?;
    if cfg.io.emit_csv {
        let mut csv = String::from("t,v_l2,w_l2,u_l2\n");
        for (k, (v, w)) in outcome.v_parts.iter().zip(&outcome.w_parts).enumerate() {
            let offset: f64 = outcome.report.records[..k].iter().map(|r| r.delta).sum();
            for (j, &t) in v.times().iter().enumerate() {
                let u = v.state(j).add(w.state(j))?;
                csv.push_str(&format!(
                    "{:.12e},{:.12e},{:.12e},{:.12e}\n",
                    offset + t,
                    v.state(j).l2_norm(),
                    w.state(j).l2_norm(),
                    u.l2_norm()
                ));
            }
        }
        std::fs::write(dir.join("run_norms.csv"), csv)?;
    }
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    let ok = outcome.report.all_verdicts_ok;
    if !ok {
        eprintln!("one or more step verdicts failed; see run.json");
    }
    Ok(if ok { EXIT_OK } else { EXIT_VERDICT_FAILED })
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<i32> {
    let report = verify::run_all(cfg)?;
    for criterion in &report.criteria {
        println!("{}", criterion.summary_line());
        for line in criterion.failed_lines() {
            println!("{line}");
        }
    }
    let dir = cfg.output_dir();
    write_json(&dir.join("verify.json"), &report)?;
    println!(
        "verify: {}/{} criteria passed",
        report.criteria.iter().filter(|c| c.passed).count(),
        report.criteria.len()
    );
    Ok(if report.all_passed {
        EXIT_OK
    } else {
        EXIT_VERDICT_FAILED
    })
}

pub fn cmd_calibrate(cfg: &RunConfig) -> Result<i32> {
    let report = constants_for(cfg)?;
    let dir = cfg.output_dir();
    let mut value = serde_json::to_value(&report).map_err(|e| Error::Config(e.to_string()))?;
    value["config_hash"] = cfg.hash().into();
    write_json(&dir.join("calibration.json"), &value)?;
    println!("{}", serde_json::to_string_pretty(&value).unwrap());
    Ok(EXIT_OK)
}
