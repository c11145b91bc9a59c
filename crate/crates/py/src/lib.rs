//! Python bindings: the main types and operations, enough to drive the
//! solver and the exponent algebra from a script.

use modnls::calibrate::{calibrate, CalibrationInputs};
use modnls::engine::{solve_cubic_nls, Nonlinearity, SplitStepConfig};
use modnls::field::lebesgue_norm;
use modnls::modnorm::{modulation_norm, modulation_norm_fud, ModulationNormSpec};
use modnls::orchestrator::{run_scheme, SchemeParams, SolverSettings};
use modnls::propagator::free_evolve;
use modnls::scheduler::{
    alpha_max, choose_q, compute_m0, delta_k, divergence_check, m_k, parse_rational, rat_to_f64,
    steps_count,
};
use modnls::splitter::{p_of, split as split_field, SplitStrategy};
use modnls::stft::Window;
use modnls::verify::rational_to_small;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use std::sync::Arc;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Periodic grid on `[-L, L)` with a power-of-two point count.
#[pyclass]
#[derive(Clone)]
struct Grid {
    inner: Arc<modnls::Grid1D>,
}

#[pymethods]
impl Grid {
    #[new]
    fn new(n_points: usize, half_width: f64) -> PyResult<Self> {
        Ok(Grid {
            inner: modnls::Grid1D::new(n_points, half_width).map_err(err)?,
        })
    }

    #[getter]
    fn n_points(&self) -> usize {
        self.inner.n_points()
    }

    #[getter]
    fn half_width(&self) -> f64 {
        self.inner.half_width()
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.inner.dx()
    }

    fn points(&self) -> Vec<f64> {
        self.inner.points()
    }

    fn frequencies(&self) -> Vec<f64> {
        self.inner.frequencies()
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(n_points={}, half_width={})",
            self.inner.n_points(),
            self.inner.half_width()
        )
    }
}

/// Complex state sampled on a grid.
#[pyclass]
#[derive(Clone)]
struct State {
    inner: modnls::Field,
}

#[pymethods]
impl State {
    /// Build from (re, im) sample pairs.
    #[staticmethod]
    fn from_values(grid: &Grid, values: Vec<(f64, f64)>) -> PyResult<Self> {
        let samples = values
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        Ok(State {
            inner: modnls::Field::new(Arc::clone(&grid.inner), samples).map_err(err)?,
        })
    }

    /// `amp * exp(-(x-center)^2/(2 width^2)) * exp(i momentum x)`.
    #[staticmethod]
    #[pyo3(signature = (grid, amp=1.0, center=0.0, width=1.0, momentum=0.0))]
    fn gaussian(grid: &Grid, amp: f64, center: f64, width: f64, momentum: f64) -> PyResult<Self> {
        Ok(State {
            inner: modnls::Field::gaussian(&grid.inner, amp, center, width, momentum)
                .map_err(err)?,
        })
    }

    fn values(&self) -> Vec<(f64, f64)> {
        self.inner.values().iter().map(|v| (v.re, v.im)).collect()
    }

    fn l2_norm(&self) -> f64 {
        self.inner.l2_norm()
    }

    fn lebesgue_norm(&self, p: f64) -> PyResult<f64> {
        lebesgue_norm(&self.inner, p).map_err(err)
    }

    /// STFT-based modulation norm with the default Gaussian window.
    fn modulation_norm(&self, p: f64, q: f64) -> PyResult<f64> {
        let window = Window::gaussian(self.inner.grid()).map_err(err)?;
        let spec = ModulationNormSpec::unweighted(p, q, window).map_err(err)?;
        modulation_norm(&self.inner, &spec).map_err(err)
    }

    /// Frequency-uniform-decomposition modulation norm.
    fn modulation_norm_fud(&self, p: f64, q: f64) -> PyResult<f64> {
        modulation_norm_fud(&self.inner, p, q).map_err(err)
    }

    /// Apply the free group `e^{it d^2/dx^2}`.
    fn free_evolve(&self, t: f64) -> State {
        State {
            inner: free_evolve(&self.inner, t),
        }
    }

    /// Integrate the cubic NLS over `[0, delta]`; returns the final state.
    #[pyo3(signature = (delta, sign=-1, substeps=64))]
    fn solve_cubic_nls(&self, delta: f64, sign: i32, substeps: usize) -> PyResult<State> {
        let sign = Nonlinearity::from_sign(sign).map_err(err)?;
        let traj = solve_cubic_nls(
            &self.inner,
            sign,
            delta,
            &SplitStepConfig {
                substeps,
                ..Default::default()
            },
        )
        .map_err(err)?;
        Ok(State {
            inner: traj.final_state().clone(),
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "State(n={}, l2={:.06})",
            self.inner.grid().n_points(),
            self.inner.l2_norm()
        )
    }
}

/// `p(r, alpha) = (2r + 2 r alpha)/(r + 2 alpha)`.
#[pyfunction(name = "p_of")]
fn p_of_py(r: f64, alpha: f64) -> PyResult<f64> {
    p_of(r, alpha).map_err(err)
}

/// Largest admissible `alpha` for a given `r in [3, 4]`, as a float.
#[pyfunction(name = "alpha_max")]
fn alpha_max_py(r: &str) -> PyResult<f64> {
    let r = parse_rational(r).map_err(err)?;
    Ok(rat_to_f64(&alpha_max(&r).map_err(err)?))
}

/// Least feasible integer `Q` for rational `r`, `alpha` given as strings.
#[pyfunction(name = "choose_q")]
fn choose_q_py(r: &str, alpha: &str) -> PyResult<u32> {
    let r = parse_rational(r).map_err(err)?;
    let alpha = parse_rational(alpha).map_err(err)?;
    choose_q(&r, &alpha).map_err(err)
}

/// Theoretical step count for data parameter `N`.
#[pyfunction(name = "steps_count")]
fn steps_count_py(n: f64, q: u32, r: &str, alpha: &str) -> PyResult<u64> {
    let r = parse_rational(r).map_err(err)?;
    let alpha = parse_rational(alpha).map_err(err)?;
    steps_count(n, q, &r, &alpha).map_err(err)
}

/// `(fin_positive, fin_margin, lim_positive)` at `(Q, r, alpha)`.
#[pyfunction(name = "divergence_check")]
fn divergence_check_py(q: u32, r: &str, alpha: &str) -> PyResult<(bool, f64, bool)> {
    let r = parse_rational(r).map_err(err)?;
    let alpha = parse_rational(alpha).map_err(err)?;
    let report = divergence_check(q, &r, &alpha);
    Ok((report.fin_positive, report.fin_margin, report.lim_positive))
}

/// Rows `(k, M_k, delta_k)` of the step schedule.
#[pyfunction(name = "schedule_rows")]
fn schedule_rows_py(
    m0: f64,
    q: u32,
    r: &str,
    alpha: &str,
    n: f64,
    k_count: usize,
) -> PyResult<Vec<(usize, f64, f64)>> {
    let r = parse_rational(r).map_err(err)?;
    let alpha = parse_rational(alpha).map_err(err)?;
    let mut rows = Vec::with_capacity(k_count);
    for k in 0..k_count {
        rows.push((
            k,
            m_k(m0, q, &r, k).map_err(err)?,
            delta_k(m0, q, &r, &alpha, n, k).map_err(err)?,
        ));
    }
    Ok(rows)
}

/// Split a state with certified budgets; returns
/// `(phi, psi, certificate_dict)`.
#[pyfunction(name = "split")]
#[pyo3(signature = (state, n, alpha, c0, r, strategy="gabor-threshold"))]
fn split_py(
    py: Python<'_>,
    state: &State,
    n: f64,
    alpha: f64,
    c0: f64,
    r: f64,
    strategy: &str,
) -> PyResult<(State, State, Py<PyAny>)> {
    let strategy: SplitStrategy = strategy.parse().map_err(err)?;
    let window = Window::gaussian(state.inner.grid()).map_err(err)?;
    let result = split_field(&state.inner, n, alpha, c0, r, strategy, &window).map_err(err)?;
    let cert = serde_json::to_string(&result.certificate).map_err(err)?;
    let json = py.import("json")?;
    let cert_obj = json.call_method1("loads", (cert,))?;
    Ok((
        State { inner: result.phi },
        State { inner: result.psi },
        cert_obj.unbind(),
    ))
}

/// Run the scheme for `k_cap` steps and return the report as a dict
/// (records, verdicts, constants, schedule summary).
#[pyfunction(name = "run_scheme")]
#[pyo3(signature = (state, r, alpha, c0, n, k_cap=2, sign=-1, substeps=32, seed=7))]
#[allow(clippy::too_many_arguments)]
fn run_scheme_py(
    py: Python<'_>,
    state: &State,
    r: &str,
    alpha: &str,
    c0: f64,
    n: f64,
    k_cap: usize,
    sign: i32,
    substeps: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let r = parse_rational(r).map_err(err)?;
    let alpha = parse_rational(alpha).map_err(err)?;
    let q = choose_q(&r, &alpha).map_err(err)?;
    let mut inputs =
        CalibrationInputs::standard(rational_to_small(&r).map_err(err)?, q, seed).map_err(err)?;
    inputs.corpus_size = 12;
    inputs.grid = modnls::Grid1D::new(512, 16.0).map_err(err)?;
    inputs.growth_grid = modnls::Grid1D::new(1024, 128.0).map_err(err)?;
    let calibration = calibrate(&inputs).map_err(err)?;
    let params = SchemeParams {
        r,
        alpha,
        c0,
        n_param: n,
        sign: Nonlinearity::from_sign(sign).map_err(err)?,
        q_override: None,
        strategy: SplitStrategy::GaborThreshold,
    };
    let window = Window::gaussian(state.inner.grid()).map_err(err)?;
    let outcome = run_scheme(
        &state.inner,
        &params,
        &calibration.constants,
        &SolverSettings {
            substeps,
            ..Default::default()
        },
        k_cap,
        &window,
    )
    .map_err(err)?;
    let text = serde_json::to_string(&outcome.report).map_err(err)?;
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (text,))?.unbind())
}

/// Minimal `M_0` from the four scheduling inequalities at unit-free inputs.
#[pyfunction(name = "compute_m0")]
fn compute_m0_py(
    c_e: f64,
    c_i: f64,
    k1: f64,
    k2: f64,
    c_q: f64,
    c0: f64,
    q: u32,
    r: &str,
) -> PyResult<f64> {
    let r = parse_rational(r).map_err(err)?;
    let constants = modnls::scheduler::ProofConstants {
        c_e,
        c_i,
        k1,
        k2,
        c_q,
    };
    Ok(compute_m0(&constants, c0, q, &r).map_err(err)?.m0)
}

#[pymodule]
fn modnls_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Grid>()?;
    m.add_class::<State>()?;
    m.add_function(wrap_pyfunction!(p_of_py, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_max_py, m)?)?;
    m.add_function(wrap_pyfunction!(choose_q_py, m)?)?;
    m.add_function(wrap_pyfunction!(steps_count_py, m)?)?;
    m.add_function(wrap_pyfunction!(divergence_check_py, m)?)?;
    m.add_function(wrap_pyfunction!(schedule_rows_py, m)?)?;
    m.add_function(wrap_pyfunction!(split_py, m)?)?;
    m.add_function(wrap_pyfunction!(run_scheme_py, m)?)?;
    m.add_function(wrap_pyfunction!(compute_m0_py, m)?)?;
    Ok(())
}
