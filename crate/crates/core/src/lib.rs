//! Splitting-scheme machinery for the one-dimensional cubic nonlinear
//! Schrödinger equation with rough (modulation-space) initial data.
//!
//! The crate is organized around one pipeline:
//!
//! 1. [`grid`], [`field`], [`trajectory`] — periodic grids, sampled complex
//!    states, and time-indexed state sequences with mixed `L^q_t L^r_x` norms.
//! 2. [`fourier`], [`stft`], [`modnorm`] — unitary DFT, short-time Fourier
//!    transform, and two realizations of the modulation-space norm.
//! 3. [`propagator`] — the free Schrödinger group, Duhamel integrals, and
//!    Strichartz-type probe machinery.
//! 4. [`engine`] — split-step integration of the cubic NLS and the
//!    contraction-mapping solver for the perturbed equation.
//! 5. [`splitter`] — constructive decompositions `u0 = phi + psi` with
//!    certified `L^2` / modulation-norm budgets.
//! 6. [`scheduler`] — exact rational exponent algebra, step-size schedules,
//!    and the divergence bookkeeping behind the global-existence argument.
//! 7. [`orchestrator`] — the per-interval iteration that stitches the two
//!    solvers together and checks every quantitative inequality along the way.
//! 8. [`cli`] / [`config`] / [`verify`] — reproducible experiment surface.
//!
//! All public types are immutable after construction and all operations are
//! pure, so independent computations can run on parallel workers freely.

pub mod calibrate;
pub mod cli;
pub mod config;
pub mod dd;
pub mod engine;
pub mod field;
pub mod fourier;
pub mod grid;
pub mod io;
pub mod modnorm;
pub mod oracle;
pub mod orchestrator;
pub mod propagator;
pub mod scheduler;
pub mod splitter;
pub mod stft;
pub mod trajectory;
pub mod verify;

pub use field::Field;
pub use grid::Grid1D;
pub use trajectory::Trajectory;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("fields live on different grids ({0} vs {1} points)")]
    GridMismatch(usize, usize),
    #[error("Lebesgue exponent must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("{0}")]
    EmptyInput(&'static str),
    #[error("grid size must be a power of two, got {0}")]
    BadGridSize(usize),
    #[error("grid half-width must be positive and finite, got {0}")]
    BadHalfWidth(f64),
    #[error("window is degenerate: {0}")]
    BadWindow(String),
    #[error("evaluation time {t} outside stored range [0, {max}]")]
    TimeOutOfRange { t: f64, max: f64 },
    #[error("single-instant trajectory cannot carry a finite-q time norm")]
    DegenerateTimeNorm,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("split infeasible at N={n}, c0={c0}: {reason}")]
    Infeasible { n: f64, c0: f64, reason: String },
    #[error("fixed-point map is not contractive: measured factor {0}")]
    NonContractive(f64),
    #[error("fixed point escaped its ball: norm {norm} > bound {bound}")]
    BallEscape { norm: f64, bound: f64 },
    #[error("Picard iteration did not converge in {0} iterations")]
    MaxIters(usize),
    #[error("solution blow-up: sup-norm grew by factor {0:.3e}")]
    BlowUp(f64),
    #[error("step budget exceeded at step {step}: ||phi||_2 = {norm} > {budget}")]
    BudgetExceeded { step: usize, norm: f64, budget: f64 },
    #[error("schedule refused: delta >= 1/4; smallest admissible N is {0}")]
    DeltaTooLarge(f64),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("malformed field file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
