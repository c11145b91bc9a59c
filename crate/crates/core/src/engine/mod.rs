//! Evolution engines: split-step integration of the cubic NLS and the
//! contraction-mapping solver for the perturbed equation driven by `G(v, w)`.

mod nonlinear;
mod picard;
mod split_step;
mod tsu;

pub use nonlinear::{g_nonlinear, g_tilde, Nonlinearity};
pub use picard::{picard_solve_perturbed, PicardConfig, PicardOutcome, SolverDiagnostics};
pub use split_step::{solve_cubic_nls, SplitStepConfig};
pub use tsu::{verify_tsu_bounds, TsuReport};
