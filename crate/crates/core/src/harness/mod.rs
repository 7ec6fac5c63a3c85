//! Convergence studies and the reference problem catalog.

pub mod cases;
pub mod convergence;
pub mod spline;

pub use cases::{builtin_cases, find_case, synthetic_cases, TestCase};
pub use convergence::{
    compare, linf_error, observed_orders, run_convergence_study, solve_at, run_convergence_study_setup, write_convergence_csv,
    ConvergenceRow, DEFAULT_K_FACTOR, TRANSFER_END,
};
pub use spline::{cubic_spline_eval, cubic_spline_eval_with, spline_grid_2d, CubicSpline, SplineEnd};
