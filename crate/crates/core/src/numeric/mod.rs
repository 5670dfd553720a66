//! Coefficient tuning: least-squares solves for the linear primitives and
//! normalized gradient descent for the nonlinear tunable functions.

mod grad;
mod lstsq;
mod tune;

pub use grad::{coefficient_partials, function_loss, loss_gradient};
pub use lstsq::{
    residual_sum_squares, solve_least_squares, LeastSquaresProblem, SolveError, CONDITION_LIMIT,
    RIDGE_SCALE,
};
pub use tune::{
    fit_head, head_design, terminal_design, terminal_loss, tune_function, tune_function_gd,
    tune_lrf, tune_mvlr, tune_terminal, TuneError, DEFAULT_GD_STEPS, DEFAULT_STEP_SIZE,
    GRADIENT_FLOOR,
};
