//! Coefficient tuning for the tunable primitives.
//!
//! Each tuner minimizes the squared error between the primitive's output
//! on the values it received during execution and the targets. Every tuner
//! keeps the incoming coefficients when the candidate is not better, so a
//! tuning event never increases the site loss.

use crate::matrix::Matrix;
use crate::primitives::{gamma_eval, FunctionKind, FunctionSite, TerminalKind, TerminalSite};
use crate::program::{ExecutionTrace, MvlrHead, Program};

use super::grad::{function_loss, loss_gradient};
use super::lstsq::{residual_sum_squares, solve_least_squares, SolveError};

/// Gradient norms below this stop descent.
pub const GRADIENT_FLOOR: f64 = 1e-10;
/// Default normalized step size.
pub const DEFAULT_STEP_SIZE: f64 = 0.1;
/// Default number of descent steps per tuning event.
pub const DEFAULT_GD_STEPS: usize = 5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TuneError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("{what}: expected {expected}, found {found}")]
    Shape {
        what: &'static str,
        expected: usize,
        found: usize,
    },
}

fn check(what: &'static str, expected: usize, found: usize) -> Result<(), TuneError> {
    if expected == found {
        Ok(())
    } else {
        Err(TuneError::Shape {
            what,
            expected,
            found,
        })
    }
}

/// Design matrix for a terminal over its traced slices: `[1, slice]` for
/// LR, `[1, successive differences]` for 1stDLR, `[1, gamma(slice)]` for
/// the summary kinds.
pub fn terminal_design(site: &TerminalSite, slices: &Matrix) -> Matrix {
    slices.map_rows(|s| {
        let mut row = Vec::with_capacity(site.coeffs.len());
        row.push(1.0);
        match site.kind {
            TerminalKind::Lr => row.extend_from_slice(s),
            TerminalKind::FirstDiffLr => row.extend(s.windows(2).map(|w| w[1] - w[0])),
            kind => row.push(gamma_eval(kind, s, site.alpha)),
        }
        row
    })
}

/// Site loss of a terminal over its traced slices.
pub fn terminal_loss(site: &TerminalSite, slices: &Matrix, targets: &[f64]) -> f64 {
    slices
        .iter_rows()
        .zip(targets)
        .map(|(s, y)| {
            let r = site.eval_slice(s) - y;
            r * r
        })
        .sum()
}

/// Fits a terminal's coefficients by least squares against `targets`.
pub fn tune_terminal(
    site: &TerminalSite,
    slices: &Matrix,
    targets: &[f64],
) -> Result<TerminalSite, TuneError> {
    check("slice width", site.width(), slices.cols())?;
    check("target count", slices.rows(), targets.len())?;
    let design = terminal_design(site, slices);
    let coeffs = solve_least_squares(&design, targets)?;
    let candidate = TerminalSite {
        coeffs,
        ..site.clone()
    };
    if terminal_loss(&candidate, slices, targets) <= terminal_loss(site, slices, targets) {
        Ok(candidate)
    } else {
        Ok(site.clone())
    }
}

/// Euclidean norm, scaled against overflow.
fn norm(v: &[f64]) -> f64 {
    let m = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * v.iter().map(|x| (x / m) * (x / m)).sum::<f64>().sqrt()
}

/// Normalized gradient descent on a tunable function.
///
/// Each step moves `step_size` against the unit gradient, then clamps the
/// coefficients to `[-3, 3]`. Stops early on a vanishing gradient and
/// returns the lowest-loss coefficients seen, including the starting ones.
pub fn tune_function_gd(
    site: &FunctionSite,
    inputs: &[f64],
    targets: &[f64],
    steps: usize,
    step_size: f64,
) -> FunctionSite {
    let mut best = site.clone();
    let mut best_loss = function_loss(site, inputs, targets);
    let mut current = site.clone();
    for _ in 0..steps {
        let grad = loss_gradient(&current, inputs, targets);
        let g = norm(&grad);
        if g.is_nan() || g < GRADIENT_FLOOR || !g.is_finite() {
            break;
        }
        for (w, d) in current.omega.iter_mut().zip(&grad) {
            *w -= step_size * d / g;
        }
        current.clamp_omega();
        let loss = function_loss(&current, inputs, targets);
        if loss < best_loss {
            best_loss = loss;
            best = current.clone();
        }
    }
    best
}

/// Least-squares fit of LRF on the design `[1, inputs]`.
pub fn tune_lrf(
    site: &FunctionSite,
    inputs: &[f64],
    targets: &[f64],
) -> Result<FunctionSite, TuneError> {
    check("target count", inputs.len(), targets.len())?;
    let design = Matrix::from_vec(
        inputs.len(),
        2,
        inputs.iter().flat_map(|&x| [1.0, x]).collect(),
    );
    let omega = solve_least_squares(&design, targets)?;
    let candidate = FunctionSite::new(FunctionKind::Lrf, omega);
    if function_loss(&candidate, inputs, targets) <= function_loss(site, inputs, targets) {
        Ok(candidate)
    } else {
        Ok(site.clone())
    }
}

/// Tunes a function site by its kind's rule: least squares for LRF,
/// normalized gradient descent otherwise.
pub fn tune_function(
    site: &FunctionSite,
    inputs: &[f64],
    targets: &[f64],
    steps: usize,
    step_size: f64,
) -> Result<FunctionSite, TuneError> {
    check("target count", inputs.len(), targets.len())?;
    match site.kind {
        FunctionKind::Lrf => tune_lrf(site, inputs, targets),
        _ => Ok(tune_function_gd(site, inputs, targets, steps, step_size)),
    }
}

/// `[1, R0, .., R(r-1)]` rows from a register file.
pub fn head_design(inputs: usize, registers: &[Vec<f64>]) -> Matrix {
    let n = registers.first().map_or(0, Vec::len);
    let mut data = Vec::with_capacity(n * (inputs + 1));
    for j in 0..n {
        data.push(1.0);
        data.extend(registers[..inputs].iter().map(|r| r[j]));
    }
    Matrix::from_vec(n, inputs + 1, data)
}

/// Refits head coefficients against the final register values. Returns the
/// fitted head; the incoming head is kept when the fit is not better.
pub fn fit_head(
    head: &MvlrHead,
    registers: &[Vec<f64>],
    targets: &[f64],
) -> Result<MvlrHead, TuneError> {
    if registers.len() < head.inputs {
        return Err(TuneError::Shape {
            what: "register count",
            expected: head.inputs,
            found: registers.len(),
        });
    }
    let design = head_design(head.inputs, registers);
    check("target count", design.rows(), targets.len())?;
    let coeffs = solve_least_squares(&design, targets)?;
    let before = residual_sum_squares(&design, &head.coeffs, targets);
    let after = residual_sum_squares(&design, &coeffs, targets);
    if after <= before || !before.is_finite() {
        Ok(MvlrHead {
            inputs: head.inputs,
            coeffs,
        })
    } else {
        Ok(head.clone())
    }
}

/// Retunes the head of `program` from a traced execution. Programs without
/// a head are returned unchanged.
pub fn tune_mvlr(
    program: &Program,
    trace: &ExecutionTrace,
    targets: &[f64],
) -> Result<Program, TuneError> {
    let mut out = program.clone();
    if let Some(head) = &program.head {
        out.head = Some(fit_head(head, &trace.finals, targets)?);
    }
    Ok(out)
}
