//! Analytic partial derivatives of the tunable functions and of the
//! squared-error loss with respect to their coefficients.

use crate::primitives::{abs_power, expo_power, FunctionKind, FunctionSite};

/// `∂f/∂ω` at one input, written into `out` (length = coefficient count).
///
/// Where the protected power saturates its exponent clamp the dependence on
/// the shape coefficient is cut and its partial is 0.
pub fn coefficient_partials(site: &FunctionSite, x: f64, out: &mut [f64]) {
    let w = &site.omega;
    match site.kind {
        FunctionKind::Lrf => {
            out[0] = 1.0;
            out[1] = x;
        }
        FunctionKind::SinRf => {
            let arg = w[2] * x + w[3];
            let (s, c) = arg.sin_cos();
            out[0] = 1.0;
            out[1] = s;
            out[2] = w[1] * c * x;
            out[3] = w[1] * c;
        }
        FunctionKind::ExpoRf => {
            let base = w[1] * w[1] + 1.0;
            let (p, saturated) = expo_power(base, x);
            out[0] = 1.0;
            // d/dω1 base^x = x · base^(x-1) · 2ω1
            out[1] = if saturated {
                0.0
            } else {
                p * x * 2.0 * w[1] / base
            };
        }
        FunctionKind::PowRf => {
            let (p, saturated) = abs_power(x, w[1]);
            out[0] = 1.0;
            out[1] = if saturated { 0.0 } else { p * x.abs().ln() };
        }
    }
}

/// Squared-error loss `Σ (f(x_j) - y_j)^2`.
pub fn function_loss(site: &FunctionSite, xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = site.eval(x) - y;
            r * r
        })
        .sum()
}

/// `∂L/∂ω = Σ 2 (f(x_j) - y_j) ∂f/∂ω`.
pub fn loss_gradient(site: &FunctionSite, xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let k = site.kind.coeff_len();
    let mut grad = vec![0.0; k];
    let mut partial = vec![0.0; k];
    for (&x, &y) in xs.iter().zip(ys) {
        let r = site.eval(x) - y;
        coefficient_partials(site, x, &mut partial);
        for (g, d) in grad.iter_mut().zip(&partial) {
            *g += 2.0 * r * d;
        }
    }
    grad
}
