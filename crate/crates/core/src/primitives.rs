//! Primitive catalog: protected basic functions, tunable terminals over a
//! contiguous feature range, unary tunable functions that model the residual
//! of their input, and the multivariate linear head.
//!
//! Every evaluator here is total: any finite input yields a finite output
//! bounded by [`VALUE_BOUND`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Magnitude cap applied to every primitive output. Squared sums of values
/// at this bound stay representable.
pub const VALUE_BOUND: f64 = 1e15;
/// `ln|x|` returns 0 below this magnitude.
pub const LN_GUARD: f64 = 1e-12;
/// Upper clamp on the argument of `exp`.
pub const EXP_CLAMP: f64 = 30.0;
/// Clamp on the log-domain exponent inside ExpoRF and PowRF.
pub const POW_EXPONENT_CLAMP: f64 = 30.0;
/// Tunable-function coefficients live in `[-OMEGA_LIMIT, OMEGA_LIMIT]`.
pub const OMEGA_LIMIT: f64 = 3.0;

/// Maps NaN to 0 and clamps to `±VALUE_BOUND`.
#[inline]
pub fn bounded(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-VALUE_BOUND, VALUE_BOUND)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasicFn {
    Add,
    Sub,
    Mul,
    Aq,
    Sin,
    Cos,
    Tanh,
    Max,
    Min,
    Sqrt,
    Square,
    Exp,
    Ln,
}

impl BasicFn {
    pub const ALL: [BasicFn; 13] = [
        BasicFn::Add,
        BasicFn::Sub,
        BasicFn::Mul,
        BasicFn::Aq,
        BasicFn::Sin,
        BasicFn::Cos,
        BasicFn::Tanh,
        BasicFn::Max,
        BasicFn::Min,
        BasicFn::Sqrt,
        BasicFn::Square,
        BasicFn::Exp,
        BasicFn::Ln,
    ];

    pub fn arity(self) -> usize {
        match self {
            BasicFn::Add
            | BasicFn::Sub
            | BasicFn::Mul
            | BasicFn::Aq
            | BasicFn::Max
            | BasicFn::Min => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BasicFn::Add => "add",
            BasicFn::Sub => "sub",
            BasicFn::Mul => "mul",
            BasicFn::Aq => "aq",
            BasicFn::Sin => "sin",
            BasicFn::Cos => "cos",
            BasicFn::Tanh => "tanh",
            BasicFn::Max => "max",
            BasicFn::Min => "min",
            BasicFn::Sqrt => "sqrt",
            BasicFn::Square => "square",
            BasicFn::Exp => "exp",
            BasicFn::Ln => "ln",
        }
    }

    /// Protected evaluation. Unary functions ignore `b`.
    #[inline]
    pub fn eval(self, a: f64, b: f64) -> f64 {
        let v = match self {
            BasicFn::Add => a + b,
            BasicFn::Sub => a - b,
            BasicFn::Mul => a * b,
            BasicFn::Aq => a / 1f64.hypot(b),
            BasicFn::Sin => a.sin(),
            BasicFn::Cos => a.cos(),
            BasicFn::Tanh => a.tanh(),
            BasicFn::Max => a.max(b),
            BasicFn::Min => a.min(b),
            BasicFn::Sqrt => a.abs().sqrt(),
            BasicFn::Square => a * a,
            BasicFn::Exp => a.min(EXP_CLAMP).exp(),
            BasicFn::Ln => {
                if a.abs() < LN_GUARD {
                    0.0
                } else {
                    a.abs().ln()
                }
            }
        };
        bounded(v)
    }
}

/// Free-function form of [`BasicFn::eval`].
pub fn eval_basic(func: BasicFn, a: f64, b: f64) -> f64 {
    func.eval(a, b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TerminalKind {
    #[serde(rename = "LR")]
    Lr,
    #[serde(rename = "1stDLR")]
    FirstDiffLr,
    Avg,
    Std,
    Fluctuate,
    NegSlope,
    PosSlope,
    Peak,
    Valley,
    PeakLoc,
}

impl TerminalKind {
    pub const ALL: [TerminalKind; 10] = [
        TerminalKind::Lr,
        TerminalKind::FirstDiffLr,
        TerminalKind::Avg,
        TerminalKind::Std,
        TerminalKind::Fluctuate,
        TerminalKind::NegSlope,
        TerminalKind::PosSlope,
        TerminalKind::Peak,
        TerminalKind::Valley,
        TerminalKind::PeakLoc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TerminalKind::Lr => "LR",
            TerminalKind::FirstDiffLr => "1stDLR",
            TerminalKind::Avg => "Avg",
            TerminalKind::Std => "Std",
            TerminalKind::Fluctuate => "Fluctuate",
            TerminalKind::NegSlope => "NegSlope",
            TerminalKind::PosSlope => "PosSlope",
            TerminalKind::Peak => "Peak",
            TerminalKind::Valley => "Valley",
            TerminalKind::PeakLoc => "PeakLoc",
        }
    }

    /// Kinds built on successive differences need at least two features.
    pub fn min_width(self) -> usize {
        match self {
            TerminalKind::FirstDiffLr
            | TerminalKind::Fluctuate
            | TerminalKind::NegSlope
            | TerminalKind::PosSlope => 2,
            _ => 1,
        }
    }

    /// Number of coefficients for a range of `width` features.
    pub fn coeff_len(self, width: usize) -> usize {
        match self {
            TerminalKind::Lr => width + 1,
            TerminalKind::FirstDiffLr => width,
            _ => 2,
        }
    }

    /// True for the kinds of the form `w0 + w1 * gamma(slice)`.
    pub fn is_summary(self) -> bool {
        !matches!(self, TerminalKind::Lr | TerminalKind::FirstDiffLr)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FunctionKind {
    #[serde(rename = "LRF")]
    Lrf,
    #[serde(rename = "SinRF")]
    SinRf,
    #[serde(rename = "ExpoRF")]
    ExpoRf,
    #[serde(rename = "PowRF")]
    PowRf,
}

impl FunctionKind {
    pub const ALL: [FunctionKind; 4] = [
        FunctionKind::Lrf,
        FunctionKind::SinRf,
        FunctionKind::ExpoRf,
        FunctionKind::PowRf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionKind::Lrf => "LRF",
            FunctionKind::SinRf => "SinRF",
            FunctionKind::ExpoRf => "ExpoRF",
            FunctionKind::PowRf => "PowRF",
        }
    }

    pub fn coeff_len(self) -> usize {
        match self {
            FunctionKind::SinRf => 4,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown primitive `{0}`")]
pub struct UnknownPrimitive(pub String);

macro_rules! impl_name_parse {
    ($ty:ty) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = UnknownPrimitive;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::ALL
                    .iter()
                    .copied()
                    .find(|k| k.name().eq_ignore_ascii_case(s))
                    .ok_or_else(|| UnknownPrimitive(s.to_string()))
            }
        }
    };
}

impl_name_parse!(BasicFn);
impl_name_parse!(TerminalKind);
impl_name_parse!(FunctionKind);

/// Summary statistic of a feature slice for the `w0 + w1 * gamma` kinds.
///
/// `alpha` is the absolute index of `slice[0]`; only `PeakLoc` uses it.
/// Returns 0 for LR and 1stDLR, which are not summary kinds.
pub fn gamma_eval(kind: TerminalKind, slice: &[f64], alpha: usize) -> f64 {
    let n = slice.len() as f64;
    let diffs = || slice.windows(2).map(|w| w[1] - w[0]);
    let diff_count = (slice.len().saturating_sub(1)).max(1) as f64;
    match kind {
        TerminalKind::Avg => slice.iter().sum::<f64>() / n,
        TerminalKind::Std => {
            let mean = slice.iter().sum::<f64>() / n;
            (slice.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
        }
        TerminalKind::Fluctuate => diffs().map(f64::abs).sum::<f64>() / diff_count,
        TerminalKind::NegSlope => diffs().map(|d| d.min(0.0)).sum::<f64>() / diff_count,
        TerminalKind::PosSlope => diffs().map(|d| d.max(0.0)).sum::<f64>() / diff_count,
        TerminalKind::Peak => slice.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        TerminalKind::Valley => slice.iter().copied().fold(f64::INFINITY, f64::min),
        TerminalKind::PeakLoc => {
            let mut best = 0;
            for (i, &v) in slice.iter().enumerate() {
                if v > slice[best] {
                    best = i;
                }
            }
            (alpha + best) as f64
        }
        TerminalKind::Lr | TerminalKind::FirstDiffLr => 0.0,
    }
}

/// A tunable terminal site: a kind, an inclusive feature range and its
/// coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerminalSite {
    pub kind: TerminalKind,
    pub alpha: usize,
    pub beta: usize,
    pub coeffs: Vec<f64>,
}

impl TerminalSite {
    /// Fresh site with neutral coefficients: intercept 0 and unit slope
    /// (spread evenly across the range for the LR-style kinds).
    pub fn neutral(kind: TerminalKind, alpha: usize, beta: usize) -> Self {
        let width = beta - alpha + 1;
        let len = kind.coeff_len(width);
        let mut coeffs = vec![0.0; len];
        if kind.is_summary() {
            coeffs[1] = 1.0;
        } else {
            let slope = 1.0 / (len - 1).max(1) as f64;
            for c in coeffs.iter_mut().skip(1) {
                *c = slope;
            }
        }
        Self {
            kind,
            alpha,
            beta,
            coeffs,
        }
    }

    pub fn width(&self) -> usize {
        self.beta + 1 - self.alpha
    }

    /// The scalar feature this site regresses on, for summary kinds.
    pub fn summary(&self, x: &[f64]) -> f64 {
        gamma_eval(self.kind, &x[self.alpha..=self.beta], self.alpha)
    }

    /// Evaluates the site on one instance's full feature vector.
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_slice(&x[self.alpha..=self.beta])
    }

    /// Evaluates the site on the already extracted `[alpha..=beta]` slice.
    pub fn eval_slice(&self, slice: &[f64]) -> f64 {
        let w = &self.coeffs;
        let v = match self.kind {
            TerminalKind::Lr => w[0] + slice.iter().zip(&w[1..]).map(|(a, b)| a * b).sum::<f64>(),
            TerminalKind::FirstDiffLr => {
                w[0] + slice
                    .windows(2)
                    .zip(&w[1..])
                    .map(|(p, b)| (p[1] - p[0]) * b)
                    .sum::<f64>()
            }
            kind => w[0] + w[1] * gamma_eval(kind, slice, self.alpha),
        };
        bounded(v)
    }
}

/// Free-function form of [`TerminalSite::eval`].
pub fn eval_tunable_terminal(site: &TerminalSite, x: &[f64]) -> f64 {
    site.eval(x)
}

/// Protected `base^x` via the log domain with the exponent clamped.
#[inline]
pub(crate) fn expo_power(base: f64, x: f64) -> (f64, bool) {
    let t = x * base.ln();
    let clamped = t.clamp(-POW_EXPONENT_CLAMP, POW_EXPONENT_CLAMP);
    (clamped.exp(), clamped != t)
}

/// Protected `|x|^p`; `0^p` is 1 for `p == 0` and 0 otherwise.
#[inline]
pub(crate) fn abs_power(x: f64, p: f64) -> (f64, bool) {
    let a = x.abs();
    if a == 0.0 {
        return (if p == 0.0 { 1.0 } else { 0.0 }, true);
    }
    let t = p * a.ln();
    let clamped = t.clamp(-POW_EXPONENT_CLAMP, POW_EXPONENT_CLAMP);
    (clamped.exp(), clamped != t)
}

/// A tunable function site: unary, tuned against the target from the
/// values it receives during execution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionSite {
    pub kind: FunctionKind,
    pub omega: Vec<f64>,
}

impl FunctionSite {
    pub fn new(kind: FunctionKind, omega: Vec<f64>) -> Self {
        debug_assert_eq!(omega.len(), kind.coeff_len());
        Self { kind, omega }
    }

    /// Unbounded value; [`FunctionSite::eval`] applies the output cap.
    #[inline]
    pub(crate) fn raw(&self, x: f64) -> f64 {
        let w = &self.omega;
        match self.kind {
            FunctionKind::Lrf => w[0] + w[1] * x,
            FunctionKind::SinRf => w[0] + w[1] * (w[2] * x + w[3]).sin() + x,
            FunctionKind::ExpoRf => w[0] + expo_power(w[1] * w[1] + 1.0, x).0 + x,
            FunctionKind::PowRf => w[0] + abs_power(x, w[1]).0 + x,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        bounded(self.raw(x))
    }

    pub fn clamp_omega(&mut self) {
        for w in &mut self.omega {
            *w = if w.is_nan() {
                0.0
            } else {
                w.clamp(-OMEGA_LIMIT, OMEGA_LIMIT)
            };
        }
    }
}

/// Free-function form of [`FunctionSite::eval`].
pub fn eval_tunable_function(site: &FunctionSite, x: f64) -> f64 {
    site.eval(x)
}

/// Affine head `[1, finals] . coeffs`. Errors when the lengths disagree.
pub fn eval_mvlr(coeffs: &[f64], register_finals: &[f64]) -> Result<f64, LengthMismatch> {
    if coeffs.len() != register_finals.len() + 1 {
        return Err(LengthMismatch {
            expected: register_finals.len() + 1,
            found: coeffs.len(),
        });
    }
    Ok(bounded(mvlr_unchecked(coeffs, register_finals)))
}

#[inline]
pub(crate) fn mvlr_unchecked(coeffs: &[f64], finals: &[f64]) -> f64 {
    coeffs[0]
        + finals
            .iter()
            .zip(&coeffs[1..])
            .map(|(x, w)| x * w)
            .sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("coefficient vector has length {found}, expected {expected}")]
pub struct LengthMismatch {
    pub expected: usize,
    pub found: usize,
}

/// Which primitives a run may draw from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveCatalog {
    pub basic: Vec<BasicFn>,
    pub terminals: Vec<TerminalKind>,
    pub functions: Vec<FunctionKind>,
    pub raw_inputs: bool,
}

impl PrimitiveCatalog {
    /// All ten terminal kinds, all four tunable functions, no raw inputs.
    pub fn fish() -> Self {
        Self {
            basic: BasicFn::ALL.to_vec(),
            terminals: TerminalKind::ALL.to_vec(),
            functions: FunctionKind::ALL.to_vec(),
            raw_inputs: false,
        }
    }

    /// LR as the only tunable terminal, plus raw inputs.
    pub fn srbench() -> Self {
        Self {
            basic: BasicFn::ALL.to_vec(),
            terminals: vec![TerminalKind::Lr],
            functions: FunctionKind::ALL.to_vec(),
            raw_inputs: true,
        }
    }

    /// Plain LGP: basic functions over raw inputs only.
    pub fn basic() -> Self {
        Self {
            basic: BasicFn::ALL.to_vec(),
            terminals: Vec::new(),
            functions: Vec::new(),
            raw_inputs: true,
        }
    }

    pub fn function_count(&self) -> usize {
        self.basic.len() + self.functions.len()
    }

    pub fn has_inputs(&self) -> bool {
        self.raw_inputs || !self.terminals.is_empty()
    }
}
