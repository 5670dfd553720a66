//! Random program construction and the four variation operators.
//!
//! Operators only change structure (and, for micro mutation, the tuned
//! coefficients of the touched site). The head is refitted when the
//! offspring is evaluated.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::matrix::Matrix;
use crate::numeric::{tune_function, tune_terminal};
use crate::primitives::{FunctionKind, FunctionSite, TerminalKind, TerminalSite, OMEGA_LIMIT};
use crate::program::{Function, Instruction, MvlrHead, Operand, Program};

use super::config::EvolutionConfig;

/// Samples random program parts valid for a given feature count.
#[derive(Clone, Debug)]
pub struct Builder<'a> {
    pub config: &'a EvolutionConfig,
    pub features: usize,
    terminal_kinds: Vec<TerminalKind>,
    max_width: usize,
}

impl<'a> Builder<'a> {
    pub fn new(config: &'a EvolutionConfig, features: usize) -> Self {
        let max_width = config.max_terminal_width(features);
        let terminal_kinds = config
            .primitives
            .terminals
            .iter()
            .copied()
            .filter(|k| k.min_width() <= max_width.min(features))
            .collect();
        Self {
            config,
            features,
            terminal_kinds,
            max_width,
        }
    }

    pub fn register<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(0..self.config.register_count)
    }

    pub fn terminal<R: Rng + ?Sized>(&self, rng: &mut R, kind: TerminalKind) -> TerminalSite {
        let width = rng.random_range(kind.min_width()..=self.max_width);
        let alpha = rng.random_range(0..=self.features - width);
        TerminalSite::neutral(kind, alpha, alpha + width - 1)
    }

    pub fn operand<R: Rng + ?Sized>(&self, rng: &mut R) -> Operand {
        let raw = self.config.primitives.raw_inputs && self.features > 0;
        let tunable = !self.terminal_kinds.is_empty();
        if (raw || tunable) && rng.random_bool(self.config.input_rate) {
            let use_terminal = tunable && (!raw || rng.random_bool(0.5));
            if use_terminal {
                let kind = *self.terminal_kinds.choose(rng).expect("nonempty");
                return Operand::Terminal(self.terminal(rng, kind));
            }
            return Operand::Input(rng.random_range(0..self.features));
        }
        Operand::Register(self.register(rng))
    }

    pub fn function_site<R: Rng + ?Sized>(&self, rng: &mut R, kind: FunctionKind) -> FunctionSite {
        let omega = (0..kind.coeff_len())
            .map(|_| rng.random_range(-OMEGA_LIMIT..=OMEGA_LIMIT))
            .collect();
        FunctionSite::new(kind, omega)
    }

    pub fn function<R: Rng + ?Sized>(&self, rng: &mut R) -> Function {
        let p = &self.config.primitives;
        let i = rng.random_range(0..p.function_count());
        if i < p.basic.len() {
            Function::Basic(p.basic[i])
        } else {
            Function::Tunable(self.function_site(rng, p.functions[i - p.basic.len()]))
        }
    }

    pub fn instruction<R: Rng + ?Sized>(&self, rng: &mut R) -> Instruction {
        Instruction {
            dest: self.register(rng),
            func: self.function(rng),
            op1: self.operand(rng),
            op2: self.operand(rng),
        }
    }

    pub fn program<R: Rng + ?Sized>(&self, rng: &mut R) -> Program {
        let max_len = self
            .config
            .init_max_length
            .min(self.config.max_program_size);
        let len = rng.random_range(1..=max_len);
        let head = self
            .config
            .mvlr
            .then(|| MvlrHead::passthrough(self.config.mvlr_inputs));
        Program {
            instructions: (0..len).map(|_| self.instruction(rng)).collect(),
            register_count: self.config.register_count,
            head,
        }
    }

    /// Structural validity plus the configured size and range limits.
    pub fn within_limits(&self, program: &Program) -> bool {
        program.validate(self.features).is_ok()
            && program.len() <= self.config.max_program_size
            && program.register_count == self.config.register_count
            && program
                .terminals()
                .all(|(_, _, t)| t.width() <= self.max_width)
            && program.instructions.iter().all(|ins| match &ins.func {
                Function::Tunable(s) if s.kind != FunctionKind::Lrf => {
                    s.omega.iter().all(|w| w.abs() <= OMEGA_LIMIT)
                }
                _ => true,
            })
    }
}

/// Inserts or deletes one instruction with equal probability, falling back
/// to the other move at the size limits.
pub fn macro_mutate<R: Rng + ?Sized>(
    program: &Program,
    builder: &Builder<'_>,
    rng: &mut R,
) -> Program {
    let mut out = program.clone();
    let max = builder.config.max_program_size;
    let can_insert = out.len() < max;
    let can_delete = out.len() > 1;
    let insert = match (can_insert, can_delete) {
        (true, true) => rng.random_bool(0.5),
        (true, false) => true,
        (false, true) => false,
        (false, false) => return out,
    };
    if insert {
        let at = rng.random_range(0..=out.len());
        out.instructions.insert(at, builder.instruction(rng));
    } else {
        let at = rng.random_range(0..out.len());
        out.instructions.remove(at);
    }
    out
}

/// Which part of an instruction micro mutation replaced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MicroSite {
    Dest,
    Func,
    Op1,
    Op2,
}

/// Replaces one of `dest`, `func`, `op1`, `op2` in a random instruction.
///
/// When the touched site is a tunable terminal or function (or a tunable
/// function's input changed), its coefficients are fitted to `y` from the
/// values it receives on `x`.
pub fn micro_mutate<R: Rng + ?Sized>(
    program: &Program,
    x: &Matrix,
    y: &[f64],
    builder: &Builder<'_>,
    rng: &mut R,
) -> (Program, usize, MicroSite) {
    let mut out = program.clone();
    let i = rng.random_range(0..out.len());
    let site = match rng.random_range(0..4) {
        0 => MicroSite::Dest,
        1 => MicroSite::Func,
        2 => MicroSite::Op1,
        _ => MicroSite::Op2,
    };
    let cfg = builder.config;
    let ins = &mut out.instructions[i];
    match site {
        MicroSite::Dest => {
            if cfg.register_count > 1 {
                let r = rng.random_range(0..cfg.register_count - 1);
                ins.dest = if r >= ins.dest { r + 1 } else { r };
            }
        }
        MicroSite::Func => {
            let mut f = builder.function(rng);
            for _ in 0..8 {
                if !same_function(&f, &ins.func) {
                    break;
                }
                f = builder.function(rng);
            }
            ins.func = f;
        }
        MicroSite::Op1 => ins.op1 = builder.operand(rng),
        MicroSite::Op2 => ins.op2 = builder.operand(rng),
    }

    // Fit whatever tunable site the change touched.
    let touched_terminal = match site {
        MicroSite::Op1 => matches!(ins.op1, Operand::Terminal(_)).then_some(0),
        MicroSite::Op2 => matches!(ins.op2, Operand::Terminal(_)).then_some(1),
        _ => None,
    };
    if let Some(slot) = touched_terminal {
        let op = if slot == 0 {
            &mut ins.op1
        } else {
            &mut ins.op2
        };
        if let Operand::Terminal(t) = op {
            let slices = x.map_rows(|row| row[t.alpha..=t.beta].to_vec());
            if let Ok(tuned) = tune_terminal(t, &slices, y) {
                *t = tuned;
            }
        }
    }
    let retune_function = matches!(ins.func, Function::Tunable(_))
        && matches!(site, MicroSite::Func | MicroSite::Op1);
    if retune_function {
        let inputs = crate::program::operand_at(&out, x, i);
        if let Function::Tunable(f) = &mut out.instructions[i].func {
            if let Ok(tuned) = tune_function(f, &inputs, y, cfg.gd_steps, cfg.gd_step_size) {
                *f = tuned;
            }
        }
    }
    (out, i, site)
}

fn same_function(a: &Function, b: &Function) -> bool {
    match (a, b) {
        (Function::Basic(x), Function::Basic(y)) => x == y,
        (Function::Tunable(x), Function::Tunable(y)) => x.kind == y.kind,
        _ => false,
    }
}

fn segment<R: Rng + ?Sized>(len: usize, max_segment: usize, rng: &mut R) -> (usize, usize) {
    let start = rng.random_range(0..len);
    let seg = rng.random_range(1..=max_segment.min(len - start));
    (start, seg)
}

/// Exchanges a random contiguous segment (at most `crossover_max_segment`
/// long) between two parents. Children over the size limit lose their
/// tail instructions.
pub fn crossover<R: Rng + ?Sized>(
    a: &Program,
    b: &Program,
    builder: &Builder<'_>,
    rng: &mut R,
) -> (Program, Program) {
    let cfg = builder.config;
    let (sa, la) = segment(a.len(), cfg.crossover_max_segment, rng);
    let (sb, lb) = segment(b.len(), cfg.crossover_max_segment, rng);
    let splice = |base: &Program, start: usize, len: usize, donor: &[Instruction]| {
        let mut instructions = Vec::with_capacity(base.len() - len + donor.len());
        instructions.extend_from_slice(&base.instructions[..start]);
        instructions.extend_from_slice(donor);
        instructions.extend_from_slice(&base.instructions[start + len..]);
        instructions.truncate(cfg.max_program_size);
        Program {
            instructions,
            ..base.clone()
        }
    };
    let child_a = splice(a, sa, la, &b.instructions[sb..sb + lb]);
    let child_b = splice(b, sb, lb, &a.instructions[sa..sa + la]);
    (child_a, child_b)
}

/// Swaps one random pair of adjacent instructions.
pub fn swap_mutate<R: Rng + ?Sized>(program: &Program, rng: &mut R) -> Program {
    let mut out = program.clone();
    if out.len() >= 2 {
        let i = rng.random_range(0..out.len() - 1);
        out.instructions.swap(i, i + 1);
    }
    out
}
