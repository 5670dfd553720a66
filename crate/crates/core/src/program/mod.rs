//! Register-machine programs: representation, execution with optional
//! tracing of the values each tunable site receives, and effective
//! instruction analysis.
//!
//! A program is a list of instructions over a zero-initialized register
//! file followed by an optional linear head that combines the first `r`
//! registers into the output register `R0`.

mod effective;
mod exec;
mod text;

pub use effective::{effective_instructions, effective_size, strip_introns};
pub use exec::{execute, run_registers, ExecutionTrace, FunctionTrace, TerminalTrace};
pub use text::ParseError;

pub(crate) use exec::{operand_at, output_from_registers, run_unchecked};

use serde::{Deserialize, Serialize};

use crate::primitives::{BasicFn, FunctionSite, TerminalSite};

/// Index of the register that holds the program output.
pub const OUTPUT_REGISTER: usize = 0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Operand {
    Register(usize),
    Input(usize),
    Terminal(TerminalSite),
}

impl Operand {
    pub fn register(&self) -> Option<usize> {
        match self {
            Operand::Register(r) => Some(*r),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Function {
    Basic(BasicFn),
    Tunable(FunctionSite),
}

impl Function {
    pub fn arity(&self) -> usize {
        match self {
            Function::Basic(f) => f.arity(),
            Function::Tunable(_) => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instruction {
    pub dest: usize,
    pub func: Function,
    pub op1: Operand,
    pub op2: Operand,
}

impl Instruction {
    /// Operands the function actually reads.
    pub fn used_operands(&self) -> impl Iterator<Item = &Operand> {
        let n = self.func.arity();
        [&self.op1, &self.op2].into_iter().take(n)
    }
}

/// Affine combination of registers `0..inputs` written into `R0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MvlrHead {
    pub inputs: usize,
    pub coeffs: Vec<f64>,
}

impl MvlrHead {
    /// Head that copies `R0` through unchanged.
    pub fn passthrough(inputs: usize) -> Self {
        let mut coeffs = vec![0.0; inputs + 1];
        if inputs > 0 {
            coeffs[1] = 1.0;
        }
        Self { inputs, coeffs }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Program {
    pub instructions: Vec<Instruction>,
    pub register_count: usize,
    pub head: Option<MvlrHead>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProgramError {
    #[error("program has no instructions")]
    Empty,
    #[error("program has no registers")]
    NoRegisters,
    #[error(
        "instruction {instruction}: register R{register} out of range (register count {count})"
    )]
    RegisterOutOfRange {
        instruction: usize,
        register: usize,
        count: usize,
    },
    #[error("instruction {instruction}: input x{index} out of range ({features} features)")]
    InputOutOfRange {
        instruction: usize,
        index: usize,
        features: usize,
    },
    #[error("instruction {instruction}: terminal range [{alpha}:{beta}] invalid for {features} features")]
    BadRange {
        instruction: usize,
        alpha: usize,
        beta: usize,
        features: usize,
    },
    #[error("instruction {instruction}: {what} has {found} coefficients, expected {expected}")]
    CoeffCount {
        instruction: usize,
        what: String,
        found: usize,
        expected: usize,
    },
    #[error("head reads {inputs} registers but only {count} exist")]
    HeadInputs { inputs: usize, count: usize },
    #[error("head has {found} coefficients, expected {expected}")]
    HeadCoeffs { found: usize, expected: usize },
    #[error("feature matrix has {found} columns, program expects {expected}")]
    FeatureCount { found: usize, expected: usize },
}

impl Program {
    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Registers the head reads, or just the output register without a head.
    pub fn output_inputs(&self) -> usize {
        self.head.as_ref().map_or(1, |h| h.inputs)
    }

    /// Checks register bounds, feature indices, terminal ranges and
    /// coefficient counts against `features` input columns.
    pub fn validate(&self, features: usize) -> Result<(), ProgramError> {
        if self.register_count == 0 {
            return Err(ProgramError::NoRegisters);
        }
        if self.instructions.is_empty() {
            return Err(ProgramError::Empty);
        }
        let count = self.register_count;
        for (i, ins) in self.instructions.iter().enumerate() {
            if ins.dest >= count {
                return Err(ProgramError::RegisterOutOfRange {
                    instruction: i,
                    register: ins.dest,
                    count,
                });
            }
            if let Function::Tunable(site) = &ins.func {
                if site.omega.len() != site.kind.coeff_len() {
                    return Err(ProgramError::CoeffCount {
                        instruction: i,
                        what: site.kind.name().to_string(),
                        found: site.omega.len(),
                        expected: site.kind.coeff_len(),
                    });
                }
            }
            for op in [&ins.op1, &ins.op2] {
                match op {
                    Operand::Register(r) if *r >= count => {
                        return Err(ProgramError::RegisterOutOfRange {
                            instruction: i,
                            register: *r,
                            count,
                        })
                    }
                    Operand::Input(x) if *x >= features => {
                        return Err(ProgramError::InputOutOfRange {
                            instruction: i,
                            index: *x,
                            features,
                        })
                    }
                    Operand::Terminal(t) => {
                        if t.alpha > t.beta || t.beta >= features || t.width() < t.kind.min_width()
                        {
                            return Err(ProgramError::BadRange {
                                instruction: i,
                                alpha: t.alpha,
                                beta: t.beta,
                                features,
                            });
                        }
                        let expected = t.kind.coeff_len(t.width());
                        if t.coeffs.len() != expected {
                            return Err(ProgramError::CoeffCount {
                                instruction: i,
                                what: t.kind.name().to_string(),
                                found: t.coeffs.len(),
                                expected,
                            });
                        }
                    }
                    _ => {}
                }
            }
        }
        if let Some(head) = &self.head {
            if head.inputs == 0 || head.inputs > count {
                return Err(ProgramError::HeadInputs {
                    inputs: head.inputs,
                    count,
                });
            }
            if head.coeffs.len() != head.inputs + 1 {
                return Err(ProgramError::HeadCoeffs {
                    found: head.coeffs.len(),
                    expected: head.inputs + 1,
                });
            }
        }
        Ok(())
    }

    /// All terminal sites in instruction order, with their instruction
    /// index and operand slot (0 or 1).
    pub fn terminals(&self) -> impl Iterator<Item = (usize, usize, &TerminalSite)> {
        self.instructions.iter().enumerate().flat_map(|(i, ins)| {
            [&ins.op1, &ins.op2]
                .into_iter()
                .enumerate()
                .filter_map(move |(slot, op)| match op {
                    Operand::Terminal(t) => Some((i, slot, t)),
                    _ => None,
                })
        })
    }
}
