use crate::matrix::Matrix;
use crate::primitives::{bounded, mvlr_unchecked};

use super::{Function, Instruction, Operand, Program, ProgramError, OUTPUT_REGISTER};

/// Feature slices a terminal site saw, one row per instance.
#[derive(Clone, Debug, PartialEq)]
pub struct TerminalTrace {
    pub instruction: usize,
    pub slot: usize,
    pub slices: Matrix,
}

/// Scalar inputs a tunable function received, one per instance.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionTrace {
    pub instruction: usize,
    pub inputs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExecutionTrace {
    pub terminals: Vec<TerminalTrace>,
    pub functions: Vec<FunctionTrace>,
    /// Destination values per instruction, per instance.
    pub destinations: Vec<Vec<f64>>,
    /// Register file after the last instruction, `[register][instance]`.
    pub finals: Vec<Vec<f64>>,
}

impl ExecutionTrace {
    pub fn terminal(&self, instruction: usize, slot: usize) -> Option<&TerminalTrace> {
        self.terminals
            .iter()
            .find(|t| t.instruction == instruction && t.slot == slot)
    }

    pub fn function(&self, instruction: usize) -> Option<&FunctionTrace> {
        self.functions.iter().find(|t| t.instruction == instruction)
    }
}

fn fill_operand(op: &Operand, regs: &[Vec<f64>], x: &Matrix, out: &mut Vec<f64>) {
    out.clear();
    match op {
        Operand::Register(r) => out.extend_from_slice(&regs[*r]),
        Operand::Input(i) => out.extend(x.iter_rows().map(|row| row[*i])),
        Operand::Terminal(t) => out.extend(x.iter_rows().map(|row| t.eval(row))),
    }
}

fn apply(ins: &Instruction, a: &[f64], b: &[f64], out: &mut [f64]) {
    match &ins.func {
        Function::Basic(f) => {
            if f.arity() == 2 {
                for ((o, &a), &b) in out.iter_mut().zip(a).zip(b) {
                    *o = f.eval(a, b);
                }
            } else {
                for (o, &a) in out.iter_mut().zip(a) {
                    *o = f.eval(a, 0.0);
                }
            }
        }
        Function::Tunable(site) => {
            for (o, &a) in out.iter_mut().zip(a) {
                *o = site.eval(a);
            }
        }
    }
}

struct Machine {
    regs: Vec<Vec<f64>>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Machine {
    fn new(registers: usize, n: usize) -> Self {
        Self {
            regs: vec![vec![0.0; n]; registers],
            a: Vec::with_capacity(n),
            b: Vec::with_capacity(n),
        }
    }

    fn load_operands(&mut self, ins: &Instruction, x: &Matrix) {
        fill_operand(&ins.op1, &self.regs, x, &mut self.a);
        if ins.func.arity() == 2 {
            fill_operand(&ins.op2, &self.regs, x, &mut self.b);
        }
    }

    fn step(&mut self, ins: &Instruction, x: &Matrix) {
        self.load_operands(ins, x);
        let mut dest = std::mem::take(&mut self.regs[ins.dest]);
        apply(ins, &self.a, &self.b, &mut dest);
        self.regs[ins.dest] = dest;
    }
}

fn check_features(program: &Program, x: &Matrix) -> Result<(), ProgramError> {
    program.validate(x.cols())
}

/// Runs the instruction list and returns the register file,
/// `[register][instance]`, before the head is applied.
pub fn run_registers(program: &Program, x: &Matrix) -> Result<Vec<Vec<f64>>, ProgramError> {
    check_features(program, x)?;
    Ok(run_unchecked(program, x))
}

pub(crate) fn run_unchecked(program: &Program, x: &Matrix) -> Vec<Vec<f64>> {
    let mut m = Machine::new(program.register_count, x.rows());
    for ins in &program.instructions {
        m.step(ins, x);
    }
    m.regs
}

/// Applies the head (or reads `R0` when there is none) to a register file.
pub(crate) fn output_from_registers(program: &Program, regs: &[Vec<f64>]) -> Vec<f64> {
    match &program.head {
        None => regs[OUTPUT_REGISTER].clone(),
        Some(head) => {
            let n = regs.first().map_or(0, Vec::len);
            let mut finals = vec![0.0; head.inputs];
            (0..n)
                .map(|j| {
                    for (k, f) in finals.iter_mut().enumerate() {
                        *f = regs[k][j];
                    }
                    bounded(mvlr_unchecked(&head.coeffs, &finals))
                })
                .collect()
        }
    }
}

/// Executes `program` on every row of `x`.
///
/// Registers start at zero, instructions run in order and the head writes
/// the output register. With `trace` set, the values every tunable site
/// received are recorded alongside per-instruction destination values.
pub fn execute(
    program: &Program,
    x: &Matrix,
    trace: bool,
) -> Result<(Vec<f64>, Option<ExecutionTrace>), ProgramError> {
    check_features(program, x)?;
    if !trace {
        let regs = run_unchecked(program, x);
        return Ok((output_from_registers(program, &regs), None));
    }

    let mut m = Machine::new(program.register_count, x.rows());
    let mut tr = ExecutionTrace {
        terminals: Vec::new(),
        functions: Vec::new(),
        destinations: Vec::with_capacity(program.len()),
        finals: Vec::new(),
    };
    for (i, ins) in program.instructions.iter().enumerate() {
        for (slot, op) in ins.used_operands().enumerate() {
            if let Operand::Terminal(t) = op {
                let slices = x.map_rows(|row| row[t.alpha..=t.beta].to_vec());
                tr.terminals.push(TerminalTrace {
                    instruction: i,
                    slot,
                    slices,
                });
            }
        }
        m.load_operands(ins, x);
        if matches!(ins.func, Function::Tunable(_)) {
            tr.functions.push(FunctionTrace {
                instruction: i,
                inputs: m.a.clone(),
            });
        }
        let mut dest = std::mem::take(&mut m.regs[ins.dest]);
        apply(ins, &m.a, &m.b, &mut dest);
        tr.destinations.push(dest.clone());
        m.regs[ins.dest] = dest;
    }
    let predictions = output_from_registers(program, &m.regs);
    tr.finals = m.regs;
    Ok((predictions, Some(tr)))
}

/// Values the first operand of `instruction` takes on each row, i.e. what
/// a tunable function at that position receives.
pub(crate) fn operand_at(program: &Program, x: &Matrix, instruction: usize) -> Vec<f64> {
    let mut m = Machine::new(program.register_count, x.rows());
    for ins in &program.instructions[..instruction] {
        m.step(ins, x);
    }
    fill_operand(&program.instructions[instruction].op1, &m.regs, x, &mut m.a);
    m.a
}
