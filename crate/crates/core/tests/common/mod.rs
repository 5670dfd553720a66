//! Random programs and data built without the crate's own generators.
#![allow(dead_code)]

use lgptp::{
    BasicFn, Function, FunctionKind, FunctionSite, Instruction, Matrix, MvlrHead, Operand, Program,
    TerminalKind, TerminalSite,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> Matrix {
    let data = (0..rows * cols)
        .map(|_| rng.random_range(-scale..scale))
        .collect();
    Matrix::from_vec(rows, cols, data)
}

pub fn terminal<R: Rng>(rng: &mut R, features: usize) -> TerminalSite {
    loop {
        let kind = TerminalKind::ALL[rng.random_range(0..TerminalKind::ALL.len())];
        let width = rng.random_range(1..=features);
        if width < kind.min_width() {
            continue;
        }
        let alpha = rng.random_range(0..=features - width);
        let beta = alpha + width - 1;
        let coeffs = (0..kind.coeff_len(width))
            .map(|_| rng.random_range(-2.0..2.0))
            .collect();
        return TerminalSite {
            kind,
            alpha,
            beta,
            coeffs,
        };
    }
}

pub fn operand<R: Rng>(rng: &mut R, features: usize, registers: usize) -> Operand {
    match rng.random_range(0..3) {
        0 => Operand::Register(rng.random_range(0..registers)),
        1 => Operand::Input(rng.random_range(0..features)),
        _ => Operand::Terminal(terminal(rng, features)),
    }
}

pub fn function<R: Rng>(rng: &mut R) -> Function {
    let n = BasicFn::ALL.len() + FunctionKind::ALL.len();
    let i = rng.random_range(0..n);
    if i < BasicFn::ALL.len() {
        Function::Basic(BasicFn::ALL[i])
    } else {
        let kind = FunctionKind::ALL[i - BasicFn::ALL.len()];
        let omega = (0..kind.coeff_len())
            .map(|_| rng.random_range(-3.0..3.0))
            .collect();
        Function::Tunable(FunctionSite::new(kind, omega))
    }
}

pub fn instruction<R: Rng>(rng: &mut R, features: usize, registers: usize) -> Instruction {
    Instruction {
        dest: rng.random_range(0..registers),
        func: function(rng),
        op1: operand(rng, features, registers),
        op2: operand(rng, features, registers),
    }
}

/// Random valid program; roughly half carry a head.
pub fn program<R: Rng>(rng: &mut R, features: usize) -> Program {
    let registers = rng.random_range(1..=6);
    let len = rng.random_range(1..=15);
    let instructions = (0..len)
        .map(|_| instruction(rng, features, registers))
        .collect();
    let head = rng.random_bool(0.5).then(|| {
        let inputs = rng.random_range(1..=registers);
        MvlrHead {
            inputs,
            coeffs: (0..=inputs).map(|_| rng.random_range(-2.0..2.0)).collect(),
        }
    });
    Program {
        instructions,
        register_count: registers,
        head,
    }
}

pub fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}
