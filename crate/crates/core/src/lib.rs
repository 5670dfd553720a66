//! Symbolic regression by linear genetic programming with tunable
//! primitives.
//!
//! Programs are register-machine instruction lists. Besides the usual
//! arithmetic functions they may contain terminals that regress on a
//! contiguous range of input features, unary functions that model the
//! residual between their input and the target, and a final linear head
//! over several registers. Evolution searches program structure; the
//! coefficients of those primitives are fitted by least squares or
//! normalized gradient descent against the targets as they are created.

pub mod data;
pub mod evolution;
pub mod experiment;
pub mod export;
pub mod matrix;
pub mod numeric;
pub mod primitives;
pub mod program;

pub use evolution::{evolve, EvolutionConfig, History, Individual, Mode};
pub use matrix::Matrix;
pub use primitives::{
    BasicFn, FunctionKind, FunctionSite, PrimitiveCatalog, TerminalKind, TerminalSite,
};
pub use program::{
    effective_instructions, execute, Function, Instruction, MvlrHead, Operand, Program,
};
