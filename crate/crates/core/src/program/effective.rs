use super::{Program, OUTPUT_REGISTER};

/// Marks instructions whose result can reach the program output.
///
/// Backward liveness pass: the live set starts as the registers the head
/// reads (or `R0` without a head); an instruction is effective when it
/// writes a live register, which then becomes dead while the registers it
/// reads become live.
pub fn effective_instructions(program: &Program) -> Vec<bool> {
    let mut live = vec![false; program.register_count];
    match &program.head {
        Some(head) => live[..head.inputs].iter_mut().for_each(|l| *l = true),
        None => live[OUTPUT_REGISTER] = true,
    }
    let mut mask = vec![false; program.len()];
    for (i, ins) in program.instructions.iter().enumerate().rev() {
        if !live[ins.dest] {
            continue;
        }
        mask[i] = true;
        live[ins.dest] = false;
        for op in ins.used_operands() {
            if let Some(r) = op.register() {
                live[r] = true;
            }
        }
    }
    mask
}

/// Number of effective instructions.
pub fn effective_size(program: &Program) -> usize {
    effective_instructions(program)
        .into_iter()
        .filter(|&e| e)
        .count()
}

/// Copy of `program` keeping only effective instructions.
///
/// An all-intron program keeps its last instruction so the result stays
/// structurally valid; that instruction cannot affect the output.
pub fn strip_introns(program: &Program) -> Program {
    let mask = effective_instructions(program);
    let mut instructions: Vec<_> = program
        .instructions
        .iter()
        .zip(&mask)
        .filter(|(_, &keep)| keep)
        .map(|(ins, _)| ins.clone())
        .collect();
    if instructions.is_empty() {
        if let Some(last) = program.instructions.last() {
            instructions.push(last.clone());
        }
    }
    Program {
        instructions,
        register_count: program.register_count,
        head: program.head.clone(),
    }
}
