//! Fixtures shared by the benchmarks in `benches/`.

use lgptp::data::synthetic::smooth_spectra;
use lgptp::evolution::Builder;
use lgptp::{EvolutionConfig, Matrix, Program};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` smooth spectra of `d` features and a target mixing two bands.
pub fn spectra(n: usize, d: usize, seed: u64) -> (Matrix, Vec<f64>) {
    let x = smooth_spectra(n, d, &mut rng(seed));
    let y = x
        .iter_rows()
        .map(|row| row[..d / 4].iter().sum::<f64>() / (d / 4) as f64 - row[d / 2])
        .collect();
    (x, y)
}

/// Random program of exactly `len` instructions drawn from `config`.
pub fn program(config: &EvolutionConfig, features: usize, len: usize, seed: u64) -> Program {
    let builder = Builder::new(config, features);
    let mut r = rng(seed);
    let mut p = builder.program(&mut r);
    p.instructions = (0..len).map(|_| builder.instruction(&mut r)).collect();
    p
}
