//! Generational search: random initialization, tournament selection, one
//! variation operator per offspring, head refit and evaluation, elitism.
//!
//! Every offspring draws from its own random stream derived from
//! `(seed, generation, slot)`, so a run is bit-identical for any worker
//! count.

mod config;
pub mod operators;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::numeric::fit_head;
use crate::program::{effective_size, output_from_registers, run_unchecked, Program};

pub use config::{ConfigError, EvolutionConfig, Mode, OperatorRates};
pub use operators::{crossover, macro_mutate, micro_mutate, swap_mutate, Builder, MicroSite};

/// Mean squared error.
pub fn mse(predictions: &[f64], targets: &[f64]) -> f64 {
    if targets.is_empty() {
        return 0.0;
    }
    predictions
        .iter()
        .zip(targets)
        .map(|(p, y)| (p - y) * (p - y))
        .sum::<f64>()
        / targets.len() as f64
}

/// Coefficient of determination `1 - SS_res / SS_tot`. With constant
/// targets it is 1 for an exact fit and 0 otherwise.
pub fn r_squared(predictions: &[f64], targets: &[f64]) -> f64 {
    if targets.is_empty() {
        return 0.0;
    }
    let mean = targets.iter().sum::<f64>() / targets.len() as f64;
    let ss_tot: f64 = targets.iter().map(|y| (y - mean) * (y - mean)).sum();
    let ss_res: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, y)| (p - y) * (p - y))
        .sum();
    if ss_tot == 0.0 {
        return if ss_res == 0.0 { 1.0 } else { 0.0 };
    }
    1.0 - ss_res / ss_tot
}

/// Training data for one run.
#[derive(Clone, Copy, Debug)]
pub struct Problem<'a> {
    pub x: &'a Matrix,
    pub y: &'a [f64],
}

impl<'a> Problem<'a> {
    pub fn new(x: &'a Matrix, y: &'a [f64]) -> Self {
        Self { x, y }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub program: Program,
    /// Training MSE, lower is better. Always finite.
    pub fitness: f64,
    pub r2: f64,
}

impl Individual {
    /// Refits the head on `problem` and scores the program.
    pub fn evaluate(mut program: Program, problem: &Problem<'_>) -> Self {
        let regs = run_unchecked(&program, problem.x);
        if let Some(head) = &program.head {
            if let Ok(fitted) = fit_head(head, &regs, problem.y) {
                program.head = Some(fitted);
            }
        }
        let predictions = output_from_registers(&program, &regs);
        let (fitness, r2) = score(&predictions, problem.y);
        Self {
            program,
            fitness,
            r2,
        }
    }

    pub fn effective_size(&self) -> usize {
        effective_size(&self.program)
    }
}

fn score(predictions: &[f64], y: &[f64]) -> (f64, f64) {
    let m = mse(predictions, y);
    let r2 = r_squared(predictions, y);
    let fitness = if m.is_finite() { m } else { f64::MAX };
    (fitness, if r2.is_finite() { r2 } else { f64::MIN })
}

/// Held-out MSE and R² of a fitted program.
pub fn test_metrics(program: &Program, problem: &Problem<'_>) -> (f64, f64) {
    let regs = run_unchecked(program, problem.x);
    score(&output_from_registers(program, &regs), problem.y)
}

/// Tournament selection over `tournament_size` distinct entrants (the
/// whole population if it is smaller); the fittest wins and ties go to
/// the lower population index.
pub fn select<'p, R: Rng + ?Sized>(
    population: &'p [Individual],
    tournament_size: usize,
    rng: &mut R,
) -> &'p Individual {
    let amount = tournament_size.clamp(1, population.len());
    let best = rand::seq::index::sample(rng, population.len(), amount)
        .into_iter()
        .min_by(|&a, &b| {
            population[a]
                .fitness
                .total_cmp(&population[b].fitness)
                .then(a.cmp(&b))
        })
        .expect("nonempty tournament");
    &population[best]
}

/// Independent stream for one `(seed, generation, slot)` triple.
pub fn stream(seed: u64, generation: u64, slot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(generation.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ slot);
    rng
}

fn initial_individual(builder: &Builder<'_>, problem: &Problem<'_>, slot: usize) -> Individual {
    let mut rng = stream(builder.config.seed, 0, slot as u64);
    Individual::evaluate(builder.program(&mut rng), problem)
}

/// Random initial population, each member scored with a fitted head.
pub fn init_population(config: &EvolutionConfig, problem: &Problem<'_>) -> Vec<Individual> {
    let builder = Builder::new(config, problem.x.cols());
    (0..config.population_size)
        .map(|i| initial_individual(&builder, problem, i))
        .collect()
}

/// Builds one offspring for `slot` of generation `generation` (1-based).
fn offspring(
    builder: &Builder<'_>,
    population: &[Individual],
    problem: &Problem<'_>,
    generation: usize,
    slot: usize,
) -> Individual {
    let cfg = builder.config;
    let mut rng = stream(cfg.seed, generation as u64, slot as u64);
    let rates = &cfg.operator_rates;
    let draw: f64 = rng.random();
    let parent = &select(population, cfg.tournament_size, &mut rng).program;
    let child = if draw < rates.macro_mutation {
        macro_mutate(parent, builder, &mut rng)
    } else if draw < rates.macro_mutation + rates.micro_mutation {
        micro_mutate(parent, problem.x, problem.y, builder, &mut rng).0
    } else if draw < rates.macro_mutation + rates.micro_mutation + rates.crossover {
        let other = &select(population, cfg.tournament_size, &mut rng).program;
        crossover(parent, other, builder, &mut rng).0
    } else {
        swap_mutate(parent, &mut rng)
    };
    Individual::evaluate(child, problem)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_r2: f64,
    pub mean_effective_size: f64,
    pub best_effective_size: usize,
    /// Held-out metrics of the best-so-far individual, when a validation
    /// set was supplied.
    pub validation_mse: Option<f64>,
    pub validation_r2: Option<f64>,
}

pub type History = Vec<GenerationStats>;

/// One progress record per generation.
#[derive(Clone, Debug)]
pub struct ProgressRecord<'a> {
    pub stats: &'a GenerationStats,
    pub elapsed_secs: f64,
}

pub trait ProgressSink {
    fn record(&mut self, record: &ProgressRecord<'_>);
}

impl<F: FnMut(&ProgressRecord<'_>)> ProgressSink for F {
    fn record(&mut self, record: &ProgressRecord<'_>) {
        self(record)
    }
}

/// Discards progress.
pub struct Silent;

impl ProgressSink for Silent {
    fn record(&mut self, _: &ProgressRecord<'_>) {}
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvolutionError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0} feature rows but {1} targets")]
    Shape(usize, usize),
    #[error("training data is empty")]
    Empty,
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub best: Individual,
    pub history: History,
    pub final_population: Vec<Individual>,
}

fn best_index(population: &[Individual]) -> usize {
    let mut best = 0;
    for (i, ind) in population.iter().enumerate() {
        if ind.fitness < population[best].fitness {
            best = i;
        }
    }
    best
}

fn stats(
    generation: usize,
    population: &[Individual],
    best: &Individual,
    validation: Option<&Problem<'_>>,
) -> GenerationStats {
    let n = population.len() as f64;
    let (validation_mse, validation_r2) = match validation {
        Some(v) => {
            let (m, r) = test_metrics(&best.program, v);
            (Some(m), Some(r))
        }
        None => (None, None),
    };
    GenerationStats {
        generation,
        best_fitness: best.fitness,
        mean_fitness: population.iter().map(|i| i.fitness).sum::<f64>() / n,
        best_r2: best.r2,
        mean_effective_size: population
            .iter()
            .map(|i| i.effective_size() as f64)
            .sum::<f64>()
            / n,
        best_effective_size: best.effective_size(),
        validation_mse,
        validation_r2,
    }
}

fn run_slots<F>(pool: Option<&rayon::ThreadPool>, count: usize, f: F) -> Vec<Individual>
where
    F: Fn(usize) -> Individual + Sync + Send,
{
    match pool {
        Some(pool) => pool.install(|| (0..count).into_par_iter().map(&f).collect()),
        None => (0..count).map(f).collect(),
    }
}

/// Runs the generational loop and returns the best individual seen.
///
/// `workers > 1` evaluates offspring on a thread pool; results do not
/// depend on the worker count.
pub fn evolve(
    config: &EvolutionConfig,
    train: &Problem<'_>,
    validation: Option<&Problem<'_>>,
    workers: usize,
    sink: &mut dyn ProgressSink,
) -> Result<EvolutionResult, EvolutionError> {
    config.validate()?;
    if train.x.rows() != train.y.len() {
        return Err(EvolutionError::Shape(train.x.rows(), train.y.len()));
    }
    if train.y.is_empty() || train.x.cols() == 0 {
        return Err(EvolutionError::Empty);
    }
    let start = Instant::now();
    let pool = if workers > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .ok()
    } else {
        None
    };
    let builder = Builder::new(config, train.x.cols());

    let mut population = run_slots(pool.as_ref(), config.population_size, |i| {
        initial_individual(&builder, train, i)
    });
    let mut best = population[best_index(&population)].clone();
    let mut history = Vec::with_capacity(config.generations + 1);
    let record = |history: &mut History, s: GenerationStats, sink: &mut dyn ProgressSink| {
        sink.record(&ProgressRecord {
            stats: &s,
            elapsed_secs: start.elapsed().as_secs_f64(),
        });
        history.push(s);
    };
    record(&mut history, stats(0, &population, &best, validation), sink);

    for generation in 1..=config.generations {
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| {
            population[a]
                .fitness
                .total_cmp(&population[b].fitness)
                .then(a.cmp(&b))
        });
        let elites = config.elitism.min(population.len());
        let parents = &population;
        let children = run_slots(pool.as_ref(), config.population_size - elites, |slot| {
            offspring(&builder, parents, train, generation, slot)
        });
        let mut next: Vec<Individual> = order[..elites]
            .iter()
            .map(|&i| population[i].clone())
            .collect();
        next.extend(children);
        population = next;

        let gen_best = &population[best_index(&population)];
        if gen_best.fitness < best.fitness {
            best = gen_best.clone();
        }
        record(
            &mut history,
            stats(generation, &population, &best, validation),
            sink,
        );
    }

    Ok(EvolutionResult {
        best,
        history,
        final_population: population,
    })
}
