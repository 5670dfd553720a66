//! Repeated grouped cross-validation: split, augment the training fold,
//! evolve, score the best program on the held-out fold.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{augment, grouped_kfold, AugmentConfig, DataError, Preset, SpectralDataset};
use crate::evolution::{
    evolve, test_metrics, EvolutionConfig, EvolutionError, History, Mode, Problem, ProgressSink,
};
use crate::export::{to_dot, FrequencyTable};
use crate::program::effective_size;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub evolution: EvolutionConfig,
    pub preset: Preset,
    pub folds: usize,
    pub repeats: usize,
    pub augmentation: AugmentConfig,
}

impl ExperimentConfig {
    pub fn fish() -> Self {
        Self {
            evolution: EvolutionConfig::fish(),
            preset: Preset::None,
            folds: 6,
            repeats: 10,
            augmentation: AugmentConfig::default(),
        }
    }

    pub fn srbench() -> Self {
        Self {
            evolution: EvolutionConfig::srbench(),
            preset: Preset::None,
            folds: 6,
            repeats: 10,
            augmentation: AugmentConfig::disabled(),
        }
    }

    pub fn for_mode(mode: Mode) -> Self {
        match mode {
            Mode::Srbench => Self::srbench(),
            Mode::Fish | Mode::Custom => Self {
                evolution: EvolutionConfig::for_mode(mode),
                ..Self::fish()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
}

/// SplitMix64 finalizer, used to derive independent seeds.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub seed: u64,
    pub train_rows: usize,
    pub augmented_rows: usize,
    pub test_rows: usize,
    pub train_mse: f64,
    pub train_r2: f64,
    pub test_mse: f64,
    pub test_r2: f64,
    pub effective_size: usize,
    pub model: String,
    pub dag: String,
    pub history: History,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub repeat: usize,
    pub seed: u64,
    pub features: usize,
    pub folds: Vec<FoldReport>,
    pub test_r2_mean: f64,
    pub test_r2_std: f64,
    /// Mean effective size of the population per generation, averaged
    /// over folds.
    pub effective_size_trajectory: Vec<f64>,
    pub frequency: FrequencyTable,
    pub config: ExperimentConfig,
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs every fold of one repeat. `data` must already be treated.
///
/// Seeds: the repeat seed is derived from the configured seed and the
/// repeat index; folds, augmentation and evolution each derive their own
/// seed from it, so any single fold can be reproduced in isolation.
pub fn run_repeat(
    data: &SpectralDataset,
    config: &ExperimentConfig,
    repeat: usize,
    workers: usize,
    mut progress: impl FnMut(usize) -> Box<dyn ProgressSink>,
) -> Result<RunReport, ExperimentError> {
    let seed = derive_seed(config.evolution.seed, repeat as u64);
    let mut split_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, u64::MAX));
    let folds = grouped_kfold(&data.groups, &data.augmented, config.folds, &mut split_rng)?;
    let mut frequency = FrequencyTable::new(data.features());
    let mut reports = Vec::with_capacity(folds.len());

    for (k, fold) in folds.iter().enumerate() {
        let fold_seed = derive_seed(seed, k as u64);
        let mut aug_rng = ChaCha8Rng::seed_from_u64(derive_seed(fold_seed, 1));
        let train = augment(
            &data.subset(&fold.train),
            &config.augmentation,
            &mut aug_rng,
        );
        let test = data.subset(&fold.test);
        let evo = EvolutionConfig {
            seed: derive_seed(fold_seed, 2),
            ..config.evolution.clone()
        };
        let train_problem = Problem::new(&train.x, &train.y);
        let test_problem = Problem::new(&test.x, &test.y);
        let mut sink = progress(k);
        let result = evolve(&evo, &train_problem, None, workers, sink.as_mut())?;
        let best = &result.best.program;
        let (test_mse, test_r2) = test_metrics(best, &test_problem);
        frequency.add(best);
        reports.push(FoldReport {
            fold: k,
            seed: evo.seed,
            train_rows: fold.train.len(),
            augmented_rows: train.len() - fold.train.len(),
            test_rows: test.len(),
            train_mse: result.best.fitness,
            train_r2: result.best.r2,
            test_mse,
            test_r2,
            effective_size: effective_size(best),
            model: best.to_string(),
            dag: to_dot(best),
            history: result.history,
        });
    }
    let r2: Vec<f64> = reports.iter().map(|f| f.test_r2).collect();
    let (test_r2_mean, test_r2_std) = mean_std(&r2);
    let generations = config.evolution.generations + 1;
    let effective_size_trajectory = (0..generations)
        .map(|g| {
            reports
                .iter()
                .map(|f| f.history[g].mean_effective_size)
                .sum::<f64>()
                / reports.len() as f64
        })
        .collect();
    Ok(RunReport {
        repeat,
        seed,
        features: data.features(),
        folds: reports,
        test_r2_mean,
        test_r2_std,
        effective_size_trajectory,
        frequency,
        config: config.clone(),
    })
}
