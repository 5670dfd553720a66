//! Training-set augmentation: spectral perturbation, mixup and Gaussian
//! noise, generating `(factor - 1) · n` new rows split by the configured
//! shares.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::SpectralDataset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AugmentConfig {
    /// Output size as a multiple of the input size; 1 disables augmentation.
    pub factor: f64,
    pub spectral_share: f64,
    pub mixup_share: f64,
    pub gaussian_share: f64,
    /// Multiplicative scale drawn from `1 ± scale`.
    pub scale: f64,
    /// Additive offset drawn from `± offset · row σ`.
    pub offset: f64,
    /// Linear tilt with endpoint amplitude drawn from `± tilt · row σ`.
    pub tilt: f64,
    /// Gaussian noise σ as a fraction of each feature's σ.
    pub noise: f64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            factor: 50.0,
            spectral_share: 0.5,
            mixup_share: 0.25,
            gaussian_share: 0.25,
            scale: 0.05,
            offset: 0.05,
            tilt: 0.05,
            noise: 0.01,
        }
    }
}

impl AugmentConfig {
    pub fn disabled() -> Self {
        Self {
            factor: 1.0,
            ..Self::default()
        }
    }

    /// New-row counts `(spectral, mixup, gaussian)` for `n` source rows.
    pub fn counts(&self, n: usize) -> (usize, usize, usize) {
        let total = ((self.factor - 1.0).max(0.0) * n as f64).round() as usize;
        let shares = self.spectral_share + self.mixup_share + self.gaussian_share;
        if total == 0 || shares <= 0.0 {
            return (0, 0, 0);
        }
        let spectral = (total as f64 * self.spectral_share / shares).round() as usize;
        let mixup =
            ((total as f64 * self.mixup_share / shares).round() as usize).min(total - spectral);
        (spectral, mixup, total - spectral - mixup)
    }
}

fn population_sd(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    (values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Convex combination `λ a + (1 - λ) b` of two rows and their targets.
pub fn mixup(a: &[f64], ya: f64, b: &[f64], yb: f64, lambda: f64) -> (Vec<f64>, f64) {
    let row = a
        .iter()
        .zip(b)
        .map(|(p, q)| lambda * p + (1.0 - lambda) * q)
        .collect();
    (row, lambda * ya + (1.0 - lambda) * yb)
}

/// Returns the fold followed by its generated rows, which are flagged in
/// `augmented`. Sources are drawn from the fold's real rows only; mixup
/// pairs are distinct rows whenever the fold has more than one.
pub fn augment<R: Rng + ?Sized>(
    fold: &SpectralDataset,
    config: &AugmentConfig,
    rng: &mut R,
) -> SpectralDataset {
    let mut out = fold.clone();
    let sources: Vec<usize> = (0..fold.len()).filter(|&i| !fold.augmented[i]).collect();
    if sources.is_empty() {
        return out;
    }
    let (n_spectral, n_mixup, n_gaussian) = config.counts(sources.len());
    let d = fold.features();
    let feature_sd: Vec<f64> = (0..d)
        .map(|j| population_sd(sources.iter().map(|&i| fold.x.get(i, j))))
        .collect();
    let push = |out: &mut SpectralDataset, row: &[f64], y: f64, group: &str| {
        out.x.push_row(row);
        out.y.push(y);
        out.groups.push(group.to_string());
        out.augmented.push(true);
    };
    let pick = |rng: &mut R| sources[rng.random_range(0..sources.len())];

    for _ in 0..n_spectral {
        let i = pick(rng);
        let src = fold.x.row(i);
        let sd = population_sd(src.iter().copied());
        let s = 1.0 + rng.random_range(-config.scale..=config.scale);
        let o = rng.random_range(-config.offset..=config.offset) * sd;
        let t = rng.random_range(-config.tilt..=config.tilt) * sd;
        let row: Vec<f64> = src
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let pos = if d > 1 {
                    2.0 * j as f64 / (d - 1) as f64 - 1.0
                } else {
                    0.0
                };
                s * v + o + t * pos
            })
            .collect();
        push(&mut out, &row, fold.y[i], &fold.groups[i]);
    }
    for _ in 0..n_mixup {
        let a = pick(rng);
        let mut b = pick(rng);
        while b == a && sources.len() > 1 {
            b = pick(rng);
        }
        let lambda: f64 = rng.random();
        let (row, y) = mixup(fold.x.row(a), fold.y[a], fold.x.row(b), fold.y[b], lambda);
        push(&mut out, &row, y, &fold.groups[a]);
    }
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    for _ in 0..n_gaussian {
        let i = pick(rng);
        let row: Vec<f64> = fold
            .x
            .row(i)
            .iter()
            .zip(&feature_sd)
            .map(|(v, sd)| v + config.noise * sd * std_normal.sample(rng))
            .collect();
        push(&mut out, &row, fold.y[i], &fold.groups[i]);
    }
    out
}
