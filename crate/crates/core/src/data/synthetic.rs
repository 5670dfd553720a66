//! Smooth synthetic spectra for demos, tests and benchmarks.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::matrix::Matrix;
use crate::primitives::{gamma_eval, TerminalKind};

use super::{FeatureAxis, SpectralDataset};

/// `n` spectra of `d` features, each a sloped baseline plus four Gaussian
/// peaks with random centre, width and height.
pub fn smooth_spectra<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Matrix {
    let mut x = Matrix::zeros(n, d);
    for i in 0..n {
        let offset = rng.random_range(0.5..1.5);
        let slope = rng.random_range(-0.5..0.5) / d as f64;
        let peaks: Vec<(f64, f64, f64)> = (0..4)
            .map(|_| {
                (
                    rng.random_range(0.0..d as f64),
                    rng.random_range(5.0..20.0),
                    rng.random_range(0.2..2.0),
                )
            })
            .collect();
        let row = x.row_mut(i);
        for (j, v) in row.iter_mut().enumerate() {
            let t = j as f64;
            *v = offset
                + slope * t
                + peaks
                    .iter()
                    .map(|(c, w, h)| h * (-0.5 * ((t - c) / w).powi(2)).exp())
                    .sum::<f64>();
        }
    }
    x
}

/// Spectra with target `2·Avg(x[20..=60]) − 1.5·Std(x[120..=160]) + ε`,
/// `ε ~ N(0, noise_sd²)`. Needs at least 161 features.
pub fn avg_std_problem<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    noise_sd: f64,
    rng: &mut R,
) -> SpectralDataset {
    assert!(d > 160, "need at least 161 features");
    let x = smooth_spectra(n, d, rng);
    let noise = Normal::new(0.0, noise_sd).expect("finite noise");
    let y = x
        .iter_rows()
        .map(|row| {
            2.0 * gamma_eval(TerminalKind::Avg, &row[20..=60], 20)
                - 1.5 * gamma_eval(TerminalKind::Std, &row[120..=160], 120)
                + noise.sample(rng)
        })
        .collect();
    let groups = (0..n).map(|i| format!("s{i}")).collect();
    SpectralDataset::new(x, FeatureAxis::indexed(d), y, groups)
}
