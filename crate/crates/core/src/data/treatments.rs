//! Per-spectrum treatments. None of them look across rows, so applying
//! them before splitting cannot leak test information into training.

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;

use super::{DataError, FeatureAxis, SpectralDataset};

/// Standard normal variate: centre each row on its mean and scale by its
/// population standard deviation. Constant rows become zeros.
pub fn snv(x: &Matrix) -> Matrix {
    x.map_rows(|row| {
        let d = row.len() as f64;
        let mean = row.iter().sum::<f64>() / d;
        let sd = (row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / d).sqrt();
        if sd == 0.0 || !sd.is_finite() {
            vec![0.0; row.len()]
        } else {
            row.iter().map(|v| (v - mean) / sd).collect()
        }
    })
}

/// Subtracts the straight line through each row's first and last point,
/// using `positions` as the abscissa.
pub fn linear_baseline(x: &Matrix, positions: &[f64]) -> Matrix {
    let d = positions.len();
    let (p0, p1) = (positions[0], positions[d - 1]);
    let t: Vec<f64> = positions.iter().map(|p| (p - p0) / (p1 - p0)).collect();
    x.map_rows(|row| {
        let (a, b) = (row[0], row[d - 1]);
        row.iter()
            .zip(&t)
            .map(|(v, &t)| v - (a * (1.0 - t) + b * t))
            .collect()
    })
}

/// Successive differences with unit spacing; one column narrower.
pub fn first_derivative(x: &Matrix) -> Matrix {
    x.map_rows(|row| row.windows(2).map(|w| w[1] - w[0]).collect())
}

/// Centred moving average. The window shrinks at the edges so the width
/// is unchanged.
pub fn sliding_smooth(x: &Matrix, window: usize) -> Result<Matrix, DataError> {
    if window.is_multiple_of(2) {
        return Err(DataError::Config {
            key: "window",
            reason: format!("must be odd, got {window}"),
        });
    }
    if window > x.cols() {
        return Err(DataError::Config {
            key: "window",
            reason: format!("{window} exceeds {} features", x.cols()),
        });
    }
    let half = window / 2;
    Ok(x.map_rows(|row| {
        let d = row.len();
        (0..d)
            .map(|i| {
                let lo = i.saturating_sub(half);
                let hi = (i + half).min(d - 1);
                row[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
            })
            .collect()
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Treatment {
    Snv,
    LinearBaseline,
    FirstDerivative,
    Smooth(usize),
}

impl Treatment {
    pub fn apply(&self, data: &SpectralDataset) -> Result<SpectralDataset, DataError> {
        let mut out = data.clone();
        match *self {
            Treatment::Snv => out.x = snv(&data.x),
            Treatment::LinearBaseline => {
                if data.features() < 2 {
                    return Err(DataError::Config {
                        key: "preset",
                        reason: "linear baseline needs at least two features".into(),
                    });
                }
                out.x = linear_baseline(&data.x, &data.axis.positions());
            }
            Treatment::FirstDerivative => {
                if data.features() < 2 {
                    return Err(DataError::Config {
                        key: "preset",
                        reason: "derivative needs at least two features".into(),
                    });
                }
                out.x = first_derivative(&data.x);
                out.axis = match &data.axis.wavenumbers {
                    Some(w) => FeatureAxis::from_wavenumbers(
                        w.windows(2).map(|p| 0.5 * (p[0] + p[1])).collect(),
                    ),
                    None => FeatureAxis {
                        labels: data
                            .axis
                            .labels
                            .windows(2)
                            .map(|p| format!("d({}-{})", p[1], p[0]))
                            .collect(),
                        wavenumbers: None,
                        ascending: None,
                    },
                };
            }
            Treatment::Smooth(w) => out.x = sliding_smooth(&data.x, w)?,
        }
        Ok(out)
    }
}

/// Named treatment pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    None,
    IngaasSnv,
    IngaasLb,
    FtSnv,
    IngaasSnvD1Sw17,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::None,
        Preset::IngaasSnv,
        Preset::IngaasLb,
        Preset::FtSnv,
        Preset::IngaasSnvD1Sw17,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::None => "none",
            Preset::IngaasSnv => "ingaas_snv",
            Preset::IngaasLb => "ingaas_lb",
            Preset::FtSnv => "ft_snv",
            Preset::IngaasSnvD1Sw17 => "ingaas_snv_d1_sw17",
        }
    }

    pub fn treatments(self) -> Vec<Treatment> {
        match self {
            Preset::None => vec![],
            Preset::IngaasSnv | Preset::FtSnv => vec![Treatment::Snv],
            Preset::IngaasLb => vec![Treatment::LinearBaseline],
            Preset::IngaasSnvD1Sw17 => vec![
                Treatment::Snv,
                Treatment::FirstDerivative,
                Treatment::Smooth(17),
            ],
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
                format!("unknown preset `{s}` (one of {})", names.join(", "))
            })
    }
}
