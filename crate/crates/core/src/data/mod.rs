//! Spectral datasets: CSV ingestion, per-row treatments, training-set
//! augmentation and group-aware cross-validation folds.

mod augment;
mod folds;
mod io;
pub mod synthetic;
mod treatments;

pub use augment::{augment, mixup, AugmentConfig};
pub use folds::{grouped_kfold, Fold};
pub use io::{load_csv, read_csv, save_csv, write_csv};
pub use treatments::{first_derivative, linear_baseline, sliding_smooth, snv, Preset, Treatment};

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },
    #[error("header: {0}")]
    Header(String),
    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: &'static str, reason: String },
}

/// Column labels of the feature axis. When every label is numeric the
/// axis is a wavenumber scale, strictly ascending or descending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureAxis {
    pub labels: Vec<String>,
    pub wavenumbers: Option<Vec<f64>>,
    pub ascending: Option<bool>,
}

impl FeatureAxis {
    /// Plain index labels `f0, f1, ...`.
    pub fn indexed(d: usize) -> Self {
        Self {
            labels: (0..d).map(|i| format!("f{i}")).collect(),
            wavenumbers: None,
            ascending: None,
        }
    }

    pub fn from_wavenumbers(w: Vec<f64>) -> Self {
        let ascending = w.len() < 2 || w[1] > w[0];
        Self {
            labels: w.iter().map(|v| v.to_string()).collect(),
            ascending: Some(ascending),
            wavenumbers: Some(w),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Coordinates used for baseline fitting: wavenumbers when known,
    /// otherwise feature indices.
    pub fn positions(&self) -> Vec<f64> {
        match &self.wavenumbers {
            Some(w) => w.clone(),
            None => (0..self.len()).map(|i| i as f64).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDataset {
    pub x: Matrix,
    pub axis: FeatureAxis,
    pub y: Vec<f64>,
    pub groups: Vec<String>,
    pub augmented: Vec<bool>,
}

impl SpectralDataset {
    /// Real (non-augmented) rows, one group per row.
    pub fn new(x: Matrix, axis: FeatureAxis, y: Vec<f64>, groups: Vec<String>) -> Self {
        assert_eq!(x.rows(), y.len());
        assert_eq!(x.rows(), groups.len());
        assert_eq!(x.cols(), axis.len());
        let n = y.len();
        Self {
            x,
            axis,
            y,
            groups,
            augmented: vec![false; n],
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn features(&self) -> usize {
        self.x.cols()
    }

    pub fn subset(&self, rows: &[usize]) -> Self {
        Self {
            x: self.x.select_rows(rows),
            axis: self.axis.clone(),
            y: rows.iter().map(|&i| self.y[i]).collect(),
            groups: rows.iter().map(|&i| self.groups[i].clone()).collect(),
            augmented: rows.iter().map(|&i| self.augmented[i]).collect(),
        }
    }

    /// Applies treatments in order; each works row by row.
    pub fn treated(&self, treatments: &[Treatment]) -> Result<Self, DataError> {
        let mut out = self.clone();
        for t in treatments {
            out = t.apply(&out)?;
        }
        Ok(out)
    }
}
