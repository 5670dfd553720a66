use std::io::{Read, Write};
use std::path::Path;

use crate::matrix::Matrix;

use super::{DataError, FeatureAxis, SpectralDataset};

const TARGET: &str = "target";
const GROUP: &str = "group";

fn io_error(path: &Path, e: std::io::Error) -> DataError {
    DataError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn axis_from_labels(labels: Vec<String>) -> Result<FeatureAxis, DataError> {
    let mut seen = std::collections::HashSet::new();
    for l in &labels {
        if !seen.insert(l.as_str()) {
            return Err(DataError::Header(format!("duplicate feature column `{l}`")));
        }
    }
    let numeric: Option<Vec<f64>> = labels
        .iter()
        .map(|l| l.trim().parse::<f64>().ok())
        .collect();
    let Some(w) = numeric else {
        return Ok(FeatureAxis {
            labels,
            wavenumbers: None,
            ascending: None,
        });
    };
    let ascending = w.len() < 2 || w[1] > w[0];
    for (i, pair) in w.windows(2).enumerate() {
        if pair[1] == pair[0] {
            return Err(DataError::Header(format!(
                "duplicate wavenumber {} at columns {i} and {}",
                pair[0],
                i + 1
            )));
        }
        if (pair[1] > pair[0]) != ascending {
            return Err(DataError::Header(format!(
                "wavenumbers not monotone at column {}",
                i + 1
            )));
        }
    }
    Ok(FeatureAxis {
        labels,
        wavenumbers: Some(w),
        ascending: Some(ascending),
    })
}

/// Reads a dataset: feature columns, a `target` column and an optional
/// `group` column (each row is its own group when absent).
pub fn read_csv<R: Read>(reader: R) -> Result<SpectralDataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| DataError::Header(e.to_string()))?
        .clone();
    let target_col = headers
        .iter()
        .position(|h| h == TARGET)
        .ok_or_else(|| DataError::Header("missing `target` column".into()))?;
    let group_col = headers.iter().position(|h| h == GROUP);
    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|&c| c != target_col && Some(c) != group_col)
        .collect();
    if feature_cols.is_empty() {
        return Err(DataError::Header("no feature columns".into()));
    }
    let axis = axis_from_labels(
        feature_cols
            .iter()
            .map(|&c| headers[c].to_string())
            .collect(),
    )?;

    let mut x = Matrix::zeros(0, feature_cols.len());
    let mut y = Vec::new();
    let mut groups = Vec::new();
    let mut row_buf = vec![0.0; feature_cols.len()];
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| DataError::Parse {
            row,
            column: String::new(),
            message: e.to_string(),
        })?;
        let cell = |c: usize| -> Result<f64, DataError> {
            let s = &rec[c];
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| DataError::Parse {
                    row,
                    column: headers[c].to_string(),
                    message: format!("not a finite number: `{s}`"),
                })
        };
        for (slot, &c) in row_buf.iter_mut().zip(&feature_cols) {
            *slot = cell(c)?;
        }
        x.push_row(&row_buf);
        y.push(cell(target_col)?);
        groups.push(match group_col {
            Some(g) => rec[g].to_string(),
            None => format!("row{row}"),
        });
    }
    Ok(SpectralDataset::new(x, axis, y, groups))
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<SpectralDataset, DataError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| io_error(path, e))?;
    read_csv(std::io::BufReader::new(file))
}

/// Writes features, `target` and `group` in the format [`read_csv`] reads.
pub fn write_csv<W: Write>(data: &SpectralDataset, writer: W) -> Result<(), DataError> {
    let err = |e: csv::Error| DataError::Header(e.to_string());
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = data.axis.labels.clone();
    header.push(TARGET.into());
    header.push(GROUP.into());
    w.write_record(&header).map_err(err)?;
    for (i, row) in data.x.iter_rows().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        rec.push(format!("{:?}", data.y[i]));
        rec.push(data.groups[i].clone());
        w.write_record(&rec).map_err(err)?;
    }
    w.flush().map_err(|e| DataError::Header(e.to_string()))?;
    Ok(())
}

pub fn save_csv(data: &SpectralDataset, path: impl AsRef<Path>) -> Result<(), DataError> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
    write_csv(data, std::io::BufWriter::new(file))
}
