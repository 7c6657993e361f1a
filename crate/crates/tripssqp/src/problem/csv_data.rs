//! CSV dataset ingestion for binary classification problems.
//!
//! Comma-separated, first row is the header. The label column is selected by
//! name; labels may be `{0,1}`, `{-1,1}`, or two distinct strings (the
//! lexicographically smaller one maps to `-1`). Categorical feature columns
//! are one-hot encoded, every column is standardized to zero mean and unit
//! sample variance (divisor `N-1`), and constant columns are dropped.

use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};

fn parse_numeric(s: &str) -> Option<f64> {
    let t = s.trim();
    if t.is_empty() {
        return None;
    }
    t.parse::<f64>().ok()
}

fn map_labels(raw: &[String]) -> Result<Vec<f64>> {
    let mut distinct: Vec<&str> = Vec::new();
    for v in raw {
        let t = v.trim();
        if !distinct.contains(&t) {
            distinct.push(t);
        }
        if distinct.len() > 2 {
            return Err(Error::Label(format!(
                "more than two distinct label values (saw {:?})",
                distinct
            )));
        }
    }
    if distinct.len() < 2 {
        return Err(Error::Label(format!(
            "labels are not binary: every row has label {:?}",
            distinct.first().copied().unwrap_or("")
        )));
    }
    distinct.sort_unstable();

    // Numeric conventions {0,1} and {-1,1} are honored before falling back
    // to lexicographic order of the raw strings.
    let nums: Option<Vec<f64>> = distinct.iter().map(|s| parse_numeric(s)).collect();
    let neg: String = match nums.as_deref() {
        Some([a, b]) => {
            let lo = a.min(*b);
            let hi = a.max(*b);
            if (lo == 0.0 && hi == 1.0) || (lo == -1.0 && hi == 1.0) {
                distinct
                    .iter()
                    .find(|s| parse_numeric(s) == Some(lo))
                    .copied()
                    .unwrap()
                    .to_string()
            } else {
                distinct[0].to_string()
            }
        }
        _ => distinct[0].to_string(),
    };

    Ok(raw
        .iter()
        .map(|v| if v.trim() == neg { -1.0 } else { 1.0 })
        .collect())
}

/// Loads `(features, labels)` from a CSV file. Labels are mapped to `±1`,
/// features are one-hot encoded where categorical and standardized per
/// column (sample standard deviation, constant columns dropped).
pub fn load_csv_dataset<T: Scalar>(
    path: &Path,
    label_column: &str,
) -> Result<(DMatrix<T>, DVector<T>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::CsvParse(format!("{}: {e}", path.display())))?;

    let headers = reader
        .headers()
        .map_err(|e| Error::CsvParse(e.to_string()))?
        .clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| {
            Error::CsvParse(format!("label column '{label_column}' not found in header"))
        })?;

    let mut rows: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::CsvParse(e.to_string()))?;
        if record.len() != headers.len() {
            return Err(Error::CsvParse(format!(
                "row {} has {} fields, expected {}",
                rows.len() + 2,
                record.len(),
                headers.len()
            )));
        }
        rows.push(record.iter().map(|s| s.to_string()).collect());
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = rows.len();

    let raw_labels: Vec<String> = rows.iter().map(|r| r[label_idx].clone()).collect();
    let labels_f64 = map_labels(&raw_labels)?;

    // Expand each feature column: numeric as-is, categorical one-hot.
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (j, _name) in headers.iter().enumerate() {
        if j == label_idx {
            continue;
        }
        let values: Vec<&str> = rows.iter().map(|r| r[j].as_str()).collect();
        let numeric: Option<Vec<f64>> = values.iter().map(|v| parse_numeric(v)).collect();
        match numeric {
            Some(col) => columns.push(col),
            None => {
                let mut cats: Vec<&str> = values.clone();
                cats.sort_unstable();
                cats.dedup();
                for cat in cats {
                    columns.push(
                        values
                            .iter()
                            .map(|v| if *v == cat { 1.0 } else { 0.0 })
                            .collect(),
                    );
                }
            }
        }
    }

    // Standardize with divisor N-1 and drop constant columns.
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for col in columns {
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        let sd = var.sqrt();
        if sd <= 1e-12 * (1.0 + mean.abs()) {
            continue;
        }
        kept.push(col.iter().map(|v| (v - mean) / sd).collect());
    }
    if kept.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let d = kept.len();
    let features = DMatrix::from_fn(n, d, |i, j| real::<T>(kept[j][i]));
    let labels = DVector::from_fn(n, |i, _| real::<T>(labels_f64[i]));
    Ok((features, labels))
}
