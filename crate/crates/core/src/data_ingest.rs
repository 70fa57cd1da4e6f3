//! Dataset loading: LIBSVM-format parsing, label normalization, and seeded
//! synthetic classification data.
//!
//! The parser accepts the common LIBSVM dialect: one sample per line,
//! `label idx:value ...` with 1-based, strictly increasing feature indices,
//! `#` starting a comment, and either LF or CRLF line endings. Unspecified
//! indices are zero. Errors carry the 1-based line number of the offending
//! input.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed to read dataset: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("label {value} is not recognized; expected -1, 0, or +1")]
    UnmappableLabel { value: f64 },
}

/// A dense design matrix with the labels exactly as they appeared in the
/// source (before mapping to {0, 1}).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// m×d, rows are samples.
    pub features: DMatrix<f64>,
    pub raw_labels: Vec<f64>,
    /// Human-readable provenance (file path or generator parameters).
    pub source: String,
}

impl Dataset {
    pub fn num_samples(&self) -> usize {
        self.features.nrows()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }
}

/// Parses LIBSVM-format text. When `dim_override` is given the feature
/// space is padded (or validated) to exactly that many columns; otherwise
/// the dimension is the largest index seen.
pub fn parse_libsvm<R: BufRead>(
    reader: R,
    dim_override: Option<usize>,
) -> Result<Dataset, IngestError> {
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut raw_labels = Vec::new();
    let mut max_index = 0usize;

    for (line_idx, line) in reader.lines().enumerate() {
        let line_no = line_idx + 1;
        let line = line?;
        // Strip comments and the CR of CRLF endings.
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line.as_str(),
        };
        let content = content.trim_end_matches('\r').trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label_token = tokens.next().expect("non-empty line has a first token");
        let label: f64 = label_token.parse().map_err(|_| IngestError::Parse {
            line: line_no,
            message: format!("label '{label_token}' is not a number"),
        })?;

        let mut entries: Vec<(usize, f64)> = Vec::new();
        let mut prev_index = 0usize;
        for token in tokens {
            let (idx_str, val_str) = token.split_once(':').ok_or_else(|| IngestError::Parse {
                line: line_no,
                message: format!("feature '{token}' is missing the ':' separator"),
            })?;
            let index: usize = idx_str.parse().map_err(|_| IngestError::Parse {
                line: line_no,
                message: format!("feature index '{idx_str}' is not an integer"),
            })?;
            if index < 1 {
                return Err(IngestError::Parse {
                    line: line_no,
                    message: format!("feature index must be ≥ 1, got {index}"),
                });
            }
            if index <= prev_index {
                return Err(IngestError::Parse {
                    line: line_no,
                    message: format!(
                        "feature indices must be strictly increasing, got {index} after {prev_index}"
                    ),
                });
            }
            let value: f64 = val_str.parse().map_err(|_| IngestError::Parse {
                line: line_no,
                message: format!("feature value '{val_str}' is not a number"),
            })?;
            if let Some(dim) = dim_override {
                if index > dim {
                    return Err(IngestError::Parse {
                        line: line_no,
                        message: format!(
                            "feature index {index} exceeds the declared dimension {dim}"
                        ),
                    });
                }
            }
            prev_index = index;
            entries.push((index, value));
        }
        max_index = max_index.max(prev_index);
        rows.push(entries);
        raw_labels.push(label);
    }

    let dim = dim_override.unwrap_or(max_index);
    let mut features = DMatrix::zeros(rows.len(), dim);
    for (r, entries) in rows.iter().enumerate() {
        for &(index, value) in entries {
            features[(r, index - 1)] = value;
        }
    }
    Ok(Dataset {
        features,
        raw_labels,
        source: "<reader>".to_string(),
    })
}

/// Parses a LIBSVM file from disk, recording the path as the source.
pub fn load_libsvm_file(
    path: &Path,
    dim_override: Option<usize>,
) -> Result<Dataset, IngestError> {
    let file = File::open(path)?;
    let mut ds = parse_libsvm(BufReader::new(file), dim_override)?;
    ds.source = path.display().to_string();
    Ok(ds)
}

/// Maps raw labels onto {0, 1}: −1 and 0 become 0, +1 stays 1. Anything
/// else is rejected.
pub fn map_labels(raw: &[f64]) -> Result<Vec<f64>, IngestError> {
    raw.iter()
        .map(|&value| {
            if value == -1.0 || value == 0.0 {
                Ok(0.0)
            } else if value == 1.0 {
                Ok(1.0)
            } else {
                Err(IngestError::UnmappableLabel { value })
            }
        })
        .collect()
}

/// Draws a reproducible synthetic classification set: standard-normal
/// features and labels from the sign of a planted linear separator with
/// additive Gaussian noise. Identical (m, d, seed) triples give identical
/// datasets.
pub fn synthetic_dataset(m: usize, d: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let separator = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut features = DMatrix::zeros(m, d);
    let mut raw_labels = Vec::with_capacity(m);
    for r in 0..m {
        let row = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let noise: f64 = rng.sample(StandardNormal);
        let margin = row.dot(&separator) + 0.1 * noise;
        features.row_mut(r).copy_from(&row.transpose());
        raw_labels.push(if margin > 0.0 { 1.0 } else { 0.0 });
    }
    Dataset {
        features,
        raw_labels,
        source: format!("synthetic(m={m}, d={d}, seed={seed})"),
    }
}

/// Serializes a dataset back to LIBSVM text (sparse: zero entries are
/// omitted), using shortest round-trip float formatting so that parsing the
/// output reproduces the dataset bit-for-bit.
pub fn to_libsvm_string(ds: &Dataset) -> String {
    let mut out = String::new();
    for r in 0..ds.num_samples() {
        write!(out, "{:?}", ds.raw_labels[r]).expect("string write cannot fail");
        for c in 0..ds.dim() {
            let v = ds.features[(r, c)];
            if v != 0.0 {
                write!(out, " {}:{:?}", c + 1, v).expect("string write cannot fail");
            }
        }
        out.push('\n');
    }
    out
}
