//! Labeled samples of (discrete label, continuous value) pairs.
//!
//! Input labels are arbitrary integer tokens. They are densified to
//! `0..K-1` in ascending token order, so the dense index of a token depends
//! only on the set of tokens present and never on row order.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// An immutable, validated sequence of (label, value) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    labels: Vec<usize>,
    values: Vec<f64>,
    tokens: Vec<i64>,
    counts: Vec<usize>,
}

/// The values carrying one label, in original sequence order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelPartition {
    pub label: usize,
    pub token: i64,
    pub values: Vec<f64>,
}

impl LabelPartition {
    pub fn count(&self) -> usize {
        self.values.len()
    }
}

impl LabeledDataset {
    /// Builds a dataset from raw label tokens and values.
    pub fn new(pairs: impl IntoIterator<Item = (i64, f64)>) -> Result<Self> {
        let (raw, values): (Vec<i64>, Vec<f64>) = pairs.into_iter().unzip();
        if raw.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                line: i as u64 + 1,
                value: v,
            });
        }
        let mut tokens = raw.clone();
        tokens.sort_unstable();
        tokens.dedup();
        let labels: Vec<usize> = raw
            .iter()
            .map(|t| tokens.binary_search(t).expect("token collected above"))
            .collect();
        let mut counts = vec![0; tokens.len()];
        for &l in &labels {
            counts[l] += 1;
        }
        Ok(Self {
            labels,
            values,
            tokens,
            counts,
        })
    }

    /// Reads the `label,value` CSV format.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_csv(file)
    }

    pub fn read_csv(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .quoting(false)
            .from_reader(reader);
        let header_err = |message: String| Error::Parse { line: 1, message };
        let headers = rdr.headers().map_err(|e| header_err(e.to_string()))?;
        if headers.len() != 2 || &headers[0] != "label" || &headers[1] != "value" {
            return Err(header_err(format!(
                "expected header `label,value`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }

        let mut pairs = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() != 2 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 2 fields, found {}", record.len()),
                });
            }
            let label: i64 = record[0].trim().parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid label `{}`", &record[0]),
            })?;
            let value: f64 = record[1].trim().parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid value `{}`", &record[1]),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFinite { line, value });
            }
            pairs.push((label, value));
        }
        Self::new(pairs)
    }

    /// Writes the dataset in the `label,value` CSV format using the original
    /// label tokens. Values use the shortest representation that parses back
    /// to the same `f64`.
    pub fn write_csv(&self, writer: impl Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["label", "value"])?;
        for (token, value) in self.pairs() {
            w.write_record([token.to_string(), value.to_string()])?;
        }
        w.flush()
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Number of distinct labels.
    pub fn label_count(&self) -> usize {
        self.tokens.len()
    }

    /// Dense label index of every pair, in row order.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Original token for each dense label index.
    pub fn tokens(&self) -> &[i64] {
        &self.tokens
    }

    pub fn token(&self, label: usize) -> i64 {
        self.tokens[label]
    }

    /// Dense index of a raw token.
    pub fn label_of(&self, token: i64) -> Result<usize> {
        self.tokens
            .binary_search(&token)
            .map_err(|_| Error::UnknownLabel(token))
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Iterates `(token, value)` in row order.
    pub fn pairs(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.labels
            .iter()
            .zip(&self.values)
            .map(|(&l, &v)| (self.tokens[l], v))
    }

    /// One partition per label, ordered by dense index.
    pub fn partition(&self) -> Vec<LabelPartition> {
        let mut parts: Vec<LabelPartition> = self
            .tokens
            .iter()
            .zip(&self.counts)
            .enumerate()
            .map(|(label, (&token, &count))| LabelPartition {
                label,
                token,
                values: Vec::with_capacity(count),
            })
            .collect();
        for (&l, &v) in self.labels.iter().zip(&self.values) {
            parts[l].values.push(v);
        }
        parts
    }

    /// Empirical frequency `n_x / n` of a raw label token.
    pub fn label_frequency(&self, token: i64) -> Result<f64> {
        let label = self.label_of(token)?;
        Ok(self.frequency(label))
    }

    /// Empirical frequency of a dense label index.
    pub fn frequency(&self, label: usize) -> f64 {
        // Both integers are exact in f64, so the division is the correctly
        // rounded value of the rational n_x / n.
        self.counts[label] as f64 / self.n() as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.label_count()).map(|l| self.frequency(l)).collect()
    }

    /// Sample mean and unbiased standard deviation over all values.
    pub fn mean_std(&self) -> (f64, f64) {
        mean_std(&self.values)
    }
}

/// Mean and sample standard deviation (divisor `m - 1`, zero when `m < 2`).
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (m - 1.0)).sqrt())
}
