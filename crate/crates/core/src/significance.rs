//! Significance of an observed MI against an ensemble of independent
//! surrogates.
//!
//! The default null ([`NullModel::Gaussian`]) keeps only the empirical label
//! frequencies and the overall mean and variance of the values: each
//! surrogate draws labels i.i.d. from `n_x / n` and values i.i.d. from a
//! single Gaussian, independently of the label. [`NullModel::Permutation`]
//! instead shuffles the labels against the observed values, which preserves
//! both marginals exactly.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{mean_std, LabeledDataset};
use crate::error::{Error, Result};
use crate::mi::estimate_mi;
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NullModel {
    /// Labels from the empirical frequencies, values from a fitted Gaussian.
    #[default]
    Gaussian,
    /// Labels permuted against the observed values.
    Permutation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignificanceReport {
    pub observed_mi: f64,
    #[serde(rename = "null_mean")]
    pub surrogate_mean: f64,
    /// Standard deviation with divisor `count - 1`.
    #[serde(rename = "null_std")]
    pub surrogate_std: f64,
    pub surrogate_count: usize,
    #[serde(rename = "z")]
    pub z_score: f64,
    #[serde(rename = "surrogates")]
    pub surrogate_values: Vec<f64>,
    pub seed: u64,
    pub factor: f64,
    pub null_model: NullModel,
}

/// Draws one Gaussian-null surrogate of `ds` from `rng`.
pub fn make_surrogate_with<R: Rng + ?Sized>(
    ds: &LabeledDataset,
    rng: &mut R,
) -> Result<LabeledDataset> {
    let (mean, std) = ds.mean_std();
    if std == 0.0 || !std.is_finite() {
        return Err(Error::ZeroVariance);
    }
    let normal = Normal::new(mean, std).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let n = ds.n();
    // Cumulative counts give exact integer thresholds for the label draw.
    let cumulative: Vec<usize> = ds
        .counts()
        .iter()
        .scan(0, |acc, &c| {
            *acc += c;
            Some(*acc)
        })
        .collect();
    let pairs: Vec<(i64, f64)> = (0..n)
        .map(|_| {
            let k = rng.random_range(0..n);
            let label = cumulative.partition_point(|&c| c <= k);
            (ds.token(label), normal.sample(rng))
        })
        .collect();
    LabeledDataset::new(pairs)
}

/// Gaussian-null surrogate drawn from stream 0 of `seed`.
pub fn make_surrogate(ds: &LabeledDataset, seed: u64) -> Result<LabeledDataset> {
    make_surrogate_with(ds, &mut stream_rng(seed, 0))
}

/// Label-permutation surrogate of `ds`.
pub fn permutation_surrogate_with<R: Rng + ?Sized>(
    ds: &LabeledDataset,
    rng: &mut R,
) -> Result<LabeledDataset> {
    let mut tokens: Vec<i64> = ds.pairs().map(|(t, _)| t).collect();
    tokens.shuffle(rng);
    LabeledDataset::new(tokens.into_iter().zip(ds.values().iter().copied()))
}

/// Draws a surrogate under `null`.
pub fn surrogate_with<R: Rng + ?Sized>(
    ds: &LabeledDataset,
    null: NullModel,
    rng: &mut R,
) -> Result<LabeledDataset> {
    match null {
        NullModel::Gaussian => make_surrogate_with(ds, rng),
        NullModel::Permutation => permutation_surrogate_with(ds, rng),
    }
}

/// Mean and sample standard deviation of `values`.
pub fn summarize(values: &[f64]) -> (f64, f64) {
    mean_std(values)
}

/// Estimates MI on `ds` and on `surrogates` independent surrogates, the
/// `r`-th drawn from stream `r` of `seed`, all with the same bandwidth factor.
pub fn significance(
    ds: &LabeledDataset,
    surrogates: usize,
    seed: u64,
    factor: f64,
    null: NullModel,
) -> Result<SignificanceReport> {
    if surrogates < 2 {
        return Err(Error::InsufficientSurrogates(surrogates));
    }
    let observed = estimate_mi(ds, factor)?.mi_nats;
    let values = (0..surrogates)
        .into_par_iter()
        .map(|r| {
            let s = surrogate_with(ds, null, &mut stream_rng(seed, r as u64))?;
            Ok(estimate_mi(&s, factor)?.mi_nats)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, std) = summarize(&values);
    Ok(SignificanceReport {
        observed_mi: observed,
        surrogate_mean: mean,
        surrogate_std: std,
        surrogate_count: surrogates,
        z_score: (observed - mean) / std,
        surrogate_values: values,
        seed,
        factor,
        null_model: null,
    })
}
