//! Mutual information between a discrete label and a continuous value,
//! estimated from a finite sample with Gaussian kernel density approximation
//! and a sample average of log density ratios.
//!
//! | module            | provides |
//! |-------------------|----------|
//! | [`dataset`]       | CSV ingestion, label densification, per-label partitions |
//! | [`kde`]           | rule-of-thumb bandwidths, per-label and mixture densities |
//! | [`mi`]            | the sample-average estimator and quadrature cross-checks |
//! | [`distributions`] | exact benchmark joint distributions and seeded sampling |
//! | [`significance`]  | surrogate-ensemble null distribution and z-score |
//! | [`experiments`]   | replicate sweeps against the exact-density oracle |
//! | [`cli`]           | the `dcmi` command-line front end |
//!
//! All information quantities are in nats.

pub mod cli;
pub mod dataset;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod kde;
pub mod mi;
pub mod quadrature;
pub mod rng;
pub mod significance;

pub use dataset::{LabelPartition, LabeledDataset};
pub use distributions::{BenchmarkDistribution, Family};
pub use error::{Error, Result};
pub use kde::{Bandwidth, ConditionalKde};
pub use mi::{analytic_mi_quadrature, estimate_jsd, estimate_mi, JsdEstimate, MiEstimate};
pub use quadrature::QuadratureSpec;
pub use significance::{significance, NullModel, SignificanceReport};

/// Default multiplier in the rule-of-thumb bandwidth `h = factor * s * m^(-1/5)`.
pub const DEFAULT_BANDWIDTH_FACTOR: f64 = 1.06;
