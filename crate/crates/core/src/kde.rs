//! Gaussian kernel density approximation of the per-label conditional
//! densities and of their label-weighted mixture.
//!
//! Every density is evaluated in log space. A kernel sum
//! `(1/(m h sqrt(2 pi))) * sum_j exp(-(y - y_j)^2 / (2 h^2))` is computed as
//! `max + ln(sum_j exp(e_j - max))`, where the largest exponent belongs to the
//! sample point nearest `y`. Values are kept sorted so that point is found by
//! binary search and the sum is a single pass. Sorting also makes every
//! density independent of the row order of the input.

use std::f64::consts::PI;

use serde::Serialize;

use crate::dataset::{mean_std, LabeledDataset};
use crate::error::{Error, Result};

/// A kernel bandwidth `h` together with the rule-of-thumb factor that
/// produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bandwidth {
    pub h: f64,
    pub factor: f64,
}

impl Bandwidth {
    /// A fixed bandwidth.
    pub fn fixed(h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive, got {h}"
            )));
        }
        Ok(Self { h, factor: 1.0 })
    }

    /// Rule-of-thumb bandwidth `h = factor * s * m^(-1/5)`, with `s` the
    /// sample standard deviation (divisor `m - 1`) of `m` values.
    pub fn silverman(values: &[f64], factor: f64) -> Result<Self> {
        check_factor(factor)?;
        if values.len() < 2 {
            return Err(Error::InsufficientSample {
                count: values.len(),
            });
        }
        let (_, s) = mean_std(values);
        if s == 0.0 || !s.is_finite() {
            return Err(Error::ZeroVariance);
        }
        let m = values.len() as f64;
        Ok(Self {
            h: factor * s * m.powf(-0.2),
            factor,
        })
    }
}

pub(crate) fn check_factor(factor: f64) -> Result<()> {
    if factor > 0.0 && factor.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "bandwidth factor must be positive, got {factor}"
        )))
    }
}

/// Kernel density of `values` at `y`.
pub fn kde_eval(values: &[f64], bandwidth: Bandwidth, y: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    log_kde_sorted(&sorted, bandwidth.h, y).exp()
}

/// Natural log of the kernel density of `sorted` (ascending) at `y`.
fn log_kde_sorted(sorted: &[f64], h: f64, y: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let inv = 1.0 / (2.0 * h * h);
    let idx = sorted.partition_point(|&v| v < y);
    let nearest = match (idx.checked_sub(1).map(|i| sorted[i]), sorted.get(idx)) {
        (Some(a), Some(&b)) => {
            if y - a <= b - y {
                a
            } else {
                b
            }
        }
        (Some(a), None) => a,
        (None, Some(&b)) => b,
        (None, None) => unreachable!("values are nonempty"),
    };
    let d0 = y - nearest;
    let max_exp = -d0 * d0 * inv;
    let sum: f64 = sorted
        .iter()
        .map(|&v| {
            let d = y - v;
            (-d * d * inv - max_exp).exp()
        })
        .sum();
    let log_norm = -((sorted.len() as f64) * h * (2.0 * PI).sqrt()).ln();
    log_norm + max_exp + sum.ln()
}

/// The fitted density of one label.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub token: i64,
    /// Values carrying this label, ascending.
    pub values: Vec<f64>,
    pub bandwidth: Bandwidth,
    /// Label frequency `n_x / n`.
    pub weight: f64,
    log_weight: f64,
}

impl Component {
    pub fn count(&self) -> usize {
        self.values.len()
    }

    pub fn log_density(&self, y: f64) -> f64 {
        log_kde_sorted(&self.values, self.bandwidth.h, y)
    }

    /// `[min - pad * h, max + pad * h]`.
    pub fn padded_support(&self, pad: f64) -> (f64, f64) {
        let h = self.bandwidth.h;
        (
            self.values[0] - pad * h,
            self.values[self.values.len() - 1] + pad * h,
        )
    }
}

/// Per-label conditional densities and the mixture marginal, fitted to a
/// [`LabeledDataset`]. Components are indexed by dense label.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalKde {
    components: Vec<Component>,
    n: usize,
}

/// Padding, in bandwidths, around each component's data range.
pub const SUPPORT_PADDING: f64 = 8.0;

impl ConditionalKde {
    /// Fits one Gaussian KDE per label, each with a bandwidth computed from
    /// that label's own values and count.
    pub fn fit(ds: &LabeledDataset, factor: f64) -> Result<Self> {
        check_factor(factor)?;
        let components = ds
            .partition()
            .into_iter()
            .map(|part| {
                let mut values = part.values;
                values.sort_by(f64::total_cmp);
                let bandwidth = Bandwidth::silverman(&values, factor)
                    .map_err(|e| Error::at_label(part.token, e))?;
                let weight = ds.frequency(part.label);
                Ok(Component {
                    token: part.token,
                    values,
                    bandwidth,
                    weight,
                    log_weight: weight.ln(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            components,
            n: ds.n(),
        })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.weight).collect()
    }

    fn component_by_token(&self, token: i64) -> Result<&Component> {
        self.components
            .iter()
            .find(|c| c.token == token)
            .ok_or(Error::UnknownLabel(token))
    }

    /// Conditional density of label `token` at `y`.
    pub fn conditional_density(&self, token: i64, y: f64) -> Result<f64> {
        Ok(self.component_by_token(token)?.log_density(y).exp())
    }

    pub fn log_conditional(&self, label: usize, y: f64) -> f64 {
        self.components[label].log_density(y)
    }

    /// Mixture `sum_x p(x) mu_x(y)`.
    pub fn marginal_density(&self, y: f64) -> f64 {
        self.log_marginal(y).exp()
    }

    pub fn log_marginal(&self, y: f64) -> f64 {
        let logs: Vec<f64> = self.components.iter().map(|c| c.log_density(y)).collect();
        self.log_marginal_from(&logs)
    }

    /// Log mixture density given the log conditionals at the same point.
    pub fn log_marginal_from(&self, log_conditionals: &[f64]) -> f64 {
        log_sum_exp(
            self.components
                .iter()
                .zip(log_conditionals)
                .map(|(c, &l)| c.log_weight + l),
        )
    }

    /// Union of the padded supports of all components.
    pub fn support(&self, pad: f64) -> (f64, f64) {
        self.components
            .iter()
            .map(|c| c.padded_support(pad))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| {
                (lo.min(a), hi.max(b))
            })
    }
}

pub(crate) fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// One row of the grid export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub y: f64,
    pub label: i64,
    pub conditional: f64,
    pub marginal: f64,
}

/// Evaluates every conditional and the marginal on `grid`, one row per
/// (grid point, label).
pub fn grid_rows(model: &ConditionalKde, grid: &[f64]) -> Vec<GridRow> {
    let mut rows = Vec::with_capacity(grid.len() * model.components.len());
    for &y in grid {
        let logs: Vec<f64> = model.components.iter().map(|c| c.log_density(y)).collect();
        let marginal = model.log_marginal_from(&logs).exp();
        for (c, l) in model.components.iter().zip(&logs) {
            rows.push(GridRow {
                y,
                label: c.token,
                conditional: l.exp(),
                marginal,
            });
        }
    }
    rows
}

/// Writes the `y,label,conditional,marginal` CSV.
pub fn write_grid_csv(rows: &[GridRow], writer: impl std::io::Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row).map_err(std::io::Error::other)?;
    }
    w.flush()
}
