//! Mutual information between the label and the value.
//!
//! [`estimate_mi`] is the sample-average estimator: with fitted conditionals
//! `mu_x` and mixture `phi`,
//!
//! ```text
//! I ~ (1/n) * sum_x sum_{j in x} ln( mu_x(y_j) / phi(y_j) )
//! ```
//!
//! where the inner sum runs only over points carrying label `x`. The
//! quadrature routines evaluate the same functional as an integral, either
//! directly or as the weighted Jensen-Shannon divergence
//! `H[sum_x p_x mu_x] - sum_x p_x H[mu_x]`, against fitted or exact densities.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dataset::LabeledDataset;
use crate::distributions::{BenchmarkDistribution, TOKENS};
use crate::error::{Error, Result};
use crate::kde::{log_sum_exp, ConditionalKde, SUPPORT_PADDING};
use crate::quadrature::{integrate, QuadratureSpec};

/// Output of [`estimate_mi`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiEstimate {
    pub mi_nats: f64,
    pub n: usize,
    /// Entropy of the empirical label distribution; an upper bound on `mi_nats`.
    pub label_entropy: f64,
    /// `(1/n) * sum_{j in x} ln(mu_x(y_j) / phi(y_j))`, keyed by label token.
    pub per_label_terms: BTreeMap<i64, f64>,
    pub bandwidths: BTreeMap<i64, f64>,
    pub factor: f64,
}

/// Output of [`estimate_jsd`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsdEstimate {
    pub jsd_nats: f64,
    pub mixture_entropy: f64,
    pub component_entropies: BTreeMap<i64, f64>,
    pub weights: BTreeMap<i64, f64>,
}

/// Shannon entropy (nats) of a probability vector.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&q| q > 0.0)
        .map(|&q| q * q.ln())
        .sum::<f64>()
}

/// Fits a [`ConditionalKde`] and applies the sample-average estimator.
pub fn estimate_mi(ds: &LabeledDataset, factor: f64) -> Result<MiEstimate> {
    let model = ConditionalKde::fit(ds, factor)?;
    Ok(estimate_mi_with(&model, factor))
}

/// Sample-average estimator on an already fitted model. The sample points are
/// the model's stored values, so the result does not depend on row order.
pub fn estimate_mi_with(model: &ConditionalKde, factor: f64) -> MiEstimate {
    let components = model.components();
    let n = model.n() as f64;
    let mut logs = vec![0.0; components.len()];
    let mut per_label_terms = BTreeMap::new();
    let mut mi = 0.0;
    for (x, comp) in components.iter().enumerate() {
        let mut sum = 0.0;
        for &y in &comp.values {
            for (l, c) in logs.iter_mut().zip(components) {
                *l = c.log_density(y);
            }
            sum += logs[x] - model.log_marginal_from(&logs);
        }
        let term = sum / n;
        mi += term;
        per_label_terms.insert(comp.token, term);
    }
    MiEstimate {
        mi_nats: mi,
        n: model.n(),
        label_entropy: entropy(&model.weights()),
        per_label_terms,
        bandwidths: components
            .iter()
            .map(|c| (c.token, c.bandwidth.h))
            .collect(),
        factor,
    }
}

/// `-f ln f` from `ln f`, zero where `f` vanishes.
fn neg_f_ln_f(log_f: f64) -> f64 {
    if log_f == f64::NEG_INFINITY {
        0.0
    } else {
        -log_f.exp() * log_f
    }
}

/// `f ln(f / g)` from logs, zero where `f` vanishes.
fn f_ln_ratio(log_f: f64, log_g: f64) -> f64 {
    if log_f == f64::NEG_INFINITY {
        0.0
    } else {
        log_f.exp() * (log_f - log_g)
    }
}

fn model_interval(model: &ConditionalKde, quad: &QuadratureSpec) -> Result<(f64, f64)> {
    let (lo, hi) = model.support(SUPPORT_PADDING);
    match quad.interval {
        None => Ok((lo, hi)),
        Some((a, b)) if a <= lo && b >= hi => Ok((a, b)),
        Some((a, b)) => Err(Error::InvalidParameter(format!(
            "quadrature interval [{a}, {b}] does not cover the padded supports [{lo}, {hi}]"
        ))),
    }
}

/// Weighted Jensen-Shannon divergence of the fitted conditionals with the
/// label frequencies as weights, every entropy by adaptive quadrature.
pub fn estimate_jsd(model: &ConditionalKde, quad: &QuadratureSpec) -> Result<JsdEstimate> {
    let (lo, hi) = model_interval(model, quad)?;
    let components = model.components();
    let weights: BTreeMap<i64, f64> = components.iter().map(|c| (c.token, c.weight)).collect();
    if components.len() == 1 {
        // The mixture is the component itself.
        let c = &components[0];
        let h = integrate(|y| neg_f_ln_f(c.log_density(y)), lo, hi, &[], quad)?;
        return Ok(JsdEstimate {
            jsd_nats: 0.0,
            mixture_entropy: h,
            component_entropies: BTreeMap::from([(c.token, h)]),
            weights,
        });
    }
    let mixture_entropy = integrate(|y| neg_f_ln_f(model.log_marginal(y)), lo, hi, &[], quad)?;
    let mut component_entropies = BTreeMap::new();
    let mut weighted = 0.0;
    for c in components {
        let h = integrate(|y| neg_f_ln_f(c.log_density(y)), lo, hi, &[], quad)?;
        weighted += c.weight * h;
        component_entropies.insert(c.token, h);
    }
    Ok(JsdEstimate {
        jsd_nats: mixture_entropy - weighted,
        mixture_entropy,
        component_entropies,
        weights,
    })
}

/// Quadrature of `sum_x p_x * integral mu_x ln(mu_x / phi)` under the fitted
/// densities: the integral that [`estimate_mi`] approximates by a sample
/// average.
pub fn model_mi_quadrature(model: &ConditionalKde, quad: &QuadratureSpec) -> Result<f64> {
    let (lo, hi) = model_interval(model, quad)?;
    let components = model.components();
    integrate(
        |y| {
            let logs: Vec<f64> = components.iter().map(|c| c.log_density(y)).collect();
            let lm = model.log_marginal_from(&logs);
            components
                .iter()
                .zip(&logs)
                .map(|(c, &l)| c.weight * f_ln_ratio(l, lm))
                .sum()
        },
        lo,
        hi,
        &[],
        quad,
    )
}

fn dist_interval(dist: &BenchmarkDistribution, quad: &QuadratureSpec) -> (f64, f64) {
    quad.interval.unwrap_or_else(|| dist.support())
}

fn exact_log_marginal(dist: &BenchmarkDistribution, logs: &[f64; 2]) -> f64 {
    let w = dist.weights();
    log_sum_exp((0..2).map(|x| w[x].ln() + logs[x]))
}

/// Exact mutual information of a benchmark distribution,
/// `sum_x p(x) * integral mu(y|x) ln(mu(y|x) / phi(y)) dy`, by adaptive
/// quadrature split at every density discontinuity.
pub fn analytic_mi_quadrature(dist: &BenchmarkDistribution, quad: &QuadratureSpec) -> Result<f64> {
    let (lo, hi) = dist_interval(dist, quad);
    let w = dist.weights();
    integrate(
        |y| {
            let logs = [dist.log_conditional(0, y), dist.log_conditional(1, y)];
            let lm = exact_log_marginal(dist, &logs);
            (0..2).map(|x| w[x] * f_ln_ratio(logs[x], lm)).sum()
        },
        lo,
        hi,
        &dist.breakpoints(),
        quad,
    )
}

/// Exact weighted Jensen-Shannon divergence of a benchmark distribution's
/// conditionals with weights `p(x)`; equal to [`analytic_mi_quadrature`].
pub fn analytic_jsd_quadrature(
    dist: &BenchmarkDistribution,
    quad: &QuadratureSpec,
) -> Result<JsdEstimate> {
    let (lo, hi) = dist_interval(dist, quad);
    let bp = dist.breakpoints();
    let w = dist.weights();
    let mixture_entropy = integrate(
        |y| {
            let logs = [dist.log_conditional(0, y), dist.log_conditional(1, y)];
            neg_f_ln_f(exact_log_marginal(dist, &logs))
        },
        lo,
        hi,
        &bp,
        quad,
    )?;
    let mut component_entropies = BTreeMap::new();
    let mut weighted = 0.0;
    for x in 0..2 {
        let h = integrate(
            |y| neg_f_ln_f(dist.log_conditional(x, y)),
            lo,
            hi,
            &bp,
            quad,
        )?;
        weighted += w[x] * h;
        component_entropies.insert(TOKENS[x], h);
    }
    Ok(JsdEstimate {
        jsd_nats: mixture_entropy - weighted,
        mixture_entropy,
        component_entropies,
        weights: TOKENS.iter().copied().zip(w).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// ln 3 - (2/3) ln 2: entropy of the (1/3, 2/3) label distribution.
    const H_X: f64 = 0.636_514_168_294_813;

    #[test]
    fn label_entropy_constant() {
        assert_relative_eq!(entropy(&[1.0 / 3.0, 2.0 / 3.0]), H_X, max_relative = 1e-15);
        assert_relative_eq!(3f64.ln() - 2.0 / 3.0 * 2f64.ln(), H_X, max_relative = 1e-15);
    }

    #[test]
    fn terms_sum_to_total() {
        let ds = BenchmarkDistribution::gaussian(1.0, 1.0)
            .unwrap()
            .sample(300, 1)
            .unwrap();
        let est = estimate_mi(&ds, 1.06).unwrap();
        let sum: f64 = est.per_label_terms.values().sum();
        assert_relative_eq!(sum, est.mi_nats, max_relative = 1e-14);
        assert!(est.mi_nats <= est.label_entropy);
        assert_eq!(est.n, 300);
    }

    #[test]
    fn disjoint_supports_saturate() {
        let ds = BenchmarkDistribution::uniform(2.0, 1.0)
            .unwrap()
            .sample(1000, 3)
            .unwrap();
        let est = estimate_mi(&ds, 1.06).unwrap();
        assert!((est.mi_nats - H_X).abs() < 0.02, "{}", est.mi_nats);
    }

    #[test]
    fn well_separated_gaussians_near_saturation() {
        let ds = BenchmarkDistribution::gaussian(5.0, 1.0)
            .unwrap()
            .sample(1000, 5)
            .unwrap();
        let est = estimate_mi(&ds, 1.06).unwrap();
        // Exact MI of this setup is 0.62039.
        assert!((est.mi_nats - 0.6204).abs() < 0.02, "{}", est.mi_nats);
    }

    #[test]
    fn same_distribution_is_near_zero() {
        let ds = BenchmarkDistribution::gaussian(0.0, 1.0)
            .unwrap()
            .sample(1000, 8)
            .unwrap();
        let est = estimate_mi(&ds, 1.06).unwrap();
        assert!(est.mi_nats.abs() < 0.015, "{}", est.mi_nats);
    }

    #[test]
    fn propagates_fit_errors() {
        let ds = LabeledDataset::new([(0, 1.0), (0, 2.0), (1, 3.0)]).unwrap();
        assert!(matches!(
            estimate_mi(&ds, 1.06),
            Err(Error::AtLabel { label: 1, .. })
        ));
    }

    #[test]
    fn serializes_expected_keys() {
        let ds = BenchmarkDistribution::gaussian(1.0, 1.0)
            .unwrap()
            .sample(100, 1)
            .unwrap();
        let v = serde_json::to_value(estimate_mi(&ds, 1.06).unwrap()).unwrap();
        for key in ["mi_nats", "n", "label_entropy", "per_label_terms"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v["per_label_terms"].get("1").is_some());
    }

    #[test]
    fn jsd_single_label_is_zero() {
        let ds = LabeledDataset::new((0..50).map(|i| (0, (i as f64).sin()))).unwrap();
        let model = ConditionalKde::fit(&ds, 1.06).unwrap();
        let jsd = estimate_jsd(&model, &QuadratureSpec::default()).unwrap();
        assert_eq!(jsd.jsd_nats, 0.0);
    }

    #[test]
    fn jsd_identical_conditionals_is_zero() {
        let vals: Vec<f64> = (0..60).map(|i| (i as f64 * 0.7).sin() * 2.0).collect();
        let pairs = vals.iter().flat_map(|&v| [(0, v), (1, v)]);
        let model = ConditionalKde::fit(&LabeledDataset::new(pairs).unwrap(), 1.06).unwrap();
        let jsd = estimate_jsd(&model, &QuadratureSpec::default()).unwrap();
        assert!(jsd.jsd_nats.abs() < 1e-8, "{}", jsd.jsd_nats);
    }

    #[test]
    fn jsd_rejects_short_interval() {
        let ds = BenchmarkDistribution::gaussian(1.0, 1.0)
            .unwrap()
            .sample(100, 1)
            .unwrap();
        let model = ConditionalKde::fit(&ds, 1.06).unwrap();
        let quad = QuadratureSpec {
            interval: Some((-1.0, 1.0)),
            ..Default::default()
        };
        assert!(matches!(
            estimate_jsd(&model, &quad),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn analytic_independence_is_zero() {
        let q = QuadratureSpec::default();
        let g = BenchmarkDistribution::gaussian(0.0, 1.0).unwrap();
        assert!(analytic_mi_quadrature(&g, &q).unwrap().abs() < 1e-9);
        let u = BenchmarkDistribution::uniform(0.0, 1.0).unwrap();
        assert!(analytic_mi_quadrature(&u, &q).unwrap().abs() < 1e-9);
    }

    #[test]
    fn analytic_disjoint_uniform_saturates() {
        let u = BenchmarkDistribution::uniform(2.0, 1.0).unwrap();
        let v = analytic_mi_quadrature(&u, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(v, H_X, max_relative = 1e-9);
    }

    #[test]
    fn analytic_uniform_partial_overlap_closed_form() {
        // Equal unit widths offset by d < 1: MI = d * H(X).
        for d in [0.1, 0.25, 0.6] {
            let u = BenchmarkDistribution::uniform(d, 1.0).unwrap();
            let v = analytic_mi_quadrature(&u, &QuadratureSpec::default()).unwrap();
            assert_relative_eq!(v, d * H_X, max_relative = 1e-8);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn label_permutation_invariance(seed in 0u64..1000) {
            let ds = BenchmarkDistribution::gaussian(1.0, 0.7).unwrap().sample(120, seed).unwrap();
            let renamed = LabeledDataset::new(ds.pairs().map(|(t, v)| (10 - 3 * t, v))).unwrap();
            let a = estimate_mi(&ds, 1.06).unwrap().mi_nats;
            let b = estimate_mi(&renamed, 1.06).unwrap().mi_nats;
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn row_order_invariance(seed in 0u64..1000, rot in 1usize..119) {
            let ds = BenchmarkDistribution::gaussian(1.0, 0.7).unwrap().sample(120, seed).unwrap();
            let mut pairs: Vec<_> = ds.pairs().collect();
            pairs.rotate_left(rot);
            pairs.reverse();
            let shuffled = LabeledDataset::new(pairs).unwrap();
            let a = estimate_mi(&ds, 1.06).unwrap().mi_nats;
            let b = estimate_mi(&shuffled, 1.06).unwrap().mi_nats;
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn affine_invariance(seed in 0u64..1000, scale in 0.1f64..10.0, shift in -10.0f64..10.0) {
            let ds = BenchmarkDistribution::gaussian(1.0, 0.7).unwrap().sample(120, seed).unwrap();
            let moved = LabeledDataset::new(ds.pairs().map(|(t, v)| (t, scale * v + shift))).unwrap();
            let a = estimate_mi(&ds, 1.06).unwrap().mi_nats;
            let b = estimate_mi(&moved, 1.06).unwrap().mi_nats;
            prop_assert!((a - b).abs() <= 1e-10, "{} vs {}", a, b);
        }
    }
}
