//! Benchmark joint distributions with two labels and known densities.
//!
//! All three families put weight 1/3 on label token `1` and 2/3 on token `2`.
//!
//! * gaussian pair: `y | 1 ~ N(0, 1)`, `y | 2 ~ N(y_m, sigma_g^2)`
//! * uniform pair: `y | 1 ~ U(-1/2, 1/2)`, `y | 2 ~ U(-y_m - a/2, -y_m + a/2)`
//!   (the second component is centred at `-y_m`)
//! * exponential pair: `y | 1 ~ Exp(1)`, `y | 2 ~ Exp(1/2)`

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Label tokens used by every benchmark, in dense-index order.
pub const TOKENS: [i64; 2] = [1, 2];

/// Label probabilities shared by all families.
pub const WEIGHTS: [f64; 2] = [1.0 / 3.0, 2.0 / 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    GaussianPair { y_m: f64, sigma_g: f64 },
    UniformPair { y_m: f64, a: f64 },
    ExponentialPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkDistribution {
    #[serde(flatten)]
    family: Family,
}

impl BenchmarkDistribution {
    pub fn gaussian(y_m: f64, sigma_g: f64) -> Result<Self> {
        if !y_m.is_finite() || !(sigma_g > 0.0 && sigma_g.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gaussian pair needs finite y_m and sigma_g > 0, got y_m={y_m}, sigma_g={sigma_g}"
            )));
        }
        Ok(Self {
            family: Family::GaussianPair { y_m, sigma_g },
        })
    }

    pub fn uniform(y_m: f64, a: f64) -> Result<Self> {
        if !y_m.is_finite() || !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "uniform pair needs finite y_m and a > 0, got y_m={y_m}, a={a}"
            )));
        }
        Ok(Self {
            family: Family::UniformPair { y_m, a },
        })
    }

    pub fn exponential() -> Self {
        Self {
            family: Family::ExponentialPair,
        }
    }

    /// Builds a family by name (`gaussian`, `uniform`, `exponential`).
    /// Missing parameters default to `y_m = 1`, `sigma_g = 1`, `a = 1`;
    /// parameters that do not belong to the family are rejected.
    pub fn from_name(
        name: &str,
        y_m: Option<f64>,
        sigma_g: Option<f64>,
        a: Option<f64>,
    ) -> Result<Self> {
        let reject = |what: &str| {
            Err(Error::InvalidParameter(format!(
                "{what} is not a parameter of the {name} family"
            )))
        };
        match name {
            "gaussian" => {
                if a.is_some() {
                    return reject("a");
                }
                Self::gaussian(y_m.unwrap_or(1.0), sigma_g.unwrap_or(1.0))
            }
            "uniform" => {
                if sigma_g.is_some() {
                    return reject("sigma_g");
                }
                Self::uniform(y_m.unwrap_or(1.0), a.unwrap_or(1.0))
            }
            "exponential" => match (y_m, sigma_g, a) {
                (None, None, None) => Ok(Self::exponential()),
                (Some(_), _, _) => reject("y_m"),
                (_, Some(_), _) => reject("sigma_g"),
                _ => reject("a"),
            },
            other => Err(Error::InvalidParameter(format!("unknown family `{other}`"))),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::GaussianPair { .. } => "gaussian",
            Family::UniformPair { .. } => "uniform",
            Family::ExponentialPair => "exponential",
        }
    }

    pub fn weights(&self) -> [f64; 2] {
        WEIGHTS
    }

    fn index_of(token: i64) -> Result<usize> {
        TOKENS
            .iter()
            .position(|&t| t == token)
            .ok_or(Error::UnknownLabel(token))
    }

    /// Log of the conditional density of dense label `label` (0 or 1) at `y`;
    /// `-inf` outside the support.
    pub fn log_conditional(&self, label: usize, y: f64) -> f64 {
        match (self.family, label) {
            (Family::GaussianPair { .. }, 0) => log_normal(y, 0.0, 1.0),
            (Family::GaussianPair { y_m, sigma_g }, _) => log_normal(y, y_m, sigma_g),
            (Family::UniformPair { .. }, 0) => log_uniform(y, -0.5, 0.5),
            (Family::UniformPair { y_m, a }, _) => log_uniform(y, -y_m - 0.5 * a, -y_m + 0.5 * a),
            (Family::ExponentialPair, 0) => log_exponential(y, 1.0),
            (Family::ExponentialPair, _) => log_exponential(y, 0.5),
        }
    }

    pub fn conditional_density(&self, label: usize, y: f64) -> f64 {
        self.log_conditional(label, y).exp()
    }

    /// Joint density `mu(x, y)` for label token `x` in `{1, 2}`.
    pub fn joint_density(&self, token: i64, y: f64) -> Result<f64> {
        let label = Self::index_of(token)?;
        Ok(WEIGHTS[label] * self.conditional_density(label, y))
    }

    /// Marginal density of `y`.
    pub fn marginal_density(&self, y: f64) -> f64 {
        (0..2)
            .map(|x| WEIGHTS[x] * self.conditional_density(x, y))
            .sum()
    }

    /// Finite interval outside which every conditional density is negligible
    /// (Gaussians: 10 sd around each mean) or zero.
    pub fn support(&self) -> (f64, f64) {
        match self.family {
            Family::GaussianPair { y_m, sigma_g } => (
                (-10.0f64).min(y_m - 10.0 * sigma_g),
                10.0f64.max(y_m + 10.0 * sigma_g),
            ),
            Family::UniformPair { y_m, a } => {
                ((-0.5f64).min(-y_m - 0.5 * a), 0.5f64.max(-y_m + 0.5 * a))
            }
            Family::ExponentialPair => (0.0, 50.0 * 2.0),
        }
    }

    /// Points where a density is discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.family {
            Family::UniformPair { y_m, a } => vec![-0.5, 0.5, -y_m - 0.5 * a, -y_m + 0.5 * a],
            Family::ExponentialPair => vec![0.0],
            Family::GaussianPair { .. } => Vec::new(),
        }
    }

    /// Draws one value from the conditional of dense label `label`.
    pub fn sample_conditional<R: Rng + ?Sized>(&self, label: usize, rng: &mut R) -> f64 {
        match (self.family, label) {
            (Family::GaussianPair { .. }, 0) => rng.sample::<f64, _>(StandardNormal),
            (Family::GaussianPair { y_m, sigma_g }, _) => {
                y_m + sigma_g * rng.sample::<f64, _>(StandardNormal)
            }
            (Family::UniformPair { .. }, 0) => -0.5 + rng.random::<f64>(),
            (Family::UniformPair { y_m, a }, _) => -y_m - 0.5 * a + a * rng.random::<f64>(),
            (Family::ExponentialPair, 0) => -(1.0 - rng.random::<f64>()).ln(),
            (Family::ExponentialPair, _) => -2.0 * (1.0 - rng.random::<f64>()).ln(),
        }
    }

    /// Draws `n` i.i.d. pairs from `rng`: a label with probabilities
    /// (1/3, 2/3), then a value from that label's conditional.
    pub fn sample_with<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<LabeledDataset> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let pairs: Vec<(i64, f64)> = (0..n)
            .map(|_| {
                let label = usize::from(rng.random::<f64>() >= WEIGHTS[0]);
                (TOKENS[label], self.sample_conditional(label, rng))
            })
            .collect();
        LabeledDataset::new(pairs)
    }

    /// Draws `n` pairs from stream 0 of `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<LabeledDataset> {
        self.sample_with(n, &mut stream_rng(seed, 0))
    }
}

impl Distribution<(i64, f64)> for BenchmarkDistribution {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (i64, f64) {
        let label = usize::from(rng.random::<f64>() >= WEIGHTS[0]);
        (TOKENS[label], self.sample_conditional(label, rng))
    }
}

fn log_normal(y: f64, mean: f64, sd: f64) -> f64 {
    let z = (y - mean) / sd;
    -0.5 * z * z - (sd * (2.0 * PI).sqrt()).ln()
}

fn log_uniform(y: f64, lo: f64, hi: f64) -> f64 {
    if y > lo && y < hi {
        -(hi - lo).ln()
    } else {
        f64::NEG_INFINITY
    }
}

fn log_exponential(y: f64, rate: f64) -> f64 {
    if y > 0.0 {
        rate.ln() - rate * y
    } else {
        f64::NEG_INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadratureSpec};
    use approx::assert_relative_eq;
    use statrs::distribution::{ContinuousCDF, Exp, Normal, Uniform};

    fn families() -> Vec<BenchmarkDistribution> {
        let mut out = vec![BenchmarkDistribution::exponential()];
        for &y_m in &[0.0, 0.5, 1.0, 2.5, 5.0] {
            for &w in &[0.25, 1.0, 4.0] {
                out.push(BenchmarkDistribution::gaussian(y_m, w).unwrap());
                out.push(BenchmarkDistribution::uniform(y_m, w).unwrap());
            }
        }
        out
    }

    #[test]
    fn joint_density_values() {
        let g = BenchmarkDistribution::gaussian(1.0, 1.0).unwrap();
        assert_relative_eq!(
            g.joint_density(1, 0.0).unwrap(),
            0.132_980_760_1,
            max_relative = 1e-9
        );
        let u = BenchmarkDistribution::uniform(0.0, 1.0).unwrap();
        assert_relative_eq!(
            u.joint_density(2, 0.0).unwrap(),
            2.0 / 3.0,
            max_relative = 1e-15
        );
        let e = BenchmarkDistribution::exponential();
        assert_relative_eq!(
            e.joint_density(2, 2.0).unwrap(),
            0.122_626_480_4,
            max_relative = 1e-9
        );
        assert!(matches!(
            e.joint_density(0, 1.0),
            Err(Error::UnknownLabel(0))
        ));
        assert!(matches!(
            e.joint_density(3, 1.0),
            Err(Error::UnknownLabel(3))
        ));
    }

    #[test]
    fn uniform_second_component_is_centred_at_minus_y_m() {
        let u = BenchmarkDistribution::uniform(2.0, 1.0).unwrap();
        assert_eq!(u.joint_density(2, 2.0).unwrap(), 0.0);
        assert_relative_eq!(u.joint_density(2, -2.0).unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn constructors_validate() {
        assert!(BenchmarkDistribution::gaussian(0.0, 0.0).is_err());
        assert!(BenchmarkDistribution::uniform(0.0, -1.0).is_err());
        assert!(BenchmarkDistribution::from_name("exponential", Some(1.0), None, None).is_err());
        assert!(BenchmarkDistribution::from_name("exponential", None, None, None).is_ok());
        assert!(BenchmarkDistribution::from_name("gaussian", None, None, Some(1.0)).is_err());
        assert!(BenchmarkDistribution::from_name("cauchy", None, None, None).is_err());
    }

    #[test]
    fn total_mass_is_one() {
        let spec = QuadratureSpec::default();
        for d in families() {
            let (lo, hi) = d.support();
            let mass =
                integrate(|y| d.marginal_density(y), lo, hi, &d.breakpoints(), &spec).unwrap();
            assert!((mass - 1.0).abs() < 1e-9, "{d:?}: {mass}");
            for x in 0..2 {
                let m = integrate(
                    |y| d.conditional_density(x, y),
                    lo,
                    hi,
                    &d.breakpoints(),
                    &spec,
                )
                .unwrap();
                assert!((m - 1.0).abs() < 1e-9, "{d:?} label {x}: {m}");
            }
        }
    }

    #[test]
    fn label_fraction_converges() {
        let d = BenchmarkDistribution::gaussian(1.0, 1.0).unwrap();
        let ds = d.sample(100_000, 42).unwrap();
        let f = ds.label_frequency(1).unwrap();
        assert!((f - 1.0 / 3.0).abs() < 0.005, "{f}");
    }

    #[test]
    fn exponential_second_mean() {
        let ds = BenchmarkDistribution::exponential()
            .sample(100_000, 42)
            .unwrap();
        let part = &ds.partition()[1];
        let mean = part.values.iter().sum::<f64>() / part.count() as f64;
        assert!((mean - 2.0).abs() < 0.03, "{mean}");
        assert!(part.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = BenchmarkDistribution::uniform(0.3, 2.0).unwrap();
        let a = d.sample(500, 9).unwrap();
        let b = d.sample(500, 9).unwrap();
        let (mut ba, mut bb) = (Vec::new(), Vec::new());
        a.write_csv(&mut ba).unwrap();
        b.write_csv(&mut bb).unwrap();
        assert_eq!(ba, bb);
        assert_ne!(a, d.sample(500, 10).unwrap());
        assert!(d.sample(0, 1).is_err());
    }

    fn ks_distance(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let c = cdf(x);
                (c - i as f64 / n).abs().max((c - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn conditional_samples_pass_ks() {
        // 1% critical value for n = 10^4.
        let critical = 1.628 / 100.0;
        type Cdf = Box<dyn Fn(f64) -> f64>;
        let cases: Vec<(BenchmarkDistribution, usize, Cdf)> = vec![
            {
                let n = Normal::new(0.0, 1.0).unwrap();
                (
                    BenchmarkDistribution::gaussian(2.0, 0.5).unwrap(),
                    0,
                    Box::new(move |x| n.cdf(x)),
                )
            },
            {
                let n = Normal::new(2.0, 0.5).unwrap();
                (
                    BenchmarkDistribution::gaussian(2.0, 0.5).unwrap(),
                    1,
                    Box::new(move |x| n.cdf(x)),
                )
            },
            {
                let u = Uniform::new(-2.0 - 1.5, -2.0 + 1.5).unwrap();
                (
                    BenchmarkDistribution::uniform(2.0, 3.0).unwrap(),
                    1,
                    Box::new(move |x| u.cdf(x)),
                )
            },
            {
                let e = Exp::new(0.5).unwrap();
                (
                    BenchmarkDistribution::exponential(),
                    1,
                    Box::new(move |x| e.cdf(x)),
                )
            },
        ];
        for (dist, label, cdf) in &cases {
            let passed = (0..100u64)
                .filter(|&trial| {
                    let mut rng = stream_rng(1234, trial);
                    let xs: Vec<f64> = (0..10_000)
                        .map(|_| dist.sample_conditional(*label, &mut rng))
                        .collect();
                    ks_distance(xs, cdf) < critical
                })
                .count();
            assert!(passed >= 99, "{dist:?} label {label}: {passed}/100");
        }
    }
}
