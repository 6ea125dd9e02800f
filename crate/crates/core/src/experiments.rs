//! Replicate sweeps: sample many datasets from a benchmark distribution at
//! each grid value of one parameter, estimate MI on each, and compare the
//! replicate mean and spread with the exact-density quadrature value.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{BenchmarkDistribution, Family};
use crate::error::{Error, Result};
use crate::kde::check_factor;
use crate::mi::{analytic_mi_quadrature, estimate_mi};
use crate::quadrature::QuadratureSpec;
use crate::rng::{stream_rng, sweep_stream};
use crate::significance::{make_surrogate_with, significance, summarize, NullModel};

/// Parameter varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParam {
    YM,
    SigmaG,
    A,
    /// Number of pairs per dataset.
    N,
}

impl SweptParam {
    pub fn name(self) -> &'static str {
        match self {
            SweptParam::YM => "y_m",
            SweptParam::SigmaG => "sigma_g",
            SweptParam::A => "a",
            SweptParam::N => "n",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ym" | "y_m" => Ok(SweptParam::YM),
            "sigma_g" | "sigma-g" | "sigmag" => Ok(SweptParam::SigmaG),
            "a" => Ok(SweptParam::A),
            "n" => Ok(SweptParam::N),
            other => Err(Error::InvalidParameter(format!(
                "unknown sweep parameter `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    /// Distribution at every grid point, apart from the swept parameter.
    pub base: BenchmarkDistribution,
    pub param: SweptParam,
    pub grid: Vec<f64>,
    pub replicates: usize,
    /// Pairs per dataset (ignored when sweeping `n`).
    pub n: usize,
    pub seed: u64,
    pub factor: f64,
    /// Also estimate MI on a Gaussian-null surrogate of every replicate.
    pub with_null: bool,
}

impl SweepSpec {
    pub fn new(base: BenchmarkDistribution, param: SweptParam, grid: Vec<f64>, seed: u64) -> Self {
        Self {
            base,
            param,
            grid,
            replicates: 100,
            n: 1000,
            seed,
            factor: crate::DEFAULT_BANDWIDTH_FACTOR,
            with_null: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) || self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(
                "grid must be finite and strictly increasing".into(),
            ));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidParameter(
                "replicates must be at least 1".into(),
            ));
        }
        check_factor(self.factor)?;
        if self.param == SweptParam::N {
            if self.grid.iter().any(|&v| v < 1.0 || v.fract() != 0.0) {
                return Err(Error::InvalidGrid(
                    "sample sizes must be positive integers".into(),
                ));
            }
        } else if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        for &v in &self.grid {
            self.distribution_at(v)?;
        }
        Ok(())
    }

    /// Distribution and sample size at grid value `value`.
    pub fn distribution_at(&self, value: f64) -> Result<BenchmarkDistribution> {
        let family = self.base.family();
        let mismatch = || {
            Err(Error::InvalidParameter(format!(
                "{} is not a parameter of the {} family",
                self.param.name(),
                self.base.name()
            )))
        };
        match (self.param, family) {
            (SweptParam::N, _) => Ok(self.base),
            (SweptParam::YM, Family::GaussianPair { sigma_g, .. }) => {
                BenchmarkDistribution::gaussian(value, sigma_g)
            }
            (SweptParam::YM, Family::UniformPair { a, .. }) => {
                BenchmarkDistribution::uniform(value, a)
            }
            (SweptParam::SigmaG, Family::GaussianPair { y_m, .. }) => {
                BenchmarkDistribution::gaussian(y_m, value)
            }
            (SweptParam::A, Family::UniformPair { y_m, .. }) => {
                BenchmarkDistribution::uniform(y_m, value)
            }
            _ => mismatch(),
        }
    }

    fn n_at(&self, value: f64) -> usize {
        if self.param == SweptParam::N {
            value as usize
        } else {
            self.n
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub param: f64,
    pub mean_mi: f64,
    pub std_mi: f64,
    pub analytic_mi: f64,
    pub null_mean: Option<f64>,
    pub null_std: Option<f64>,
    /// Per-replicate estimates, in replicate order.
    pub estimates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub points: Vec<SweepPoint>,
}

/// Runs every (grid point, replicate) pair. Replicate `r` at grid index `g`
/// samples from stream `sweep_stream(g, r, false)` and its matched null from
/// `sweep_stream(g, r, true)`; results are reduced in replicate order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let quad = QuadratureSpec::default();
    let points = spec
        .grid
        .iter()
        .enumerate()
        .map(|(g, &value)| {
            let dist = spec.distribution_at(value)?;
            let n = spec.n_at(value);
            let tag = |replicate: usize| {
                move |source: Error| Error::AtReplicate {
                    param: spec.param.name(),
                    value,
                    replicate,
                    source: Box::new(source),
                }
            };
            let pairs = (0..spec.replicates)
                .into_par_iter()
                .map(|r| {
                    let ds =
                        dist.sample_with(n, &mut stream_rng(spec.seed, sweep_stream(g, r, false)))?;
                    let mi = estimate_mi(&ds, spec.factor)?.mi_nats;
                    let null = if spec.with_null {
                        let s = make_surrogate_with(
                            &ds,
                            &mut stream_rng(spec.seed, sweep_stream(g, r, true)),
                        )?;
                        Some(estimate_mi(&s, spec.factor)?.mi_nats)
                    } else {
                        None
                    };
                    Ok((mi, null))
                })
                .enumerate()
                .map(|(r, res): (usize, Result<_>)| res.map_err(tag(r)))
                .collect::<Result<Vec<(f64, Option<f64>)>>>()?;
            let estimates: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let (mean_mi, std_mi) = summarize(&estimates);
            let nulls: Option<Vec<f64>> = pairs.iter().map(|p| p.1).collect();
            let (null_mean, null_std) = match nulls {
                Some(v) => {
                    let (m, s) = summarize(&v);
                    (Some(m), Some(s))
                }
                None => (None, None),
            };
            Ok(SweepPoint {
                param: value,
                mean_mi,
                std_mi,
                analytic_mi: analytic_mi_quadrature(&dist, &quad)?,
                null_mean,
                null_std,
                estimates,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        spec: spec.clone(),
        points,
    })
}

/// Sweep over the dataset size at fixed distribution parameters.
pub fn run_size_study(spec: &SweepSpec) -> Result<SweepResult> {
    if spec.param != SweptParam::N {
        return Err(Error::InvalidParameter("size study must sweep n".into()));
    }
    if spec.grid.iter().any(|&v| v < 50.0) {
        return Err(Error::InvalidGrid(
            "size study needs n >= 50 at every grid point".into(),
        ));
    }
    run_sweep(spec)
}

/// Default sample-size grid of the size study.
pub const SIZE_GRID: [f64; 6] = [100.0, 250.0, 500.0, 1000.0, 2000.0, 5000.0];

/// The three (y_m, sigma_g) settings of the size study.
pub const SIZE_STUDY_SETTINGS: [(f64, f64); 3] = [(1.0, 1.0), (2.0, 1.0), (5.0, 1.0)];

/// Size-study specs for every default setting.
pub fn size_study_specs(grid: &[f64], replicates: usize, seed: u64, factor: f64) -> Vec<SweepSpec> {
    SIZE_STUDY_SETTINGS
        .iter()
        .map(|&(y_m, sigma_g)| SweepSpec {
            replicates,
            factor,
            with_null: false,
            ..SweepSpec::new(
                BenchmarkDistribution::gaussian(y_m, sigma_g).expect("positive sigma"),
                SweptParam::N,
                grid.to_vec(),
                seed,
            )
        })
        .collect()
}

/// Parses `start:stop:step` into `start, start + step, ...` up to and
/// including `stop` (within a relative rounding margin).
pub fn parse_grid(expr: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::InvalidGrid(format!("`{expr}`: {why}"));
    let parts: Vec<&str> = expr.split(':').collect();
    let nums: Vec<f64> = match parts.len() {
        1 => vec![parts[0].trim().parse().map_err(|_| bad("not a number"))?],
        3 => parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad("not a number")))
            .collect::<Result<_>>()?,
        _ => return Err(bad("expected start:stop:step")),
    };
    if nums.iter().any(|v| !v.is_finite()) {
        return Err(bad("values must be finite"));
    }
    if nums.len() == 1 {
        return Ok(nums);
    }
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if step <= 0.0 {
        return Err(bad("step must be positive"));
    }
    if stop < start {
        return Err(bad("stop is below start"));
    }
    let count = ((stop - start) / step * (1.0 + 1e-12) + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(bad("too many points"));
    }
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

impl SweepResult {
    /// CSV with header `param,mean_mi,std_mi,analytic_mi,null_mean,null_std`,
    /// preceded by `#` lines echoing the full spec.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        let s = &self.spec;
        writeln!(w, "# dcmi experiment")?;
        writeln!(
            w,
            "# distribution={}",
            serde_json::to_string(&s.base).map_err(std::io::Error::other)?
        )?;
        writeln!(
            w,
            "# param={} seed={} factor={} replicates={} n={} with_null={}",
            s.param.name(),
            s.seed,
            s.factor,
            s.replicates,
            s.n,
            s.with_null
        )?;
        writeln!(w, "# grid={}", join(&s.grid))?;
        writeln!(w, "param,mean_mi,std_mi,analytic_mi,null_mean,null_std")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                p.param,
                p.mean_mi,
                p.std_mi,
                p.analytic_mi,
                opt(p.null_mean),
                opt(p.null_std)
            )?;
        }
        Ok(())
    }
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Target analytic MI of the reconstructed uniform row of the single-sample table.
pub const TABLE1_UNIFORM_TARGET: f64 = 0.1429;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub distribution: BenchmarkDistribution,
    /// True when the parameters are a reconstruction rather than given values.
    pub reconstructed: bool,
    pub analytic_mi: f64,
    pub observed_mi: f64,
    pub null_mean: f64,
    pub null_std: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1 {
    pub seed: u64,
    pub factor: f64,
    pub n: usize,
    pub surrogates: usize,
    pub note: String,
    pub rows: Vec<Table1Row>,
}

/// Uniform pair with `a = 1` whose exact MI equals `target`, found by
/// bisection on `y_m` in `[0, 1]`, where the MI rises monotonically from 0
/// to the label entropy.
pub fn uniform_for_target(target: f64) -> Result<BenchmarkDistribution> {
    let quad = QuadratureSpec::default();
    let mi_at = |y_m: f64| -> Result<f64> {
        analytic_mi_quadrature(&BenchmarkDistribution::uniform(y_m, 1.0)?, &quad)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    if !(mi_at(lo)? <= target && target <= mi_at(hi)?) {
        return Err(Error::InvalidParameter(format!(
            "target MI {target} is out of range"
        )));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mi_at(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    BenchmarkDistribution::uniform(0.5 * (lo + hi), 1.0)
}

/// Single-sample table: one dataset per family, its MI, and the surrogate
/// significance band. Row `i` samples from stream `sweep_stream(i, 0, false)`
/// of `seed`; its surrogates use seed `seed + 1 + i`.
pub fn run_table1(seed: u64, n: usize, surrogates: usize, factor: f64) -> Result<Table1> {
    let quad = QuadratureSpec::default();
    let dists = [
        (BenchmarkDistribution::gaussian(5.0, 1.0)?, false),
        (uniform_for_target(TABLE1_UNIFORM_TARGET)?, true),
        (BenchmarkDistribution::exponential(), false),
    ];
    let rows = dists
        .iter()
        .enumerate()
        .map(|(i, &(dist, reconstructed))| {
            let ds = dist.sample_with(n, &mut stream_rng(seed, sweep_stream(i, 0, false)))?;
            let rep = significance(
                &ds,
                surrogates,
                seed.wrapping_add(1 + i as u64),
                factor,
                NullModel::Gaussian,
            )?;
            Ok(Table1Row {
                distribution: dist,
                reconstructed,
                analytic_mi: analytic_mi_quadrature(&dist, &quad)?,
                observed_mi: rep.observed_mi,
                null_mean: rep.surrogate_mean,
                null_std: rep.surrogate_std,
                z: rep.z_score,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table1 {
        seed,
        factor,
        n,
        surrogates,
        note: format!(
            "gaussian row uses y_m=5, sigma_g=1; uniform row uses a=1 with y_m chosen so the exact MI is {TABLE1_UNIFORM_TARGET}"
        ),
        rows,
    })
}

impl Table1 {
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(
            w,
            "# dcmi table1 seed={} factor={} n={} surrogates={}",
            self.seed, self.factor, self.n, self.surrogates
        )?;
        writeln!(w, "# {}", self.note)?;
        writeln!(w, "pdf,params,mi,null_mean,null_std,z,analytic_mi")?;
        for r in &self.rows {
            let params = match r.distribution.family() {
                Family::GaussianPair { y_m, sigma_g } => format!("y_m={y_m} sigma_g={sigma_g}"),
                Family::UniformPair { y_m, a } => format!("y_m={y_m} a={a}"),
                Family::ExponentialPair => String::new(),
            };
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.distribution.name(),
                params,
                r.observed_mi,
                r.null_mean,
                r.null_std,
                r.z,
                r.analytic_mi
            )?;
        }
        Ok(())
    }
}
