//! The `dcmi` command line.
//!
//! Exit codes: 0 on success, 2 for usage or input errors, 3 when the
//! computation itself fails.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dataset::LabeledDataset;
use crate::distributions::BenchmarkDistribution;
use crate::error::{Error, Result};
use crate::experiments::{
    parse_grid, run_size_study, run_sweep, run_table1, SweepSpec, SweptParam,
};
use crate::kde::{grid_rows, write_grid_csv, ConditionalKde};
use crate::mi::{analytic_mi_quadrature, estimate_mi};
use crate::quadrature::QuadratureSpec;
use crate::significance::{significance, NullModel};

#[derive(Debug, Parser)]
#[command(
    name = "dcmi",
    version,
    about = "Mutual information between discrete labels and continuous values"
)]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate MI of a `label,value` CSV.
    Estimate(EstimateArgs),
    /// Estimate MI and its surrogate significance band.
    Significance(SignificanceArgs),
    /// Run a replicate sweep or the single-sample table.
    Experiment(ExperimentArgs),
    /// Export fitted conditional and marginal densities on a grid.
    Kde(KdeArgs),
    /// Exact MI of a benchmark distribution by quadrature.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write output here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Multiplier in the rule-of-thumb bandwidth.
    #[arg(long, default_value_t = crate::DEFAULT_BANDWIDTH_FACTOR)]
    pub factor: f64,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NullArg {
    Gaussian,
    Permutation,
}

#[derive(Debug, Args)]
pub struct SignificanceArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub surrogates: usize,
    #[arg(long, env = "DCMI_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Null model for the surrogates.
    #[arg(long, value_enum, default_value = "gaussian")]
    pub null: NullArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// Benchmark family: gaussian, uniform or exponential.
    #[arg(long)]
    pub dist: Option<String>,
    #[arg(long = "ym", allow_negative_numbers = true)]
    pub y_m: Option<f64>,
    #[arg(long = "sigma-g")]
    pub sigma_g: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
}

impl DistArgs {
    fn build(&self) -> Result<BenchmarkDistribution> {
        let name = self
            .dist
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("--dist is required".into()))?;
        BenchmarkDistribution::from_name(name, self.y_m, self.sigma_g, self.a)
    }
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Run the three-row single-sample table instead of a sweep.
    #[arg(long)]
    pub table1: bool,
    #[command(flatten)]
    pub dist: DistArgs,
    /// Swept parameter: ym, sigma_g, a or n.
    #[arg(long)]
    pub param: Option<String>,
    /// Grid as `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub surrogates: usize,
    #[arg(long, env = "DCMI_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Skip the matched independent-null estimates.
    #[arg(long)]
    pub no_null: bool,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct KdeArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Evaluation grid as `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub dist: DistArgs,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Parses `args` and runs the selected subcommand.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dcmi: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| {
            Error::Io {
                path: p.clone(),
                source,
            }
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn io_err(path: &Option<PathBuf>) -> impl Fn(io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.clone().unwrap_or_else(|| PathBuf::from("<stdout>")),
        source,
    }
}

fn write_json(out: &Option<PathBuf>, value: &impl Serialize) -> Result<()> {
    let mut w = open_output(out)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| io_err(out)(io::Error::other(e)))?;
    writeln!(w, "{text}")
        .and_then(|_| w.flush())
        .map_err(io_err(out))
}

pub fn execute(config: &CliConfig) -> Result<()> {
    match &config.command {
        Command::Estimate(a) => {
            let ds = LabeledDataset::load_csv(&a.input)?;
            let est = estimate_mi(&ds, a.common.factor)?;
            write_json(&a.common.output, &est)
        }
        Command::Significance(a) => {
            let ds = LabeledDataset::load_csv(&a.input)?;
            let null = match a.null {
                NullArg::Gaussian => NullModel::Gaussian,
                NullArg::Permutation => NullModel::Permutation,
            };
            let report = significance(&ds, a.surrogates, a.seed, a.common.factor, null)?;
            write_json(&a.common.output, &report)
        }
        Command::Experiment(a) => experiment(a),
        Command::Kde(a) => {
            let grid = parse_grid(&a.grid)?;
            let ds = LabeledDataset::load_csv(&a.input)?;
            let model = ConditionalKde::fit(&ds, a.common.factor)?;
            let rows = grid_rows(&model, &grid);
            let out = &a.common.output;
            let mut w = open_output(out)?;
            write_grid_csv(&rows, &mut w)
                .and_then(|_| w.flush())
                .map_err(io_err(out))
        }
        Command::Oracle(a) => {
            let dist = a.dist.build()?;
            let quad = QuadratureSpec::default();
            let mi = analytic_mi_quadrature(&dist, &quad)?;
            #[derive(Serialize)]
            struct Oracle<'a> {
                distribution: BenchmarkDistribution,
                analytic_mi: f64,
                quadrature: &'a QuadratureSpec,
            }
            write_json(
                &a.output,
                &Oracle {
                    distribution: dist,
                    analytic_mi: mi,
                    quadrature: &quad,
                },
            )
        }
    }
}

fn experiment(a: &ExperimentArgs) -> Result<()> {
    let out = &a.common.output;
    if a.table1 {
        let table = run_table1(a.seed, a.n, a.surrogates, a.common.factor)?;
        return match a.format {
            Format::Json => write_json(out, &table),
            Format::Csv => {
                let mut w = open_output(out)?;
                table
                    .write_csv(&mut w)
                    .and_then(|_| w.flush())
                    .map_err(io_err(out))
            }
        };
    }
    let base = a.dist.build()?;
    let param = SweptParam::parse(
        a.param
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("--param is required for a sweep".into()))?,
    )?;
    let grid = parse_grid(
        a.grid
            .as_deref()
            .ok_or_else(|| Error::InvalidGrid("--grid is required for a sweep".into()))?,
    )?;
    let spec = SweepSpec {
        replicates: a.replicates,
        n: a.n,
        factor: a.common.factor,
        with_null: !a.no_null,
        ..SweepSpec::new(base, param, grid, a.seed)
    };
    spec.validate()?;
    let result = if param == SweptParam::N {
        run_size_study(&spec)?
    } else {
        run_sweep(&spec)?
    };
    match a.format {
        Format::Json => write_json(out, &result),
        Format::Csv => {
            let mut w = open_output(out)?;
            result
                .write_csv(&mut w)
                .and_then(|_| w.flush())
                .map_err(io_err(out))
        }
    }
}
