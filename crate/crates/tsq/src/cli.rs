//! The `tsq` batch command line.
//!
//! Exit codes: 0 success, 1 output IO failure, 2 usage error, 3 input data
//! or artifact format error, 4 infeasible constraint (artifact and stats are
//! still written, with `feasible: false`). With several inputs the most
//! severe code wins, in the order 1, 2, 3, 4.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use tsq_core::{
    compress, decompress, encode, fit_codebook, kmeans_with, optimize_max_cr_capped, optimize_min_loss_capped,
    outlier_delta_coverage_with, quantize, quantize_banded, relative_cloud_error, rolling_band, small_cluster_outliers,
    Assignment, CloudMode, Coverage, CoverageOptions, DistortionReport, PointCloud, QuantileFitter, RollingBandConfig,
    Statistic, ThresholdBand, TimeSeries,
};

use crate::csvio::{self, CsvError};
use crate::formats::{
    decode_any, encode_binary, encode_text, Artifact, BandDescriptor, BandedArtifact, CoverageArtifact,
    QuantileArtifact,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "tsq", version, about = "Lossy quantization and compression of metric time series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantile quantization with duplicate elimination.
    QuantizeA(QuantizeArgs),
    /// Threshold-banded quantization.
    BandedB(BandedArgs),
    /// Δ-coverage vector quantization of multi-column input.
    CoverageC(CoverageArgs),
    /// Decode an artifact and write the reconstruction as CSV.
    Reconstruct(ReconstructArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Binary,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatArg {
    Median,
    Mean,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Input CSV files (`timestamp,value...`, header optional).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output artifact; a directory when several inputs are given.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Write the stats JSON here instead of standard output.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Binary)]
    pub format: OutputFormat,
    /// Input files processed in parallel.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["n", "max_cr_delta", "min_loss_cr"])))]
pub struct QuantizeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Fixed codebook size.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Option<u64>,
    /// Maximize the compression rate subject to ℓ1 ≤ this bound.
    #[arg(long, allow_negative_numbers = true, value_parser = non_negative)]
    pub max_cr_delta: Option<f64>,
    /// Minimize ℓ1 subject to a compression rate of at least this percentage.
    #[arg(long, allow_negative_numbers = true, value_parser = percentage)]
    pub min_loss_cr: Option<f64>,
    /// Largest codebook size the optimizers consider.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_levels: Option<u64>,
    /// Value column to read (0 = first value column).
    #[arg(long, default_value_t = 0)]
    pub column: usize,
    /// Write the n vs ℓ1 / M / CR curve as CSV (single input only).
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollingSpec {
    pub window: usize,
    pub lower_q: f64,
    pub upper_q: f64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("band").required(true).args(["low", "rolling"])))]
pub struct BandedArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true, requires = "high", value_parser = finite)]
    pub low: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "low", value_parser = finite)]
    pub high: Option<f64>,
    /// Trailing-window quantile band: WINDOW,LOWER_Q,UPPER_Q.
    #[arg(long, conflicts_with_all = ["low", "high"], value_parser = rolling_spec)]
    pub rolling: Option<RollingSpec>,
    /// Added to the lower bound when a rolling window collapses.
    #[arg(long, requires = "rolling", value_parser = positive)]
    pub epsilon: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub slices: u64,
    #[arg(long, value_enum, default_value_t = StatArg::Median)]
    pub stat: StatArg,
    #[arg(long, default_value_t = 0)]
    pub column: usize,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[command(flatten)]
    pub common: Common,
    /// Coverage radius Δ.
    #[arg(long, allow_negative_numbers = true, value_parser = non_negative)]
    pub delta: f64,
    /// Clusters holding less than this fraction of the points become exact outliers.
    #[arg(long, value_parser = open_fraction)]
    pub outlier_fraction: Option<f64>,
    /// Apply normalcy circles of this many times the cluster radius.
    #[arg(long, allow_negative_numbers = true, value_parser = non_negative)]
    pub normalcy_factor: Option<f64>,
    /// K used to look for small clusters (default: the plain Δ-coverage K).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub probe_k: Option<u64>,
    /// Fail with exit code 4 rather than exceed this many centroids.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_k: Option<u64>,
    #[arg(long, env = "TSQ_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write a K vs ℓmax / ℓ2 table as CSV (single input only).
    #[arg(long)]
    pub sweep: Option<PathBuf>,
    /// Largest K in the sweep table (default: the K found, at least 10).
    #[arg(long, requires = "sweep", value_parser = clap::value_parser!(u64).range(1..))]
    pub sweep_max_k: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    pub artifact: PathBuf,
    /// Timestamps to reconstruct on (last observation carried forward).
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err("must be finite".into())
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err("must be non-negative".into())
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err("must be positive".into())
    }
}

fn percentage(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if (0.0..=100.0).contains(&v) {
        Ok(v)
    } else {
        Err("must lie in [0, 100]".into())
    }
}

fn open_fraction(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err("must lie strictly between 0 and 1".into())
    }
}

fn rolling_spec(s: &str) -> Result<RollingSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [w, lq, uq] = parts.as_slice() else {
        return Err("expected WINDOW,LOWER_Q,UPPER_Q".into());
    };
    let window: usize = w.parse().map_err(|e| format!("window: {e}"))?;
    let (lower_q, upper_q) = (finite(lq)?, finite(uq)?);
    if window < 2 {
        return Err("window must be at least 2".into());
    }
    if !(0.0 <= lower_q && lower_q < upper_q && upper_q <= 1.0) {
        return Err("quantiles must satisfy 0 <= LOWER_Q < UPPER_Q <= 1".into());
    }
    Ok(RollingSpec { window, lower_q, upper_q })
}

/// Why a run stopped short.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    Io(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Io(m) => m,
        }
    }
}

fn data(context: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Data(format!("{}: {e}", context.display()))
}

fn read_failure(path: &Path, e: CsvError) -> Failure {
    match e {
        CsvError::Io(io) => Failure::Data(format!("{}: cannot read: {io}", path.display())),
        other => data(path, other),
    }
}

/// Writes through a temporary file in the destination directory and renames
/// it into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        fill(&mut w).map_err(io)?;
        w.flush().map_err(io)?;
    }
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn csv_to_io(e: CsvError) -> std::io::Error {
    match e {
        CsvError::Io(io) => io,
        other => std::io::Error::other(other.to_string()),
    }
}

fn write_artifact(path: &Path, artifact: &Artifact, format: OutputFormat) -> Result<(), Failure> {
    let bytes = match format {
        OutputFormat::Binary => encode_binary(artifact),
        OutputFormat::Text => encode_text(artifact).map(String::into_bytes),
    }
    .map_err(|e| data(path, e))?;
    write_atomic(path, |w| w.write_all(&bytes))
}

/// Outcome of one input file.
struct Run {
    stats: Value,
    feasible: bool,
}

fn output_path(common: &Common, input: &Path) -> PathBuf {
    if common.inputs.len() == 1 {
        return common.output.clone();
    }
    let stem = input.file_stem().map_or_else(|| OsString::from("out"), |s| s.to_os_string());
    let mut name = stem;
    name.push(match common.format {
        OutputFormat::Binary => ".tsqc",
        OutputFormat::Text => ".json",
    });
    common.output.join(name)
}

/// Runs `job` over every input (in parallel with `--jobs`), then emits the
/// stats and folds the per-file outcomes into one exit code.
fn batch<F>(common: &Common, job: F) -> i32
where
    F: Fn(&Path, &Path) -> Result<Run, Failure> + Sync,
{
    if common.inputs.len() > 1 {
        if let Err(e) = std::fs::create_dir_all(&common.output) {
            eprintln!("tsq: {}: {e}", common.output.display());
            return EXIT_IO;
        }
    }
    let work = |input: &PathBuf| job(input, &output_path(common, input));
    let results: Vec<Result<Run, Failure>> = if common.jobs > 1 && common.inputs.len() > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(common.jobs as usize).build() {
            Ok(pool) => pool.install(|| common.inputs.par_iter().map(work).collect()),
            Err(e) => {
                eprintln!("tsq: cannot start worker pool: {e}");
                return EXIT_IO;
            }
        }
    } else {
        common.inputs.iter().map(work).collect()
    };

    let mut code = EXIT_OK;
    let mut stats = Vec::new();
    let severity = |c: i32| match c {
        EXIT_IO => 4,
        EXIT_USAGE => 3,
        EXIT_DATA => 2,
        EXIT_INFEASIBLE => 1,
        _ => 0,
    };
    for r in results {
        let c = match r {
            Ok(run) => {
                stats.push(run.stats);
                if run.feasible {
                    EXIT_OK
                } else {
                    EXIT_INFEASIBLE
                }
            }
            Err(f) => {
                eprintln!("tsq: {}", f.message());
                f.code()
            }
        };
        if severity(c) > severity(code) {
            code = c;
        }
    }
    if stats.is_empty() {
        return code;
    }
    let doc = if common.inputs.len() == 1 { stats.pop().unwrap() } else { Value::Array(stats) };
    let mut text = serde_json::to_string_pretty(&doc).expect("stats are plain JSON");
    text.push('\n');
    match &common.stats {
        Some(path) => {
            if let Err(f) = write_atomic(path, |w| w.write_all(text.as_bytes())) {
                eprintln!("tsq: {}", f.message());
                return EXIT_IO;
            }
        }
        None => {
            if std::io::stdout().write_all(text.as_bytes()).is_err() {
                return EXIT_IO;
            }
        }
    }
    code
}

#[derive(Serialize)]
struct SeriesStats<'a, E: Serialize> {
    input: String,
    kind: &'a str,
    #[serde(flatten)]
    extra: E,
    #[serde(flatten)]
    report: DistortionReport,
}

fn quantize_a(args: &QuantizeArgs) -> i32 {
    if args.plot.is_some() && args.common.inputs.len() > 1 {
        eprintln!("tsq: --plot needs a single input");
        return EXIT_USAGE;
    }
    batch(&args.common, |input, output| {
        let series = csvio::read_series(input, args.column).map_err(|e| read_failure(input, e))?;
        let cap = args.max_levels.map(|m| m as usize);
        let (codebook, feasible, mode, target) = if let Some(n) = args.n {
            let fit = fit_codebook(&series, n as usize).map_err(|e| data(input, e))?;
            (fit.codebook, true, "n", n as f64)
        } else if let Some(delta) = args.max_cr_delta {
            let r = optimize_max_cr_capped(&series, delta, cap).map_err(|e| data(input, e))?;
            (r.codebook, r.feasible, "max_cr", delta)
        } else {
            let target = args.min_loss_cr.expect("mode group is required");
            let r = optimize_min_loss_capped(&series, target, cap).map_err(|e| data(input, e))?;
            (r.codebook, r.feasible, "min_loss", target)
        };
        let q = quantize(&series, &codebook).map_err(|e| data(input, e))?;
        let compressed = compress(&q).map_err(|e| data(input, e))?;
        let report =
            DistortionReport::compute(series.values(), q.values(), compressed.len()).map_err(|e| data(input, e))?;
        let artifact = Artifact::QuantileA(QuantileArtifact { codebook: codebook.clone(), series: compressed });
        write_artifact(output, &artifact, args.common.format)?;
        if let Some(plot) = &args.plot {
            write_curve(plot, &series, cap).map_err(|e| match e {
                Failure::Data(m) => data(input, m),
                other => other,
            })?;
        }
        let extra = json!({
            "mode": mode,
            "target": target,
            "feasible": feasible,
            "n": codebook.len(),
            "codebook": codebook.levels(),
            "output": output.display().to_string(),
        });
        let stats = SeriesStats { input: input.display().to_string(), kind: "quantile_a", extra, report };
        Ok(Run { stats: serde_json::to_value(stats).expect("serializable"), feasible })
    })
}

/// n, optimal ℓ1, M and CR for every codebook size.
fn write_curve(path: &Path, series: &TimeSeries, cap: Option<usize>) -> Result<(), Failure> {
    let mut fitter = QuantileFitter::new(series);
    let top = cap.map_or(fitter.distinct(), |c| c.min(fitter.distinct()));
    let mut rows = Vec::with_capacity(top);
    for n in 1..=top {
        let fit = fitter.fit(n).map_err(|e| Failure::Data(e.to_string()))?;
        let q = quantize(series, &fit.codebook).map_err(|e| Failure::Data(e.to_string()))?;
        let m = compress(&q).map_err(|e| Failure::Data(e.to_string()))?.len();
        let cr = tsq_core::compression_rate(series.len(), m).map_err(|e| Failure::Data(e.to_string()))?;
        rows.push([n.to_string(), fit.l1.to_string(), m.to_string(), cr.to_string()]);
    }
    write_atomic(path, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["n", "l1", "m", "cr_percent"]).map_err(|e| csv_to_io(e.into()))?;
        for row in &rows {
            csv.write_record(row).map_err(|e| csv_to_io(e.into()))?;
        }
        csv.flush()
    })
}

fn banded_b(args: &BandedArgs) -> i32 {
    let statistic = match args.stat {
        StatArg::Median => Statistic::Median,
        StatArg::Mean => Statistic::Mean,
    };
    let descriptor = match (args.low, args.high, args.rolling) {
        (Some(lower), Some(upper), None) => {
            if lower >= upper {
                eprintln!("tsq: --low must be below --high");
                return EXIT_USAGE;
            }
            BandDescriptor::Constant { lower, upper }
        }
        (None, None, Some(r)) => BandDescriptor::Rolling {
            window: match u32::try_from(r.window) {
                Ok(w) => w,
                Err(_) => {
                    eprintln!("tsq: rolling window too large");
                    return EXIT_USAGE;
                }
            },
            lower_q: r.lower_q,
            upper_q: r.upper_q,
            epsilon: args.epsilon.unwrap_or(RollingBandConfig::DEFAULT_EPSILON),
        },
        _ => unreachable!("clap enforces the band group"),
    };
    let n = args.slices as usize;
    batch(&args.common, |input, output| {
        let series = csvio::read_series(input, args.column).map_err(|e| read_failure(input, e))?;
        let band = match descriptor {
            BandDescriptor::Constant { lower, upper } => ThresholdBand::constant(lower, upper),
            BandDescriptor::Rolling { window, lower_q, upper_q, epsilon } => {
                rolling_band(&series, RollingBandConfig { window: window as usize, lower_q, upper_q, epsilon })
            }
        }
        .map_err(|e| data(input, e))?;
        let b = quantize_banded(&series, &band, n, statistic).map_err(|e| data(input, e))?;
        let compressed = compress(&b.quantized).map_err(|e| data(input, e))?;
        let report = DistortionReport::compute(series.values(), b.quantized.values(), compressed.len())
            .map_err(|e| data(input, e))?;
        let exact_count = b.quantized.exact_count();
        let artifact = Artifact::BandedB(BandedArtifact {
            band: descriptor,
            statistic,
            slice_stats: b.slice_stats.clone(),
            exact_count: exact_count as u32,
            series: compressed,
        });
        write_artifact(output, &artifact, args.common.format)?;
        let extra = json!({
            "feasible": true,
            "band": descriptor,
            "slices": n,
            "statistic": statistic,
            "slice_stats": b.slice_stats,
            "exact_count": exact_count,
            "output": output.display().to_string(),
        });
        let stats = SeriesStats { input: input.display().to_string(), kind: "banded_b", extra, report };
        Ok(Run { stats: serde_json::to_value(stats).expect("serializable"), feasible: true })
    })
}

/// Relative error, or `None` when the original cloud has zero norm.
fn cloud_error(original: &PointCloud, encoded: &PointCloud, mode: CloudMode) -> Result<Option<f64>, tsq_core::Error> {
    match relative_cloud_error(original, encoded, mode) {
        Ok(v) => Ok(Some(v)),
        Err(tsq_core::Error::DivisionByZero(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn coverage_c(args: &CoverageArgs) -> i32 {
    if args.sweep.is_some() && args.common.inputs.len() > 1 {
        eprintln!("tsq: --sweep needs a single input");
        return EXIT_USAGE;
    }
    let options = CoverageOptions {
        max_k: args.max_k.map(|k| k as usize),
        probe_k: args.probe_k.map(|k| k as usize),
        ..CoverageOptions::default()
    };
    batch(&args.common, |input, output| {
        let (timestamps, cloud) = csvio::read_cloud(input).map_err(|e| read_failure(input, e))?;
        let fraction = args.outlier_fraction.unwrap_or(0.0);
        let found = if fraction > 0.0 {
            outlier_delta_coverage_with(&cloud, args.delta, fraction, args.seed, &options)
        } else {
            tsq_core::delta_coverage_with(&cloud, args.delta, args.seed, &options)
        };
        let coverage = match found {
            Ok(c) => c,
            Err(tsq_core::Error::Infeasible(msg)) => {
                eprintln!("tsq: {}: {msg}", input.display());
                let stats = json!({
                    "input": input.display().to_string(),
                    "kind": "coverage_c",
                    "feasible": false,
                    "delta": args.delta,
                    "seed": args.seed,
                    "n_points": cloud.len(),
                    "dim": cloud.dim(),
                });
                return Ok(Run { stats, feasible: false });
            }
            Err(e) => return Err(data(input, e)),
        };
        let coverage = match args.normalcy_factor {
            Some(f) => coverage.with_normalcy(&cloud, f).map_err(|e| data(input, e))?,
            None => coverage,
        };
        let encoded = encode(&cloud, &coverage).map_err(|e| data(input, e))?;
        let l_max = cloud_error(&cloud, &encoded, CloudMode::Max).map_err(|e| data(input, e))?;
        let l_2 = cloud_error(&cloud, &encoded, CloudMode::Mean).map_err(|e| data(input, e))?;
        let max_error = coverage.max_error(&cloud).map_err(|e| data(input, e))?;
        let stats = json!({
            "input": input.display().to_string(),
            "kind": "coverage_c",
            "feasible": true,
            "delta": args.delta,
            "seed": args.seed,
            "n_points": cloud.len(),
            "dim": cloud.dim(),
            "k": coverage.k(),
            "outliers": coverage.outliers().len(),
            "max_error": max_error,
            "l_max": l_max,
            "l_2": l_2,
            "output": output.display().to_string(),
        });
        if let Some(path) = &args.sweep {
            let top = args.sweep_max_k.map_or(coverage.k().max(10), |k| k as usize).min(cloud.len());
            write_sweep(path, &cloud, top, args.outlier_fraction, args.seed, &options).map_err(|e| match e {
                Failure::Data(m) => data(input, m),
                other => other,
            })?;
        }
        let artifact = CoverageArtifact::new(timestamps, &cloud, coverage).map_err(|e| data(input, e))?;
        write_artifact(output, &Artifact::CoverageC(artifact), args.common.format)?;
        Ok(Run { stats, feasible: true })
    })
}

/// ℓmax and ℓ2 of the K-means encoding for K = 1..=top. With an outlier
/// fraction, the small clusters at each K are kept exact.
fn write_sweep(
    path: &Path,
    cloud: &PointCloud,
    top: usize,
    fraction: Option<f64>,
    seed: u64,
    options: &CoverageOptions,
) -> Result<(), Failure> {
    let fail = |e: tsq_core::Error| Failure::Data(e.to_string());
    let fmt = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
    let mut rows = Vec::with_capacity(top);
    for k in 1..=top {
        let clustering = kmeans_with(cloud, k, seed, &options.kmeans).map_err(fail)?;
        let outliers = match fraction {
            Some(f) => small_cluster_outliers(&clustering, f).map_err(fail)?,
            None => Vec::new(),
        };
        let mut assignment: Vec<Assignment> =
            clustering.assignment().iter().map(|&j| Assignment::Centroid(j)).collect();
        outliers.iter().for_each(|&i| assignment[i] = Assignment::Outlier);
        let coverage =
            Coverage::from_parts(cloud.dim(), clustering.centroids().to_vec(), assignment, f64::MAX).map_err(fail)?;
        let encoded = encode(cloud, &coverage).map_err(fail)?;
        let l_max = cloud_error(cloud, &encoded, CloudMode::Max).map_err(fail)?;
        let l_2 = cloud_error(cloud, &encoded, CloudMode::Mean).map_err(fail)?;
        rows.push([k.to_string(), fmt(l_max), fmt(l_2), outliers.len().to_string()]);
    }
    write_atomic(path, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["k", "l_max", "l_2", "outliers"]).map_err(|e| csv_to_io(e.into()))?;
        for row in &rows {
            csv.write_record(row).map_err(|e| csv_to_io(e.into()))?;
        }
        csv.flush()
    })
}

fn reconstruct(args: &ReconstructArgs) -> i32 {
    match run_reconstruct(args) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("tsq: {}", f.message());
            f.code()
        }
    }
}

fn run_reconstruct(args: &ReconstructArgs) -> Result<(), Failure> {
    let grid = match &args.grid {
        Some(path) => {
            let file = File::open(path).map_err(|e| Failure::Usage(format!("grid {}: {e}", path.display())))?;
            Some(csvio::read_grid(file).map_err(|e| data(path, e))?)
        }
        None => None,
    };
    let bytes = std::fs::read(&args.artifact).map_err(|e| data(&args.artifact, e))?;
    let artifact = decode_any(&bytes).map_err(|e| data(&args.artifact, e))?;
    match &artifact {
        Artifact::CoverageC(c) => {
            if grid.is_some() {
                return Err(Failure::Usage("--grid applies to 1-D artifacts only".into()));
            }
            let cloud = c.reconstruct().map_err(|e| data(&args.artifact, e))?;
            write_atomic(&args.output, |w| csvio::write_cloud(w, &c.timestamps, &cloud).map_err(csv_to_io))
        }
        Artifact::QuantileA(_) | Artifact::BandedB(_) => {
            let compressed = artifact.compressed_series().expect("1-D artifact");
            let points: Vec<(i64, f64)> = match grid {
                Some(grid) => {
                    let s = decompress(compressed, &grid).map_err(|e| data(&args.artifact, e))?;
                    s.iter().collect()
                }
                None => compressed.points().to_vec(),
            };
            write_atomic(&args.output, |w| csvio::write_series(w, points).map_err(csv_to_io))
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match &cli.command {
        Command::QuantizeA(a) => quantize_a(a),
        Command::BandedB(a) => banded_b(a),
        Command::CoverageC(a) => coverage_c(a),
        Command::Reconstruct(a) => reconstruct(a),
    }
}
