//! Command-line front-end: model specs in, bounds / sweeps / simulations /
//! benchmarks out as CSV or JSON.
//!
//! Every CSV starts with a `#`-prefixed manifest comment recording the
//! command, model, seed, and tool version, so each artifact can be traced to
//! the run that produced it. Numbers are serialized with nine significant
//! digits. Exit code is zero iff no per-item failure occurred; otherwise a
//! machine-readable failure list is printed to stderr.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as IoWrite;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fisher::{
    attainability_check, cfi_max_probe, dqfi_matrix_trace, model_slds, ordering_check,
    single_parameter_bounds, trace_qcrb, BoundReport,
};
use crate::models::{build_named_model, probe_from_bloch, random_model, DetectorModel, ProbeState};
use crate::montecarlo::{simulate_sweep, ExperimentConfig, DEFAULT_RESAMPLES};
use crate::multicopy::{a_gram_norm, dqfi_ncopy, q_ncopy, sandwich_check};
use crate::sdp::{ccrb_star, extended_dqfi, spectral_qcrb_sdp};
use crate::sld::q_operator;

/// Seed-stream split constant (Fibonacci hashing multiplier), shared with
/// the Monte Carlo module so bench items get independent streams.
const SEED_SPLIT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Detector information bounds for quantum measurement characterisation.
#[derive(Debug, Parser)]
#[command(name = "detbound", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute all bounds (CFI max, trace/spectral/extended information)
    /// for one model instance.
    Bounds(BoundsArgs),
    /// Tabulate bounds over a parameter grid.
    Sweep(SweepArgs),
    /// Run a simulated estimation experiment from a JSON config file.
    Simulate(SimulateArgs),
    /// Benchmark bound gaps over random detector models.
    Bench(BenchArgs),
    /// Tabulate multi-copy information scaling.
    Multicopy(MulticopyArgs),
}

/// Output serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Model: a registry name (e.g. `bitflip_z`) or a path to a JSON spec
    /// file `{"name": ..., "constants": {...}}`.
    #[arg(long)]
    model: String,
    /// Model constant override, `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Parameter point, comma-separated.
    #[arg(long, value_delimiter = ',')]
    theta: Vec<f64>,
    /// Parameter index the single-parameter bounds refer to.
    #[arg(long, default_value_t = 0)]
    param: usize,
    /// Probe-search restart budget for the CFI maximization.
    #[arg(long, default_value_t = 64)]
    budget: usize,
    /// Random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (`csv` renders the human-readable table).
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Grid per parameter as `start:stop:count`, semicolon-separated;
    /// the sweep covers the cartesian product.
    #[arg(long)]
    grid: String,
    /// Also compute the optimal-ensemble classical bound (slow).
    #[arg(long, default_value_t = false)]
    tight: bool,
    /// Restart budget for the tight-bound heuristic.
    #[arg(long, default_value_t = 8)]
    budget: usize,
    /// Random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// JSON experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread count (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Number of random models.
    #[arg(long, default_value_t = 1000)]
    count: usize,
    /// Hilbert-space dimension.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Outcome count.
    #[arg(long, default_value_t = 2)]
    outcomes: usize,
    /// Master seed; per-model seeds are derived from it and the index.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probe-search budget for the optional CFI-max column (0 = skip).
    #[arg(long, default_value_t = 0)]
    budget: usize,
    /// Worker thread count (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Per-model CSV output file; stdout when omitted (summary JSON then
    /// goes to stderr).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary JSON output file.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MulticopyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Parameter point, comma-separated.
    #[arg(long, value_delimiter = ',')]
    theta: Vec<f64>,
    /// Parameter index.
    #[arg(long, default_value_t = 0)]
    param: usize,
    /// Largest copy count; rows cover n = 1..=copies.
    #[arg(long, default_value_t = 3)]
    copies: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// JSON model spec (file form of `--model`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    /// Registry name.
    pub name: String,
    /// Fixed model constants.
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
}

/// Probe list for a simulated experiment: either an explicit list of Bloch
/// angle pairs or a polar grid at fixed azimuth.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbeSpec {
    /// Polar grid `start:stop:count` at a fixed azimuth.
    Grid {
        /// Polar-angle grid.
        grid: String,
        /// Shared azimuthal angle.
        #[serde(default)]
        azimuth: f64,
    },
    /// Explicit `(polar, azimuth)` pairs.
    List(Vec<(f64, f64)>),
}

/// JSON experiment config consumed by `detbound simulate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateConfig {
    /// Detector model.
    pub model: ModelSpec,
    /// True parameter point.
    pub theta_true: Vec<f64>,
    /// Estimated parameter index.
    #[serde(default)]
    pub param: usize,
    /// Probe states.
    pub probes: ProbeSpec,
    /// Shots per probe.
    pub shots: u64,
    /// Bootstrap resamples.
    #[serde(default = "default_resamples")]
    pub resamples: usize,
    /// Master seed.
    #[serde(default)]
    pub seed: u64,
}

fn default_resamples() -> usize {
    DEFAULT_RESAMPLES
}

/// One entry of the machine-readable failure list printed to stderr.
#[derive(Debug, Serialize)]
struct Failure {
    item: String,
    error: String,
}

/// Formats a number with nine significant digits.
fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Renders the manifest comment line embedded at the top of every CSV.
fn manifest(command: &str, model: &str, seed: u64, out: &Option<PathBuf>) -> String {
    let out = out
        .as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| "-".into());
    format!(
        "# detbound v{} command={command} model={model} seed={seed} out={out}",
        env!("CARGO_PKG_VERSION")
    )
}

/// Writes `text` to `out` or stdout.
fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

/// Resolves `--model`/`--set` into a registry spec and builds the model.
fn resolve_model(args: &ModelArgs) -> Result<(ModelSpec, DetectorModel)> {
    let mut spec: ModelSpec = if std::path::Path::new(&args.model).is_file() {
        serde_json::from_str(&fs::read_to_string(&args.model)?)?
    } else {
        ModelSpec {
            name: args.model.clone(),
            constants: BTreeMap::new(),
        }
    };
    for pair in &args.sets {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{pair}`")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Error::Config(format!("--set {key}: `{value}` is not a number")))?;
        spec.constants.insert(key.to_string(), value);
    }
    let model = build_named_model(&spec.name, &spec.constants)?;
    Ok((spec, model))
}

fn spec_label(spec: &ModelSpec) -> String {
    if spec.constants.is_empty() {
        spec.name.clone()
    } else {
        let consts: Vec<String> = spec
            .constants
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!("{}({})", spec.name, consts.join(","))
    }
}

/// Parses one `start:stop:count` axis into grid values.
fn parse_axis(axis: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = axis.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "grid axis must be start:stop:count, got `{axis}`"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Config(format!("bad grid start `{}`", parts[0])))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Config(format!("bad grid stop `{}`", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Error::Config(format!("bad grid count `{}`", parts[2])))?;
    Ok(match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect(),
    })
}

/// Parses a semicolon-separated multi-axis grid into its cartesian product.
fn parse_grid(grid: &str) -> Result<Vec<Vec<f64>>> {
    let axes: Vec<Vec<f64>> = grid
        .split(';')
        .map(parse_axis)
        .collect::<Result<Vec<_>>>()?;
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in &axes {
        let mut next = Vec::with_capacity(points.len() * axis.len());
        for point in &points {
            for &v in axis {
                let mut p = point.clone();
                p.push(v);
                next.push(p);
            }
        }
        points = next;
    }
    if axes.iter().any(Vec::is_empty) {
        points.clear();
    }
    Ok(points)
}

/// Runs a closure inside a rayon pool with `jobs` threads when given.
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .expect("thread pool construction")
            .install(f),
        None => f(),
    }
}

/// Computes the full bound report for one model instance.
pub fn compute_bound_report(
    model: &DetectorModel,
    label: &str,
    theta: &[f64],
    param: usize,
    budget: usize,
    seed: u64,
) -> Result<BoundReport> {
    let povm = model.povm(theta)?;
    let deriv = model.derivatives(theta)?;
    let (slds, j_trace, spectral) = single_parameter_bounds(&povm, &deriv, param)?;
    let q = q_operator(&slds, &povm)?;
    let attain = attainability_check(&slds, &povm, &q)?;
    let best = cfi_max_probe(&povm, &deriv, param, budget, seed)?;
    let (j_ext, _) = extended_dqfi(&povm, deriv.param(param), &slds)?;
    let ordering_ok = ordering_check(j_trace, spectral.value, povm.dim()).is_ok();
    let (probe_polar, probe_azimuth) = if povm.dim() == 2 {
        let (polar, azimuth) = best.probe.bloch_angles()?;
        (Some(polar), Some(azimuth))
    } else {
        (None, None)
    };
    Ok(BoundReport {
        model: label.to_string(),
        theta: theta.to_vec(),
        cfi_max: best.value,
        probe_polar,
        probe_azimuth,
        j_trace,
        j_spectral: spectral.value,
        j_ext: Some(j_ext),
        attainable: attain.attainable,
        ordering_ok,
    })
}

fn cmd_bounds(args: &BoundsArgs) -> Result<Vec<Failure>> {
    let (spec, model) = resolve_model(&args.model)?;
    let label = spec_label(&spec);
    let report = compute_bound_report(
        &model,
        &label,
        &args.theta,
        args.param,
        args.budget,
        args.seed,
    )?;
    let text = match args.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report)?),
        Format::Csv => {
            let mut table = String::new();
            table.push_str(&manifest("bounds", &label, args.seed, &args.out));
            table.push('\n');
            table.push_str(&format!("model        {label}\n"));
            table.push_str(&format!("theta        {:?}\n", report.theta));
            table.push_str(&format!("cfi_max      {}\n", sig9(report.cfi_max)));
            table.push_str(&format!("j_ext        {}\n", sig9(report.j_ext.unwrap())));
            table.push_str(&format!("j_spectral   {}\n", sig9(report.j_spectral)));
            table.push_str(&format!("j_trace      {}\n", sig9(report.j_trace)));
            if let (Some(polar), Some(azimuth)) = (report.probe_polar, report.probe_azimuth) {
                table.push_str(&format!("probe_polar  {}\n", sig9(polar)));
                table.push_str(&format!("probe_azim   {}\n", sig9(azimuth)));
            }
            table.push_str(&format!("attainable   {}\n", report.attainable));
            table.push_str(&format!("ordering_ok  {}\n", report.ordering_ok));
            table.push_str(&format!("chain_ok     {}\n", report.chain_ok()));
            table
        }
    };
    emit(&args.out, &text)?;
    Ok(Vec::new())
}

/// One sweep row: grid point, per-parameter informations, scalar bounds.
#[derive(Debug, Serialize)]
struct SweepRow {
    theta: Vec<f64>,
    j_trace: Vec<f64>,
    j_spectral: Vec<f64>,
    qcrb_trace: f64,
    qcrb_spectral: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    qcrb_tight: Option<f64>,
    status: String,
}

fn sweep_row(
    model: &DetectorModel,
    theta: &[f64],
    tight: bool,
    budget: usize,
    seed: u64,
) -> Result<SweepRow> {
    let povm = model.povm(theta)?;
    let deriv = model.derivatives(theta)?;
    let n = deriv.param_count();
    let mut j_trace = Vec::with_capacity(n);
    let mut j_spectral = Vec::with_capacity(n);
    for k in 0..n {
        let (_, jt, spectral) = single_parameter_bounds(&povm, &deriv, k)?;
        j_trace.push(jt);
        j_spectral.push(spectral.value);
    }
    let slds = model_slds(&povm, &deriv)?;
    let jt_matrix = dqfi_matrix_trace(&slds, &povm)?;
    let qcrb_trace = trace_qcrb(&jt_matrix, None)?;
    let (qcrb_spectral, _) = spectral_qcrb_sdp(model, theta, None)?;
    let qcrb_tight = if tight {
        let ensemble = n.div_ceil(povm.outcomes().saturating_sub(1).max(1)).max(1);
        Some(ccrb_star(model, theta, ensemble, None, budget, seed)?.0)
    } else {
        None
    };
    Ok(SweepRow {
        theta: theta.to_vec(),
        j_trace,
        j_spectral,
        qcrb_trace,
        qcrb_spectral,
        qcrb_tight,
        status: "ok".into(),
    })
}

fn cmd_sweep(args: &SweepArgs) -> Result<Vec<Failure>> {
    let (spec, model) = resolve_model(&args.model)?;
    let label = spec_label(&spec);
    let points = parse_grid(&args.grid)?;
    let n = model.param_count();
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::Config(format!(
            "grid has wrong arity for a {n}-parameter model"
        )));
    }

    let mut failures = Vec::new();
    let mut rows = Vec::with_capacity(points.len());
    for theta in &points {
        match sweep_row(&model, theta, args.tight, args.budget, args.seed) {
            Ok(row) => rows.push(row),
            Err(e) => {
                // Boundary/divergent points stay in the table, flagged.
                failures.push(Failure {
                    item: format!("theta={theta:?}"),
                    error: e.to_string(),
                });
                rows.push(SweepRow {
                    theta: theta.clone(),
                    j_trace: vec![f64::NAN; n],
                    j_spectral: vec![f64::NAN; n],
                    qcrb_trace: f64::NAN,
                    qcrb_spectral: f64::NAN,
                    qcrb_tight: args.tight.then_some(f64::NAN),
                    status: e.to_string().replace(',', ";"),
                });
            }
        }
    }

    let text = match args.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&rows)?),
        Format::Csv => {
            let mut csv = String::new();
            csv.push_str(&manifest("sweep", &label, args.seed, &args.out));
            csv.push('\n');
            let mut header: Vec<String> = (0..n).map(|k| format!("theta_{k}")).collect();
            header.extend((0..n).map(|k| format!("j_trace_{k}")));
            header.extend((0..n).map(|k| format!("j_spectral_{k}")));
            header.push("qcrb_trace".into());
            header.push("qcrb_spectral".into());
            if args.tight {
                header.push("qcrb_tight".into());
            }
            header.push("status".into());
            csv.push_str(&header.join(","));
            csv.push('\n');
            for row in &rows {
                let mut fields: Vec<String> = row.theta.iter().copied().map(sig9).collect();
                fields.extend(row.j_trace.iter().copied().map(sig9));
                fields.extend(row.j_spectral.iter().copied().map(sig9));
                fields.push(sig9(row.qcrb_trace));
                fields.push(sig9(row.qcrb_spectral));
                if let Some(t) = row.qcrb_tight {
                    fields.push(sig9(t));
                }
                fields.push(row.status.clone());
                csv.push_str(&fields.join(","));
                csv.push('\n');
            }
            csv
        }
    };
    emit(&args.out, &text)?;
    Ok(failures)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<Vec<Failure>> {
    let cfg: SimulateConfig = serde_json::from_str(&fs::read_to_string(&args.config)?)?;
    let model = build_named_model(&cfg.model.name, &cfg.model.constants)?;
    model.check_domain(&cfg.theta_true)?;
    let probes: Vec<ProbeState> = match &cfg.probes {
        ProbeSpec::Grid { grid, azimuth } => parse_axis(grid)?
            .into_iter()
            .map(|polar| probe_from_bloch(polar, *azimuth))
            .collect(),
        ProbeSpec::List(pairs) => pairs
            .iter()
            .map(|&(polar, azimuth)| probe_from_bloch(polar, azimuth))
            .collect(),
    };
    let seed = args.seed.unwrap_or(cfg.seed);
    let experiment = ExperimentConfig {
        model,
        theta_true: cfg.theta_true.clone(),
        param: cfg.param,
        probes,
        shots: cfg.shots,
        resamples: cfg.resamples,
        seed,
    };
    let sweep = with_jobs(args.jobs, || simulate_sweep(&experiment))?;

    let label = spec_label(&cfg.model);
    let text = match args.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&sweep.rows)?),
        Format::Csv => {
            let mut csv = String::new();
            csv.push_str(&manifest("simulate", &label, seed, &args.out));
            csv.push('\n');
            csv.push_str(
                "probe_theta,probe_phi,mse_scaled,mse_std,ccrb,qcrb_spectral,bias\n",
            );
            for row in &sweep.rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    sig9(row.probe_theta),
                    sig9(row.probe_phi),
                    sig9(row.mse_scaled),
                    sig9(row.mse_std),
                    sig9(row.ccrb),
                    sig9(row.qcrb_spectral),
                    sig9(row.bias),
                ));
            }
            csv
        }
    };
    emit(&args.out, &text)?;
    Ok(Vec::new())
}

/// One benchmark row.
#[derive(Debug, Serialize)]
pub struct BenchRow {
    /// Rank after sorting by the extended bound.
    pub index: usize,
    /// Seed the model was drawn from.
    pub model_seed: u64,
    /// Trace information.
    pub j_trace: f64,
    /// Spectral information.
    pub j_spectral: f64,
    /// Extended (tight) information.
    pub j_ext: f64,
    /// Relative gap `(J_∥ − J_Ext)/J_Ext`.
    pub gap_rel: f64,
    /// Ratio `J_Tr/J_Ext`.
    pub ratio_trace_ext: f64,
    /// Optional budgeted probe-search maximum CFI.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cfi_max: Option<f64>,
}

/// Benchmark summary statistics.
#[derive(Debug, Serialize)]
pub struct BenchSummary {
    /// Requested model count.
    pub count: usize,
    /// Solver failures (excluded from the statistics).
    pub failures: usize,
    /// Mean relative gap `(J_∥ − J_Ext)/J_Ext`.
    pub mean_gap: f64,
    /// Largest relative gap.
    pub max_gap: f64,
    /// Largest ratio `J_Tr/J_Ext`.
    pub max_ratio: f64,
}

fn bench_item(d: usize, m: usize, seed: u64, budget: usize) -> Result<BenchRow> {
    let model = random_model(d, m, seed);
    let theta = vec![0.0];
    let povm = model.povm(&theta)?;
    let deriv = model.derivatives(&theta)?;
    let (slds, j_trace, spectral) = single_parameter_bounds(&povm, &deriv, 0)?;
    let (j_ext, _) = extended_dqfi(&povm, deriv.param(0), &slds)?;
    let cfi_max = if budget > 0 {
        Some(cfi_max_probe(&povm, &deriv, 0, budget, seed)?.value)
    } else {
        None
    };
    Ok(BenchRow {
        index: 0,
        model_seed: seed,
        j_trace,
        j_spectral: spectral.value,
        j_ext,
        gap_rel: (spectral.value - j_ext) / j_ext,
        ratio_trace_ext: j_trace / j_ext,
        cfi_max,
    })
}

/// Runs the random-model benchmark; shared with the acceptance tests.
pub fn run_bench(
    count: usize,
    d: usize,
    m: usize,
    master_seed: u64,
    budget: usize,
) -> (Vec<BenchRow>, BenchSummary) {
    let results: Vec<std::result::Result<BenchRow, (usize, String)>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let seed = master_seed ^ (i as u64).wrapping_mul(SEED_SPLIT);
            bench_item(d, m, seed, budget).map_err(|e| (i, e.to_string()))
        })
        .collect();

    let mut rows: Vec<BenchRow> = Vec::with_capacity(count);
    let mut failures = 0usize;
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(_) => failures += 1,
        }
    }
    rows.sort_by(|a, b| a.j_ext.partial_cmp(&b.j_ext).unwrap());
    for (i, row) in rows.iter_mut().enumerate() {
        row.index = i;
    }
    let n = rows.len().max(1) as f64;
    let summary = BenchSummary {
        count,
        failures,
        mean_gap: rows.iter().map(|r| r.gap_rel).sum::<f64>() / n,
        max_gap: rows.iter().map(|r| r.gap_rel).fold(0.0, f64::max),
        max_ratio: rows.iter().map(|r| r.ratio_trace_ext).fold(0.0, f64::max),
    };
    (rows, summary)
}

fn cmd_bench(args: &BenchArgs) -> Result<Vec<Failure>> {
    if args.count == 0 {
        return Err(Error::Config("bench count must be at least 1".into()));
    }
    let results: Vec<std::result::Result<BenchRow, (usize, String)>> = with_jobs(args.jobs, || {
        (0..args.count)
            .into_par_iter()
            .map(|i| {
                let seed = args.seed ^ (i as u64).wrapping_mul(SEED_SPLIT);
                bench_item(args.dim, args.outcomes, seed, args.budget)
                    .map_err(|e| (i, e.to_string()))
            })
            .collect()
    });

    let mut rows = Vec::with_capacity(args.count);
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err((i, e)) => failures.push(Failure {
                item: format!("model_index={i}"),
                error: e,
            }),
        }
    }
    rows.sort_by(|a, b| a.j_ext.partial_cmp(&b.j_ext).unwrap());
    for (i, row) in rows.iter_mut().enumerate() {
        row.index = i;
    }

    let model_label = format!("random(d={},m={})", args.dim, args.outcomes);
    let mut csv = String::new();
    csv.push_str(&manifest("bench", &model_label, args.seed, &args.out));
    csv.push('\n');
    let mut header = "index,model_seed,j_trace,j_spectral,j_ext,gap_rel,ratio_trace_ext".to_string();
    if args.budget > 0 {
        header.push_str(",cfi_max");
    }
    csv.push_str(&header);
    csv.push('\n');
    for row in &rows {
        let mut line = format!(
            "{},{},{},{},{},{},{}",
            row.index,
            row.model_seed,
            sig9(row.j_trace),
            sig9(row.j_spectral),
            sig9(row.j_ext),
            sig9(row.gap_rel),
            sig9(row.ratio_trace_ext),
        );
        if let Some(c) = row.cfi_max {
            line.push(',');
            line.push_str(&sig9(c));
        }
        csv.push_str(&line);
        csv.push('\n');
    }

    let n = rows.len().max(1) as f64;
    let summary = BenchSummary {
        count: args.count,
        failures: failures.len(),
        mean_gap: rows.iter().map(|r| r.gap_rel).sum::<f64>() / n,
        max_gap: rows.iter().map(|r| r.gap_rel).fold(0.0, f64::max),
        max_ratio: rows.iter().map(|r| r.ratio_trace_ext).fold(0.0, f64::max),
    };
    let summary_json = format!("{}\n", serde_json::to_string_pretty(&summary)?);

    emit(&args.out, &csv)?;
    match (&args.summary, &args.out) {
        (Some(path), _) => fs::write(path, &summary_json)?,
        (None, Some(_)) => print!("{summary_json}"),
        (None, None) => eprint!("{summary_json}"),
    }
    Ok(failures)
}

fn cmd_multicopy(args: &MulticopyArgs) -> Result<Vec<Failure>> {
    if args.copies == 0 {
        return Err(Error::Config("copy count must be at least 1".into()));
    }
    let (spec, model) = resolve_model(&args.model)?;
    let label = spec_label(&spec);
    let povm = model.povm(&args.theta)?;
    let deriv = model.derivatives(&args.theta)?;
    let slds = crate::sld::sld_outcomes(&povm, deriv.param(args.param))?;
    let a_norm = a_gram_norm(&slds, &povm)?;
    let d = povm.dim();

    #[derive(Serialize)]
    struct Row {
        n: usize,
        j_spectral_n: f64,
        j_trace_n: f64,
        sandwich_ok: bool,
        trace_scaling_ok: bool,
    }

    let mut rows = Vec::with_capacity(args.copies);
    let mut j1_spectral = 0.0;
    let mut j1_trace = 0.0;
    for n in 1..=args.copies {
        let q_n = q_ncopy(&slds, &povm, n)?;
        let (spectral, trace) = dqfi_ncopy(&q_n, d, n)?;
        if n == 1 {
            j1_spectral = spectral;
            j1_trace = trace;
        }
        let expected_trace = n as f64 * (d as f64).powi(n as i32 - 1) * j1_trace;
        rows.push(Row {
            n,
            j_spectral_n: spectral,
            j_trace_n: trace,
            sandwich_ok: sandwich_check(j1_spectral, spectral, n, a_norm).is_ok(),
            trace_scaling_ok: (trace - expected_trace).abs() <= 1e-8 * (1.0 + expected_trace),
        });
    }

    let text = match args.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&rows)?),
        Format::Csv => {
            let mut csv = String::new();
            csv.push_str(&manifest("multicopy", &label, 0, &args.out));
            csv.push('\n');
            csv.push_str("n,j_spectral_n,j_trace_n,sandwich_ok,trace_scaling_ok\n");
            for row in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.n,
                    sig9(row.j_spectral_n),
                    sig9(row.j_trace_n),
                    row.sandwich_ok,
                    row.trace_scaling_ok,
                ));
            }
            csv
        }
    };
    emit(&args.out, &text)?;
    Ok(Vec::new())
}

/// CLI entry point. Returns exit code 0 iff the command and every work item
/// succeeded; otherwise prints a machine-readable failure list to stderr.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Bounds(args) => cmd_bounds(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Multicopy(args) => cmd_multicopy(args),
    };
    match outcome {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            let list = serde_json::json!({ "failures": failures });
            eprintln!("{list}");
            ExitCode::FAILURE
        }
        Err(e) => {
            let list = serde_json::json!({ "failures": [{ "item": "command", "error": e.to_string() }] });
            eprintln!("{list}");
            ExitCode::FAILURE
        }
    }
}
