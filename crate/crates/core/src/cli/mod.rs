//! Batch command-line front end.
//!
//! Exit codes: 0 on success, 1 on runtime or numerical failure, 2 on usage
//! errors.

mod manifest;
mod preset;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::curve_csv::{self, CurveTable};
use crate::error::Error;
use crate::plot::{self, Chart, FitOverlay, PlotSeries};
use crate::powerlaw::{self, PowerLawFit};
use crate::subspace::ModelParams;
use crate::sweep::{self, EstimatorKind, RiskCurve, SweepConfig};

pub use manifest::{manifest_path_for, RunManifest};
pub use preset::{FitPlan, Preset, Variant};

pub const BASE_SEED_ENV: &str = "SLDLAB_BASE_SEED";

#[derive(Debug, Parser)]
#[command(name = "sldlab", version, about = "Risk-versus-sample-size experiments for linear subspace denoising")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a seeded sweep and write a curve CSV plus manifest
    Simulate(SimulateArgs),
    /// Fit power laws to one column of a curve CSV
    Fit(FitArgs),
    /// Draw a log-log SVG chart of a curve CSV
    Plot(PlotArgs),
    /// Run a named preset (or a preset TOML file) end to end
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Worker threads for sweep cells: a positive integer or `max`
    #[arg(long, default_value = "max")]
    threads: String,
    #[arg(long, env = BASE_SEED_ENV, default_value_t = 0)]
    base_seed: u64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct SimulateArgs {
    /// Signal subspace dimension
    #[arg(long, default_value_t = 10)]
    d: usize,
    /// Ambient dimension
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Noise standard deviation per coordinate
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    /// Training-set sizes as lo:hi:points_per_decade
    #[arg(long, default_value = "1:20000:5")]
    grid: String,
    #[arg(long, default_value_t = sweep::DEFAULT_SEEDS)]
    seeds: usize,
    /// Comma-separated subset of opt, pca, esgd, pinv
    #[arg(long, default_value = "esgd,pca")]
    est: String,
    #[arg(long)]
    out: PathBuf,
    /// Fresh test samples per cell for a Monte-Carlo risk column (0 = off)
    #[arg(long, default_value_t = 0)]
    mc_test: usize,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FitMode {
    Single,
    Excess,
    Segmented,
}

impl fmt::Display for FitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Single => "single",
            Self::Excess => "excess",
            Self::Segmented => "segmented",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum FloorSpec {
    Auto,
    None,
    Value(f64),
}

impl FromStr for FloorSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Self::Auto),
            "none" => Ok(Self::None),
            _ => match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Self::Value(v)),
                _ => Err("expected `auto`, `none` or a finite number".into()),
            },
        }
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct FitArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Column to fit
    #[arg(long)]
    col: String,
    /// Defaults to `excess` when a floor is given and `single` otherwise
    #[arg(long, value_enum)]
    mode: Option<FitMode>,
    /// Floor subtracted before fitting: auto (from --sigma), none, or a value
    #[arg(long)]
    floor: Option<FloorSpec>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Minimum points per segment in segmented mode
    #[arg(long, default_value_t = powerlaw::DEFAULT_MIN_SEGMENT)]
    min_seg: usize,
    /// Only fit points with N >= this value
    #[arg(long)]
    min_n: Option<f64>,
    /// Only fit points with N <= this value
    #[arg(long)]
    max_n: Option<f64>,
    /// Weight log residuals by (value / std)^2 from the matching _S column
    #[arg(long)]
    weighted: bool,
    /// Also write the fit table as CSV
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct PlotArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Fit table written by `fit --out`; matching rows are overlaid
    #[arg(long)]
    fits: Option<PathBuf>,
    /// Plot values minus this floor: auto (from --sigma), none, or a value
    #[arg(long)]
    floor: Option<FloorSpec>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    title: Option<String>,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    /// Built-in preset (fig4, fig5, fig9-d-sweep, fig9-n-sweep) or a TOML path
    preset: String,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Override the preset grid
    #[arg(long)]
    grid: Option<String>,
    /// Override the preset seed count
    #[arg(long)]
    seeds: Option<usize>,
    #[command(flatten)]
    run: RunArgs,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

type CmdResult<T = ()> = Result<T, Failure>;

fn usage<T>(message: impl Into<String>) -> CmdResult<T> {
    Err(Failure::Usage(message.into()))
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let command_line: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let outcome = match cli.command {
        Command::Simulate(a) => simulate(a, command_line),
        Command::Fit(a) => fit(a),
        Command::Plot(a) => plot_cmd(a),
        Command::Reproduce(a) => reproduce(a, command_line),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}\n\nFor more information, try '--help'.");
            2
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn check_sigma(flag: &str, sigma: f64) -> CmdResult<f64> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return usage(format!("invalid value '{sigma}' for '{flag}': expected a finite number >= 0"));
    }
    Ok(sigma)
}

fn model_params(d: usize, n: usize, sigma: f64) -> CmdResult<ModelParams> {
    check_sigma("--sigma", sigma)?;
    if d == 0 {
        return usage("invalid value '0' for '--d': must be at least 1");
    }
    if d >= n {
        return usage(format!("'--d' ({d}) must be smaller than '--n' ({n})"));
    }
    Ok(ModelParams::new(d, n, sigma)?)
}

fn parse_grid(flag: &str, text: &str) -> CmdResult<Vec<usize>> {
    let parts: Vec<&str> = text.split(':').collect();
    let nums: Option<Vec<usize>> = parts.iter().map(|p| p.trim().parse().ok()).collect();
    match nums.as_deref() {
        Some([lo, hi, ppd]) => sweep::default_train_grid(*lo, *hi, *ppd)
            .or_else(|e| usage(format!("invalid value '{text}' for '{flag}': {e}"))),
        _ => usage(format!(
            "invalid value '{text}' for '{flag}': expected lo:hi:points_per_decade"
        )),
    }
}

fn parse_estimators(text: &str) -> CmdResult<Vec<EstimatorKind>> {
    let mut out = Vec::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        let kind: EstimatorKind = part
            .parse()
            .or_else(|e| usage(format!("invalid value '{part}' for '--est': {e}")))?;
        if out.contains(&kind) {
            return usage(format!("'--est' lists {kind} twice"));
        }
        out.push(kind);
    }
    if out.is_empty() {
        return usage("'--est' needs at least one estimator");
    }
    Ok(out)
}

fn parse_threads(text: &str) -> CmdResult<usize> {
    if text == "max" {
        return Ok(std::thread::available_parallelism().map_or(1, |n| n.get()));
    }
    match text.parse::<usize>() {
        Ok(t) if t >= 1 => Ok(t),
        _ => usage(format!("invalid value '{text}' for '--threads': expected a positive integer or `max`")),
    }
}

fn check_seeds(seeds: usize) -> CmdResult {
    if seeds == 0 {
        return usage("invalid value '0' for '--seeds': must be at least 1");
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    std::fs::write(path, text).map_err(|e| Failure::Runtime(Error::io(path, e)))
}

fn simulate(args: SimulateArgs, command_line: Vec<String>) -> CmdResult {
    let started = Instant::now();
    let params = model_params(args.d, args.n, args.sigma)?;
    let train_sizes = parse_grid("--grid", &args.grid)?;
    let estimators = parse_estimators(&args.est)?;
    check_seeds(args.seeds)?;
    if args.mc_test == 1 {
        return usage("invalid value '1' for '--mc-test': use 0 or at least 2");
    }
    let threads = parse_threads(&args.run.threads)?;
    let config = SweepConfig {
        params,
        train_sizes,
        n_seeds: args.seeds,
        estimators,
        base_seed: args.run.base_seed,
        mc_test_size: args.mc_test,
    };
    let curve = sweep::run_sweep_with_threads(&config, threads)?;
    write_file(&args.out, &curve_csv::format_curve(&curve))?;
    let mut manifest = RunManifest::new(command_line, json_of(&config), config.base_seed);
    manifest.outputs.push(args.out.clone());
    manifest.finish(&manifest_path_for(&args.out), started)?;
    Ok(())
}

fn json_of<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("configuration serializes to JSON")
}

/// One row of a fit table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub source: String,
    pub column: String,
    pub mode: String,
    pub segment: String,
    pub alpha: f64,
    pub beta: f64,
    pub r_squared: f64,
    pub sse: f64,
    pub n_min: f64,
    pub n_max: f64,
    pub n_points: usize,
    pub dropped: usize,
    pub floor: Option<f64>,
}

impl FitRow {
    fn new(source: &str, column: &str, mode: FitMode, segment: &str, fit: &PowerLawFit, sizes: &[f64]) -> Self {
        Self {
            source: source.to_string(),
            column: column.to_string(),
            mode: mode.to_string(),
            segment: segment.to_string(),
            alpha: fit.alpha,
            beta: fit.beta(),
            r_squared: fit.r_squared,
            sse: fit.sse,
            n_min: sizes[fit.region.start],
            n_max: sizes[fit.region.end - 1],
            n_points: fit.n_points,
            dropped: fit.dropped.len(),
            floor: fit.floor,
        }
    }
}

fn write_fit_rows(path: &Path, rows: &[FitRow]) -> CmdResult {
    let io_err = |e: csv::Error| {
        Failure::Runtime(Error::io(path, std::io::Error::other(e.to_string())))
    };
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    for row in rows {
        w.serialize(row).map_err(io_err)?;
    }
    w.flush().map_err(|e| Failure::Runtime(Error::io(path, e)))
}

fn read_fit_rows(path: &Path) -> CmdResult<Vec<FitRow>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Failure::Runtime(Error::io(path, std::io::Error::other(e.to_string()))))?;
    reader
        .deserialize()
        .map(|r| {
            r.map_err(|e| {
                Failure::Runtime(Error::Parse {
                    line: e.position().map_or(0, |p| p.line()),
                    message: format!("{}: {e}", path.display()),
                })
            })
        })
        .collect()
}

fn print_fit_rows(rows: &[FitRow]) {
    println!(
        "{:<24} {:<10} {:<7} {:>9} {:>11} {:>7} {:>19} {:>6} {:>7}",
        "column", "mode", "segment", "alpha", "beta", "r2", "N range", "points", "dropped"
    );
    for r in rows {
        let column = if r.source.is_empty() {
            r.column.clone()
        } else {
            format!("{}:{}", r.source, r.column)
        };
        println!(
            "{:<24} {:<10} {:<7} {:>9.4} {:>11.4e} {:>7.4} {:>19} {:>6} {:>7}",
            column,
            r.mode,
            r.segment,
            r.alpha,
            r.beta,
            r.r_squared,
            format!("{}-{}", r.n_min, r.n_max),
            r.n_points,
            r.dropped
        );
    }
}

fn resolve_floor(spec: Option<FloorSpec>, sigma: Option<f64>) -> CmdResult<Option<f64>> {
    match spec {
        None | Some(FloorSpec::None) => Ok(None),
        Some(FloorSpec::Value(v)) => Ok(Some(v)),
        Some(FloorSpec::Auto) => match sigma {
            Some(s) => {
                let var = check_sigma("--sigma", s)?.powi(2);
                Ok(Some(var / (1.0 + var)))
            }
            None => usage("'--floor auto' needs '--sigma'"),
        },
    }
}

fn fit(args: FitArgs) -> CmdResult {
    let floor = resolve_floor(args.floor, args.sigma)?;
    let mode = args.mode.unwrap_or(if floor.is_some() { FitMode::Excess } else { FitMode::Single });
    if mode == FitMode::Excess && floor.is_none() {
        return usage("'--mode excess' needs '--floor auto' (with '--sigma') or '--floor <value>'");
    }
    if mode == FitMode::Segmented && args.weighted {
        return usage("'--weighted' is not available with '--mode segmented'");
    }
    if args.min_seg < 2 {
        return usage(format!("invalid value '{}' for '--min-seg': must be at least 2", args.min_seg));
    }

    let table = curve_csv::read_table(&args.input)?;
    let values = table.column(&args.col)?;
    let std = if args.weighted {
        let std_col = args
            .col
            .strip_suffix("_M")
            .map(|stem| format!("{stem}_S"))
            .ok_or_else(|| Failure::Usage("'--weighted' needs a mean column ending in _M".into()))?;
        Some(table.column(&std_col)?)
    } else {
        None
    };
    let lo = args.min_n.unwrap_or(f64::NEG_INFINITY);
    let hi = args.max_n.unwrap_or(f64::INFINITY);
    let keep: Vec<usize> = (0..table.x.len()).filter(|&i| table.x[i] >= lo && table.x[i] <= hi).collect();
    let points: Vec<(f64, f64)> = keep.iter().map(|&i| (table.x[i], values[i])).collect();
    let sizes: Vec<f64> = points.iter().map(|p| p.0).collect();
    let source = "";

    let rows = match mode {
        FitMode::Single | FitMode::Excess => {
            let weights = match std {
                Some(std) => {
                    let base = floor.unwrap_or(0.0);
                    let w: Vec<f64> = keep
                        .iter()
                        .map(|&i| ((values[i] - base) / std[i]).powi(2))
                        .collect();
                    if w.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                        return Err(Error::InsufficientData(
                            "weighted fit needs positive standard deviations".into(),
                        )
                        .into());
                    }
                    Some(w)
                }
                None => None,
            };
            let f = match (mode, floor) {
                (FitMode::Excess, Some(fl)) if weights.is_none() => powerlaw::fit_excess_powerlaw(&points, fl, None)?,
                (FitMode::Excess, Some(fl)) => {
                    let shifted: Vec<(f64, f64)> = points.iter().map(|&(n, v)| (n, v - fl)).collect();
                    let mut f = powerlaw::fit_powerlaw_weighted(&shifted, None, weights.as_deref())?;
                    f.floor = Some(fl);
                    f
                }
                _ => powerlaw::fit_powerlaw_weighted(&points, None, weights.as_deref())?,
            };
            vec![FitRow::new(source, &args.col, mode, "all", &f, &sizes)]
        }
        FitMode::Segmented => {
            let seg = powerlaw::fit_segmented(&points, args.min_seg, floor)?;
            println!(
                "break between N={} and N={} (about {:.4}); SSE {:.4e} -> {:.4e}; break evident: {}",
                sizes[seg.break_index - 1],
                sizes[seg.break_index],
                seg.break_size,
                seg.single.sse,
                seg.total_sse,
                if seg.breakpoint_evident { "yes" } else { "no" }
            );
            vec![
                FitRow::new(source, &args.col, mode, "left", &seg.left, &sizes),
                FitRow::new(source, &args.col, mode, "right", &seg.right, &sizes),
                FitRow::new(source, &args.col, mode, "single", &seg.single, &sizes),
            ]
        }
    };
    print_fit_rows(&rows);
    if let Some(out) = &args.out {
        write_fit_rows(out, &rows)?;
    }
    Ok(())
}

/// Mean columns of a table with their error columns: `<X>_M` paired with
/// `<X>_S` when the table uses that naming, otherwise every column.
fn plot_series(table: &CurveTable, floor: f64) -> Vec<(String, PlotSeries)> {
    let canonical = table.columns.iter().any(|c| c.ends_with("_M"));
    table
        .columns
        .iter()
        .filter(|c| !canonical || c.ends_with("_M"))
        .map(|c| {
            let (label, errors) = match c.strip_suffix("_M") {
                Some(stem) => (
                    stem.to_string(),
                    table.column(&format!("{stem}_S")).ok().map(<[f64]>::to_vec),
                ),
                None => (c.clone(), None),
            };
            let values = table.column(c).expect("column exists");
            let points = table.x.iter().zip(values).map(|(&x, &v)| (x, v - floor)).collect();
            (c.clone(), PlotSeries { label, points, errors })
        })
        .collect()
}

fn overlays_for(rows: &[FitRow], columns: &[String], floor: f64) -> Vec<FitOverlay> {
    rows.iter()
        .filter(|r| r.segment != "single" && columns.contains(&r.column))
        .map(|r| {
            let stem = r.column.strip_suffix("_M").unwrap_or(&r.column);
            FitOverlay {
                label: format!("{stem} fit, alpha = {:.3}", r.alpha),
                alpha: r.alpha,
                log_beta: r.beta.ln(),
                floor: r.floor.unwrap_or(0.0) - floor,
                x_min: r.n_min,
                x_max: r.n_max,
            }
        })
        .collect()
}

fn chart_for(table: &CurveTable, title: String, floor: Option<f64>, fits: &[FitRow]) -> Chart {
    let base = floor.unwrap_or(0.0);
    let series = plot_series(table, base);
    let columns: Vec<String> = series.iter().map(|(c, _)| c.clone()).collect();
    let mut chart = Chart::new(title);
    chart.x_label = table.x_name.clone();
    chart.y_label = if floor.is_some() { "risk above floor".into() } else { "risk".into() };
    chart.overlays = overlays_for(fits, &columns, base);
    chart.series = series.into_iter().map(|(_, s)| s).collect();
    chart
}

fn plot_cmd(args: PlotArgs) -> CmdResult {
    let floor = resolve_floor(args.floor, args.sigma)?;
    let table = curve_csv::read_table(&args.input)?;
    let fits = match &args.fits {
        Some(path) => read_fit_rows(path)?,
        None => Vec::new(),
    };
    let title = args.title.unwrap_or_else(|| {
        args.input
            .file_stem()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned())
    });
    let svg = plot::render_svg(&chart_for(&table, title, floor, &fits))?;
    write_file(&args.out, &svg)
}

fn table_of(curve: &RiskCurve) -> CmdResult<CurveTable> {
    Ok(curve_csv::parse_table(&curve_csv::format_curve(curve))?)
}

fn reproduce(args: ReproduceArgs, command_line: Vec<String>) -> CmdResult {
    let started = Instant::now();
    let preset = match Preset::builtin(&args.preset) {
        Some(p) => p?,
        None if Path::new(&args.preset).is_file() => Preset::load(&args.preset)?,
        None => {
            let names: Vec<&str> = Preset::builtin_names().collect();
            return usage(format!(
                "unknown preset '{}': expected one of {} or a path to a TOML file",
                args.preset,
                names.join(", ")
            ));
        }
    };
    let grid = match &args.grid {
        Some(g) => parse_grid("--grid", g)?,
        None => parse_grid("grid", &preset.grid).map_err(|f| match f {
            Failure::Usage(m) => Failure::Runtime(Error::Config(format!("preset {}", m))),
            other => other,
        })?,
    };
    let seeds = args.seeds.unwrap_or(preset.seeds);
    check_seeds(seeds)?;
    let threads = parse_threads(&args.run.threads)?;
    let variants = preset.variants(&grid, seeds, args.run.base_seed)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Failure::Runtime(Error::io(&args.out, e)))?;

    let mut outputs = Vec::new();
    let mut rows = Vec::new();
    for variant in &variants {
        let params = variant.config.params;
        eprintln!(
            "{}: {} sizes x {} seeds",
            variant.stem,
            variant.config.train_sizes.len(),
            variant.config.n_seeds
        );
        let curve = sweep::run_sweep_with_threads(&variant.config, threads)?;
        let csv_path = args.out.join(format!("{}.csv", variant.stem));
        write_file(&csv_path, &curve_csv::format_curve(&curve))?;
        outputs.push(csv_path);

        let floor = crate::subspace::optimal_risk(&params);
        let mut variant_rows = Vec::new();
        if let Some(plan) = &preset.fit {
            let lo = plan.min_n.unwrap_or(0);
            let hi = plan.max_n.unwrap_or(usize::MAX);
            let keep: Vec<usize> = (0..curve.train_sizes.len())
                .filter(|&i| curve.train_sizes[i] >= lo && curve.train_sizes[i] <= hi)
                .collect();
            let sizes: Vec<f64> = keep.iter().map(|&i| curve.train_sizes[i] as f64).collect();
            for kind in &plan.estimators {
                let Some(series) = curve.series(kind.tag()) else {
                    continue;
                };
                let points: Vec<(f64, f64)> = keep
                    .iter()
                    .zip(&sizes)
                    .map(|(&i, &n)| (n, series.mean[i]))
                    .collect();
                let column = format!("{}_M", kind.tag());
                match powerlaw::fit_excess_powerlaw(&points, floor, None) {
                    Ok(f) => variant_rows.push(FitRow::new(&variant.stem, &column, FitMode::Excess, "all", &f, &sizes)),
                    Err(e) => eprintln!("{}: no fit for {column}: {e}", variant.stem),
                }
            }
        }

        let title = format!(
            "d = {}, n = {}, sigma = {} (risk minus {:.4e})",
            params.d, params.n, params.sigma_z, floor
        );
        let chart = chart_for(&table_of(&curve)?, title, Some(floor), &variant_rows);
        match plot::render_svg(&chart) {
            Ok(svg) => {
                let svg_path = args.out.join(format!("{}.svg", variant.stem));
                write_file(&svg_path, &svg)?;
                outputs.push(svg_path);
            }
            Err(e) => eprintln!("{}: no chart: {e}", variant.stem),
        }
        rows.extend(variant_rows);
    }

    if preset.fit.is_some() {
        let fits_path = args.out.join("fits.csv");
        write_fit_rows(&fits_path, &rows)?;
        outputs.push(fits_path);
        print_fit_rows(&rows);
    }
    let config = serde_json::json!({
        "preset": json_of(&preset),
        "train_sizes": grid,
        "seeds": seeds,
    });
    let mut manifest = RunManifest::new(command_line, config, args.run.base_seed);
    manifest.outputs = outputs;
    manifest.finish(&args.out.join("manifest.json"), started)?;
    Ok(())
}
