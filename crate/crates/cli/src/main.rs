use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use fda_core::approx::{
    derivative_dim_approximant, dense_approximant, dim_preserving_sequence, extend_function,
    hausdorff_preserving_sequence, Anchor, ApproxConfig, ExtensionDomain, ExtensionDomainDesc,
    PipelineOptions,
};
use fda_core::dimension::{
    estimate_box_dim, predict_box_dim, predict_hausdorff_dim, DataSet, DimReport, PredictedKind,
    DEFAULT_J_MAX, DEFAULT_J_MIN,
};
use fda_core::fif::{chaos_game, solve_fixed_point, write_points_csv, FifSpec, DEFAULT_TOL};
use fda_core::func::{sample, sup_norm_diff, Func, GridFunction, WeierstrassSeries};
use fda_core::Error;

const DEFAULT_M: usize = 1 << 20;

#[derive(Parser)]
#[command(name = "fda", version, about = "Fractal interpolation and dimension preserving approximation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form graph dimension of a fractal interpolation spec.
    PredictDim(PredictArgs),
    /// Box-counting estimate of a function's graph dimension.
    EstimateDim(EstimateArgs),
    /// Run one of the dimension preserving approximation pipelines.
    Approximate(ApproxArgs),
    /// Sample a Weierstrass series, a fractal interpolant or chaos-game points.
    Generate(GenerateArgs),
    /// Extend a function from a union of intervals to [0, 1].
    Extend(ExtendArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PredictMode {
    Box,
    Hausdorff,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApproxMode {
    Box,
    Hausdorff,
    Dense,
    Derivative,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenerateKind {
    Weierstrass,
    Fif,
    Chaos,
}

#[derive(clap::Args)]
struct PredictArgs {
    /// Spec as a path or inline JSON: a fractal interpolation spec, or {"points": [...], "alpha": [...]}.
    #[arg(long)]
    func: String,
    #[arg(long, value_enum, default_value = "box")]
    mode: PredictMode,
}

#[derive(clap::Args)]
struct Scales {
    #[arg(long, default_value_t = DEFAULT_J_MIN)]
    jmin: u32,
    #[arg(long, default_value_t = DEFAULT_J_MAX)]
    jmax: u32,
}

#[derive(clap::Args)]
struct EstimateArgs {
    /// Function or fractal interpolation spec (path or inline JSON).
    #[arg(long, conflicts_with = "csv", required_unless_present = "csv")]
    func: Option<String>,
    /// Samples on a uniform grid, CSV with header "x,y".
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_M)]
    m: usize,
    #[command(flatten)]
    scales: Scales,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Where to write the per-scale counts as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ApproxArgs {
    /// Target function (for `derivative`, its derivative), path or inline JSON.
    #[arg(long)]
    func: String,
    #[arg(long, value_enum)]
    mode: ApproxMode,
    #[arg(long)]
    beta: f64,
    /// Sequence index (the level k for `dense`).
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_M)]
    m: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    scales: Scales,
    /// `derivative` mode: aim for a nonnegative primitive.
    #[arg(long)]
    nonneg: bool,
    /// `box` mode: bump a collinear Bernstein seed instead of failing.
    #[arg(long)]
    perturb_collinear: bool,
    /// Where to write samples of the approximant as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: GenerateKind,
    /// Fractal interpolation spec for `fif` and `chaos`.
    #[arg(long)]
    func: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    a: f64,
    #[arg(long, default_value_t = 3.0)]
    b: f64,
    /// Truncation index of the Weierstrass series (default: tail below 1e-12).
    #[arg(long)]
    terms: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_M)]
    m: usize,
    /// Number of chaos-game points.
    #[arg(long, default_value_t = 100_000)]
    points: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ExtendArgs {
    /// Domain as {"intervals": [[a, b], ...], "func": {...}}, path or inline JSON.
    #[arg(long)]
    func: String,
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = DEFAULT_M)]
    m: usize,
    #[command(flatten)]
    scales: Scales,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Core(Error),
    Input(String),
    Gate(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    let outcome = match cli.command {
        Command::PredictDim(a) => predict(a),
        Command::EstimateDim(a) => estimate(a),
        Command::Approximate(a) => approximate(a),
        Command::Generate(a) => generate(a),
        Command::Extend(a) => extend(a),
    };
    let outcome = outcome.and_then(|report| match report {
        Some(v) => print_json(&v).map_err(Failure::from),
        None => Ok(()),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Gate(report)) => {
            let _ = print_json(&report);
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Convergence { .. } => 3,
                e if e.is_gate() => 2,
                _ => 1,
            })
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("FDA_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("FDA_THREADS = {raw:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn print_json(v: &Value) -> io::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)
}

/// Inline JSON when the argument looks like JSON, otherwise a file path.
fn read_input(arg: &str) -> CliResult<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::Input(format!("{arg}: {e}")))
    }
}

/// A `Func` description, or a fractal interpolation spec solved on an `m` grid.
fn load_function(arg: &str, m: usize, tol: f64) -> CliResult<Func> {
    let text = read_input(arg)?;
    let value: Value = serde_json::from_str(&text).map_err(Error::from)?;
    if value.get("knots").is_some() {
        let spec: FifSpec = serde_json::from_value(value).map_err(Error::from)?;
        return Ok(solve_fixed_point(&spec, m, tol)?.to_func());
    }
    Ok(serde_json::from_value(value).map_err(Error::from)?)
}

fn load_spec(arg: &str) -> CliResult<FifSpec> {
    Ok(FifSpec::from_json(&read_input(arg)?)?)
}

fn create(path: &PathBuf) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_samples(f: &Func, m: usize, out: &Option<PathBuf>) -> CliResult<()> {
    if let Some(path) = out {
        let mut w = create(path)?;
        sample(f, m).write_csv(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

/// Report for a construction whose box dimension is `beta` by design.
fn by_construction(beta: Option<f64>) -> DimReport {
    DimReport { predicted: beta, predicted_kind: Some(PredictedKind::Box), ..Default::default() }
}

fn estimated(f: &Func, m: usize, scales: &Scales) -> CliResult<DimReport> {
    Ok(estimate_box_dim(&sample(f, m), scales.jmin, scales.jmax)?)
}

fn predict(args: PredictArgs) -> CliResult<Option<Value>> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Raw {
        points: Vec<(f64, f64)>,
        alpha: Vec<f64>,
    }
    let text = read_input(&args.func)?;
    let value: Value = serde_json::from_str(&text).map_err(Error::from)?;
    let (data, alpha) = if value.get("knots").is_some() {
        let spec: FifSpec = serde_json::from_value(value).map_err(Error::from)?;
        (DataSet::new(spec.data())?, spec.alpha().to_vec())
    } else {
        let raw: Raw = serde_json::from_value(value).map_err(Error::from)?;
        (DataSet::new(raw.points)?, raw.alpha)
    };
    let report = match args.mode {
        PredictMode::Box => predict_box_dim(&data, &alpha)?,
        PredictMode::Hausdorff => predict_hausdorff_dim(&data, &alpha)?,
    };
    let v = serde_json::to_value(&report).map_err(Error::from)?;
    if report.predicted.is_none() {
        return Err(Failure::Gate(v));
    }
    Ok(Some(v))
}

fn check_power_of_two(m: usize) -> CliResult<()> {
    if m.is_power_of_two() && m >= 2 {
        Ok(())
    } else {
        Err(Failure::Input(format!("--m {m} must be a power of two")))
    }
}

fn estimate(args: EstimateArgs) -> CliResult<Option<Value>> {
    let grid = match (&args.func, &args.csv) {
        (Some(func), _) => {
            check_power_of_two(args.m)?;
            sample(&load_function(func, args.m, args.tol)?, args.m)
        }
        (None, Some(path)) => {
            let file = File::open(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            GridFunction::read_csv(BufReader::new(file))?
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    let report = estimate_box_dim(&grid, args.scales.jmin, args.scales.jmax)?;
    if let Some(path) = &args.out {
        let mut w = create(path)?;
        report.write_scales_csv(&mut w)?;
        w.flush()?;
    }
    Ok(Some(serde_json::to_value(&report).map_err(Error::from)?))
}

fn approximate(args: ApproxArgs) -> CliResult<Option<Value>> {
    check_power_of_two(args.m)?;
    let f = load_function(&args.func, args.m, args.tol)?;
    let report = match args.mode {
        ApproxMode::Box => {
            let opts = PipelineOptions {
                resolution: args.m,
                tol: args.tol,
                anchor_resolution: args.m,
                perturb_collinear: args.perturb_collinear,
            };
            let a = dim_preserving_sequence(&f, args.beta, args.n, &opts)?;
            let approx = a.fif.to_func();
            let dim = a.report.clone().with_estimate(&estimated(&approx, args.m, &args.scales)?);
            write_samples(&approx, args.m, &args.out)?;
            json!({
                "mode": "box",
                "beta": args.beta,
                "n": args.n,
                "knots": [0.0, 0.5, 1.0],
                "alpha": [a.alpha, a.alpha],
                "perturbed": a.perturbed,
                "sup_err": a.chain.sup_err,
                "error_chain": a.chain,
                "holds": a.chain.holds,
                "modulus_f": a.modulus_f,
                "modulus_pn": a.modulus_pn,
                "iterations": a.fif.iterations(),
                "residual": a.fif.residual(),
                "report": dim,
            })
        }
        ApproxMode::Hausdorff => {
            let h = hausdorff_preserving_sequence(&f, args.beta, args.n)?;
            let fif = solve_fixed_point(&h.spec, args.m, args.tol)?;
            let approx = fif.to_func();
            let dim = h.report.clone().with_estimate(&estimated(&approx, args.m, &args.scales)?);
            write_samples(&approx, args.m, &args.out)?;
            json!({
                "mode": "hausdorff",
                "beta": args.beta,
                "n": args.n,
                "alpha": h.alpha,
                "alpha_sum": h.alpha_sum,
                "perturbed": h.perturbed,
                "spec": h.spec,
                "sup_err": sup_norm_diff(&f, &approx, args.m.min(1 << 16)),
                "iterations": fif.iterations(),
                "residual": fif.residual(),
                "report": dim,
            })
        }
        ApproxMode::Dense => {
            let anchor = Anchor::default_for(args.beta, args.m)?;
            let approx = dense_approximant(&f, args.beta, args.n, &anchor)?;
            let dim = by_construction(anchor.predicted())
                .with_estimate(&estimated(&approx, args.m, &args.scales)?);
            write_samples(&approx, args.m, &args.out)?;
            json!({
                "mode": "dense",
                "beta": args.beta,
                "k": args.n,
                "sup_err": sup_norm_diff(&f, &approx, args.m.min(1 << 16)),
                "report": dim,
            })
        }
        ApproxMode::Derivative => {
            let config = ApproxConfig::new(args.beta, args.n, args.nonneg, args.m)?;
            let d = derivative_dim_approximant(&f, &config)?;
            let dim = by_construction(config.anchor.predicted())
                .with_estimate(&estimated(&d.derivative, args.m, &args.scales)?);
            write_samples(&d.primitive, args.m, &args.out)?;
            let target = Func::antiderivative(f.clone());
            json!({
                "mode": "derivative",
                "beta": args.beta,
                "n": args.n,
                "nonneg": args.nonneg,
                "sup_err": sup_norm_diff(&target, &d.primitive, args.m.min(1 << 16)),
                "derivative_sup_err": sup_norm_diff(&f, &d.derivative, args.m.min(1 << 16)),
                "anchor_shift": d.anchor_shift,
                "target_min": d.target_min,
                "primitive_min": d.primitive_min,
                "nonneg_holds": d.nonneg_holds,
                "derivative_report": dim,
            })
        }
    };
    Ok(Some(report))
}

fn generate(args: GenerateArgs) -> CliResult<Option<Value>> {
    let need_spec = || -> CliResult<FifSpec> {
        let arg = args.func.as_deref().ok_or_else(|| Failure::Input("--func is required for this kind".into()))?;
        load_spec(arg)
    };
    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match args.kind {
        GenerateKind::Weierstrass => {
            let w = match args.terms {
                Some(k) => WeierstrassSeries::new(args.a, args.b, k)?,
                None => WeierstrassSeries::with_default_terms(args.a, args.b)?,
            };
            sample(&w, args.m).write_csv(&mut out)?;
        }
        GenerateKind::Fif => {
            let fif = solve_fixed_point(&need_spec()?, args.m, args.tol)?;
            fif.grid().write_csv(&mut out)?;
        }
        GenerateKind::Chaos => {
            let points = chaos_game(&need_spec()?, args.points, args.seed)?;
            write_points_csv(&points, &mut out)?;
        }
    }
    out.flush()?;
    Ok(None)
}

fn extend(args: ExtendArgs) -> CliResult<Option<Value>> {
    check_power_of_two(args.m)?;
    let desc: ExtensionDomainDesc = serde_json::from_str(&read_input(&args.func)?).map_err(Error::from)?;
    let domain = ExtensionDomain::try_from(desc)?;
    let ext = extend_function(&domain, args.beta, args.m)?;
    let dim = by_construction(Some(args.beta))
        .with_estimate(&estimated(&ext.func, args.m, &args.scales)?);
    write_samples(&ext.func, args.m, &args.out)?;
    Ok(Some(json!({
        "beta": args.beta,
        "intervals": domain.intervals(),
        "gaps": domain.gaps(),
        "max_jump": ext.max_jump,
        "report": dim,
    })))
}
