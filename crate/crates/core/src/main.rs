use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use gmwp::analysis::{self, Clustering};
use gmwp::harness::{self, CompareConfig, InitBox};
use gmwp::io;
use gmwp::solver::{self, SolverParams, StageRecord, Variant};
use gmwp::{GaugeKind, GaugeSet, Matrix, ProblemInstance};

#[derive(Parser)]
#[command(
    name = "gmwp",
    version,
    about = "Multi-source Weber problems under Minkowski gauges"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver variant from a seeded random start.
    Solve(SolveArgs),
    /// Compare variants over shared random starts.
    Compare(CompareArgs),
    /// Check the local-optimality criterion for given centers.
    Certify(CertifyArgs),
    /// Exhaustive global optimum for small instances.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Tsplib,
}

#[derive(Clone, Copy, ValueEnum)]
enum GaugeArg {
    L2,
    L1,
    Linf,
}

impl From<GaugeArg> for GaugeKind {
    fn from(g: GaugeArg) -> Self {
        match g {
            GaugeArg::L2 => GaugeKind::Euclidean,
            GaugeArg::L1 => GaugeKind::L1,
            GaugeArg::Linf => GaugeKind::LInf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Dca,
    Abdca,
    AbdcaSkip,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Dca => Variant::Dca,
            VariantArg::Abdca => Variant::Abdca,
            VariantArg::AbdcaSkip => Variant::AbdcaSkip,
        }
    }
}

#[derive(Args)]
struct InstanceArgs {
    /// Demand points file.
    #[arg(long)]
    data: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_enum, default_value = "l2")]
    gauge: GaugeArg,
    /// Radius of the gauge's unit ball.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Number of centers.
    #[arg(long)]
    k: usize,
    /// Per-center region literals (`center`, `ball`, `box` lines).
    #[arg(long)]
    constraints: Option<PathBuf>,
}

impl InstanceArgs {
    fn load(&self) -> anyhow::Result<ProblemInstance> {
        let tsplib = match self.format {
            Some(Format::Tsplib) => true,
            Some(Format::Csv) => false,
            None => self.data.extension().is_some_and(|e| e == "tsp"),
        };
        let points = if tsplib {
            io::load_points_tsplib(&self.data)
        } else {
            io::load_points_csv(&self.data)
        }
        .map_err(|e| with_path(e, &self.data))?;
        let gauge = GaugeSet::new(self.gauge.into(), self.radius)?;
        let mut p = ProblemInstance::new(points, self.k, gauge)?;
        if let Some(path) = &self.constraints {
            let lists =
                io::load_constraints(path, p.k(), p.dim()).map_err(|e| with_path(e, path))?;
            p = p.with_constraints(lists)?;
        }
        Ok(p)
    }

    fn dataset_name(&self) -> String {
        self.data
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "data".into())
    }
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    beta: f64,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 10.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    mu0: f64,
    #[arg(long, default_value_t = 1e-6)]
    muf: f64,
    #[arg(long, default_value_t = 1.0)]
    tau0: f64,
    #[arg(long, default_value_t = 1e8)]
    tauf: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda_start: f64,
    #[arg(long, default_value_t = 1e-3)]
    lambda_f: f64,
    #[arg(long, default_value_t = 30)]
    lambda_skip: usize,
    /// Inner iteration cap per stage.
    #[arg(long, default_value_t = 5000)]
    n_max: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Lower and upper bound of a cube for random starts; defaults to the
    /// bounding box of the data.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    init_box: Option<Vec<f64>>,
}

impl ParamArgs {
    fn params(&self) -> anyhow::Result<SolverParams> {
        let params = SolverParams {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            delta: self.delta,
            sigma: self.sigma,
            mu0: self.mu0,
            mu_f: self.muf,
            tau0: self.tau0,
            tau_f: self.tauf,
            lambda_start: self.lambda_start,
            lambda_f: self.lambda_f,
            lambda_skip: self.lambda_skip,
            n_max: self.n_max,
            tol: self.tol,
            ..SolverParams::default()
        };
        params.validate()?;
        Ok(params)
    }

    fn init_box(&self, p: &ProblemInstance) -> anyhow::Result<InitBox> {
        Ok(match self.init_box.as_deref() {
            Some(&[lo, hi]) => InitBox::cube(p.dim(), lo, hi)?,
            _ => InitBox::bounding(p),
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_enum, default_value = "abdca-skip")]
    variant: VariantArg,
    /// Number of seeded starts; the best result is reported.
    #[arg(long, default_value_t = 10)]
    runs: usize,
    /// JSON result path (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-iteration trace CSV of the reported run.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    params: ParamArgs,
    /// Variants to run; all three when omitted.
    #[arg(long = "variant", value_enum)]
    variants: Vec<VariantArg>,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    /// JSON summary path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Ratio table CSV path (standard output when omitted).
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Centers as a CSV table or a JSON result with a `centers` field.
    #[arg(long)]
    centers: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SolveOutput {
    variant: Variant,
    gauge: GaugeKind,
    radius: f64,
    k: usize,
    centers: Vec<Vec<f64>>,
    value: f64,
    iterations: usize,
    max_violation: f64,
    seed: u64,
    run_index: u64,
    stages: Vec<StageRecord>,
    clustering: Clustering,
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            io::write_json(path, value).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            serde_json::to_writer_pretty(&mut lock, value)?;
            writeln!(lock)?;
            Ok(())
        }
    }
}

fn run_solve(args: SolveArgs) -> anyhow::Result<()> {
    if args.runs == 0 {
        bail!("--runs must be at least 1");
    }
    let p = args.instance.load()?;
    let params = args.params.params()?;
    let init_box = args.params.init_box(&p)?;
    let variant: Variant = args.variant.into();
    let mut best: Option<(u64, solver::SolverReport)> = None;
    for run in 0..args.runs as u64 {
        let x0 = harness::random_init(&p, &init_box, args.params.seed, run);
        let report = solver::solve(&p, &x0, &params, variant)?;
        if best.as_ref().is_none_or(|(_, b)| report.value < b.value) {
            best = Some((run, report));
        }
    }
    let (run_index, report) = best.expect("at least one run");
    if let Some(path) = &args.trace {
        let file =
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        io::write_trace_csv(std::io::BufWriter::new(file), &report.trace)?;
    }
    let output = SolveOutput {
        variant,
        gauge: p.gauge().kind(),
        radius: p.gauge().radius(),
        k: p.k(),
        centers: report.centers.to_rows(),
        value: report.value,
        iterations: report.total_iterations,
        max_violation: p.max_violation(&report.centers),
        seed: args.params.seed,
        run_index,
        stages: report.stages,
        clustering: analysis::natural_clustering(&p, &report.centers)?,
    };
    emit_json(args.out.as_deref(), &output)
}

fn run_compare(args: CompareArgs) -> anyhow::Result<()> {
    let p = args.instance.load()?;
    let params = args.params.params()?;
    let mut cfg = CompareConfig::new(args.runs, args.params.seed, params);
    cfg.init_box = Some(args.params.init_box(&p)?);
    if !args.variants.is_empty() {
        cfg.variants = args.variants.iter().map(|&v| v.into()).collect();
    }
    let report = harness::compare(&p, &cfg)?;
    let name = args.instance.dataset_name();
    match &args.table {
        Some(path) => {
            let file =
                fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            harness::write_ratio_csv(std::io::BufWriter::new(file), &name, &p, &report, true)?;
        }
        None => harness::write_ratio_csv(std::io::stdout().lock(), &name, &p, &report, true)?,
    }
    if let Some(path) = &args.out {
        let summary = json!({
            "dataset": name,
            "gauge": p.gauge().kind(),
            "m": p.num_points(),
            "n": p.dim(),
            "k": p.k(),
            "runs": args.runs,
            "seed": args.params.seed,
            "valid": report.valid,
            "summary": report.summary,
            "per_run": report.runs,
        });
        io::write_json(path, &summary)?;
    }
    if !report.valid {
        bail!("more than 5% of runs failed; comparison is invalid");
    }
    Ok(())
}

fn load_centers(path: &Path) -> anyhow::Result<Matrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') || text.trim_start().starts_with('[') {
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let rows = value.get("centers").unwrap_or(&value);
        let rows: Vec<Vec<f64>> = serde_json::from_value(rows.clone())
            .context("expected `centers` as a list of coordinate lists")?;
        Ok(Matrix::from_rows(&rows)?)
    } else {
        Ok(io::load_points_csv(path)?)
    }
}

fn run_certify(args: CertifyArgs) -> anyhow::Result<()> {
    let p = args.instance.load()?;
    let x = load_centers(&args.centers)?;
    let cert = analysis::local_certificate(&p, &x, args.tol)?;
    emit_json(args.out.as_deref(), &cert)
}

fn run_oracle(args: OracleArgs) -> anyhow::Result<()> {
    let p = args.instance.load()?;
    let g = analysis::brute_force_global(&p, args.tol)?;
    let out = json!({
        "value": g.value,
        "lower_bound": g.lower_bound,
        "centers": g.centers.to_rows(),
        "partition": g.partition,
        "partitions_checked": g.partitions_checked,
    });
    emit_json(args.out.as_deref(), &out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Compare(a) => run_compare(a),
        Command::Certify(a) => run_certify(a),
        Command::Oracle(a) => run_oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Parse errors already name their file.
fn with_path(e: gmwp::Error, path: &Path) -> anyhow::Error {
    match e {
        gmwp::Error::Parse { .. } => e.into(),
        other => anyhow::Error::new(other).context(format!("loading {}", path.display())),
    }
}

fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|cause| {
        let io_err = match cause.downcast_ref::<gmwp::Error>() {
            Some(gmwp::Error::Io(inner)) => Some(inner),
            _ => cause.downcast_ref::<std::io::Error>(),
        };
        io_err.is_some_and(|inner| inner.kind() == std::io::ErrorKind::BrokenPipe)
    })
}
