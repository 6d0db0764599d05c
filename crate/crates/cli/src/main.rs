use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use switchreg::bench::bench_scaling;
use switchreg::generate::{ModeProcess, XDistribution};
use switchreg::hardness::Decision;
use switchreg::io::{self, Metadata};
use switchreg::{
    decide_threshold, extract_partition, generate_instance, label_accuracy, partition_to_instance,
    solve, DecisionInstance, GeneratorSpec, LossModel, Method, ModelSet, PartitionInstance,
    SolverConfig, Status, Tolerances,
};

const EXIT_NO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAPS: u8 = 3;

#[derive(Parser)]
#[command(
    name = "switchreg",
    version,
    about = "Globally optimal switching linear regression"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Suppress the human-readable summary on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic switching-regression dataset.
    Generate(GenerateArgs),
    /// Solve a dataset, or decide whether a cost threshold is reachable.
    Solve(SolveArgs),
    /// Build the regression instance that encodes a Partition instance.
    ReducePartition(ReduceArgs),
    /// Read an equal-sum split off a zero-cost model set.
    ExtractPartition(ExtractArgs),
    /// Measure how solver runtime grows with the number of points.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct ConfigArgs {
    #[arg(long, env = "SWITCHREG_TIE_TOL", default_value_t = 1e-9)]
    tie_tol: f64,
    #[arg(long, env = "SWITCHREG_ZERO_TOL", default_value_t = 1e-9)]
    zero_tol: f64,
    #[arg(long, env = "SWITCHREG_SIGN_TOL", default_value_t = 1e-12)]
    sign_tol: f64,
    #[arg(long, env = "SWITCHREG_MAX_TIE_ALTERATIONS", default_value_t = 12)]
    max_tie_alterations: usize,
    #[arg(long, env = "SWITCHREG_D_MAX", default_value_t = 3)]
    d_max: usize,
    #[arg(long, env = "SWITCHREG_N_MAX", default_value_t = 3)]
    n_max: usize,
    #[arg(long, env = "SWITCHREG_MAX_COMBINATIONS", default_value_t = 5e7)]
    max_combinations: f64,
    #[arg(long, env = "SWITCHREG_BRUTE_BUDGET", default_value_t = 2e6)]
    brute_budget: f64,
    #[arg(long, env = "SWITCHREG_NOISELESS_BUDGET", default_value_t = 1e8)]
    noiseless_budget: f64,
    /// Restarts of the alternating heuristic.
    #[arg(long, env = "SWITCHREG_RESTARTS", default_value_t = 20)]
    restarts: usize,
    /// Seed of the alternating heuristic.
    #[arg(long, env = "SWITCHREG_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads for candidate evaluation (0: one per core).
    #[arg(long, env = "SWITCHREG_THREADS", default_value_t = 0)]
    threads: usize,
}

impl ConfigArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            max_tie_alterations: self.max_tie_alterations,
            d_max: self.d_max,
            n_max: self.n_max,
            max_combinations: self.max_combinations,
            brute_budget: self.brute_budget,
            noiseless_budget: self.noiseless_budget,
            restarts: self.restarts,
            seed: self.seed,
            tolerances: Tolerances {
                tie_tol: self.tie_tol,
                zero_tol: self.zero_tol,
                sign_tol: self.sign_tol,
            },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    Enum,
    Noiseless,
    Altmin,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Brute => Method::Brute,
            MethodArg::Enum => Method::Enumeration,
            MethodArg::Noiseless => Method::Noiseless,
            MethodArg::Altmin => Method::Altmin,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LossArg {
    Squared,
    Absolute,
}

impl From<LossArg> for LossModel {
    fn from(l: LossArg) -> Self {
        match l {
            LossArg::Squared => LossModel::Squared,
            LossArg::Absolute => LossModel::Absolute,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum XDistArg {
    Gaussian,
    UniformBox,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    /// Number of points.
    #[arg(long = "points", short = 'N')]
    num_points: usize,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Switch modes by a Markov chain that keeps the mode with this probability
    /// (default: modes drawn independently and uniformly).
    #[arg(long)]
    p_stay: Option<f64>,
    #[arg(long, value_enum, default_value = "gaussian")]
    x_dist: XDistArg,
    /// Output file (`.json` keeps the ground truth, anything else is CSV).
    /// Prints JSON to stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Dataset file (`.json` or CSV).
    data: PathBuf,
    #[arg(long, value_enum, default_value = "enum")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "squared")]
    loss: LossArg,
    /// Number of modes (defaults to the value stored in a JSON dataset).
    #[arg(long)]
    n: Option<usize>,
    /// Decide whether a mean loss of at most this value is reachable.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct PartitionSource {
    /// Comma-separated positive integers, e.g. `1,2,3`.
    #[arg(long)]
    values: Option<String>,
    /// File holding the integers on one line.
    #[arg(long)]
    file: Option<PathBuf>,
}

impl PartitionSource {
    fn load(&self) -> Result<PartitionInstance, Failure> {
        let text = match (&self.values, &self.file) {
            (Some(v), _) => v.clone(),
            (None, Some(path)) => std::fs::read_to_string(path).map_err(switchreg::Error::from)?,
            (None, None) => unreachable!("clap requires one source"),
        };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let line = lines.next().unwrap_or("");
        if lines.next().is_some() {
            return Err(Failure::Usage(
                "partition file must hold a single line".into(),
            ));
        }
        Ok(line.parse()?)
    }
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    source: PartitionSource,
    /// Output dataset file; prints JSON to stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Also decide the instance with this exact method.
    #[arg(long, value_enum)]
    decide: Option<MethodArg>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    source: PartitionSource,
    /// JSON file with a `models` field (a solve report or decision).
    #[arg(long)]
    certificate: PathBuf,
    #[arg(long, env = "SWITCHREG_TIE_TOL", default_value_t = 1e-9)]
    tie_tol: f64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "enum")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "squared")]
    loss: LossArg,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Comma-separated point counts, strictly increasing.
    #[arg(long, value_delimiter = ',', default_values_t = [20, 50, 100, 200])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Exponent the fitted log-log slope is compared against.
    #[arg(long, default_value_t = 4.0)]
    bound: f64,
    #[command(flatten)]
    config: ConfigArgs,
}

enum Failure {
    Usage(String),
    Lib(switchreg::Error),
}

impl From<switchreg::Error> for Failure {
    fn from(e: switchreg::Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Lib(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let summary = Summary { quiet: cli.quiet };
    let outcome = match &cli.command {
        Command::Generate(a) => generate(a, &summary),
        Command::Solve(a) => solve_cmd(a, &summary),
        Command::ReducePartition(a) => reduce(a, &summary),
        Command::ExtractPartition(a) => extract(a, &summary),
        Command::Bench(a) => bench(a, &summary),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                switchreg::Error::CapExceeded { .. } => ExitCode::from(EXIT_CAPS),
                _ => ExitCode::from(EXIT_USAGE),
            }
        }
    }
}

struct Summary {
    quiet: bool,
}

impl Summary {
    fn line(&self, text: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", text.as_ref());
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(switchreg::Error::from)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn configure_threads(threads: usize) -> Result<(), Failure> {
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot start {threads} threads: {e}")))?;
    }
    Ok(())
}

fn generate(a: &GenerateArgs, summary: &Summary) -> Result<u8, Failure> {
    let spec = GeneratorSpec {
        n: a.n,
        d: a.d,
        num_points: a.num_points,
        noise_sigma: a.sigma,
        seed: a.seed,
        mode_process: match a.p_stay {
            Some(p_stay) => ModeProcess::Markov { p_stay },
            None => ModeProcess::IidUniform,
        },
        x_distribution: match a.x_dist {
            XDistArg::Gaussian => XDistribution::Gaussian,
            XDistArg::UniformBox => XDistribution::UniformBox,
        },
    };
    let inst = generate_instance(&spec)?;
    let meta = Metadata {
        n: Some(a.n),
        seed: Some(a.seed),
        generator: Some(spec),
        ground_truth: Some(inst.truth),
    };
    match &a.out {
        Some(path) => io::save(path, &inst.data, &meta)?,
        None => {
            let mut buf = Vec::new();
            io::write_json(&inst.data, &meta, &mut buf)?;
            println!("{}", String::from_utf8_lossy(&buf));
        }
    }
    summary.line(format!(
        "generated N={} points in d={} with n={} modes",
        a.num_points, a.d, a.n
    ));
    Ok(0)
}

fn solve_cmd(a: &SolveArgs, summary: &Summary) -> Result<u8, Failure> {
    let cfg = a.config.config();
    configure_threads(a.config.threads)?;
    let (data, meta) = io::load(&a.data)?;
    let n =
        a.n.or(meta.n)
            .ok_or_else(|| Failure::Usage("the number of modes is unknown; pass --n".into()))?;
    let method = Method::from(a.method);
    let loss = LossModel::from(a.loss);

    if let Some(epsilon) = a.epsilon {
        if !method.is_exact() {
            return Err(Failure::Usage(format!(
                "--epsilon needs an exact method, not {method}"
            )));
        }
        let inst = DecisionInstance::new(data, n, epsilon)?;
        let decision = decide_threshold(&inst, loss, method, &cfg)?;
        let value = match &decision {
            Decision::Yes {
                cost,
                models,
                labeling,
            } => json!({
                "decision": "yes",
                "epsilon": epsilon,
                "method": method,
                "loss": loss,
                "cost": cost,
                "models": models.to_rows(),
                "labels": labeling.labels.iter().map(|l| l + 1).collect::<Vec<_>>(),
            }),
            Decision::No { best_cost } => json!({
                "decision": "no",
                "epsilon": epsilon,
                "method": method,
                "loss": loss,
                "cost": best_cost,
            }),
        };
        emit(&serde_json::to_string_pretty(&value)?, a.out.as_deref())?;
        summary.line(match &decision {
            Decision::Yes { cost, .. } => format!("yes: cost {cost:.6e} <= {epsilon}"),
            Decision::No { best_cost } => format!("no: best cost {best_cost:.6e} > {epsilon}"),
        });
        return Ok(if decision.is_yes() { 0 } else { EXIT_NO });
    }

    let report = solve(&data, n, loss, method, &cfg)?;
    emit(
        &io::report_to_json(&report, &data, &cfg.tolerances)?,
        a.out.as_deref(),
    )?;
    summary.line(format!(
        "{method} ({}): cost {:.6e}, status {}, {} candidates, {:.1} ms",
        loss.name(),
        report.cost,
        serde_json::to_value(report.status)?
            .as_str()
            .unwrap_or_default(),
        report.candidates_examined,
        report.elapsed.as_secs_f64() * 1e3
    ));
    if let Some(truth) = &meta.ground_truth {
        if truth.models.n() == n {
            let acc = label_accuracy(&truth.labeling, &report.labeling, n)?;
            summary.line(format!(
                "label accuracy against ground truth: {:.1}%",
                acc * 100.0
            ));
        }
    }
    for w in &report.warnings {
        summary.line(format!("warning: {w}"));
    }
    Ok(if report.status == Status::Infeasible {
        EXIT_NO
    } else {
        0
    })
}

fn reduce(a: &ReduceArgs, summary: &Summary) -> Result<u8, Failure> {
    let p = a.source.load()?;
    let inst = partition_to_instance(&p);
    let meta = Metadata {
        n: Some(inst.n),
        ..Metadata::default()
    };
    match &a.out {
        Some(path) => io::save(path, &inst.data, &meta)?,
        None => {
            let mut buf = Vec::new();
            io::write_json(&inst.data, &meta, &mut buf)?;
            println!("{}", String::from_utf8_lossy(&buf));
        }
    }
    summary.line(format!(
        "reduced {:?} to N={} points in d={} with n=2, epsilon=0",
        p.values(),
        inst.data.len(),
        inst.data.dim()
    ));
    let Some(method) = a.decide else { return Ok(0) };
    let cfg = a.config.config();
    configure_threads(a.config.threads)?;
    let decision = decide_threshold(&inst, LossModel::Squared, method.into(), &cfg)?;
    match &decision {
        Decision::Yes { models, .. } => {
            let half = extract_partition(models, &p, &cfg.tolerances)?;
            summary.line(format!("yes: {half:?} sums to half of {}", p.total()));
        }
        Decision::No { best_cost } => summary.line(format!("no: best cost {best_cost:.6e} > 0")),
    }
    Ok(if decision.is_yes() { 0 } else { EXIT_NO })
}

fn extract(a: &ExtractArgs, summary: &Summary) -> Result<u8, Failure> {
    let p = a.source.load()?;
    let text = std::fs::read_to_string(&a.certificate).map_err(switchreg::Error::from)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let rows: Vec<Vec<f64>> =
        serde_json::from_value(value.get("models").cloned().unwrap_or_default())
            .map_err(|_| Failure::Usage("certificate has no `models` array".into()))?;
    let models = ModelSet::from_rows(&rows)?;
    let tol = Tolerances {
        tie_tol: a.tie_tol,
        ..Tolerances::default()
    };
    match extract_partition(&models, &p, &tol) {
        Ok(half) => {
            let mut rest = p.values().to_vec();
            for v in &half {
                let at = rest
                    .iter()
                    .position(|r| r == v)
                    .expect("extracted values come from the instance");
                rest.remove(at);
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({ "subset": half, "complement": rest }))?
            );
            summary.line(format!(
                "{half:?} and {rest:?} both sum to {}",
                p.total() / 2
            ));
            Ok(0)
        }
        Err(e) => {
            summary.line(format!("no partition: {e}"));
            Ok(EXIT_NO)
        }
    }
}

fn bench(a: &BenchArgs, summary: &Summary) -> Result<u8, Failure> {
    let cfg = a.config.config();
    configure_threads(a.config.threads)?;
    let template = GeneratorSpec::new(
        a.n,
        a.d,
        *a.sizes.first().unwrap_or(&1),
        a.sigma,
        a.config.seed,
    );
    let result = bench_scaling(
        a.method.into(),
        a.loss.into(),
        &template,
        &a.sizes,
        &cfg,
        a.repeats,
    )?;
    let mut value = serde_json::to_value(&result)?;
    value["exponent_within_bound"] = json!(result.exponent_at_most(a.bound));
    value["bound"] = json!(a.bound);
    println!("{}", serde_json::to_string_pretty(&value)?);
    for (n, t) in result.sizes.iter().zip(&result.times) {
        summary.line(format!("N={n:>6}  {:.3} ms", t * 1e3));
    }
    if let Some(e) = result.fitted_exponent {
        summary.line(format!("fitted exponent {e:.2} (bound {})", a.bound));
    }
    if result.partial {
        summary.line(format!(
            "sizes {:?} skipped: solver cap exceeded",
            result.skipped
        ));
        return Ok(EXIT_CAPS);
    }
    Ok(0)
}
