//! Command-line interface: simulation, exact computation, and
//! verification as reproducible one-line runs.
//!
//! Exit codes: 0 success or statistical PASS, 1 statistical FAIL,
//! 2 usage error, 3 runtime or numerical error.

mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use output::{csv_field, join_floats, Format, Sink, SCHEMA_VERSION};
use subfrechet::{
    concurrence_logistic, enumerate_partitions, gem_default_count, gem_stick_breaking,
    generate_jumps, joint_cdf, normalized_jump_weights, pd_eppf, simulate, verify_corollary,
    Error as CoreError, LevyMeasure, PDParams, RngStream, SubFrechetModel, WeightVector,
    DEFAULT_MAX_JUMPS, VERIFY_DEFAULT_TOLERANCE,
};

#[derive(Parser)]
#[command(
    name = "subfrechet",
    version,
    about = "Simulate sub-Fréchet max-i.d. vectors, extract hitting partitions, \
             and verify their Poisson-Dirichlet laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw max-i.d. vectors with their hitting partitions (one record
    /// per replicate)
    Simulate(SimulateArgs),
    /// Exact Poisson-Dirichlet probabilities over all partitions of [n]
    Pmf(PmfArgs),
    /// Closed-form concurrence probabilities p(1)..p(n)
    Concurrence(ConcurrenceArgs),
    /// Joint distribution function at user-supplied points
    Cdf(CdfArgs),
    /// Simulate hitting partitions and chi-square them against their
    /// Poisson-Dirichlet target (exit 0 PASS, 1 FAIL)
    Verify(VerifyArgs),
    /// One sampled weight vector, jump-normalized or GEM
    Weights(WeightsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MeasureKind {
    Stable,
    Gamma,
}

#[derive(Args)]
struct MeasureArgs {
    /// Lévy measure family
    #[arg(long, value_enum)]
    measure: MeasureKind,
    /// Stable index in (0,1); required with --measure stable
    #[arg(long)]
    alpha: Option<f64>,
    /// Gamma rate > 0; required with --measure gamma
    #[arg(long)]
    theta: Option<f64>,
}

impl MeasureArgs {
    fn build(&self) -> Result<LevyMeasure, CliError> {
        build_measure(self.measure, self.alpha, self.theta)
    }
}

fn build_measure(
    kind: MeasureKind,
    alpha: Option<f64>,
    theta: Option<f64>,
) -> Result<LevyMeasure, CliError> {
    match kind {
        MeasureKind::Stable => {
            let alpha = alpha.ok_or_else(|| CliError::usage("stable measure needs --alpha"))?;
            Ok(LevyMeasure::stable(alpha)?)
        }
        MeasureKind::Gamma => {
            let theta = theta.ok_or_else(|| CliError::usage("gamma measure needs --theta"))?;
            Ok(LevyMeasure::gamma(theta)?)
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write data here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    measure: MeasureArgs,
    /// Number of coordinates
    #[arg(long)]
    n: usize,
    /// Marginal Fréchet scales, comma-separated (defaults to all ones)
    #[arg(long, value_delimiter = ',')]
    sigma: Option<Vec<f64>>,
    /// Number of replicates
    #[arg(long)]
    samples: usize,
    /// Base seed; replicate i draws from stream (seed, i)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Residual-mass truncation tolerance. The default keeps the
    /// chance of exhausting the jump budget negligible for the stable
    /// measure; tighten it together with --max-jumps.
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
    /// Jump budget per replicate
    #[arg(long, default_value_t = DEFAULT_MAX_JUMPS)]
    max_jumps: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct PmfArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    theta: f64,
    /// Number of elements (at most 12)
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ConcurrenceArgs {
    #[arg(long)]
    alpha: f64,
    /// Largest block size to report
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct CdfArgs {
    #[command(flatten)]
    measure: MeasureArgs,
    /// Marginal Fréchet scales, comma-separated
    #[arg(long, value_delimiter = ',', required = true)]
    sigma: Vec<f64>,
    /// Evaluation point, comma-separated, same length as --sigma; repeat
    /// for a grid
    #[arg(long, required = true)]
    x: Vec<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Lévy measure family under test
    #[arg(long, value_enum)]
    case: MeasureKind,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    /// Number of coordinates (2..=6)
    #[arg(long)]
    n: usize,
    /// Number of replicates (at least 100000)
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Residual-mass truncation tolerance
    #[arg(long, default_value_t = VERIFY_DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_JUMPS)]
    max_jumps: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct WeightsArgs {
    /// Sample GEM stick-breaking weights instead of normalized jumps
    #[arg(long)]
    gem: bool,
    /// Lévy measure family (jump-normalized source)
    #[arg(long, value_enum)]
    measure: Option<MeasureKind>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    /// Number of GEM sticks (defaults to the expected-dust rule)
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_JUMPS)]
    max_jumps: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(CoreError),
    Io(std::io::Error),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(CoreError::InvalidParameter(_)) => 2,
            CliError::Core(_) | CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        // A closed downstream pipe is how tools like `head` stop us.
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => {
            std::process::exit(0);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Pmf(args) => cmd_pmf(args),
        Command::Concurrence(args) => cmd_concurrence(args),
        Command::Cdf(args) => cmd_cdf(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Weights(args) => cmd_weights(args),
    }
}

#[derive(Serialize)]
struct SimRecord<'a> {
    schema_version: u32,
    replicate: usize,
    values: &'a [f64],
    partition: String,
    argmax_labels: &'a [usize],
    tie_count: usize,
    truncation_ratio: f64,
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32, CliError> {
    if args.samples == 0 {
        return Err(CliError::usage("--samples must be at least 1"));
    }
    if args.n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let measure = args.measure.build()?;
    let sigma = args.sigma.unwrap_or_else(|| vec![1.0; args.n]);
    if sigma.len() != args.n {
        return Err(CliError::usage(format!(
            "--sigma has {} entries but --n is {}",
            sigma.len(),
            args.n
        )));
    }
    let model = SubFrechetModel::new(measure, sigma)?;

    // Replicate i draws from stream (seed, i): deterministic regardless
    // of how the work is sharded, ordered by replicate index.
    let results = (0..args.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(args.seed, i as u64);
            simulate(&model, args.tolerance, args.max_jumps, &mut rng)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut sink = Sink::open(&args.out.output)?;
    if args.out.format == Format::Csv {
        sink.line("schema_version,replicate,values,partition,argmax_labels,tie_count,truncation_ratio")?;
    }
    for (i, r) in results.iter().enumerate() {
        match args.out.format {
            Format::Json => {
                let record = SimRecord {
                    schema_version: SCHEMA_VERSION,
                    replicate: i,
                    values: &r.values,
                    partition: r.partition.to_string(),
                    argmax_labels: &r.argmax_labels,
                    tie_count: r.tie_count,
                    truncation_ratio: r.truncation_ratio,
                };
                sink.line(&serde_json::to_string(&record).expect("record serializes"))?;
            }
            Format::Csv => {
                let labels = r
                    .argmax_labels
                    .iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(";");
                sink.line(&format!(
                    "{},{},{},{},{},{},{}",
                    SCHEMA_VERSION,
                    i,
                    join_floats(&r.values),
                    csv_field(&r.partition.to_string()),
                    labels,
                    r.tie_count,
                    r.truncation_ratio
                ))?;
            }
        }
    }
    sink.finish()?;
    Ok(0)
}

fn cmd_pmf(args: PmfArgs) -> Result<i32, CliError> {
    let params = PDParams::new(args.alpha, args.theta)?;
    let mut sink = Sink::open(&args.out.output)?;
    let mut total = 0.0f64;
    match args.out.format {
        Format::Json => {
            // Streamed document: rows are written as they are
            // enumerated, so large n never materializes the table.
            sink.line(&format!(
                "{{\"schema_version\":{},\"alpha\":{},\"theta\":{},\"n\":{},\"rows\":[",
                SCHEMA_VERSION, args.alpha, args.theta, args.n
            ))?;
            let mut first = true;
            for p in enumerate_partitions(args.n)? {
                let prob = pd_eppf(&params, &p.block_sizes());
                total += prob;
                let comma = if first { "" } else { "," };
                first = false;
                sink.line(&format!(
                    "{comma}{{\"partition\":\"{p}\",\"probability\":{prob}}}"
                ))?;
            }
            sink.line(&format!("],\"total\":{total}}}"))?;
        }
        Format::Csv => {
            sink.line("schema_version,partition,probability")?;
            for p in enumerate_partitions(args.n)? {
                let prob = pd_eppf(&params, &p.block_sizes());
                total += prob;
                sink.line(&format!(
                    "{},{},{}",
                    SCHEMA_VERSION,
                    csv_field(&p.to_string()),
                    prob
                ))?;
            }
            sink.line(&format!("{SCHEMA_VERSION},total,{total}"))?;
        }
    }
    sink.finish()?;
    Ok(0)
}

fn cmd_concurrence(args: ConcurrenceArgs) -> Result<i32, CliError> {
    if args.n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let rows: Vec<(usize, f64)> = (1..=args.n)
        .map(|k| concurrence_logistic(args.alpha, k).map(|p| (k, p)))
        .collect::<Result<_, _>>()?;
    let mut sink = Sink::open(&args.out.output)?;
    match args.out.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc {
                schema_version: u32,
                alpha: f64,
                rows: Vec<Row>,
            }
            #[derive(Serialize)]
            struct Row {
                n: usize,
                probability: f64,
            }
            let doc = Doc {
                schema_version: SCHEMA_VERSION,
                alpha: args.alpha,
                rows: rows
                    .into_iter()
                    .map(|(n, probability)| Row { n, probability })
                    .collect(),
            };
            sink.line(&serde_json::to_string(&doc).expect("doc serializes"))?;
        }
        Format::Csv => {
            sink.line("schema_version,n,probability")?;
            for (k, p) in rows {
                sink.line(&format!("{SCHEMA_VERSION},{k},{p}"))?;
            }
        }
    }
    sink.finish()?;
    Ok(0)
}

fn cmd_cdf(args: CdfArgs) -> Result<i32, CliError> {
    let measure = args.measure.build()?;
    let model = SubFrechetModel::new(measure, args.sigma.clone())?;
    let mut points = Vec::new();
    for spec in &args.x {
        let x: Vec<f64> = spec
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::usage(format!("cannot parse --x entry '{t}'")))
            })
            .collect::<Result<_, _>>()?;
        if x.len() != args.sigma.len() {
            return Err(CliError::usage(format!(
                "--x point has {} entries but --sigma has {}",
                x.len(),
                args.sigma.len()
            )));
        }
        let p = joint_cdf(&model, &x)?;
        points.push((x, p));
    }
    let mut sink = Sink::open(&args.out.output)?;
    match args.out.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc {
                schema_version: u32,
                sigma: Vec<f64>,
                rows: Vec<Row>,
            }
            #[derive(Serialize)]
            struct Row {
                x: Vec<f64>,
                probability: f64,
            }
            let doc = Doc {
                schema_version: SCHEMA_VERSION,
                sigma: args.sigma,
                rows: points
                    .into_iter()
                    .map(|(x, probability)| Row { x, probability })
                    .collect(),
            };
            sink.line(&serde_json::to_string(&doc).expect("doc serializes"))?;
        }
        Format::Csv => {
            sink.line("schema_version,x,probability")?;
            for (x, p) in points {
                sink.line(&format!("{SCHEMA_VERSION},{},{p}", csv_field(&join_floats(&x))))?;
            }
        }
    }
    sink.finish()?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, CliError> {
    let measure = build_measure(args.case, args.alpha, args.theta)?;
    let outcome = verify_corollary(
        &measure,
        args.n,
        args.samples,
        args.seed,
        args.tolerance,
        args.max_jumps,
    )?;
    let verdict = if outcome.pass { "PASS" } else { "FAIL" };
    let mut sink = Sink::open(&args.out.output)?;
    match args.out.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                schema_version: u32,
                case: &'a str,
                target_alpha: f64,
                target_theta: f64,
                n: usize,
                samples: usize,
                seed: u64,
                residual_tolerance: f64,
                statistic: f64,
                dof: usize,
                p_value: f64,
                merged_cells: usize,
                max_truncation_ratio: f64,
                verdict: &'a str,
                cells: &'a [subfrechet::GofCell],
            }
            let doc = Doc {
                schema_version: SCHEMA_VERSION,
                case: match args.case {
                    MeasureKind::Stable => "stable",
                    MeasureKind::Gamma => "gamma",
                },
                target_alpha: outcome.target.alpha(),
                target_theta: outcome.target.theta(),
                n: args.n,
                samples: args.samples,
                seed: args.seed,
                residual_tolerance: args.tolerance,
                statistic: outcome.report.statistic,
                dof: outcome.report.dof,
                p_value: outcome.report.p_value,
                merged_cells: outcome.report.merged_cells,
                max_truncation_ratio: outcome.max_truncation_ratio,
                verdict,
                cells: &outcome.report.cells,
            };
            sink.line(&serde_json::to_string(&doc).expect("doc serializes"))?;
        }
        Format::Csv => {
            sink.line(
                "schema_version,case,n,samples,seed,residual_tolerance,statistic,dof,p_value,merged_cells,max_truncation_ratio,verdict",
            )?;
            sink.line(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                SCHEMA_VERSION,
                match args.case {
                    MeasureKind::Stable => "stable",
                    MeasureKind::Gamma => "gamma",
                },
                args.n,
                args.samples,
                args.seed,
                args.tolerance,
                outcome.report.statistic,
                outcome.report.dof,
                outcome.report.p_value,
                outcome.report.merged_cells,
                outcome.max_truncation_ratio,
                verdict
            ))?;
        }
    }
    sink.finish()?;
    eprintln!(
        "verify {}: p = {:.6}, worst truncation ratio {:.3e}",
        verdict, outcome.report.p_value, outcome.max_truncation_ratio
    );
    Ok(if outcome.pass { 0 } else { 1 })
}

fn cmd_weights(args: WeightsArgs) -> Result<i32, CliError> {
    let mut rng = RngStream::new(args.seed, 0);
    let (source, weights): (&str, WeightVector) = if args.gem {
        let alpha = args
            .alpha
            .ok_or_else(|| CliError::usage("--gem needs --alpha"))?;
        let theta = args
            .theta
            .ok_or_else(|| CliError::usage("--gem needs --theta"))?;
        let params = PDParams::new(alpha, theta)?;
        let count = args.count.unwrap_or_else(|| gem_default_count(&params));
        ("gem", gem_stick_breaking(&params, count, &mut rng)?)
    } else {
        let kind = args
            .measure
            .ok_or_else(|| CliError::usage("choose --measure or --gem"))?;
        let measure = build_measure(kind, args.alpha, args.theta)?;
        let jumps = generate_jumps(&measure, args.tolerance, args.max_jumps, &mut rng)?;
        ("jumps", normalized_jump_weights(&jumps))
    };
    let mut sink = Sink::open(&args.out.output)?;
    match args.out.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                schema_version: u32,
                source: &'a str,
                seed: u64,
                weights: &'a [f64],
                dust: f64,
            }
            let doc = Doc {
                schema_version: SCHEMA_VERSION,
                source,
                seed: args.seed,
                weights: weights.weights(),
                dust: weights.dust(),
            };
            sink.line(&serde_json::to_string(&doc).expect("doc serializes"))?;
        }
        Format::Csv => {
            sink.line("schema_version,index,weight")?;
            for (i, w) in weights.weights().iter().enumerate() {
                sink.line(&format!("{SCHEMA_VERSION},{i},{w}"))?;
            }
            sink.line(&format!("{SCHEMA_VERSION},dust,{}", weights.dust()))?;
        }
    }
    sink.finish()?;
    Ok(0)
}
