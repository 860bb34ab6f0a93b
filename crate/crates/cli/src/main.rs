use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use depdisc::cluster::ClusterConfig;
use depdisc::model::{DependencyKind, LoadOptions, Relation};
use depdisc::oracle::{brute, OracleLimits};
use depdisc::plans::{run, run_naive_intersection, Algorithm, PlanConfig};
use depdisc::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "depdisc", version, about = "Distributed dependency discovery on a simulated cluster")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one discovery plan and write result and metrics JSON.
    Discover(DiscoverArgs),
    /// Brute-force reference set for small inputs.
    Oracle(OracleArgs),
    /// Precision of intersecting per-part FDs for several part counts.
    ExperimentPrecision(PrecisionArgs),
    /// Run LDP1 and LDP2 of one FD algorithm and compare their costs.
    ExperimentCompare(CompareArgs),
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// Nulls never agree with anything, each other included.
    #[arg(long)]
    null_unequal: bool,
}

impl InputArgs {
    fn load(&self) -> Result<Relation, Failure> {
        let options = LoadOptions {
            nulls_equal: !self.null_unequal,
            ..LoadOptions::default()
        };
        Relation::load_csv(&self.input, &options).map_err(Failure::from)
    }
}

#[derive(Args)]
struct DiscoverArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value = "fd")]
    dep: String,
    #[arg(long, default_value = "tane")]
    algo: String,
    #[arg(long, default_value_t = 2)]
    ldp: u8,
    #[arg(long, default_value_t = 4)]
    workers: usize,
    /// Bytes per worker; 0 means unlimited.
    #[arg(long, default_value_t = 0)]
    memory_budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Result JSON; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    metrics: Option<PathBuf>,
    #[arg(long)]
    keep_trivial: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value = "fd")]
    dep: String,
    #[arg(long, default_value_t = OracleLimits::default().max_rows)]
    max_rows: usize,
    #[arg(long, default_value_t = OracleLimits::default().max_cols)]
    max_cols: usize,
    #[arg(long, default_value_t = OracleLimits::default().max_dc_predicates)]
    max_dc_predicates: usize,
    #[arg(long)]
    keep_trivial: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PrecisionArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_delimiter = ',', default_value = "2,5,10")]
    partitions: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value = "tane")]
    algo: String,
    #[arg(long, default_value_t = 4)]
    workers: usize,
    #[arg(long, default_value_t = 0)]
    memory_budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Input { .. } | Error::Io(_) => 2,
            Error::Limit(_) | Error::Stage { .. } => 3,
            Error::Config(_) | Error::Contract(_) | Error::Parse { .. } => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Discover(a) => discover(&a),
        Command::Oracle(a) => oracle(&a),
        Command::ExperimentPrecision(a) => experiment_precision(&a),
        Command::ExperimentCompare(a) => experiment_compare(&a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("depdisc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn parse_kind(s: &str) -> Result<DependencyKind, Failure> {
    s.parse().map_err(Failure::from)
}

fn parse_algo(s: &str) -> Result<Algorithm, Failure> {
    s.parse().map_err(Failure::from)
}

fn cluster(workers: usize, budget: u64, seed: u64) -> Result<ClusterConfig, Failure> {
    Ok(ClusterConfig::new(workers)?.with_budget(budget).with_seed(seed))
}

fn write_json(path: Option<&Path>, value: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("json values serialize") + "\n";
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure {
            code: 2,
            message: format!("cannot write {}: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn discover(a: &DiscoverArgs) -> Result<(), Failure> {
    let kind = parse_kind(&a.dep)?;
    let algorithm = parse_algo(&a.algo)?;
    let mut config = PlanConfig::new(algorithm, a.ldp, kind, cluster(a.workers, a.memory_budget, a.seed)?);
    config.sampling_seed = a.seed;
    config.keep_trivial = a.keep_trivial;
    let r = a.input.load()?;
    // reject bad combinations before touching the data
    config.validate(&r)?;
    let result = run(&r, &config)?;
    write_json(a.output.as_deref(), &result.to_json(&r, &config))?;
    if let Some(path) = &a.metrics {
        write_json(Some(path), &result.metrics_json())?;
    }
    Ok(())
}

fn oracle(a: &OracleArgs) -> Result<(), Failure> {
    let kind = parse_kind(&a.dep)?;
    let limits = OracleLimits {
        max_rows: a.max_rows,
        max_cols: a.max_cols,
        max_dc_predicates: a.max_dc_predicates,
    };
    let r = a.input.load()?;
    let deps = if kind == DependencyKind::Dc {
        depdisc::oracle::brute_dcs(&r, &limits, a.keep_trivial)?
    } else {
        brute(kind, &r, &limits)?
    };
    let rendered: Vec<String> = deps.iter().map(|d| d.render(r.attribute_names())).collect();
    write_json(
        a.output.as_deref(),
        &json!({
            "dep": kind.as_str(),
            "rows": r.len(),
            "columns": r.arity(),
            "dependencies": rendered,
        }),
    )
}

fn experiment_precision(a: &PrecisionArgs) -> Result<(), Failure> {
    if a.partitions.is_empty() || a.partitions.contains(&0) {
        return Err(Failure::usage("--partitions needs positive part counts"));
    }
    let r = a.input.load()?;
    let mut rows = Vec::new();
    println!("{:>4} {:>8} {:>8} {:>10}", "p", "naive", "global", "precision");
    for &p in &a.partitions {
        let out = run_naive_intersection(&r, p, DependencyKind::Fd, a.seed)?;
        println!("{:>4} {:>8} {:>8} {:>10.3}", p, out.naive.len(), out.global.len(), out.precision);
        rows.push(json!({
            "p": p,
            "naive": out.naive.len(),
            "global": out.global.len(),
            "precision": out.precision,
        }));
    }
    if let Some(path) = &a.output {
        write_json(Some(path), &json!({"rows": r.len(), "seed": a.seed, "results": rows}))?;
    }
    Ok(())
}

fn experiment_compare(a: &CompareArgs) -> Result<(), Failure> {
    let algorithm = parse_algo(&a.algo)?;
    if algorithm == Algorithm::DatadrivenDc {
        return Err(Failure::usage("experiment-compare takes an FD algorithm"));
    }
    let r = a.input.load()?;
    let mb = |b: u64| b as f64 / 1e6;
    println!(
        "{} {}x{} ({}, k={})",
        r.name(),
        r.len(),
        r.arity(),
        algorithm,
        a.workers
    );
    println!(
        "{:<6}| {:>17} | {:>18} | {:>8} | {:>12}",
        "", "Total time (secs)", "Total shuffle (MB)", "X (MB)", "Y (units)"
    );
    let mut plans = Vec::new();
    for ldp in [1u8, 2] {
        let mut config = PlanConfig::new(
            algorithm,
            ldp,
            DependencyKind::Fd,
            cluster(a.workers, a.memory_budget, a.seed)?,
        );
        config.sampling_seed = a.seed;
        let started = Instant::now();
        let result = run(&r, &config)?;
        let secs = started.elapsed().as_secs_f64();
        let ledger = &result.ledger;
        println!(
            "{:<6}| {:>17.3} | {:>18.3} | {:>8.3} | {:>12}",
            format!("LDP{ldp}"),
            secs,
            mb(ledger.total_bytes()),
            mb(ledger.x_bytes()),
            ledger.y_units()
        );
        plans.push(json!({
            "ldp": ldp,
            "seconds": secs,
            "dependencies": result.dependencies.len(),
            "counts": result.counters,
            "metrics": result.metrics_json(),
        }));
    }
    if let Some(path) = &a.output {
        write_json(Some(path), &json!({"algorithm": algorithm, "workers": a.workers, "plans": plans}))?;
    }
    Ok(())
}
