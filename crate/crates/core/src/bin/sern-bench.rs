//! Timing sweeps written as CSV.

use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use sern::bench::{sweep, write_csv, BenchBase, Sweep};
use sern::config::parse_region;
use sern::{Algorithm, Metric, SernError};

#[derive(Parser, Debug)]
#[command(name = "sern-bench", version, about = "Benchmark sweeps for the SERN generator")]
struct Cli {
    /// n, s, M or threads.
    #[arg(long)]
    sweep: String,
    /// Comma-separated parameter values, e.g. 1e4,1e5,1e6.
    #[arg(long, value_delimiter = ',')]
    points: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    nodes: u64,
    /// Mean degree held fixed by solving for q.
    #[arg(long, default_value_t = 1.0)]
    kbar: f64,
    #[arg(long, default_value_t = 0.1)]
    s: f64,
    #[arg(long, default_value_t = 10)]
    buckets: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value = "bucket")]
    algorithm: String,
    #[arg(long, default_value = "l2")]
    metric: String,
    #[arg(long, default_value = "rect:1,1")]
    region: String,
    /// Repetitions per point; the shortest time is reported.
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "-")]
    output: String,
}

fn run(cli: &Cli) -> Result<(), SernError> {
    let kind: Sweep = cli.sweep.parse()?;
    let base = BenchBase {
        n: cli.nodes,
        kbar: cli.kbar,
        s: cli.s,
        buckets: cli.buckets,
        threads: cli.threads,
        algorithm: cli.algorithm.parse::<Algorithm>()?,
        region: parse_region(&cli.region)?,
        metric: Metric::parse(&cli.metric)?,
        seed: cli.seed,
        ..BenchBase::default()
    };
    let rows = sweep(kind, &base, &cli.points, cli.reps)?;
    let out: Box<dyn Write> = if cli.output == "-" {
        Box::new(io::stdout().lock())
    } else {
        Box::new(File::create(&cli.output)?)
    };
    write_csv(&rows, out)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sern-bench: {e}");
            ExitCode::from(match e {
                SernError::Parameter(_) => 2,
                SernError::Resource(_) => 3,
                SernError::Io(_) => 4,
                _ => 1,
            })
        }
    }
}
