//! Command-line generator. The graph goes to `--output` (standard output by
//! default) and run statistics go to standard error.

use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use log::error;

use sern::analysis::DEFAULT_BINS;
use sern::config::{parse_model, parse_region};
use sern::engine::{DEFAULT_BUCKETS, DEFAULT_BUFFER};
use sern::io::{write_graph, OutputFormat};
use sern::{Algorithm, GenConfig, Generator, Metric, ModelParams, SernError};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "sern", version, about = "Generate a spatially embedded random network")]
struct Cli {
    /// Number of nodes.
    #[arg(long)]
    nodes: u64,
    /// waxman, clipped-waxman, waxman-threshold, threshold, ger, power-law,
    /// cauchy, exponential or max-entropy.
    #[arg(long, default_value = "waxman")]
    model: String,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    /// Cut-off radius for the threshold models.
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    theta1: f64,
    #[arg(long, default_value_t = 1.0)]
    theta2: f64,
    /// l2, l1, l0 or linf.
    #[arg(long, default_value = "l2")]
    metric: String,
    /// rect:W,H, ellipse:A,B or polygon:PATH.
    #[arg(long, default_value = "rect:1,1")]
    region: String,
    /// Grid cells along the longer side of the region.
    #[arg(long, default_value_t = DEFAULT_BUCKETS)]
    buckets: usize,
    /// naive, qjump or bucket.
    #[arg(long, default_value = "bucket")]
    algorithm: String,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Edges per worker buffer.
    #[arg(long, default_value_t = DEFAULT_BUFFER)]
    buffer: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Store edge lengths.
    #[arg(long)]
    distances: bool,
    /// graphml, edgelist, binary or stats.
    #[arg(long, default_value = "edgelist")]
    format: String,
    /// Output path, `-` for standard output.
    #[arg(long, default_value = "-")]
    output: String,
    /// Histogram bins for the stats format.
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    /// Print statistics as JSON.
    #[arg(long)]
    json: bool,
    /// Do not print run statistics.
    #[arg(long)]
    quiet: bool,
    /// Allow the quadratic algorithm above 100000 nodes.
    #[arg(long)]
    allow_large_naive: bool,
}

fn exit_code(e: &SernError) -> u8 {
    match e {
        SernError::Parameter(_) => EXIT_USAGE,
        SernError::Resource(_) => EXIT_RESOURCE,
        SernError::Io(_) => EXIT_IO,
        SernError::Integrity(_) | SernError::Format(_) => EXIT_FAILURE,
    }
}

fn config(cli: &Cli) -> Result<(GenConfig, OutputFormat), SernError> {
    let params = ModelParams {
        q: cli.q,
        s: cli.s,
        r: cli.r,
        theta1: cli.theta1,
        theta2: cli.theta2,
    };
    let mut c = GenConfig::new(cli.nodes, parse_model(&cli.model, &params)?);
    c.metric = Metric::parse(&cli.metric)?;
    c.region = parse_region(&cli.region)?;
    c.buckets = cli.buckets;
    c.algorithm = cli.algorithm.parse::<Algorithm>()?;
    c.threads = cli.threads;
    c.buffer = cli.buffer;
    c.seed = cli.seed;
    c.distances = cli.distances;
    c.allow_large_naive = cli.allow_large_naive;
    let format = cli.format.parse::<OutputFormat>()?;
    if format == OutputFormat::Stats && cli.bins == 0 {
        return Err(SernError::Parameter("--bins must be at least 1".into()));
    }
    Ok((c, format))
}

fn open_output(path: &str) -> Result<Box<dyn Write>, SernError> {
    Ok(if path == "-" {
        Box::new(io::stdout().lock())
    } else {
        Box::new(File::create(path)?)
    })
}

fn run(cli: &Cli) -> Result<(), SernError> {
    let (config, format) = config(cli)?;
    let generator = Generator::new(config)?;
    let seed = generator.config().seed;
    let (text, json) = if format == OutputFormat::Stats {
        let run = generator.generate_stats(seed, cli.bins)?;
        let mut out = open_output(&cli.output)?;
        if cli.json {
            serde_json::to_writer_pretty(&mut out, &run.graph).map_err(io::Error::from)?;
            writeln!(out)?;
        } else {
            out.write_all(run.graph.to_text().as_bytes())?;
        }
        out.flush()?;
        (run.stats.to_text(), serde_json::to_string(&run.stats))
    } else {
        let graph = generator.generate()?;
        write_graph(format, &graph.nodes, &graph.edges, open_output(&cli.output)?)?;
        (graph.stats.to_text(), serde_json::to_string(&graph.stats))
    };
    if !cli.quiet {
        let mut err = io::stderr().lock();
        if cli.json {
            writeln!(err, "{}", json.map_err(io::Error::from)?)?;
        } else {
            err.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            eprintln!("sern: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
