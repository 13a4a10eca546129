use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hoinet::config::{InputSource, RunConfig};
use hoinet::io::{self, OutputFormat};
use hoinet::pipeline::{analyze_series, analyze_var_model, OrderChoice};
use hoinet::repro::{self, grid_from_steps, ReproConfig};
use hoinet::{HoiError, Result};
use hoinet_core::var::{build_star_model, simulate_stream, StarConfig, StarVariant, DEFAULT_BURN_IN};

/// Higher-order interaction measures for VAR-modeled Gaussian networks.
#[derive(Parser)]
#[command(name = "hoinet", version)]
struct Cli {
    /// Worker threads (default: $HOINET_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a star network or a model given as JSON into CSV.
    Simulate(SimulateArgs),
    /// Compute the HOI network of a CSV series or a model JSON.
    Analyze(AnalyzeArgs),
    /// Reproduce the star-network study.
    ReproStar(ReproArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    variant: Option<StarVariant>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 0.3)]
    a31: f64,
    #[arg(long)]
    coupling: Option<f64>,
    #[arg(long)]
    inflow: Option<f64>,
    /// Samples kept per series.
    #[arg(long, short = 'T', default_value_t = 1000)]
    length: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: usize,
    /// Number of realizations; replicate r uses stream r of the seed and is
    /// written to `<stem>_<r>.csv`.
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, short)]
    input: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fixed order, `aic` or `bic`.
    #[arg(long)]
    order: Option<OrderChoice>,
    #[arg(long)]
    max_order: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    burn_in: Option<usize>,
    /// Run bootstrap (HOI) and surrogate (MIR) tests.
    #[arg(long)]
    signif: bool,
    /// Skip the per-column z-scoring of CSV input.
    #[arg(long)]
    no_zscore: bool,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long = "format", value_enum, value_delimiter = ',')]
    formats: Option<Vec<OutputFormat>>,
}

#[derive(Args)]
struct ReproArgs {
    #[arg(long)]
    out_dir: PathBuf,
    /// JSON study configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Equally spaced a31 values over [0, 0.3].
    #[arg(long, conflicts_with = "grid")]
    grid_steps: Option<usize>,
    /// Explicit a31 values.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<usize>>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    q: Option<usize>,
    /// Collect estimates only (bias/std), without bootstrap tests.
    #[arg(long)]
    no_bootstrap: bool,
    #[arg(long = "format", value_enum, value_delimiter = ',', default_value = "json,csv")]
    formats: Vec<OutputFormat>,
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let model = match (&a.model, a.variant) {
        (Some(p), _) => io::read_model_json(p)?,
        (None, Some(v)) => {
            let mut cfg = StarConfig { a31: a.a31, ..StarConfig::new(v) };
            cfg.coupling = a.coupling.unwrap_or(cfg.coupling);
            cfg.inflow = a.inflow.unwrap_or(cfg.inflow);
            build_star_model(&cfg)?
        }
        (None, None) => unreachable!("clap requires one of them"),
    };
    match a.replicates {
        None => io::write_series_csv(&a.out, &simulate_stream(&model, a.length, a.burn_in, a.seed, 0)?),
        Some(0) => Err(HoiError::usage("--replicates must be positive")),
        Some(r) => {
            let stem = a.out.file_stem().and_then(|s| s.to_str()).unwrap_or("series");
            let dir = a.out.parent().unwrap_or(Path::new(""));
            let width = (r - 1).to_string().len();
            for k in 0..r {
                let series = simulate_stream(&model, a.length, a.burn_in, a.seed, k as u64)?;
                io::write_series_csv(&dir.join(format!("{stem}_{k:0width$}.csv")), &series)?;
            }
            Ok(())
        }
    }
}

fn analyze(a: AnalyzeArgs) -> Result<()> {
    let file = match &a.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    let flags = RunConfig {
        input: a.input,
        model: a.model,
        order: a.order,
        max_order: a.max_order,
        q: a.q,
        alpha: a.alpha,
        n_replicates: a.replicates,
        seed: a.seed,
        burn_in: a.burn_in,
        zscore: a.no_zscore.then_some(false),
        signif: a.signif.then_some(true),
        out_dir: a.out_dir,
        formats: a.formats,
    };
    let cfg = file.overridden_by(flags).resolve()?;
    let net = match &cfg.source {
        InputSource::Series(p) => analyze_series(&io::read_series_csv(p)?, &cfg.analysis)?,
        InputSource::Model(p) => analyze_var_model(&io::read_model_json(p)?, cfg.analysis.q, None)?,
    };
    io::write_network(&cfg.out_dir, "network", &net, &cfg.formats)?;
    io::write_json(&cfg.out_dir.join("config.json"), &cfg)
}

fn repro_star(a: ReproArgs) -> Result<()> {
    let mut cfg: ReproConfig = match &a.config {
        Some(p) => io::read_json(p)?,
        None => ReproConfig::default(),
    };
    if let Some(g) = a.grid_steps {
        cfg.grid = grid_from_steps(g);
    }
    cfg.grid = a.grid.unwrap_or(cfg.grid);
    cfg.lengths = a.lengths.unwrap_or(cfg.lengths);
    cfg.runs = a.runs.unwrap_or(cfg.runs);
    cfg.seed = a.seed.unwrap_or(cfg.seed);
    cfg.q = a.q.unwrap_or(cfg.q);
    if a.no_bootstrap {
        cfg.significance = None;
    } else {
        let mut s = cfg.significance.unwrap_or_default();
        s.n_replicates = a.replicates.unwrap_or(s.n_replicates);
        s.alpha = a.alpha.unwrap_or(s.alpha);
        cfg.significance = Some(s);
    }
    std::fs::create_dir_all(&a.out_dir).map_err(|e| HoiError::io(&a.out_dir, e))?;
    io::write_json(&a.out_dir.join("config.json"), &cfg)?;
    repro::run(&cfg, &a.out_dir, &a.formats)?;
    Ok(())
}

fn init_threads(flag: Option<usize>) -> Result<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("HOINET_THREADS") {
            Ok(s) => Some(s.trim().parse().map_err(|_| HoiError::usage(format!("HOINET_THREADS=`{s}` is not a count")))?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| HoiError::usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads(cli.threads).and_then(|()| match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Analyze(a) => analyze(a),
        Command::ReproStar(a) => repro_star(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hoinet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
