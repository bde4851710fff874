use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use evobic::bench::{run_bench, to_csv, BenchOptions};
use evobic::bicluster::{biclusters_to_json, read_index_biclusters};
use evobic::evolution::{run_with_observer, EvolutionConfig};
use evobic::expansion::{resolve_biclusters, ExpansionOptions};
use evobic::matrix::ExpressionMatrix;
use evobic::metrics::score;
use evobic::synthgen::{emit_suite, Suite, SuiteOptions};

const THREADS_ENV: &str = "EVOBIC_THREADS";

#[derive(Parser)]
#[command(name = "evobic", version, about = "Evolutionary search for order-preserving biclusters")]
struct Cli {
    /// Print progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic benchmark suite with ground truth.
    Generate(GenerateArgs),
    /// Search a TSV matrix for biclusters.
    Run(RunArgs),
    /// Score found biclusters against ground truth.
    Score(ScoreArgs),
    /// Time searches on matrices of growing row count.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Patterns,
    Overlap,
    Narrow,
    Scaling,
    Noise,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Patterns => Suite::Patterns,
            SuiteArg::Overlap => Suite::Overlap,
            SuiteArg::Narrow => Suite::Narrow,
            SuiteArg::Scaling => Suite::Scaling,
            SuiteArg::Noise => Suite::Noise,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Biclusters per overlap dataset.
    #[arg(long, default_value_t = 3)]
    overlap_blocks: usize,
    /// Datasets per scenario (suite default when absent).
    #[arg(long)]
    variants: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    /// Input matrix (TSV).
    #[arg(long, short)]
    input: PathBuf,
    /// Output JSON; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Config file (JSON or `key = value`); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Maximum column overlap between reported biclusters.
    #[arg(long)]
    overlap: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fitness workers (0 = all CPUs).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    sigma: Option<usize>,
    /// Tolerance of the increasing rule (0 = strict).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Number of biclusters to report.
    #[arg(long, default_value_t = 100)]
    biclusters: usize,
    #[arg(long, value_enum, default_value = "on")]
    negative_trends: Toggle,
    #[arg(long, default_value_t = 1)]
    approx_violations: usize,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    found: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "5000,10000,15000,20000,25000")]
    rows: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 200)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Failure with an explicit exit code.
#[derive(Debug)]
struct Exit(u8, anyhow::Error);

impl From<anyhow::Error> for Exit {
    fn from(e: anyhow::Error) -> Self {
        Exit(1, e)
    }
}

fn parse_args() -> Cli {
    match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let text = e.render().to_string();
            eprint!("{text}");
            if !text.contains("Usage:") {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            std::process::exit(2);
        }
        Err(e) => e.exit(),
    }
}

fn main() -> ExitCode {
    let cli = parse_args();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Run(args) => cmd_run(args, cli.verbose),
        Command::Score(args) => cmd_score(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn env_threads() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok()
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Exit> {
    let opts = SuiteOptions {
        overlap_blocks: args.overlap_blocks,
        variants: args.variants,
        ..Default::default()
    };
    let manifest = emit_suite(&args.out, args.suite.into(), args.seed, &opts)
        .with_context(|| format!("generating suite into {}", args.out.display()))?;
    println!(
        "wrote {} datasets and manifest to {}",
        manifest.datasets.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_run(args: RunArgs, verbose: bool) -> Result<(), Exit> {
    let mut cfg = match &args.config {
        Some(path) => EvolutionConfig::from_config_file(path)
            .with_context(|| format!("reading config {}", path.display()))?,
        None => EvolutionConfig::default(),
    };
    if let Some(v) = args.iterations {
        cfg.max_iterations = v;
    }
    if let Some(v) = args.overlap {
        cfg.overlap_threshold = v;
    }
    if let Some(v) = args.seed {
        cfg.rng_seed = v;
    }
    if let Some(v) = args.population {
        cfg.population_size = v;
    }
    if let Some(v) = args.sigma {
        cfg.sigma = Some(v);
    }
    if let Some(v) = args.epsilon {
        cfg.epsilon = v;
    }
    match args.threads {
        Some(v) => cfg.threads = v,
        None => {
            if let Some(v) = env_threads() {
                cfg.threads = v;
            }
        }
    }
    cfg.validate().map_err(anyhow::Error::from)?;

    let matrix = ExpressionMatrix::load_tsv(&args.input)
        .with_context(|| format!("loading {}", args.input.display()))?;
    let outcome = run_with_observer(&matrix, &cfg, |report| {
        if verbose {
            eprintln!(
                "generation {} best {:.6}",
                report.generation,
                report.top_rank.best_fitness().unwrap_or(0.0)
            );
        }
    })
    .context("search failed")?;
    let opts = ExpansionOptions {
        allow_negative: matches!(args.negative_trends, Toggle::On),
        approx_violations: args.approx_violations,
    };
    let found = resolve_biclusters(&matrix, &outcome.top_rank, args.biclusters, &opts, cfg.epsilon);
    write_output(args.output.as_ref(), &biclusters_to_json(&found).map_err(anyhow::Error::from)?)?;
    if verbose {
        eprintln!(
            "{} biclusters after {} generations ({} evaluations{})",
            found.len(),
            outcome.generations,
            outcome.evaluations,
            if outcome.terminated_early { ", tabu list saturated" } else { "" }
        );
    }
    Ok(())
}

fn cmd_score(args: ScoreArgs) -> Result<(), Exit> {
    let read = |p: &PathBuf| {
        std::fs::read_to_string(p).map_err(|e| Exit(2, anyhow::anyhow!("cannot read {}: {e}", p.display())))
    };
    let truth_text = read(&args.truth)?;
    let found_text = read(&args.found)?;
    let truth = read_index_biclusters(&truth_text).context("parsing truth")?;
    let found = read_index_biclusters(&found_text).context("parsing found biclusters")?;
    if found.is_empty() {
        log::warn!("found file holds no biclusters");
    }
    let report = score(&truth, &found).context("scoring")?;
    let json = serde_json::to_string_pretty(&report).context("encoding report")?;
    println!("{json}");
    if let Some(p) = &args.output {
        std::fs::write(p, &json).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Exit> {
    let opts = BenchOptions {
        rows: args.rows,
        repeats: args.repeats,
        iterations: args.iterations,
        seed: args.seed,
        threads: args.threads.or_else(env_threads).unwrap_or(0),
    };
    let rows = run_bench(&opts).context("bench failed")?;
    let csv = to_csv(&rows);
    print!("{csv}");
    if let Some(p) = &args.output {
        std::fs::write(p, &csv).with_context(|| format!("writing {}", p.display()))?;
    }
    for w in rows.windows(2) {
        if w[1].mean_seconds < w[0].mean_seconds {
            log::warn!(
                "timing decreased from {} to {} rows ({:.3}s -> {:.3}s)",
                w[0].rows,
                w[1].rows,
                w[0].mean_seconds,
                w[1].mean_seconds
            );
        }
    }
    Ok(())
}
