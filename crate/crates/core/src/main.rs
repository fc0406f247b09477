use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use scengen::config::{load_config, Config};
use scengen::engine::Algo;
use scengen::experiment::{run_experiment, ExperimentOptions, ProblemKind, DEFAULT_BASE_SEED};
use scengen::report::compare;

#[derive(Parser)]
#[command(name = "scengen", version, about = "Search-based test scenario generation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a search experiment and optionally save its artifacts
    Optimize(OptimizeArgs),
    /// Compare the saved stats of several experiments
    Compare(CompareArgs),
}

#[derive(Args)]
struct OptimizeArgs {
    /// Test problem: lkas or robot
    #[arg(long, default_value = "lkas")]
    problem: ProblemKind,
    /// Search algorithm: random, ga or nsga2
    #[arg(long, default_value = "nsga2")]
    algo: Algo,
    /// Number of independent runs
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Save stats, scenarios and images (true/false)
    #[arg(
        long = "save_results",
        default_value = "true",
        value_parser = parse_bool,
        action = clap::ArgAction::Set
    )]
    save_results: bool,
    /// Config file; the default config.json may be absent
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed; run i uses seed + i
    #[arg(long, default_value_t = DEFAULT_BASE_SEED)]
    seed: u64,
    /// Number of runs executed in parallel
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct CompareArgs {
    /// Stats directories to compare (at least 2)
    #[arg(long = "stats_path", required = true, num_args = 1..)]
    stats_path: Vec<PathBuf>,
    /// Display name for each stats directory, same order
    #[arg(long = "stats_names", required = true, num_args = 1..)]
    stats_names: Vec<String>,
    /// Output directory for the comparison artifacts
    #[arg(long, default_value = "comparison")]
    out: PathBuf,
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("expected true or false, got `{other}`")),
    }
}

/// An explicit --config must exist; the implicit default config.json is
/// optional and silently falls back to built-in defaults.
fn resolve_config(arg: &Option<PathBuf>) -> Result<Config, String> {
    match arg {
        Some(path) => load_config(path).map_err(|e| e.to_string()),
        None => {
            let default = PathBuf::from("config.json");
            if default.exists() {
                load_config(&default).map_err(|e| e.to_string())
            } else {
                Ok(Config::default())
            }
        }
    }
}

fn optimize(args: &OptimizeArgs) -> Result<(), String> {
    let config = resolve_config(&args.config)?;
    let opts = ExperimentOptions {
        problem: args.problem,
        algo: args.algo,
        runs: args.runs,
        base_seed: args.seed,
        save_results: args.save_results,
        jobs: args.jobs,
        log: args.jobs <= 1,
    };
    println!(
        "problem {} | algo {} | pop_size {} | n_gen {} | runs {} | seed {}",
        opts.problem, opts.algo, config.ga.pop_size, config.ga.n_gen, opts.runs, opts.base_seed
    );
    let start = std::time::Instant::now();
    let outcome = run_experiment(&config, &opts).map_err(|e| e.to_string())?;
    for (i, stats) in outcome.stats.iter().enumerate() {
        let best = stats
            .convergence
            .values()
            .next_back()
            .map_or("-".to_string(), |v| format!("{v:.6}"));
        println!(
            "run {i}: seed {} | best fitness {best} | suite diversity {:.4}",
            stats.seed, stats.suite_novelty
        );
        for warning in &stats.warnings {
            println!("run {i}: warning: {warning}");
        }
    }
    println!("done in {:.1}s", start.elapsed().as_secs_f64());
    if let Some(paths) = &outcome.paths {
        println!(
            "results in {}, {}, {}",
            paths.stats_path.display(),
            paths.tcs_path.display(),
            paths.images_path.display()
        );
    }
    Ok(())
}

fn run_compare(args: &CompareArgs) -> Result<(), String> {
    let paths = compare(&args.stats_path, &args.stats_names, &args.out)
        .map_err(|e| e.to_string())?;
    println!(
        "comparison written to {} ({} and box plots)",
        args.out.display(),
        paths.convergence_svg.file_name().unwrap().to_string_lossy()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Optimize(args) => optimize(args),
        Command::Compare(args) => run_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
