use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde_json::{json, Value};

use divbench::diversity::{estimate_diversity, DistanceGraph, EstimateOptions, DEFAULT_SHUFFLES};
use divbench::harness::{
    generate_instances, import_reference, reference_bounds, run_benchmark, run_grid_search, write_report,
    ExperimentConfig,
};
use divbench::ising::io::{read_problem, read_samples, write_samples, write_samples_to};
use divbench::metrics::{
    diversity_over_time, filter_fit_unique, run_grid, target_diversity, ttd_record, ApproximationSpec,
    DEFAULT_TARGET_CALCULATIONS,
};
use divbench::solvers::{SolverKind, SolverSpec};
use divbench::topology::{DclParams, InstanceClass};
use divbench::{Error, Result, SampleSet};

const EXIT_VALIDATION: u8 = 2;
const EXIT_CENSORED: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "divbench", version, about = "Diversity benchmarks for Ising solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write RAN1 / AC3 / DCL instances on Chimera graphs.
    Generate(GenerateArgs),
    /// Run one solver on one problem and write its samples.
    Solve(SolveArgs),
    /// Bound the diversity of a sample file.
    Diversity(DiversityArgs),
    /// Time-to-diversity from a directory of experiment sample files.
    Ttd(TtdArgs),
    /// Median TTD over a parameter grid on the tuning problems.
    GridSearch(RunArgs),
    /// Full benchmark run from a config file.
    Benchmark(RunArgs),
    /// Validate a reference sample file against its problem.
    ImportReference(ImportArgs),
    /// Plot-ready tables from a benchmark output directory.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_delimiter = ',', default_values = ["ran1", "ac3", "dcl"])]
    classes: Vec<InstanceClass>,
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    /// Loop density of DCL instances.
    #[arg(long, default_value_t = 0.25)]
    dcl_alpha: f64,
    #[arg(long, default_value_t = 1)]
    dcl_ruggedness: u32,
    #[arg(long, default_value_t = 7.0)]
    dcl_lambda: f64,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    solver: SolverKind,
    /// Parameter file, or inline JSON object.
    #[arg(long)]
    params: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Spin-update budget in ns.
    #[arg(long)]
    budget_ns: Option<u64>,
    /// Output JSONL file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long, default_value_t = 0.25)]
    radius: f64,
    #[arg(long, default_value_t = DEFAULT_SHUFFLES)]
    shuffles: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the best energy instead of taking it from the samples.
    #[arg(long)]
    e_min: Option<f64>,
    #[arg(long)]
    e_max: Option<f64>,
    /// Candidates for the energy-range search when it is needed.
    #[arg(long, default_value_t = 100_000)]
    search_samples: usize,
}

#[derive(Args)]
struct DiversityArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    samples: PathBuf,
    #[command(flatten)]
    score: ScoreArgs,
    /// Also run the exhaustive search (at most 30 fit samples).
    #[arg(long)]
    exact: bool,
    /// Also compute the coloring upper bound.
    #[arg(long)]
    upper: bool,
}

#[derive(Args)]
struct TtdArgs {
    #[arg(long)]
    problem: PathBuf,
    /// Reference samples that fix the target diversity.
    #[arg(long)]
    target_from: PathBuf,
    /// Directory of `*.jsonl` files, one per experiment.
    #[arg(long)]
    experiments: PathBuf,
    #[command(flatten)]
    score: ScoreArgs,
    #[arg(long, default_value_t = DEFAULT_TARGET_CALCULATIONS)]
    target_calculations: usize,
    /// Time per run; defaults to the earliest emission time.
    #[arg(long)]
    t_a_ns: Option<u64>,
    #[arg(long, default_value_t = 40)]
    grid_points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    experiments: Option<usize>,
    #[arg(long)]
    wall_time_ns: Option<u64>,
}

#[derive(Args)]
struct ImportArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Reject files whose stored energies disagree with the problem.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    results: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { EXIT_IO } else { EXIT_VALIDATION })
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Diversity(a) => diversity(a),
        Command::Ttd(a) => ttd(a),
        Command::GridSearch(a) => grid_search(a),
        Command::Benchmark(a) => benchmark(a),
        Command::ImportReference(a) => import(a),
        Command::Report(a) => report(a),
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn generate(a: GenerateArgs) -> Result<ExitCode> {
    let dcl = DclParams {
        alpha: a.dcl_alpha,
        ruggedness: a.dcl_ruggedness,
        lambda: a.dcl_lambda,
    };
    dcl.validate()?;
    let files = generate_instances(&a.classes, &a.sizes, a.count, a.seed, &dcl, &a.out_dir)?;
    println!("wrote {} instances to {}", files.len(), a.out_dir.display());
    Ok(ExitCode::SUCCESS)
}

fn load_params(arg: Option<&str>) -> Result<Value> {
    match arg {
        None => Ok(Value::Null),
        Some(text) if text.trim_start().starts_with('{') => Ok(serde_json::from_str(text)?),
        Some(path) => Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?),
    }
}

fn solve(a: SolveArgs) -> Result<ExitCode> {
    let problem = read_problem(&a.problem)?;
    let spec = SolverSpec::from_params(a.solver, load_params(a.params.as_deref())?)?;
    let prepared = spec.prepare(&problem, a.seed)?;
    let samples = prepared.run(&problem, a.seed, a.budget_ns)?;
    info!("{} samples, clock {} ns", samples.len(), samples.final_time());
    match &a.out {
        Some(path) => write_samples(path, &samples)?,
        None => write_samples_to(std::io::stdout().lock(), &samples)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn scoring_spec(problem: &divbench::IsingProblem, samples: &[&SampleSet], s: &ScoreArgs) -> Result<ApproximationSpec> {
    let mut pooled = SampleSet::for_problem(problem);
    for set in samples {
        pooled.samples.extend(set.samples.iter().cloned());
    }
    let (e_min, e_max) = match (s.e_min, s.e_max) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => {
            let b = reference_bounds(problem, &pooled, s.search_samples, s.seed)?;
            (s.e_min.unwrap_or(b.e_min), s.e_max.unwrap_or(b.e_max))
        }
    };
    ApproximationSpec::new(s.alpha, e_min, e_max, s.radius)
}

fn diversity(a: DiversityArgs) -> Result<ExitCode> {
    let problem = read_problem(&a.problem)?;
    let samples = read_samples(&a.samples, Some(problem.num_spins()))?;
    let spec = scoring_spec(&problem, &[&samples], &a.score)?;
    let fit = filter_fit_unique(&samples, spec.energy_threshold());
    let graph = DistanceGraph::new(fit, spec.radius, problem.num_spins())?;
    let estimate = estimate_diversity(
        &graph,
        &EstimateOptions {
            shuffles: a.score.shuffles,
            seed: a.score.seed,
            upper: a.upper,
            exact: a.exact,
        },
    )?;
    print_json(&estimate)?;
    Ok(ExitCode::SUCCESS)
}

fn ttd(a: TtdArgs) -> Result<ExitCode> {
    let problem = read_problem(&a.problem)?;
    let n = problem.num_spins();
    let reference = import_reference(&problem, &a.target_from, false)?.0;
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&a.experiments)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|x| x == "jsonl"));
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidArgument(format!("no .jsonl files in {}", a.experiments.display())));
    }
    let experiments = paths
        .iter()
        .map(|p| read_samples(p, Some(n)))
        .collect::<Result<Vec<_>>>()?;

    let mut all: Vec<&SampleSet> = vec![&reference];
    all.extend(experiments.iter());
    let spec = scoring_spec(&problem, &all, &a.score)?;
    let target = target_diversity(
        &reference,
        &spec,
        a.target_calculations,
        a.score.shuffles,
        a.score.seed,
        a.target_from.display().to_string(),
    )?;
    let t_a = match a.t_a_ns {
        Some(t) => t,
        None => experiments
            .iter()
            .flat_map(|e| e.iter().map(|s| s.time_ns))
            .filter(|&t| t > 0)
            .min()
            .ok_or_else(|| Error::InvalidArgument("experiments hold no timed samples; pass --t-a-ns".into()))?,
    };
    let horizon = experiments.iter().map(SampleSet::final_time).max().unwrap_or(0);
    let runs = run_grid(horizon / t_a, a.grid_points);
    let times: Vec<u64> = runs.iter().map(|k| k * t_a).collect();
    let curves = experiments
        .iter()
        .enumerate()
        .map(|(i, e)| diversity_over_time(e, &spec, &times, a.score.shuffles, divbench::rng::derive_seed(a.score.seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let record = ttd_record("experiments", problem.id(), &curves, target.value, t_a, &runs)?;
    let out = json!({ "record": record, "target": target, "spec": spec });
    match &a.out {
        Some(path) => std::fs::write(path, serde_json::to_string_pretty(&out)? + "\n")?,
        None => print_json(&out)?,
    }
    Ok(if record.censored { ExitCode::from(EXIT_CENSORED) } else { ExitCode::SUCCESS })
}

fn load_config(a: &RunArgs) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(&a.config)?;
    if let Some(dir) = &a.out_dir {
        config.out_dir = dir.clone();
    }
    if let Some(seed) = a.seed {
        config.master_seed = seed;
    }
    if a.threads.is_some() {
        config.threads = a.threads;
    }
    if let Some(n) = a.experiments {
        config.num_experiments = n;
    }
    if let Some(t) = a.wall_time_ns {
        config.wall_time_ns = t;
    }
    config.validate()?;
    Ok(config)
}

fn grid_search(a: RunArgs) -> Result<ExitCode> {
    let config = load_config(&a)?;
    let outcome = run_grid_search(&config)?;
    print_json(&json!({
        "best": outcome.best.map(|i| &outcome.rows[i]),
        "points": outcome.rows.len(),
        "out_dir": config.out_dir,
    }))?;
    Ok(if outcome.best.is_none() { ExitCode::from(EXIT_CENSORED) } else { ExitCode::SUCCESS })
}

fn benchmark(a: RunArgs) -> Result<ExitCode> {
    let config = load_config(&a)?;
    let outcome = run_benchmark(&config)?;
    println!(
        "{} records written to {} ({} censored)",
        outcome.records.len(),
        outcome.out_dir.display(),
        outcome.records.iter().filter(|r| r.ttd.censored).count()
    );
    Ok(if outcome.all_censored() { ExitCode::from(EXIT_CENSORED) } else { ExitCode::SUCCESS })
}

fn import(a: ImportArgs) -> Result<ExitCode> {
    let problem = read_problem(&a.problem)?;
    let (set, corrected) = import_reference(&problem, &a.samples, a.strict)?;
    write_samples(&a.out, &set)?;
    println!("imported {} samples, corrected energies on {} lines", set.len(), corrected.len());
    Ok(ExitCode::SUCCESS)
}

fn report(a: ReportArgs) -> Result<ExitCode> {
    let out = a.out.clone().unwrap_or_else(|| a.results.clone());
    let summary = write_report(Path::new(&a.results), &out)?;
    print_json(&summary)?;
    Ok(ExitCode::SUCCESS)
}
