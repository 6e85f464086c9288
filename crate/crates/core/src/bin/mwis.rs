use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use mwis::clock::{ClockMode, DEFAULT_WORK_RATE};
use mwis::driver::{self, parse_csv, t_star, RunConfig, RunError, Summary};
use mwis::generate::{GenSpec, Model, WeightRule};
use mwis::greedy::{GreedyConfig, GreedyMode};
use mwis::local_search::LocalSearchParams;
use mwis::lp_bias::{RelaxedSolution, DEFAULT_EPSILON};
use mwis::oracle::exact_mwis;
use mwis::relink::{BudgetMode, RelinkParams};
use mwis::solution::SolutionError;
use mwis::{Graph, GraphFormat, Solution};

#[derive(Parser)]
#[command(name = "mwis", version, about = "Maximum-weight independent set solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print a JSON summary.
    Solve(Box<SolveArgs>),
    /// Write a synthetic instance in edge-list format.
    Generate(GenerateArgs),
    /// Solve a small instance (n ≤ 30) exactly.
    Exact(ExactArgs),
    /// Compute t* and final values across trace files.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ClockArg {
    Wall,
    Work,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "edge-list")]
    format: GraphFormat,
    /// Seconds per run.
    #[arg(long, default_value_t = 10.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0, conflicts_with = "seeds")]
    seed: u64,
    /// Comma-separated seeds, run concurrently.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    /// Starting solution (one node ID per line).
    #[arg(long)]
    initial: Option<PathBuf>,
    /// Relaxed LP values biasing perturbations.
    #[arg(long)]
    relaxed: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    lp_epsilon: f64,
    /// Trace CSV path; with several seeds `.seedN` is inserted before the extension.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the best solution here (same suffix rule as --trace).
    #[arg(long)]
    solution_out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    elite_size: usize,
    #[arg(long)]
    ls_before_relinking: bool,
    /// Constructor used inside the relinking loop.
    #[arg(long, default_value = "randomized")]
    greedy_mode: GreedyMode,
    /// Constructor for the starting solution.
    #[arg(long, default_value = "adaptive")]
    initial_greedy: GreedyMode,
    #[arg(long, default_value_t = 0.10)]
    greedy_k_fraction: f64,
    /// Non-improving local-search iterations before it returns.
    #[arg(long, default_value_t = 64)]
    iterations: usize,
    #[arg(long, default_value_t = 7)]
    exact_recursion_limit: usize,
    #[arg(long, default_value_t = 32)]
    aap_max_len: usize,
    /// Default: −10 × mean node weight.
    #[arg(long, allow_negative_numbers = true)]
    aap_gain_floor: Option<f64>,
    #[arg(long, default_value_t = 50.0)]
    aap_delta: f64,
    #[arg(long, default_value_t = 1)]
    perturb_count: usize,
    #[arg(long, default_value_t = 0.9998)]
    relink_f0: f64,
    #[arg(long, default_value_t = 1.0)]
    relink_cn0: f64,
    #[arg(long, default_value_t = 0.1)]
    relink_cp0: f64,
    #[arg(long, default_value_t = 0.9998)]
    relink_f_decay: f64,
    #[arg(long, default_value_t = 1.5)]
    relink_budget_growth: f64,
    #[arg(long, default_value = "absolute")]
    relink_budget_mode: BudgetMode,
    /// Cap on relinking iterations.
    #[arg(long)]
    max_iterations: Option<u64>,
    /// `work` measures time in work units for reproducible traces.
    #[arg(long, value_enum, default_value = "wall")]
    clock: ClockArg,
    #[arg(long, default_value_t = DEFAULT_WORK_RATE)]
    work_rate: f64,
    /// Verify the interstate structure against a rebuild every N moves.
    #[arg(long)]
    check_interstate_every: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Gnp,
    Path,
    Cycle,
    Star,
    Grid,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    rows: usize,
    #[arg(long, default_value_t = 0)]
    cols: usize,
    /// `uniform:LO:HI` or `id-mod[:C]`.
    #[arg(long, default_value = "uniform:1:200")]
    weights: WeightRule,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "edge-list")]
    format: GraphFormat,
}

#[derive(Args)]
struct ReportArgs {
    /// Target value s; defaults to the smallest final value.
    #[arg(long)]
    threshold: Option<f64>,
    /// Time limit T of the runs, for the T/10 and T/2 columns.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(required = true)]
    traces: Vec<PathBuf>,
}

/// Exit code with a message for stderr.
struct Failure(u8, String);

impl Failure {
    fn input(msg: impl std::fmt::Display) -> Self {
        Failure(1, msg.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Solve(args) => solve(&args),
        Command::Generate(args) => generate(&args),
        Command::Exact(args) => exact(&args),
        Command::Report(args) => report(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("mwis: {msg}");
            ExitCode::from(code)
        }
    }
}

fn load_graph(path: &Path, format: GraphFormat) -> Result<Graph, Failure> {
    Graph::load(path, format)
        .map(|(g, _)| g)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn print_json(value: &serde_json::Value) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::input(e.to_string()))?;
    writeln!(out).map_err(|e| Failure::input(e.to_string()))
}

fn seeded_path(path: &Path, seed: u64, many: bool) -> PathBuf {
    if !many {
        return path.to_path_buf();
    }
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.seed{seed}.{}", ext.to_string_lossy()),
        None => format!("{stem}.seed{seed}"),
    };
    path.with_file_name(name)
}

fn solve(args: &SolveArgs) -> Result<(), Failure> {
    let g = load_graph(&args.graph, args.format)?;
    let initial = match &args.initial {
        Some(path) => match Solution::load(path, &g) {
            Ok(s) => Some(s),
            Err(e @ SolutionError::NotIndependent(..)) => {
                return Err(Failure(2, format!("{}: {e}", path.display())))
            }
            Err(e) => return Err(Failure::input(format!("{}: {e}", path.display()))),
        },
        None => None,
    };
    let bias = match &args.relaxed {
        Some(path) => {
            let (bias, clamped) = RelaxedSolution::load(path, &g, args.lp_epsilon)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            if clamped > 0 {
                log::warn!("clamped {clamped} relaxed values into [0, 1]");
            }
            Some(bias)
        }
        None => None,
    };

    let base = RunConfig {
        time_limit: args.time_limit,
        max_iterations: args.max_iterations,
        seed: args.seed,
        ls_before_relinking: args.ls_before_relinking,
        elite_capacity: args.elite_size,
        local_search: LocalSearchParams {
            num_iterations: args.iterations,
            exact_recursion_limit: args.exact_recursion_limit,
            aap_max_len: args.aap_max_len,
            aap_gain_floor: args.aap_gain_floor,
            aap_delta: args.aap_delta,
            perturb_count: args.perturb_count,
        },
        relink: RelinkParams::new(
            args.relink_f0,
            args.relink_cn0,
            args.relink_cp0,
            args.relink_f_decay,
            args.relink_budget_growth,
            args.relink_budget_mode,
        ),
        greedy: GreedyConfig {
            k_fraction: args.greedy_k_fraction,
            mode: args.greedy_mode,
        },
        initial_greedy: args.initial_greedy,
        clock: match args.clock {
            ClockArg::Wall => ClockMode::Wall,
            ClockArg::Work => ClockMode::Work {
                units_per_second: args.work_rate,
            },
        },
        check_interstate_every: args.check_interstate_every,
    };
    base.validate().map_err(|e| Failure::input(e.to_string()))?;

    let seeds = if args.seeds.is_empty() { vec![args.seed] } else { args.seeds.clone() };
    let many = seeds.len() > 1;
    let runs: Vec<Result<(RunConfig, driver::RunResult), RunError>> = seeds
        .par_iter()
        .map(|&seed| {
            let cfg = RunConfig { seed, ..base.clone() };
            driver::run(&g, &cfg, initial.clone(), bias.as_ref()).map(|r| (cfg, r))
        })
        .collect();

    let mut summaries = Vec::new();
    for run in runs {
        let (cfg, result) = run.map_err(|e| match e {
            RunError::InfeasibleInitial(..) => Failure(2, e.to_string()),
            other => Failure::input(other.to_string()),
        })?;
        if let Some(path) = &args.trace {
            let path = seeded_path(path, cfg.seed, many);
            write_file(&path, |w| result.trace.write_csv(w))?;
        }
        if let Some(path) = &args.solution_out {
            let path = seeded_path(path, cfg.seed, many);
            write_file(&path, |w| result.best.write(w))?;
        }
        summaries.push(Summary::new(&g, &cfg, &result));
    }

    let value = if many {
        let best = summaries.iter().map(|s| s.best_weight).fold(f64::NEG_INFINITY, f64::max);
        json!({ "schema": 1, "best_weight": best, "runs": summaries })
    } else {
        serde_json::to_value(&summaries[0]).expect("summary serializes")
    };
    print_json(&value)
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), Failure> {
    let fail = |e: io::Error| Failure::input(format!("{}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(path).map_err(fail)?);
    body(&mut w).map_err(fail)?;
    w.flush().map_err(fail)
}

fn generate(args: &GenerateArgs) -> Result<(), Failure> {
    let model = match args.model {
        ModelArg::Gnp => Model::Gnp { n: args.n, p: args.p },
        ModelArg::Path => Model::Path { n: args.n },
        ModelArg::Cycle => Model::Cycle { n: args.n },
        ModelArg::Star => Model::Star { n: args.n },
        ModelArg::Grid => Model::Grid {
            rows: args.rows,
            cols: args.cols,
        },
    };
    let spec = GenSpec {
        model,
        weights: args.weights,
        seed: args.seed,
    };
    let g = spec.generate().map_err(Failure::input)?;
    match &args.out {
        Some(path) => write_file(path, |w| g.write_edge_list(w)),
        None => g
            .write_edge_list(BufWriter::new(io::stdout().lock()))
            .map_err(|e| Failure::input(e.to_string())),
    }
}

fn exact(args: &ExactArgs) -> Result<(), Failure> {
    let g = load_graph(&args.graph, args.format)?;
    let r = exact_mwis(&g).map_err(Failure::input)?;
    print_json(&json!({ "weight": r.weight, "witness": r.witness, "explored": r.explored }))
}

fn report(args: &ReportArgs) -> Result<(), Failure> {
    let mut runs = Vec::new();
    for path in &args.traces {
        let file = File::open(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let points = parse_csv(BufReader::new(file)).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        if points.is_empty() {
            return Err(Failure::input(format!("{}: empty trace", path.display())));
        }
        runs.push(points);
    }
    let r = t_star(&runs, args.threshold).ok_or_else(|| Failure::input("no trace rows"))?;
    let per_run: Vec<_> = args
        .traces
        .iter()
        .zip(&runs)
        .map(|(path, points)| {
            let at = |frac: f64| args.time_limit.and_then(|t| driver::weight_at(points, frac * t));
            json!({
                "trace": path.display().to_string(),
                "final_weight": points.last().map(|p| p.best_weight),
                "w_at_10pct": at(0.1),
                "w_at_50pct": at(0.5),
            })
        })
        .collect();
    print_json(&json!({
        "schema": 1,
        "threshold": r.threshold,
        "best_run": args.traces[r.best_run].display().to_string(),
        "best_final_weight": r.best_final_weight,
        "t_star": r.t_star,
        "runs": per_run,
    }))
}
