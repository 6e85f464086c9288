//! The outer loop: construct, local search, then repeatedly relink a fresh
//! randomized greedy solution toward an elite one and search again.

mod elite;
mod trace;

use rand::SeedableRng;
use serde::Serialize;
use thiserror::Error;

use crate::clock::{Clock, ClockMode};
use crate::graph::Graph;
use crate::greedy::{construct, GreedyConfig, GreedyMode};
use crate::local_search::{Engine, LocalSearchOutcome, LocalSearchParams, SearchControl};
use crate::lp_bias::RelaxedSolution;
use crate::relink::{path_relink, RelinkParams};
use crate::solution::{find_conflict, Solution};
use crate::SolverRng;

pub use elite::EliteSet;
pub use trace::{
    parse_csv, t_star, weight_at, EventKind, RelinkState, TStarReport, Trace, TraceError, TraceEvent, TracePoint,
    CSV_HEADER,
};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Seconds on the configured clock.
    pub time_limit: f64,
    /// Optional cap on relinking iterations.
    pub max_iterations: Option<u64>,
    pub seed: u64,
    /// Run local search on each randomized greedy solution before relinking.
    pub ls_before_relinking: bool,
    pub elite_capacity: usize,
    pub local_search: LocalSearchParams,
    pub relink: RelinkParams,
    /// Constructor used inside the loop.
    pub greedy: GreedyConfig,
    /// Constructor for the starting solution when none is supplied.
    pub initial_greedy: GreedyMode,
    pub clock: ClockMode,
    pub check_interstate_every: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            time_limit: 10.0,
            max_iterations: None,
            seed: 0,
            ls_before_relinking: false,
            elite_capacity: 1,
            local_search: LocalSearchParams::default(),
            relink: RelinkParams::default(),
            greedy: GreedyConfig::default(),
            initial_greedy: GreedyMode::Adaptive,
            clock: ClockMode::Wall,
            check_interstate_every: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), RunError> {
        let invalid = RunError::InvalidConfig;
        if !(self.time_limit > 0.0) || self.time_limit.is_nan() {
            return Err(invalid("time limit must be positive".into()));
        }
        if self.elite_capacity == 0 {
            return Err(invalid("elite set capacity must be at least 1".into()));
        }
        if let ClockMode::Work { units_per_second } = self.clock {
            if !(units_per_second > 0.0 && units_per_second.is_finite()) {
                return Err(invalid("work rate must be positive".into()));
            }
        }
        self.local_search.validate().map_err(invalid)?;
        self.relink.validate().map_err(invalid)?;
        self.greedy.validate().map_err(invalid)?;
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("initial solution is not independent: edge ({0}, {1})")]
    InfeasibleInitial(usize, usize),
    #[error("initial solution has {found} nodes, graph has {expected}")]
    SizeMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub best: Solution,
    pub trace: Trace,
    pub iterations: u64,
    pub stagnations: u64,
    pub improvements: u64,
    pub elapsed: f64,
}

/// Solves `g` under `cfg`. `initial` replaces the adaptive greedy start;
/// `bias` steers perturbations.
pub fn run(
    g: &Graph,
    cfg: &RunConfig,
    initial: Option<Solution>,
    bias: Option<&RelaxedSolution>,
) -> Result<RunResult, RunError> {
    cfg.validate()?;
    if let Some(s) = &initial {
        if s.node_count() != g.node_count() {
            return Err(RunError::SizeMismatch {
                expected: g.node_count(),
                found: s.node_count(),
            });
        }
        if let Some((u, v)) = find_conflict(g, s) {
            return Err(RunError::InfeasibleInitial(u, v));
        }
    }

    let mut rng = SolverRng::seed_from_u64(cfg.seed);
    let mut clock = Clock::start(cfg.clock);
    let deadline = Some(cfg.time_limit);
    let mut relink = cfg.relink.clone();
    relink.reset();
    let mut trace = Trace::new();
    let graph_work = (g.node_count() + 2 * g.edge_count()) as u64;

    let start = match initial {
        Some(s) => s,
        None => {
            let initial_cfg = GreedyConfig {
                mode: cfg.initial_greedy,
                ..cfg.greedy
            };
            clock.charge(graph_work);
            construct(g, &initial_cfg, &mut rng)
        }
    };
    trace.push(clock.elapsed(), start.weight(), EventKind::Init, None);

    let first = search(g, start, cfg, &mut rng, &mut clock, None, bias);
    let mut best = first.best;
    let mut elite = EliteSet::new(cfg.elite_capacity);
    elite.try_add_and_evict(&best);
    trace.push(clock.elapsed(), best.weight(), EventKind::LocalSearch, None);

    let (mut iterations, mut stagnations, mut improvements) = (0u64, 0u64, 0u64);
    while !clock.expired(deadline) && cfg.max_iterations.is_none_or(|cap| iterations < cap) {
        iterations += 1;
        clock.charge(graph_work);
        let mut greedy = construct(g, &cfg.greedy, &mut rng);
        if cfg.ls_before_relinking {
            greedy = search(g, greedy, cfg, &mut rng, &mut clock, None, bias).best;
        }
        let anchor = elite.random(&mut rng).clone();
        let walk = path_relink(g, &greedy, &anchor, &relink, &mut rng);
        clock.charge(graph_work + (walk.steps as u64 + 1) * greedy.symmetric_difference_len(&anchor) as u64);

        let outcome = search(g, walk.solution, cfg, &mut rng, &mut clock, Some(&anchor), bias);
        let candidate = outcome.best;
        if !outcome.timed_out {
            elite.try_add_and_evict(&candidate);
        }
        let kind = if candidate.weight() > best.weight() {
            best = candidate;
            relink.reset();
            improvements += 1;
            EventKind::Improve
        } else if candidate.weight() == best.weight() {
            relink.on_stagnation();
            stagnations += 1;
            EventKind::Stagnate
        } else {
            relink.reset();
            EventKind::Relink
        };
        let state = RelinkState {
            f: relink.f(),
            c_n: relink.c_n(),
            c_p: relink.c_p(),
        };
        trace.push(clock.elapsed(), best.weight(), kind, Some(state));
    }

    let elapsed = clock.elapsed();
    trace.push(elapsed, best.weight(), EventKind::Final, None);
    Ok(RunResult {
        best,
        trace,
        iterations,
        stagnations,
        improvements,
        elapsed,
    })
}

fn search(
    g: &Graph,
    s: Solution,
    cfg: &RunConfig,
    rng: &mut SolverRng,
    clock: &mut Clock,
    reference: Option<&Solution>,
    bias: Option<&RelaxedSolution>,
) -> LocalSearchOutcome {
    let mut engine = Engine::new(g, s, cfg.local_search.clone()).expect("search starts from an independent set");
    engine.check_interstate_every(cfg.check_interstate_every);
    let mut ctl = SearchControl {
        clock: Some(clock),
        deadline: Some(cfg.time_limit),
        reference,
        bias,
    };
    engine.run(rng, &mut ctl)
}

/// Final JSON summary of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub schema: u32,
    pub best_weight: f64,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub time_limit: f64,
    pub w_at_10pct: Option<f64>,
    pub w_at_50pct: Option<f64>,
    pub t_star_definition_note: &'static str,
    pub iterations: u64,
    pub improvements: u64,
    pub stagnations: u64,
    pub elapsed_s: f64,
    pub clock: &'static str,
    pub solution_size: usize,
}

pub const T_STAR_NOTE: &str = "t* is a cross-run statistic: with s the smallest final value over all runs \
(or a given threshold), t* is the earliest time the run with the best final value reaches s; compute it \
with `mwis report` over the trace files";

impl Summary {
    pub fn new(g: &Graph, cfg: &RunConfig, result: &RunResult) -> Self {
        let points = result.trace.points();
        Summary {
            schema: 1,
            best_weight: result.best.weight(),
            n: g.node_count(),
            m: g.edge_count(),
            seed: cfg.seed,
            time_limit: cfg.time_limit,
            w_at_10pct: weight_at(&points, 0.1 * cfg.time_limit),
            w_at_50pct: weight_at(&points, 0.5 * cfg.time_limit),
            t_star_definition_note: T_STAR_NOTE,
            iterations: result.iterations,
            improvements: result.improvements,
            stagnations: result.stagnations,
            elapsed_s: result.elapsed,
            clock: match cfg.clock {
                ClockMode::Wall => "wall",
                ClockMode::Work { .. } => "work",
            },
            solution_size: result.best.len(),
        }
    }
}
