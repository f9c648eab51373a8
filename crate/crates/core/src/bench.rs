//! Uniform algorithm dispatch, run records and the benchmark-suite runner.

use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::density::{self, Density, DensityError, PExponent};
use crate::frank_wolfe::{self, FwError, FwOptions};
use crate::graph::{Graph, VertexSet};
use crate::iterative::{self, Inner};
use crate::oracle::{self, OracleError};
use crate::par::Exec;
use crate::peeling::{self, Guarantee, PeelError};

/// Default pass count for the iterated peelers.
pub const DEFAULT_PEEL_ITERATIONS: usize = 100;
/// Default Frank-Wolfe iteration count.
pub const DEFAULT_FW_ITERATIONS: usize = 500;
/// Environment variable capping benchmark worker threads.
pub const THREADS_ENV: &str = "PMDSG_THREADS";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error("unknown algorithm {0:?}")]
    UnknownAlgorithm(String),
    #[error("{algorithm} does not accept p = {p}: {reason}")]
    InvalidExponent { algorithm: Algorithm, p: String, reason: &'static str },
    #[error(transparent)]
    Peel(#[from] PeelError),
    #[error(transparent)]
    FrankWolfe(#[from] FwError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Density(#[from] DensityError),
}

impl RunError {
    /// True for errors caused by a bad parameter choice rather than the data.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            RunError::UnknownAlgorithm(_)
                | RunError::InvalidExponent { .. }
                | RunError::Peel(
                    PeelError::InvalidExponent(_) | PeelError::InvalidEps(_) | PeelError::InvalidIterations
                )
                | RunError::FrankWolfe(FwError::InvalidExponent(_) | FwError::InvalidIterations)
                | RunError::Density(DensityError::ZeroExponent | DensityError::InvalidExponent(_))
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Algorithm {
    #[serde(rename = "greedy-p")]
    GreedyP,
    #[serde(rename = "lazy")]
    Lazy,
    #[serde(rename = "simple")]
    Simple,
    #[serde(rename = "greedypp")]
    GreedyPP,
    #[serde(rename = "lazypp")]
    LazyPP,
    #[serde(rename = "simplepp")]
    SimplePP,
    #[serde(rename = "fw")]
    FrankWolfe,
    #[serde(rename = "oracle")]
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::GreedyP,
        Algorithm::Lazy,
        Algorithm::Simple,
        Algorithm::GreedyPP,
        Algorithm::LazyPP,
        Algorithm::SimplePP,
        Algorithm::FrankWolfe,
        Algorithm::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::GreedyP => "greedy-p",
            Algorithm::Lazy => "lazy",
            Algorithm::Simple => "simple",
            Algorithm::GreedyPP => "greedypp",
            Algorithm::LazyPP => "lazypp",
            Algorithm::SimplePP => "simplepp",
            Algorithm::FrankWolfe => "fw",
            Algorithm::Oracle => "oracle",
        }
    }

    pub fn uses_eps(self) -> bool {
        matches!(self, Algorithm::Lazy | Algorithm::LazyPP)
    }

    pub fn is_iterative(self) -> bool {
        matches!(self, Algorithm::GreedyPP | Algorithm::LazyPP | Algorithm::SimplePP | Algorithm::FrankWolfe)
    }

    pub fn default_iterations(self) -> Option<usize> {
        match self {
            Algorithm::FrankWolfe => Some(DEFAULT_FW_ITERATIONS),
            a if a.is_iterative() => Some(DEFAULT_PEEL_ITERATIONS),
            _ => None,
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Algorithm, RunError> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| RunError::UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub p: PExponent,
    pub eps: f64,
    /// Pass count for iterative algorithms; `None` uses the default.
    pub iterations: Option<usize>,
    pub oracle_limit: usize,
    pub exec: Exec,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, p: PExponent) -> RunConfig {
        RunConfig {
            algorithm,
            p,
            eps: 0.5,
            iterations: None,
            oracle_limit: oracle::DEFAULT_LIMIT,
            exec: Exec::Parallel,
        }
    }

    pub fn effective_iterations(&self) -> Option<usize> {
        self.iterations.or(self.algorithm.default_iterations()).filter(|_| self.algorithm.is_iterative())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub iteration: usize,
    pub density: Option<f64>,
    pub cumulative_ms: f64,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub best_set: VertexSet,
    pub best_density: Density,
    pub guarantee: Option<Guarantee>,
    pub trajectory: Option<Vec<TrajectoryRow>>,
    pub elapsed: Duration,
}

fn require_finite_positive(cfg: &RunConfig, min: f64, reason: &'static str) -> Result<f64, RunError> {
    let p = cfg.p.value();
    if p.is_finite() && p >= min && p > 0.0 {
        Ok(p)
    } else {
        Err(RunError::InvalidExponent { algorithm: cfg.algorithm, p: cfg.p.to_string(), reason })
    }
}

fn trajectory_rows(points: &[iterative::TrajectoryPoint]) -> Vec<TrajectoryRow> {
    points
        .iter()
        .map(|t| TrajectoryRow {
            iteration: t.iteration,
            density: t.best_density,
            cumulative_ms: t.cumulative_seconds * 1e3,
        })
        .collect()
}

/// Runs `cfg.algorithm` once per exponent, ignoring `cfg.p`. Simple++ builds
/// its orders once and evaluates them for every exponent, so each outcome
/// reports the shared wall time.
pub fn run_exponents(g: &Graph, cfg: &RunConfig, ps: &[PExponent]) -> Result<Vec<RunOutcome>, RunError> {
    if cfg.algorithm != Algorithm::SimplePP {
        return ps.iter().map(|&p| run(g, &RunConfig { p, ..cfg.clone() })).collect();
    }
    let start = Instant::now();
    let iters = cfg.effective_iterations().unwrap_or(DEFAULT_PEEL_ITERATIONS);
    let states = iterative::simple_pp(g, iters, ps, cfg.exec)?;
    let elapsed = start.elapsed();
    Ok(states
        .into_iter()
        .map(|s| RunOutcome {
            trajectory: Some(trajectory_rows(&s.trajectory)),
            best_set: s.best.best_set,
            best_density: s.best.best_density,
            guarantee: Some(s.best.guarantee),
            elapsed,
        })
        .collect())
}

/// Runs one algorithm. The elapsed time covers the algorithm only.
pub fn run(g: &Graph, cfg: &RunConfig) -> Result<RunOutcome, RunError> {
    let start = Instant::now();
    let iters = cfg.effective_iterations();
    let (best_set, best_density, guarantee, trajectory) = match cfg.algorithm {
        Algorithm::GreedyP | Algorithm::Lazy => {
            let p = require_finite_positive(cfg, 0.0, "marginal peeling needs a finite p > 0")?;
            let r = if cfg.algorithm == Algorithm::GreedyP {
                peeling::greedy_p(g, p)?
            } else {
                peeling::lazy_greedy_p(g, p, cfg.eps)?
            };
            (r.best_set, r.best_density, Some(r.guarantee), None)
        }
        Algorithm::Simple => {
            let r = peeling::simple_greedy_p(g, cfg.p)?;
            (r.best_set, r.best_density, Some(r.guarantee), None)
        }
        Algorithm::GreedyPP | Algorithm::LazyPP => {
            let p = require_finite_positive(cfg, 0.0, "marginal peeling needs a finite p > 0")?;
            let inner = if cfg.algorithm == Algorithm::GreedyPP { Inner::Exact } else { Inner::Lazy { eps: cfg.eps } };
            let s = iterative::greedy_pp(g, p, iters.unwrap_or(DEFAULT_PEEL_ITERATIONS), inner)?;
            let rows = trajectory_rows(&s.trajectory);
            (s.best.best_set, s.best.best_density, Some(s.best.guarantee), Some(rows))
        }
        Algorithm::SimplePP => {
            let mut states = iterative::simple_pp(g, iters.unwrap_or(DEFAULT_PEEL_ITERATIONS), &[cfg.p], cfg.exec)?;
            let s = states.pop().expect("one exponent requested");
            let rows = trajectory_rows(&s.trajectory);
            (s.best.best_set, s.best.best_density, Some(s.best.guarantee), Some(rows))
        }
        Algorithm::FrankWolfe => {
            let p = require_finite_positive(cfg, 1.0, "frank-wolfe needs a finite p >= 1")?;
            let opts = FwOptions { iterations: iters.unwrap_or(DEFAULT_FW_ITERATIONS), round_every: 1 };
            let s = frank_wolfe::frank_wolfe_with(g, p, &opts, |_, _| {})?;
            let rows = s
                .rounding_trace
                .iter()
                .scan(None::<f64>, |best, r| {
                    if let Some(x) = r.density {
                        *best = Some(best.map_or(x, |b: f64| b.max(x)));
                    }
                    Some(TrajectoryRow {
                        iteration: r.iteration,
                        density: *best,
                        cumulative_ms: r.cumulative_seconds * 1e3,
                    })
                })
                .collect();
            (s.rounded.best_set, s.rounded.best_density, None, Some(rows))
        }
        Algorithm::Oracle => {
            let r = oracle::brute_force_opt(g, cfg.p, cfg.oracle_limit, cfg.exec)?;
            (r.best_set, r.best_density, Some(Guarantee::Approximation { factor: 1.0 }), None)
        }
    };
    let elapsed = start.elapsed();
    Ok(RunOutcome { best_set, best_density, guarantee, trajectory, elapsed })
}

/// Serialized result of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub algorithm: String,
    /// Exponent as text so that `inf` and `-inf` survive JSON.
    pub p: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    pub graph: String,
    /// `null` when no subset has a defined density.
    pub best_density: Option<f64>,
    pub best_set_size: usize,
    pub wall_ms: u64,
    /// Approximation factor or `heuristic`; `null` when the method carries
    /// no per-run guarantee.
    pub guarantee: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<TrajectoryRow>>,
    /// Labels of the returned vertices, in increasing id order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_set: Option<Vec<u64>>,
}

impl RunRecord {
    pub fn new(g: &Graph, graph_name: &str, cfg: &RunConfig, outcome: &RunOutcome, emit_set: bool) -> RunRecord {
        RunRecord {
            algorithm: cfg.algorithm.name().to_string(),
            p: cfg.p.to_string(),
            eps: cfg.algorithm.uses_eps().then_some(cfg.eps),
            iterations: cfg.effective_iterations(),
            graph: graph_name.to_string(),
            best_density: outcome.best_density.value(),
            best_set_size: outcome.best_set.len(),
            wall_ms: outcome.elapsed.as_millis() as u64,
            guarantee: outcome.guarantee.map(|g| match g {
                Guarantee::Approximation { factor } => format!("{factor}"),
                Guarantee::Heuristic => "heuristic".to_string(),
            }),
            seed: None,
            trajectory: outcome.trajectory.clone(),
            best_set: emit_set.then(|| outcome.best_set.iter().map(|v| g.label(v)).collect()),
        }
    }
}

/// Recomputes the density of `set` and checks it against `claimed`.
pub fn verify_density(g: &Graph, set: &VertexSet, p: PExponent, claimed: Density) -> Result<bool, DensityError> {
    if set.is_empty() {
        return Ok(!claimed.is_defined());
    }
    let fresh = density::m_p(g, set, p)?;
    Ok(match (fresh, claimed) {
        (Density::Defined(a), Density::Defined(b)) => (a - b).abs() <= 1e-9 * a.abs().max(1.0),
        (Density::Undefined, Density::Undefined) => true,
        _ => false,
    })
}

/// One benchmark cell result, flattened for CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub graph: String,
    pub n: usize,
    pub m: usize,
    pub algorithm: String,
    pub p: String,
    pub eps: Option<f64>,
    pub iterations: Option<usize>,
    pub best_density: Option<f64>,
    pub best_set_size: usize,
    pub wall_ms: u64,
    pub guarantee: Option<String>,
    pub seed: u64,
    /// Present for failed cells (e.g. an algorithm outside its domain).
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct BenchPlan {
    pub graphs: Vec<(String, Graph)>,
    pub algorithms: Vec<Algorithm>,
    pub ps: Vec<PExponent>,
    pub eps: f64,
    pub iterations: Option<usize>,
    pub seed: u64,
    pub exec: Exec,
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.parse().ok().filter(|&t: &usize| t > 0)
}

/// Runs every `(graph, algorithm, p)` cell. Cells run concurrently under
/// `Exec::Parallel` (capped by [`THREADS_ENV`]); each cell runs
/// single-threaded. Rows come back in plan order.
pub fn run_bench(plan: &BenchPlan) -> Vec<BenchRow> {
    let cells: Vec<(usize, Algorithm, PExponent)> = (0..plan.graphs.len())
        .flat_map(|gi| plan.algorithms.iter().flat_map(move |&a| plan.ps.iter().map(move |&p| (gi, a, p))))
        .collect();
    let cell = |&(gi, algorithm, p): &(usize, Algorithm, PExponent)| {
        let (name, g) = &plan.graphs[gi];
        let cfg = RunConfig {
            algorithm,
            p,
            eps: plan.eps,
            iterations: plan.iterations,
            oracle_limit: oracle::DEFAULT_LIMIT,
            exec: Exec::Sequential,
        };
        let base = BenchRow {
            graph: name.clone(),
            n: g.n(),
            m: g.m(),
            algorithm: algorithm.name().to_string(),
            p: p.to_string(),
            eps: algorithm.uses_eps().then_some(plan.eps),
            iterations: cfg.effective_iterations(),
            best_density: None,
            best_set_size: 0,
            wall_ms: 0,
            guarantee: None,
            seed: plan.seed,
            error: None,
        };
        match run(g, &cfg) {
            Ok(out) => {
                let rec = RunRecord::new(g, name, &cfg, &out, false);
                BenchRow {
                    best_density: rec.best_density,
                    best_set_size: rec.best_set_size,
                    wall_ms: rec.wall_ms,
                    guarantee: rec.guarantee,
                    ..base
                }
            }
            Err(e) => BenchRow { error: Some(e.to_string()), ..base },
        }
    };
    run_cells(plan.exec, &cells, cell)
}

#[cfg(feature = "parallel")]
fn run_cells<T: Sync, R: Send, F: Fn(&T) -> R + Sync + Send>(exec: Exec, cells: &[T], f: F) -> Vec<R> {
    if exec.is_parallel() {
        if let Some(t) = thread_cap() {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(t).build() {
                return pool.install(|| exec.map(cells, f));
            }
        }
    }
    exec.map(cells, f)
}

#[cfg(not(feature = "parallel"))]
fn run_cells<T: Sync, R: Send, F: Fn(&T) -> R + Sync + Send>(exec: Exec, cells: &[T], f: F) -> Vec<R> {
    exec.map(cells, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{clique, disjoint_union, path, SuiteSpec};

    fn pe(x: f64) -> PExponent {
        PExponent::new(x).unwrap()
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!(matches!("nope".parse::<Algorithm>(), Err(RunError::UnknownAlgorithm(_))));
    }

    #[test]
    fn simple_on_clique_and_path() {
        let g = disjoint_union(&[clique(4).unwrap(), path(3).unwrap()]);
        let out = run(&g, &RunConfig::new(Algorithm::Simple, pe(0.5))).unwrap();
        assert!((out.best_density.value().unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(out.best_set.len(), 4);
        assert!(verify_density(&g, &out.best_set, pe(0.5), out.best_density).unwrap());
    }

    #[test]
    fn domain_errors_are_usage_errors() {
        let g = path(3).unwrap();
        for a in [Algorithm::GreedyP, Algorithm::Lazy, Algorithm::GreedyPP, Algorithm::FrankWolfe] {
            let e = run(&g, &RunConfig::new(a, pe(-1.0))).unwrap_err();
            assert!(e.is_usage(), "{a}: {e}");
        }
        let e = run(&g, &RunConfig::new(Algorithm::FrankWolfe, pe(0.5))).unwrap_err();
        assert!(e.is_usage());
    }

    #[test]
    fn record_serialization() {
        let g = clique(3).unwrap();
        let cfg = RunConfig { iterations: Some(3), ..RunConfig::new(Algorithm::GreedyPP, pe(2.0)) };
        let out = run(&g, &cfg).unwrap();
        let rec = RunRecord::new(&g, "k3.txt", &cfg, &out, true);
        let json = serde_json::to_value(&rec).unwrap();
        assert_eq!(json["algorithm"], "greedypp");
        assert_eq!(json["p"], "2");
        assert_eq!(json["iterations"], 3);
        assert_eq!(json["best_set"], serde_json::json!([0, 1, 2]));
        assert_eq!(json["trajectory"].as_array().unwrap().len(), 3);
        assert!(json.get("eps").is_none());
        let inf = RunRecord::new(&g, "k3", &RunConfig::new(Algorithm::Simple, PExponent::NEG_INFINITY), &out, false);
        assert_eq!(serde_json::to_value(&inf).unwrap()["p"], "-inf");
    }

    #[test]
    fn bench_rows_respect_oracle() {
        let graphs: Vec<(String, Graph)> = SuiteSpec { count: 6, ..Default::default() }
            .build()
            .into_iter()
            .enumerate()
            .map(|(i, g)| (format!("suite-{i}"), g))
            .collect();
        let plan = BenchPlan {
            graphs,
            algorithms: vec![Algorithm::Simple, Algorithm::GreedyP, Algorithm::Oracle],
            ps: vec![pe(1.5), pe(0.5)],
            eps: 0.5,
            iterations: None,
            seed: 2023,
            exec: Exec::Parallel,
        };
        let rows = run_bench(&plan);
        assert_eq!(rows.len(), 6 * 3 * 2);
        let seq = run_bench(&BenchPlan { exec: Exec::Sequential, ..plan.clone() });
        let strip = |r: &BenchRow| (r.graph.clone(), r.algorithm.clone(), r.p.clone(), r.best_density);
        assert_eq!(rows.iter().map(strip).collect::<Vec<_>>(), seq.iter().map(strip).collect::<Vec<_>>());
        for r in &rows {
            let oracle = rows
                .iter()
                .find(|o| o.algorithm == "oracle" && o.graph == r.graph && o.p == r.p)
                .and_then(|o| o.best_density)
                .unwrap();
            if let Some(x) = r.best_density {
                assert!(x <= oracle + 1e-9);
            }
        }
    }
}
