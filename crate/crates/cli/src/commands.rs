use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use pmdsg::bench::{self, Algorithm, BenchPlan, RunConfig, RunOutcome, RunRecord};
use pmdsg::constructions::{self, Regime, X3CInstance};
use pmdsg::generators::SuiteSpec;
use pmdsg::{load_edge_list, Exec, Graph, PExponent};
use serde::Serialize;

use crate::error::CliError;
use crate::{
    BenchArgs, CurveArgs, FwArgs, GadgetArgs, GraphInput, IterateArgs, OracleArgs, PeelArgs, RecordOutput, ScanArgs,
};

fn load_graph(path: &Path, weighted: bool) -> Result<Graph, CliError> {
    let file = File::open(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    load_edge_list(BufReader::new(file), weighted)
        .map_err(|source| CliError::Graph { path: path.to_path_buf(), source })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Writes to `path`, or to standard output when `None`.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes).and_then(|()| out.flush()).map_err(CliError::Stdout)
        }
    }
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| CliError::Stdout(e.into_error()))
}

fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn graph_name(input: &GraphInput) -> String {
    input.input.display().to_string()
}

/// Runs `cfg` on the input graph and writes its record. Loading time is not
/// part of `wall_ms`.
fn run_single(
    cfg: &RunConfig,
    input: &GraphInput,
    out: &RecordOutput,
    trajectory: Option<&PathBuf>,
) -> Result<(), CliError> {
    let g = load_graph(&input.input, input.weighted)?;
    let outcome = bench::run(&g, cfg)?;
    let record = RunRecord::new(&g, &graph_name(input), cfg, &outcome, out.emit_set);
    write_trajectory(trajectory, std::slice::from_ref(&record))?;
    emit(out.output.as_deref(), &json_bytes(&record)?)
}

#[derive(Serialize)]
struct TrajectoryCsvRow<'a> {
    p: &'a str,
    iteration: usize,
    density: Option<f64>,
    cumulative_ms: f64,
}

fn write_trajectory(path: Option<&PathBuf>, records: &[RunRecord]) -> Result<(), CliError> {
    let Some(path) = path else { return Ok(()) };
    let rows = records.iter().flat_map(|r| {
        r.trajectory.iter().flatten().map(|t| TrajectoryCsvRow {
            p: &r.p,
            iteration: t.iteration,
            density: t.density,
            cumulative_ms: t.cumulative_ms,
        })
    });
    write_file(path, &csv_bytes(rows)?)
}

pub fn peel(args: PeelArgs) -> Result<(), CliError> {
    let cfg = RunConfig { eps: args.eps, ..RunConfig::new(args.algo.into(), args.p) };
    run_single(&cfg, &args.graph, &args.out, None)
}

pub fn iterate(args: IterateArgs) -> Result<(), CliError> {
    let ps: Vec<PExponent> = args.p.into_iter().chain(args.ps.iter().copied()).collect();
    if ps.is_empty() {
        return Err(CliError::Usage("one of --p or --ps is required".into()));
    }
    let algorithm: Algorithm = args.algo.into();
    let cfg = RunConfig {
        eps: args.eps,
        iterations: Some(args.iters),
        exec: if args.sequential { Exec::Sequential } else { Exec::Parallel },
        ..RunConfig::new(algorithm, ps[0])
    };
    let g = load_graph(&args.graph.input, args.graph.weighted)?;
    let outcomes: Vec<RunOutcome> = bench::run_exponents(&g, &cfg, &ps)?;
    let name = graph_name(&args.graph);
    let records: Vec<RunRecord> = ps
        .iter()
        .zip(&outcomes)
        .map(|(&p, o)| RunRecord::new(&g, &name, &RunConfig { p, ..cfg.clone() }, o, args.out.emit_set))
        .collect();
    write_trajectory(args.trajectory.as_ref(), &records)?;
    let bytes = match records.as_slice() {
        [single] => json_bytes(single)?,
        many => json_bytes(many)?,
    };
    emit(args.out.output.as_deref(), &bytes)
}

pub fn fw(args: FwArgs) -> Result<(), CliError> {
    let cfg = RunConfig { iterations: Some(args.iters), ..RunConfig::new(Algorithm::FrankWolfe, args.p) };
    run_single(&cfg, &args.graph, &args.out, args.trajectory.as_ref())
}

pub fn oracle(args: OracleArgs) -> Result<(), CliError> {
    let cfg = RunConfig {
        oracle_limit: args.limit,
        exec: if args.sequential { Exec::Sequential } else { Exec::Parallel },
        ..RunConfig::new(Algorithm::Oracle, args.p)
    };
    run_single(&cfg, &args.graph, &args.out, None)
}

#[derive(Serialize)]
struct GadgetSummary {
    instance: String,
    p: f64,
    d: f64,
    rho_star: f64,
    regime: String,
    direction: constructions::Direction,
    weighted: bool,
    vertices: usize,
    edges: usize,
    /// Half-open id range of the set vertices.
    set_vertices: [usize; 2],
    /// Half-open id range of the element vertices.
    element_vertices: [usize; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    decision: Option<DecisionSummary>,
}

#[derive(Serialize)]
struct DecisionSummary {
    answer: bool,
    optimum_rho: f64,
    best_set: Vec<usize>,
}

pub fn gadget(args: GadgetArgs) -> Result<(), CliError> {
    let inst = X3CInstance::parse(&read_text(&args.instance)?)?;
    let spec = constructions::x3c_gadget(&inst, args.p, args.weighted)?;
    let decision = if args.decide {
        let d = constructions::decide_gadget(&spec, args.limit)?;
        Some(DecisionSummary { answer: d.answer, optimum_rho: d.optimum_rho, best_set: d.best_set.to_vec() })
    } else {
        None
    };
    let summary = GadgetSummary {
        instance: args.instance.display().to_string(),
        p: spec.p,
        d: spec.d,
        rho_star: spec.rho_star,
        regime: spec.regime.to_string(),
        direction: spec.direction,
        weighted: spec.regime.is_weighted(),
        vertices: spec.graph.n(),
        edges: spec.graph.m(),
        set_vertices: [spec.set_vertices.start, spec.set_vertices.end],
        element_vertices: [spec.element_vertices.start, spec.element_vertices.end],
        decision,
    };
    write_file(&args.edges, spec.graph.to_edge_list().as_bytes())?;
    write_file(&args.spec, &json_bytes(&summary)?)
}

#[derive(Serialize)]
struct ScanCsvRow {
    regime: String,
    p: f64,
    d: f64,
    f1: f64,
    f2: f64,
    ok: bool,
}

pub fn scan(args: ScanArgs) -> Result<(), CliError> {
    let regimes: Vec<Regime> = args.regime.map_or(Regime::ALL.to_vec(), |r| vec![r]);
    let mut rows = Vec::new();
    for regime in regimes {
        let grid = if args.grid.is_empty() { regime.grid(args.points) } else { args.grid.clone() };
        for r in constructions::scan_inequalities(regime, &grid)? {
            rows.push(ScanCsvRow { regime: r.regime.to_string(), p: r.p, d: r.d, f1: r.f1, f2: r.f2, ok: r.ok });
        }
    }
    emit(args.output.as_deref(), &csv_bytes(rows)?)
}

#[derive(Serialize)]
struct CurveCsvRow {
    alpha: f64,
    density: f64,
}

pub fn curve(args: CurveArgs) -> Result<(), CliError> {
    let d = match args.d {
        Some(d) => d,
        None => Regime::for_p(args.p, true)?.d(args.p),
    };
    let grid = if args.grid.is_empty() {
        if args.points < 2 {
            return Err(CliError::Usage("--points must be at least 2".into()));
        }
        (0..args.points).map(|i| args.max * i as f64 / (args.points - 1) as f64).collect()
    } else {
        args.grid.clone()
    };
    let curve = constructions::gadget_density_curve(args.p, d, &grid)?;
    let rows = curve.rows.iter().map(|&(alpha, density)| CurveCsvRow { alpha, density });
    emit(args.output.as_deref(), &csv_bytes(rows)?)?;
    eprintln!("extremum at alpha = 1 over this grid: {}", curve.extremum_at_one);
    Ok(())
}

pub fn bench(args: BenchArgs) -> Result<(), CliError> {
    let graphs: Vec<(String, Graph)> = if args.input.is_empty() {
        if args.min_n == 0 || args.min_n > args.max_n {
            return Err(CliError::Usage(format!("empty suite size range {}..={}", args.min_n, args.max_n)));
        }
        let suite = SuiteSpec {
            seed: args.seed,
            count: args.count,
            min_n: args.min_n,
            max_n: args.max_n,
            ..Default::default()
        };
        suite.build().into_iter().enumerate().map(|(i, g)| (format!("suite-{}-{i}", args.seed), g)).collect()
    } else {
        args.input
            .iter()
            .map(|p| Ok((p.display().to_string(), load_graph(p, args.weighted)?)))
            .collect::<Result<_, CliError>>()?
    };
    let plan = BenchPlan {
        graphs,
        algorithms: args.algos,
        ps: args.ps,
        eps: args.eps,
        iterations: args.iters,
        seed: args.seed,
        exec: if args.sequential { Exec::Sequential } else { Exec::Parallel },
    };
    let rows = bench::run_bench(&plan);
    emit(args.output.as_deref(), &csv_bytes(rows)?)
}
