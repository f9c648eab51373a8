//! Special graph families: exact-3-cover reduction gadgets, degree-sequence
//! realizations of edge-maximal `d`-degenerate graphs, the family on which
//! min-degree peeling is only a 1/2-approximation, and numeric checks of the
//! inequalities the reduction relies on.

use std::ops::Range;

use serde::Serialize;
use thiserror::Error;

use crate::density::{self, Density, DensityError, PExponent};
use crate::generators::{circulant, clique, complete_bipartite, disjoint_union};
use crate::graph::{Graph, GraphBuilder, GraphError, Vertex, VertexSet};
use crate::oracle::{self, OracleError};
use crate::par::Exec;
use crate::peeling::degeneracy_maxcore;

/// Slack granted toward `true` when comparing an optimum against `ρ*`.
pub const DECISION_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("invalid exact-cover instance: {0}")]
    InvalidInstance(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("p = {p} lies outside the {regime} interval ({lo}, {hi})")]
    OutOfRegime { p: f64, regime: Regime, lo: f64, hi: f64 },
    #[error("no reduction regime covers p = {p} ({kind})")]
    NoRegime { p: f64, kind: &'static str },
    #[error("the unweighted reduction needs an even n, got n = {0}")]
    OddUnweighted(usize),
    #[error("degree-sequence construction failed: {0}")]
    DegreeSequence(String),
    #[error("grid value {0} outside [0, 10]")]
    GridOutOfRange(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Density(#[from] DensityError),
}

/// A family of 3-element subsets of the ground set `0..3n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct X3CInstance {
    pub n: usize,
    pub sets: Vec<[usize; 3]>,
}

impl X3CInstance {
    pub fn new(n: usize, sets: Vec<[usize; 3]>) -> Result<X3CInstance, ConstructionError> {
        let inst = X3CInstance { n, sets };
        inst.validate()?;
        Ok(inst)
    }

    pub fn ground_size(&self) -> usize {
        3 * self.n
    }

    pub fn validate(&self) -> Result<(), ConstructionError> {
        if self.n == 0 {
            return Err(ConstructionError::InvalidInstance("n must be positive".into()));
        }
        for (i, s) in self.sets.iter().enumerate() {
            if s.iter().any(|&e| e >= self.ground_size()) {
                return Err(ConstructionError::InvalidInstance(format!(
                    "set {i} has an element outside 0..{}",
                    self.ground_size()
                )));
            }
            if s[0] == s[1] || s[1] == s[2] || s[0] == s[2] {
                return Err(ConstructionError::InvalidInstance(format!("set {i} repeats an element")));
            }
        }
        Ok(())
    }

    /// Reads `n m` followed by `m` lines of three 0-based element indices.
    /// Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<X3CInstance, ConstructionError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let parse_nums = |line: usize, l: &str| -> Result<Vec<usize>, ConstructionError> {
            l.split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|e| ConstructionError::Parse { line, msg: format!("{t:?}: {e}") }))
                .collect()
        };
        let (line, header) = lines.next().ok_or(ConstructionError::Parse { line: 1, msg: "missing header".into() })?;
        let head = parse_nums(line, header)?;
        let [n, m] = head[..] else {
            return Err(ConstructionError::Parse { line, msg: "header must be `n m`".into() });
        };
        let mut sets = Vec::with_capacity(m);
        for (line, l) in lines {
            let nums = parse_nums(line, l)?;
            let [a, b, c] = nums[..] else {
                return Err(ConstructionError::Parse { line, msg: "expected three element indices".into() });
            };
            sets.push([a, b, c]);
        }
        if sets.len() != m {
            return Err(ConstructionError::Parse {
                line: text.lines().count(),
                msg: format!("header promises {m} sets, found {}", sets.len()),
            });
        }
        X3CInstance::new(n, sets)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.sets.len());
        for s in &self.sets {
            out.push_str(&format!("{} {} {}\n", s[0], s[1], s[2]));
        }
        out
    }

    /// Indices of `n` pairwise-disjoint sets covering the ground set, if any.
    pub fn exact_cover(&self) -> Option<Vec<usize>> {
        fn search(inst: &X3CInstance, covered: &mut Vec<bool>, chosen: &mut Vec<usize>) -> bool {
            let Some(first) = covered.iter().position(|&c| !c) else { return true };
            for (i, s) in inst.sets.iter().enumerate() {
                if s.contains(&first) && s.iter().all(|&e| !covered[e]) {
                    s.iter().for_each(|&e| covered[e] = true);
                    chosen.push(i);
                    if search(inst, covered, chosen) {
                        return true;
                    }
                    chosen.pop();
                    s.iter().for_each(|&e| covered[e] = false);
                }
            }
            false
        }
        let mut covered = vec![false; self.ground_size()];
        let mut chosen = Vec::new();
        search(self, &mut covered, &mut chosen).then_some(chosen)
    }
}

/// Parameter regime of the reduction, fixing the internal degree `d` of
/// the element side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    WeightedPositive,
    WeightedNegative,
    UnweightedPositive,
    UnweightedNegative,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::WeightedPositive => "weighted-pos",
            Regime::WeightedNegative => "weighted-neg",
            Regime::UnweightedPositive => "unweighted-pos",
            Regime::UnweightedNegative => "unweighted-neg",
        })
    }
}

impl std::str::FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Regime, String> {
        Regime::ALL.into_iter().find(|r| r.to_string() == s).ok_or_else(|| format!("unknown regime {s:?}"))
    }
}

impl Regime {
    pub const ALL: [Regime; 4] =
        [Regime::WeightedPositive, Regime::WeightedNegative, Regime::UnweightedPositive, Regime::UnweightedNegative];

    /// Open interval of valid `p`.
    pub fn interval(self) -> (f64, f64) {
        match self {
            Regime::WeightedPositive => (0.0, 1.0),
            Regime::WeightedNegative => (-3.0, 0.0),
            Regime::UnweightedPositive => (0.0, 0.25),
            Regime::UnweightedNegative => (-0.125, 0.0),
        }
    }

    pub fn is_weighted(self) -> bool {
        matches!(self, Regime::WeightedPositive | Regime::WeightedNegative)
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Regime::WeightedPositive | Regime::UnweightedPositive)
    }

    pub fn contains(self, p: f64) -> bool {
        let (lo, hi) = self.interval();
        p > lo && p < hi
    }

    /// Internal degree of every element vertex.
    pub fn d(self, p: f64) -> f64 {
        match self {
            Regime::WeightedPositive => 1.23 * p + 4.77,
            Regime::WeightedNegative => p / 2.0 + 5.0,
            Regime::UnweightedPositive | Regime::UnweightedNegative => 5.0,
        }
    }

    pub fn for_p(p: f64, weighted: bool) -> Result<Regime, ConstructionError> {
        let candidates = if weighted {
            [Regime::WeightedPositive, Regime::WeightedNegative]
        } else {
            [Regime::UnweightedPositive, Regime::UnweightedNegative]
        };
        candidates
            .into_iter()
            .find(|r| r.contains(p))
            .ok_or(ConstructionError::NoRegime { p, kind: if weighted { "weighted" } else { "unweighted" } })
    }

    fn check(self, p: f64) -> Result<(), ConstructionError> {
        if self.contains(p) {
            Ok(())
        } else {
            let (lo, hi) = self.interval();
            Err(ConstructionError::OutOfRegime { p, regime: self, lo, hi })
        }
    }

    /// `k` evenly spaced interior points of the interval.
    pub fn grid(self, k: usize) -> Vec<f64> {
        let (lo, hi) = self.interval();
        (0..k).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / k as f64).collect()
    }
}

/// `ρ* = (3^p + 3(d+1)^p) / 4`.
pub fn rho_star(p: f64, d: f64) -> f64 {
    (3f64.powf(p) + 3.0 * (d + 1.0).powf(p)) / 4.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// YES iff the optimal `ρ_p` is at least `ρ*` (`p > 0`).
    AtLeast,
    /// YES iff the optimal `ρ_p` is at most `ρ*` (`p < 0`).
    AtMost,
}

/// A reduction graph: set vertices `0..m` followed by element vertices.
#[derive(Clone, Debug)]
pub struct GadgetSpec {
    pub graph: Graph,
    pub p: f64,
    pub rho_star: f64,
    pub d: f64,
    pub regime: Regime,
    pub direction: Direction,
    pub set_vertices: Range<Vertex>,
    pub element_vertices: Range<Vertex>,
}

impl GadgetSpec {
    /// Vertex set made of the chosen set vertices plus every element vertex.
    pub fn cover_set(&self, chosen: &[usize]) -> VertexSet {
        let n = self.graph.n();
        VertexSet::from_vertices(n, chosen.iter().copied().chain(self.element_vertices.clone()))
    }
}

/// Builds the reduction graph for `inst` at exponent `p`.
pub fn x3c_gadget(inst: &X3CInstance, p: f64, weighted: bool) -> Result<GadgetSpec, ConstructionError> {
    inst.validate()?;
    let regime = Regime::for_p(p, weighted)?;
    gadget_in_regime(inst, p, regime)
}

pub fn gadget_in_regime(inst: &X3CInstance, p: f64, regime: Regime) -> Result<GadgetSpec, ConstructionError> {
    inst.validate()?;
    regime.check(p)?;
    let m = inst.sets.len();
    let k = inst.ground_size();
    let d = regime.d(p);
    let mut b = GraphBuilder::new(m + k, regime.is_weighted());
    for (i, s) in inst.sets.iter().enumerate() {
        for &e in s {
            b.add_edge(i, m + e, 1.0)?;
        }
    }
    if regime.is_weighted() {
        let w = d / (k as f64 - 1.0);
        for u in 0..k {
            for v in u + 1..k {
                b.add_edge(m + u, m + v, w)?;
            }
        }
    } else {
        if !inst.n.is_multiple_of(2) {
            return Err(ConstructionError::OddUnweighted(inst.n));
        }
        let ring = circulant(k, &[1, 2, k / 2])?;
        for (u, v, _) in ring.edges() {
            b.add_edge(m + u, m + v, 1.0)?;
        }
    }
    Ok(GadgetSpec {
        graph: b.build(),
        p,
        rho_star: rho_star(p, d),
        d,
        regime,
        direction: if regime.is_positive() { Direction::AtLeast } else { Direction::AtMost },
        set_vertices: 0..m,
        element_vertices: m..m + k,
    })
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub answer: bool,
    /// Optimal `ρ_p` (maximum for `p > 0`, minimum for `p < 0`).
    pub optimum_rho: f64,
    pub rho_star: f64,
    pub best_set: VertexSet,
}

/// Decides `inst` by solving its gadget exactly and comparing with `ρ*`.
pub fn x3c_decide(inst: &X3CInstance, p: f64, weighted: bool, limit: usize) -> Result<Decision, ConstructionError> {
    let spec = x3c_gadget(inst, p, weighted)?;
    decide_gadget(&spec, limit)
}

pub fn decide_gadget(spec: &GadgetSpec, limit: usize) -> Result<Decision, ConstructionError> {
    let r = oracle::brute_force_opt(&spec.graph, PExponent::new(spec.p)?, limit, Exec::Parallel)?;
    let m = r.best_density.value().ok_or(DensityError::Undefined)?;
    let optimum_rho = m.powf(spec.p);
    let answer = match spec.direction {
        Direction::AtLeast => optimum_rho >= spec.rho_star - DECISION_TOL,
        Direction::AtMost => optimum_rho <= spec.rho_star + DECISION_TOL,
    };
    Ok(Decision { answer, optimum_rho, rho_star: spec.rho_star, best_set: r.best_set })
}

/// Upper bound (lower bound for `p < 0`) on `ρ_p(S ∪ A')` obtained by giving
/// every element vertex its full internal degree `d`.
pub fn full_degree_bound(spec: &GadgetSpec, set: &VertexSet) -> f64 {
    let p = spec.p;
    let g = &spec.graph;
    let chosen: Vec<Vertex> = spec.set_vertices.clone().filter(|&v| set.contains(v)).collect();
    let mut total = 3f64.powf(p) * chosen.len() as f64;
    let mut size = chosen.len();
    for v in spec.element_vertices.clone().filter(|&v| set.contains(v)) {
        let from_sets = g.neighbors(v).iter().filter(|&&u| spec.set_vertices.contains(&u) && set.contains(u)).count();
        total += (spec.d + from_sets as f64).powf(p);
        size += 1;
    }
    total / size as f64
}

/// Sum of target degrees in an edge-maximal `d`-degenerate graph.
fn max_degenerate_edges(n: usize, d: usize) -> usize {
    d * n - d * (d + 1) / 2
}

/// Target degree sequence, sorted in decreasing order.
pub fn bickle_sequence(n: usize, d: usize) -> Result<Vec<usize>, ConstructionError> {
    let tri = d * (d + 1) / 2;
    if d == 0 || n < d + tri + 1 {
        return Err(ConstructionError::InvalidParameter(format!(
            "need d >= 1 and n >= d + d(d+1)/2 + 1, got n = {n}, d = {d}"
        )));
    }
    let mut seq: Vec<usize> = (d..2 * d).collect();
    seq.extend(std::iter::repeat_n(2 * d - 1, tri));
    seq.extend(std::iter::repeat_n(2 * d, n - d - tri));
    seq.sort_unstable_by(|a, b| b.cmp(a));
    Ok(seq)
}

/// Checks the characterization of degree sequences of edge-maximal
/// `d`-degenerate graphs: with `seq` sorted decreasingly and 1-based `i`,
/// `d ≤ seq_i ≤ min(n-1, n+d-i)` and `Σ seq = 2(dn - d(d+1)/2)`.
pub fn check_bickle_conditions(seq: &[usize], d: usize) -> Result<(), String> {
    let n = seq.len();
    if seq.windows(2).any(|w| w[0] < w[1]) {
        return Err("sequence is not sorted decreasingly".into());
    }
    for (idx, &di) in seq.iter().enumerate() {
        let i = idx + 1;
        let hi = (n - 1).min(n + d - i);
        if di < d || di > hi {
            return Err(format!("position {i}: degree {di} outside [{d}, {hi}]"));
        }
    }
    let sum: usize = seq.iter().sum();
    let want = 2 * max_degenerate_edges(n, d);
    if sum != want {
        return Err(format!("degree sum {sum} differs from {want}"));
    }
    Ok(())
}

/// Realizes the edge-maximal `d`-degenerate sequence with degree targets
/// `d, …, 2d-1`, `d(d+1)/2` copies of `2d-1`, and `2d` for the rest.
///
/// Vertex `i` gets the `i`-th largest target. The first `d + 1` vertices
/// form a clique; each later vertex joins the `d` earlier vertices with the
/// largest remaining deficit (ties by smaller id). The result is validated
/// against the targets and the degeneracy.
pub fn bickle_graph(n: usize, d: usize) -> Result<Graph, ConstructionError> {
    let target = bickle_sequence(n, d)?;
    let mut b = GraphBuilder::new(n, false);
    let mut degree = vec![0usize; n];
    for u in 0..=d {
        for v in u + 1..=d {
            b.add_edge(u, v, 1.0)?;
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    for v in d + 1..n {
        let mut earlier: Vec<Vertex> = (0..v).collect();
        earlier.sort_by_key(|&u| (std::cmp::Reverse(target[u] as isize - degree[u] as isize), u));
        for &u in &earlier[..d] {
            b.add_edge(u, v, 1.0)?;
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    let g = b.build();
    if let Some(v) = (0..n).find(|&v| g.degree(v) != target[v]) {
        return Err(ConstructionError::DegreeSequence(format!(
            "vertex {v} has degree {} but target {}",
            g.degree(v),
            target[v]
        )));
    }
    let mut seq: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    seq.sort_unstable_by(|a, b| b.cmp(a));
    check_bickle_conditions(&seq, d).map_err(ConstructionError::DegreeSequence)?;
    let core = degeneracy_maxcore(&g);
    if core.degeneracy != d as f64 {
        return Err(ConstructionError::DegreeSequence(format!("degeneracy {} differs from {d}", core.degeneracy)));
    }
    Ok(g)
}

/// Parameters of the union `H ⊔ r·K_{d+3} ⊔ K_{d+1,D}`, where `H` is the
/// degree-sequence graph on `n_h` vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TightParams {
    pub d: usize,
    pub n_h: usize,
    pub r: usize,
    pub big_d: usize,
}

#[derive(Clone, Debug)]
pub struct TightFamily {
    pub graph: Graph,
    pub params: TightParams,
    pub h_vertices: Range<Vertex>,
    pub clique_vertices: Range<Vertex>,
    pub bipartite_vertices: Range<Vertex>,
}

pub fn tight_family(params: TightParams, p: f64) -> Result<TightFamily, ConstructionError> {
    if p.is_nan() || p >= 1.0 || p == 0.0 {
        return Err(ConstructionError::InvalidParameter(format!("p must lie in (-inf, 1) without 0, got {p}")));
    }
    let TightParams { d, n_h, r, big_d } = params;
    if big_d == 0 {
        return Err(ConstructionError::InvalidParameter("D must be positive".into()));
    }
    let mut parts = vec![bickle_graph(n_h, d)?];
    let k = clique(d + 3)?;
    parts.extend(std::iter::repeat_n(k, r));
    parts.push(complete_bipartite(d + 1, big_d)?);
    let graph = disjoint_union(&parts);
    let h_end = n_h;
    let c_end = h_end + r * (d + 3);
    Ok(TightFamily {
        params,
        h_vertices: 0..h_end,
        clique_vertices: h_end..c_end,
        bipartite_vertices: c_end..graph.n(),
        graph,
    })
}

/// Exact optimum of a tight-family graph as the best of its parts: the
/// degree-sequence graph by enumeration, cliques and the complete bipartite
/// graph in closed form.
pub fn tight_family_optimum(params: TightParams, p: PExponent, limit: usize) -> Result<f64, ConstructionError> {
    let h = bickle_graph(params.n_h, params.d)?;
    let mut best =
        oracle::opt_by_components(&h, p, limit, Exec::Parallel)?.best_density.value().unwrap_or(f64::NEG_INFINITY);
    if params.r > 0 {
        best = best.max((params.d + 2) as f64);
    }
    let (_, _, kb) = oracle::complete_bipartite_opt(params.d + 1, params.big_d, p);
    Ok(best.max(kb))
}

/// `3^p + 3(d+1)^p - 4d^p`.
pub fn gap_first(p: f64, d: f64) -> f64 {
    3f64.powf(p) + 3.0 * (d + 1.0).powf(p) - 4.0 * d.powf(p)
}

/// `3^p + 4(d+2)^p - 5(d+1)^p`.
pub fn gap_second(p: f64, d: f64) -> f64 {
    3f64.powf(p) + 4.0 * (d + 2.0).powf(p) - 5.0 * (d + 1.0).powf(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub regime: Regime,
    pub p: f64,
    pub d: f64,
    pub f1: f64,
    pub f2: f64,
    /// Signs as the regime requires: `f1 > 0, f2 < 0` for positive `p`,
    /// `f1 < 0, f2 > 0` for negative `p`.
    pub ok: bool,
}

/// Evaluates both gap functions over `grid`; rows failing the sign
/// requirement have `ok = false`.
pub fn scan_inequalities(regime: Regime, grid: &[f64]) -> Result<Vec<ScanRow>, ConstructionError> {
    grid.iter()
        .map(|&p| {
            regime.check(p)?;
            let d = regime.d(p);
            let (f1, f2) = (gap_first(p, d), gap_second(p, d));
            let ok = if regime.is_positive() { f1 > 0.0 && f2 < 0.0 } else { f1 < 0.0 && f2 > 0.0 };
            Ok(ScanRow { regime, p, d, f1, f2, ok })
        })
        .collect()
}

/// `(3^p·α + 3(d+α)^p) / (α+3)`: density when `α` of the three neighbours of
/// every element are chosen set vertices, on average.
pub fn cover_density(p: f64, d: f64, alpha: f64) -> f64 {
    (3f64.powf(p) * alpha + 3.0 * (d + alpha).powf(p)) / (alpha + 3.0)
}

/// `(3^p β + 3β(d+1)^p + 3(1-β)d^p) / (β+3)` for `β ∈ [0, 1]`.
pub fn undercover_density(p: f64, d: f64, beta: f64) -> f64 {
    (3f64.powf(p) * beta + 3.0 * beta * (d + 1.0).powf(p) + 3.0 * (1.0 - beta) * d.powf(p)) / (beta + 3.0)
}

/// `(3^p(t+β) + 3β(d+t+1)^p + 3(1-β)(d+t)^p) / (t+β+3)` for `β ∈ [0, 1]`.
pub fn overcover_density(p: f64, d: f64, t: f64, beta: f64) -> f64 {
    (3f64.powf(p) * (t + beta) + 3.0 * beta * (d + t + 1.0).powf(p) + 3.0 * (1.0 - beta) * (d + t).powf(p))
        / (t + beta + 3.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityCurve {
    pub rows: Vec<(f64, f64)>,
    /// Whether `α = 1` is the strict maximizer (minimizer for `p < 0`) over
    /// the grid plus `{1}`.
    pub extremum_at_one: bool,
}

pub fn gadget_density_curve(p: f64, d: f64, grid: &[f64]) -> Result<DensityCurve, ConstructionError> {
    if let Some(&a) = grid.iter().find(|&&a| !(0.0..=10.0).contains(&a)) {
        return Err(ConstructionError::GridOutOfRange(a));
    }
    let rows: Vec<(f64, f64)> = grid.iter().map(|&a| (a, cover_density(p, d, a))).collect();
    let at_one = cover_density(p, d, 1.0);
    let sign = if p > 0.0 { 1.0 } else { -1.0 };
    let extremum_at_one = rows.iter().filter(|(a, _)| *a != 1.0).all(|(_, v)| sign * v < sign * at_one);
    Ok(DensityCurve { rows, extremum_at_one })
}

/// Induced `ρ_p` of `set` in the gadget; `None` when undefined.
pub fn gadget_rho(spec: &GadgetSpec, set: &VertexSet) -> Result<Option<f64>, ConstructionError> {
    match density::rho_p(&spec.graph, set, spec.p) {
        Ok(x) => Ok(Some(x)),
        Err(DensityError::Undefined) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Density of the planted solution `S ∪ A` for a cover `S`.
pub fn planted_density(spec: &GadgetSpec, cover: &[usize]) -> Result<Density, ConstructionError> {
    Ok(density::m_p(&spec.graph, &spec.cover_set(cover), PExponent::new(spec.p)?)?)
}
