//! Single-pass peeling: exact Greedy-p, Lazy-Greedy-p, min-degree peeling
//! (Simple-Greedy-p) and the degeneracy/maxcore computation.
//!
//! The two marginal-key peelers are exposed as iterators ([`ExactPeeler`],
//! [`LazyPeeler`]) so iterated variants can seed them with per-vertex loads
//! and tests can inspect their state between pops.

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::density::{self, power, sub_clamped, Density, DensityError, PExponent};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::heap::IndexedMinHeap;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeelError {
    #[error("marginal-key peeling needs a finite p > 0, got {0}")]
    InvalidExponent(f64),
    #[error("eps must lie in [0, 1], got {0}")]
    InvalidEps(f64),
    #[error("iteration count must be at least 1")]
    InvalidIterations,
    #[error("load vector has length {got}, expected {expected}")]
    LoadLength { got: usize, expected: usize },
    #[error(transparent)]
    Density(#[from] DensityError),
}

/// What the algorithm that produced a result promises about it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Guarantee {
    /// `M_p(result) ≥ factor · M_p*`.
    Approximation { factor: f64 },
    /// Runs outside the range where a bound is known.
    Heuristic,
}

impl Guarantee {
    pub fn label(&self) -> String {
        match self {
            Guarantee::Approximation { factor } => format!("approx>={factor:.6}"),
            Guarantee::Heuristic => "heuristic (no guarantee)".to_string(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct PeelStats {
    pub pops: usize,
    /// Heap key changes, including refresh-triggered ones.
    pub key_updates: usize,
    /// Total approximate-degree refreshes (lazy peeling only).
    pub refreshes: usize,
    /// Refresh count per vertex (lazy peeling only, empty otherwise).
    pub vertex_refreshes: Vec<u32>,
    pub elapsed: Duration,
}

/// A peeling order together with its suffix densities and best suffix.
#[derive(Clone, Debug)]
pub struct PeelResult {
    pub order: Vec<Vertex>,
    /// `per_suffix[i]` is `M_p` of `{order[i], …}`.
    pub per_suffix: Vec<Density>,
    /// Start index of the best suffix, `None` when no suffix is defined.
    pub best_start: Option<usize>,
    pub best_set: VertexSet,
    pub best_density: Density,
    pub stats: PeelStats,
    pub guarantee: Guarantee,
}

impl PeelResult {
    /// Evaluates every suffix of `order` under `M_p` and keeps the best.
    pub fn from_order(
        g: &Graph,
        order: Vec<Vertex>,
        p: PExponent,
        stats: PeelStats,
        guarantee: Guarantee,
    ) -> Result<PeelResult, DensityError> {
        let per_suffix = density::suffix_densities(g, &order, p)?;
        let best = density::best_suffix(&per_suffix);
        let (best_start, best_set, best_density) = match best {
            Some((i, x)) => (Some(i), VertexSet::from_vertices(g.n(), order[i..].iter().copied()), Density::Defined(x)),
            None => (None, VertexSet::empty(g.n()), Density::Undefined),
        };
        Ok(PeelResult { order, per_suffix, best_start, best_set, best_density, stats, guarantee })
    }

    /// Best density, or `-∞` when undefined (convenient for comparisons).
    pub fn density_or_neg_inf(&self) -> f64 {
        self.best_density.value().unwrap_or(f64::NEG_INFINITY)
    }
}

/// A vertex removed by a peeler, with the marginal used for its key.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pop {
    pub vertex: Vertex,
    /// Marginal `f_p(v | S - v)`: exact for [`ExactPeeler`], the lazy
    /// estimate `A[v]` for [`LazyPeeler`].
    pub marginal: f64,
    /// Heap key at removal (`load + marginal`).
    pub key: f64,
}

fn check_positive_p(p: f64) -> Result<(), PeelError> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(PeelError::InvalidExponent(p))
    }
}

fn check_loads(g: &Graph, loads: Option<&[f64]>) -> Result<Vec<f64>, PeelError> {
    match loads {
        Some(l) if l.len() != g.n() => Err(PeelError::LoadLength { got: l.len(), expected: g.n() }),
        Some(l) => Ok(l.to_vec()),
        None => Ok(vec![0.0; g.n()]),
    }
}

/// `x^p - (x - w)^p` for a positive exponent.
#[inline]
fn drop_term(x: f64, w: f64, p: f64) -> f64 {
    power(x, p).unwrap_or(0.0) - power(sub_clamped(x, w), p).unwrap_or(0.0)
}

/// Exact Greedy-p peeler: every key is recomputed from current degrees
/// whenever anything in its two-hop neighbourhood changes.
pub struct ExactPeeler<'g> {
    g: &'g Graph,
    p: f64,
    alive: Vec<bool>,
    degree: Vec<f64>,
    loads: Vec<f64>,
    marginal: Vec<f64>,
    heap: IndexedMinHeap,
    mark: Vec<usize>,
    epoch: usize,
    touched: Vec<Vertex>,
    key_updates: usize,
}

impl<'g> ExactPeeler<'g> {
    pub fn new(g: &'g Graph, p: f64, loads: Option<&[f64]>) -> Result<ExactPeeler<'g>, PeelError> {
        check_positive_p(p)?;
        let loads = check_loads(g, loads)?;
        let n = g.n();
        let mut peeler = ExactPeeler {
            g,
            p,
            alive: vec![true; n],
            degree: g.weighted_degrees().to_vec(),
            loads,
            marginal: vec![0.0; n],
            heap: IndexedMinHeap::new(0),
            mark: vec![0; n],
            epoch: 0,
            touched: Vec::new(),
            key_updates: 0,
        };
        for v in 0..n {
            peeler.marginal[v] = peeler.compute_marginal(v);
        }
        let keys = (0..n).map(|v| peeler.loads[v] + peeler.marginal[v]).collect();
        peeler.heap = IndexedMinHeap::with_keys(keys);
        Ok(peeler)
    }

    fn compute_marginal(&self, v: Vertex) -> f64 {
        let p = self.p;
        let mut total = power(self.degree[v], p).unwrap_or(0.0);
        for (u, w) in self.g.incident(v) {
            if self.alive[u] {
                total += drop_term(self.degree[u], w, p);
            }
        }
        total
    }

    pub fn is_alive(&self, v: Vertex) -> bool {
        self.alive[v]
    }

    /// Exact `f_p(v | S - v)` for a surviving vertex.
    pub fn marginal(&self, v: Vertex) -> f64 {
        self.marginal[v]
    }

    pub fn key_updates(&self) -> usize {
        self.key_updates
    }
}

impl Iterator for ExactPeeler<'_> {
    type Item = Pop;

    fn next(&mut self) -> Option<Pop> {
        let (v, key) = self.heap.pop()?;
        let popped = Pop { vertex: v, marginal: self.marginal[v], key };
        self.alive[v] = false;

        self.epoch += 1;
        self.touched.clear();
        for (u, w) in self.g.incident(v) {
            if !self.alive[u] {
                continue;
            }
            self.degree[u] = sub_clamped(self.degree[u], w);
            for x in std::iter::once(u).chain(self.g.neighbors(u).iter().copied()) {
                if self.alive[x] && self.mark[x] != self.epoch {
                    self.mark[x] = self.epoch;
                    self.touched.push(x);
                }
            }
        }
        // degrees settle before any marginal is recomputed
        for i in 0..self.touched.len() {
            let x = self.touched[i];
            self.marginal[x] = self.compute_marginal(x);
            self.heap.set_key(x, self.loads[x] + self.marginal[x]);
            self.key_updates += 1;
        }
        Some(popped)
    }
}

/// Lazy-Greedy-p peeler.
///
/// `D` holds exact current degrees and `D'` stale ones; `A[v]` is
/// `D[v]^p + Σ_{u ∈ N(v) ∩ S} D'[u]^p - (D'[u] - w_uv)^p`. A neighbour's
/// stale degree is refreshed, and the keys around it corrected, once
/// `D'[u] > (1 + eps/p) · D[u]`. With `eps = 0` this is exact Greedy-p.
pub struct LazyPeeler<'g> {
    g: &'g Graph,
    p: f64,
    eps: f64,
    alive: Vec<bool>,
    degree: Vec<f64>,
    approx_degree: Vec<f64>,
    approx_marginal: Vec<f64>,
    loads: Vec<f64>,
    heap: IndexedMinHeap,
    refreshes: Vec<u32>,
    key_updates: usize,
}

impl<'g> LazyPeeler<'g> {
    pub fn new(g: &'g Graph, p: f64, eps: f64, loads: Option<&[f64]>) -> Result<LazyPeeler<'g>, PeelError> {
        check_positive_p(p)?;
        if !(0.0..=1.0).contains(&eps) {
            return Err(PeelError::InvalidEps(eps));
        }
        let loads = check_loads(g, loads)?;
        let n = g.n();
        let degree = g.weighted_degrees().to_vec();
        let approx_marginal: Vec<f64> = (0..n)
            .map(|v| {
                let own = power(degree[v], p).unwrap_or(0.0);
                own + g.incident(v).map(|(u, w)| drop_term(degree[u], w, p)).sum::<f64>()
            })
            .collect();
        let heap = IndexedMinHeap::with_keys((0..n).map(|v| loads[v] + approx_marginal[v]).collect());
        Ok(LazyPeeler {
            g,
            p,
            eps,
            alive: vec![true; n],
            approx_degree: degree.clone(),
            degree,
            approx_marginal,
            loads,
            heap,
            refreshes: vec![0; n],
            key_updates: 0,
        })
    }

    pub fn is_alive(&self, v: Vertex) -> bool {
        self.alive[v]
    }

    /// Current surviving set.
    pub fn surviving(&self) -> VertexSet {
        VertexSet::from_vertices(self.g.n(), (0..self.g.n()).filter(|&v| self.alive[v]))
    }

    /// `A[v]`, the lazily maintained estimate of `f_p(v | S - v)`.
    pub fn approx_marginal(&self, v: Vertex) -> f64 {
        self.approx_marginal[v]
    }

    pub fn degree(&self, v: Vertex) -> f64 {
        self.degree[v]
    }

    pub fn approx_degree(&self, v: Vertex) -> f64 {
        self.approx_degree[v]
    }

    pub fn refreshes(&self) -> &[u32] {
        &self.refreshes
    }

    pub fn key_updates(&self) -> usize {
        self.key_updates
    }

    fn requeue(&mut self, x: Vertex) {
        self.heap.set_key(x, self.loads[x] + self.approx_marginal[x]);
        self.key_updates += 1;
    }
}

impl Iterator for LazyPeeler<'_> {
    type Item = Pop;

    fn next(&mut self) -> Option<Pop> {
        let (v, key) = self.heap.pop()?;
        let popped = Pop { vertex: v, marginal: self.approx_marginal[v], key };
        self.alive[v] = false;
        let p = self.p;
        let threshold = 1.0 + self.eps / p;

        for (u, c) in self.g.incident(v) {
            if !self.alive[u] {
                continue;
            }
            self.approx_marginal[u] -= drop_term(self.degree[u], c, p);
            self.approx_marginal[u] -= drop_term(self.approx_degree[v], c, p);
            self.degree[u] = sub_clamped(self.degree[u], c);

            if self.approx_degree[u] > threshold * self.degree[u] {
                let (stale, fresh) = (self.approx_degree[u], self.degree[u]);
                for (x, c2) in self.g.incident(u) {
                    if self.alive[x] {
                        self.approx_marginal[x] += drop_term(fresh, c2, p) - drop_term(stale, c2, p);
                        self.requeue(x);
                    }
                }
                self.approx_degree[u] = fresh;
                self.refreshes[u] += 1;
            }
            self.requeue(u);
        }
        Some(popped)
    }
}

fn run_marginal_peel<I: Iterator<Item = Pop>>(peeler: I) -> (Vec<Vertex>, Vec<f64>) {
    let mut order = Vec::new();
    let mut marginals = Vec::new();
    for pop in peeler {
        order.push(pop.vertex);
        marginals.push(pop.marginal);
    }
    (order, marginals)
}

/// Approximation factor `((1-eps)/(p+1))^{1/p}` for `p ≥ 1`, heuristic below.
pub(crate) fn marginal_guarantee(p: f64, eps: f64) -> Guarantee {
    if p >= 1.0 {
        Guarantee::Approximation { factor: ((1.0 - eps) / (p + 1.0)).powf(1.0 / p) }
    } else {
        Guarantee::Heuristic
    }
}

/// Greedy-p: repeatedly peel the vertex of least exact marginal
/// `f_p(v | S - v)` and return the best suffix by `M_p`.
pub fn greedy_p(g: &Graph, p: f64) -> Result<PeelResult, PeelError> {
    let start = Instant::now();
    let peeler = ExactPeeler::new(g, p, None)?;
    let mut peeler = peeler;
    let (order, _) = run_marginal_peel(&mut peeler);
    let stats = PeelStats { pops: order.len(), key_updates: peeler.key_updates(), ..Default::default() };
    finish(g, order, PExponent::new(p)?, stats, marginal_guarantee(p, 0.0), start)
}

/// Lazy-Greedy-p with approximation slack `eps ∈ [0, 1]`.
pub fn lazy_greedy_p(g: &Graph, p: f64, eps: f64) -> Result<PeelResult, PeelError> {
    let start = Instant::now();
    let mut peeler = LazyPeeler::new(g, p, eps, None)?;
    let (order, _) = run_marginal_peel(&mut peeler);
    let stats = PeelStats {
        pops: order.len(),
        key_updates: peeler.key_updates(),
        refreshes: peeler.refreshes().iter().map(|&r| r as usize).sum(),
        vertex_refreshes: peeler.refreshes().to_vec(),
        ..Default::default()
    };
    finish(g, order, PExponent::new(p)?, stats, marginal_guarantee(p, eps), start)
}

fn finish(
    g: &Graph,
    order: Vec<Vertex>,
    p: PExponent,
    mut stats: PeelStats,
    guarantee: Guarantee,
    start: Instant,
) -> Result<PeelResult, PeelError> {
    let mut result = PeelResult::from_order(g, order, p, PeelStats::default(), guarantee)?;
    stats.elapsed = start.elapsed();
    result.stats = stats;
    Ok(result)
}

/// Min-degree peeling order together with the degree of each vertex at
/// the moment it was removed.
#[derive(Clone, Debug)]
pub struct DegreeOrder {
    pub order: Vec<Vertex>,
    pub removal_degree: Vec<f64>,
}

/// Classic min-degree peeling order (independent of `p`).
///
/// Unweighted graphs use an exact bucket queue in O(m + n); weighted graphs
/// fall back to the indexed heap on weighted degree.
pub fn simple_greedy_order(g: &Graph) -> DegreeOrder {
    if g.is_weighted() {
        weighted_degree_order(g)
    } else {
        bucket_degree_order(g)
    }
}

fn bucket_degree_order(g: &Graph) -> DegreeOrder {
    const NIL: usize = usize::MAX;
    let n = g.n();
    let max_deg = g.max_degree();
    let mut head = vec![NIL; max_deg + 1];
    let mut next = vec![NIL; n];
    let mut prev = vec![NIL; n];
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];

    let link = |head: &mut [usize], next: &mut [usize], prev: &mut [usize], v: usize, d: usize| {
        next[v] = head[d];
        prev[v] = NIL;
        if head[d] != NIL {
            prev[head[d]] = v;
        }
        head[d] = v;
    };
    let unlink = |head: &mut [usize], next: &mut [usize], prev: &mut [usize], v: usize, d: usize| {
        if prev[v] != NIL {
            next[prev[v]] = next[v];
        } else {
            head[d] = next[v];
        }
        if next[v] != NIL {
            prev[next[v]] = prev[v];
        }
    };

    // descending insertion leaves each bucket in ascending id order
    for v in (0..n).rev() {
        link(&mut head, &mut next, &mut prev, v, deg[v]);
    }

    let mut order = Vec::with_capacity(n);
    let mut removal_degree = Vec::with_capacity(n);
    let mut cur = 0;
    for _ in 0..n {
        while head[cur] == NIL {
            cur += 1;
        }
        let v = head[cur];
        unlink(&mut head, &mut next, &mut prev, v, cur);
        alive[v] = false;
        order.push(v);
        removal_degree.push(deg[v] as f64);
        for &u in g.neighbors(v) {
            if alive[u] {
                unlink(&mut head, &mut next, &mut prev, u, deg[u]);
                deg[u] -= 1;
                link(&mut head, &mut next, &mut prev, u, deg[u]);
                cur = cur.min(deg[u]);
            }
        }
    }
    DegreeOrder { order, removal_degree }
}

fn weighted_degree_order(g: &Graph) -> DegreeOrder {
    let n = g.n();
    let mut degree = g.weighted_degrees().to_vec();
    let mut alive = vec![true; n];
    let mut heap = IndexedMinHeap::with_keys(degree.clone());
    let mut order = Vec::with_capacity(n);
    let mut removal_degree = Vec::with_capacity(n);
    while let Some((v, _)) = heap.pop() {
        alive[v] = false;
        order.push(v);
        removal_degree.push(degree[v]);
        for (u, w) in g.incident(v) {
            if alive[u] {
                degree[u] = sub_clamped(degree[u], w);
                heap.set_key(u, degree[u]);
            }
        }
    }
    DegreeOrder { order, removal_degree }
}

/// Simple-Greedy-p: best `M_p` suffix of the min-degree peeling order.
/// Guarantees `M_p ≥ M_p*/2` for `p ≤ 1`.
pub fn simple_greedy_p(g: &Graph, p: PExponent) -> Result<PeelResult, PeelError> {
    let start = Instant::now();
    let DegreeOrder { order, .. } = simple_greedy_order(g);
    let stats = PeelStats { pops: order.len(), ..Default::default() };
    finish(g, order, p, stats, simple_guarantee(p), start)
}

pub(crate) fn simple_guarantee(p: PExponent) -> Guarantee {
    if p.value() <= 1.0 {
        Guarantee::Approximation { factor: 0.5 }
    } else {
        Guarantee::Heuristic
    }
}

/// Degeneracy (max over subgraphs of the minimum degree) and the maxcore.
#[derive(Clone, Debug)]
pub struct Maxcore {
    /// Integral for unweighted graphs.
    pub degeneracy: f64,
    /// Largest suffix of the min-degree order attaining the degeneracy.
    pub core: VertexSet,
}

pub fn degeneracy_maxcore(g: &Graph) -> Maxcore {
    let DegreeOrder { order, removal_degree } = simple_greedy_order(g);
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &d) in removal_degree.iter().enumerate() {
        if d > best.1 {
            best = (i, d);
        }
    }
    if order.is_empty() {
        return Maxcore { degeneracy: 0.0, core: VertexSet::empty(0) };
    }
    Maxcore { degeneracy: best.1, core: VertexSet::from_vertices(g.n(), order[best.0..].iter().copied()) }
}
