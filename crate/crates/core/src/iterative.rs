//! Iterated peeling with per-vertex loads: Greedy++-p (exact or lazy inner
//! passes) and Simple++-p.
//!
//! Each pass peels by `load + marginal` and then adds the marginal used at
//! pop time to the popped vertex's load. The answer is the best suffix over
//! the orders of every pass so far.

use std::time::Instant;

use serde::Serialize;

use crate::density::sub_clamped;
use crate::density::{self, Density, PExponent};
use crate::graph::{Graph, Vertex};
use crate::heap::IndexedMinHeap;
use crate::par::Exec;
use crate::peeling::{
    self, simple_greedy_order, DegreeOrder, ExactPeeler, LazyPeeler, PeelError, PeelResult, PeelStats, Pop,
};

/// Which single-pass peeler Greedy++-p runs inside each iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Inner {
    Exact,
    Lazy { eps: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub iteration: usize,
    /// Best density over all suffixes seen up to this iteration.
    pub best_density: Option<f64>,
    pub cumulative_seconds: f64,
}

#[derive(Clone, Debug)]
pub struct IterState {
    /// Per-vertex loads after the last completed pass.
    pub loads: Vec<f64>,
    pub iterations: usize,
    /// Best suffix over all passes; `order` and `per_suffix` belong to the
    /// pass that produced it.
    pub best: PeelResult,
    /// 1-based pass that produced `best`.
    pub best_iteration: usize,
    /// Best density of each individual pass.
    pub per_iteration_best: Vec<Density>,
    /// One entry per completed pass.
    pub trajectory: Vec<TrajectoryPoint>,
}

impl IterState {
    pub fn best_density(&self) -> Density {
        self.best.best_density
    }
}

fn better(candidate: &PeelResult, incumbent: &PeelResult) -> bool {
    match (candidate.best_density, incumbent.best_density) {
        (Density::Defined(a), Density::Defined(b)) => {
            density::improves(a, candidate.best_set.len(), b, incumbent.best_set.len())
        }
        (Density::Defined(_), Density::Undefined) => true,
        _ => false,
    }
}

/// Greedy++-p with `iterations ≥ 1` passes. With `Inner::Exact` and one
/// pass this is exactly [`peeling::greedy_p`].
pub fn greedy_pp(g: &Graph, p: f64, iterations: usize, inner: Inner) -> Result<IterState, PeelError> {
    let pexp = PExponent::new(p)?;
    if iterations == 0 {
        return Err(PeelError::InvalidIterations);
    }
    let eps = match inner {
        Inner::Exact => 0.0,
        Inner::Lazy { eps } => eps,
    };
    // the first pass alone carries the single-pass bound
    let guarantee = peeling::marginal_guarantee(p, eps);
    let start = Instant::now();
    let n = g.n();
    let mut loads = vec![0.0; n];
    let mut best: Option<(PeelResult, usize)> = None;
    let mut per_iteration_best = Vec::with_capacity(iterations);
    let mut trajectory = Vec::with_capacity(iterations);

    for t in 1..=iterations {
        let pass_start = Instant::now();
        let mut order = Vec::with_capacity(n);
        let mut stats = PeelStats::default();
        let record = |pop: Pop, loads_next: &mut [f64], order: &mut Vec<Vertex>| {
            loads_next[pop.vertex] += pop.marginal.max(0.0);
            order.push(pop.vertex);
        };
        let mut next_loads = loads.clone();
        match inner {
            Inner::Exact => {
                let mut peeler = ExactPeeler::new(g, p, Some(&loads))?;
                for pop in &mut peeler {
                    record(pop, &mut next_loads, &mut order);
                }
                stats.key_updates = peeler.key_updates();
            }
            Inner::Lazy { eps } => {
                let mut peeler = LazyPeeler::new(g, p, eps, Some(&loads))?;
                for pop in &mut peeler {
                    record(pop, &mut next_loads, &mut order);
                }
                stats.key_updates = peeler.key_updates();
                stats.vertex_refreshes = peeler.refreshes().to_vec();
                stats.refreshes = stats.vertex_refreshes.iter().map(|&r| r as usize).sum();
            }
        }
        loads = next_loads;
        stats.pops = order.len();
        stats.elapsed = pass_start.elapsed();
        let pass = PeelResult::from_order(g, order, pexp, stats, guarantee)?;
        per_iteration_best.push(pass.best_density);
        let replace = match &best {
            None => true,
            Some((incumbent, _)) => better(&pass, incumbent),
        };
        if replace {
            best = Some((pass, t));
        }
        let (incumbent, _) = best.as_ref().expect("set on first pass");
        trajectory.push(TrajectoryPoint {
            iteration: t,
            best_density: incumbent.best_density.value(),
            cumulative_seconds: start.elapsed().as_secs_f64(),
        });
    }

    let (best, best_iteration) = best.expect("iterations >= 1");
    Ok(IterState { loads, iterations, best, best_iteration, per_iteration_best, trajectory })
}

/// Orders produced by degree-keyed load peeling, the `p = 1` specialization
/// of Greedy++ that Simple++-p evaluates.
#[derive(Clone, Debug)]
pub struct DegreeLoadRun {
    pub orders: Vec<Vec<Vertex>>,
    pub loads: Vec<f64>,
    /// Cumulative wall time after each pass.
    pub pass_seconds: Vec<f64>,
}

/// Runs `iterations` passes keyed by `load + current weighted degree`.
/// The first pass is the plain min-degree order.
pub fn degree_load_orders(g: &Graph, iterations: usize) -> DegreeLoadRun {
    let start = Instant::now();
    let n = g.n();
    let mut loads = vec![0.0; n];
    let mut orders = Vec::with_capacity(iterations);
    let mut pass_seconds = Vec::with_capacity(iterations);
    for t in 0..iterations {
        let order = if t == 0 {
            let DegreeOrder { order, removal_degree } = simple_greedy_order(g);
            for (&v, &d) in order.iter().zip(&removal_degree) {
                loads[v] += d;
            }
            order
        } else {
            let mut degree = g.weighted_degrees().to_vec();
            let mut alive = vec![true; n];
            let mut heap = IndexedMinHeap::with_keys((0..n).map(|v| loads[v] + degree[v]).collect());
            let mut order = Vec::with_capacity(n);
            while let Some((v, _)) = heap.pop() {
                alive[v] = false;
                loads[v] += degree[v];
                order.push(v);
                for (u, w) in g.incident(v) {
                    if alive[u] {
                        degree[u] = sub_clamped(degree[u], w);
                        heap.set_key(u, loads[u] + degree[u]);
                    }
                }
            }
            order
        };
        orders.push(order);
        pass_seconds.push(start.elapsed().as_secs_f64());
    }
    DegreeLoadRun { orders, loads, pass_seconds }
}

/// Simple++-p: one degree-keyed load-peeling run, every order evaluated
/// under each requested `p`. Returns one state per entry of `ps`.
pub fn simple_pp(g: &Graph, iterations: usize, ps: &[PExponent], exec: Exec) -> Result<Vec<IterState>, PeelError> {
    if iterations == 0 {
        return Err(PeelError::InvalidIterations);
    }
    let run = degree_load_orders(g, iterations);
    let results = exec.map(ps, |&p| evaluate_orders(g, &run, p));
    results.into_iter().collect()
}

/// Runs Simple++ for `p = 1` and returns the best `M_p` suffix of the
/// order that produced its densest (average-degree) set. This is the
/// approximation that answers with the densest subgraph, scored under `p`.
pub fn one_mean_guided(g: &Graph, iterations: usize, p: PExponent) -> Result<PeelResult, PeelError> {
    let one = PExponent::new(1.0)?;
    let mut states = simple_pp(g, iterations, &[one], Exec::Sequential)?;
    let state = states.pop().expect("one exponent requested");
    let stats = PeelStats { pops: state.best.order.len(), ..Default::default() };
    Ok(PeelResult::from_order(g, state.best.order, p, stats, peeling::simple_guarantee(p))?)
}

fn evaluate_orders(g: &Graph, run: &DegreeLoadRun, p: PExponent) -> Result<IterState, PeelError> {
    let guarantee = peeling::simple_guarantee(p);
    let mut best: Option<(PeelResult, usize)> = None;
    let mut per_iteration_best = Vec::with_capacity(run.orders.len());
    let mut trajectory = Vec::with_capacity(run.orders.len());
    let eval_start = Instant::now();
    for (i, order) in run.orders.iter().enumerate() {
        let stats = PeelStats { pops: order.len(), ..Default::default() };
        let pass = PeelResult::from_order(g, order.clone(), p, stats, guarantee)?;
        per_iteration_best.push(pass.best_density);
        let replace = match &best {
            None => true,
            Some((incumbent, _)) => better(&pass, incumbent),
        };
        if replace {
            best = Some((pass, i + 1));
        }
        trajectory.push(TrajectoryPoint {
            iteration: i + 1,
            best_density: best.as_ref().and_then(|(b, _)| b.best_density.value()),
            cumulative_seconds: run.pass_seconds[i] + eval_start.elapsed().as_secs_f64(),
        });
    }
    let (best, best_iteration) = best.expect("iterations >= 1");
    Ok(IterState {
        loads: run.loads.clone(),
        iterations: run.orders.len(),
        best,
        best_iteration,
        per_iteration_best,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::f_p;
    use crate::generators::{clique, gnp, path};
    use crate::graph::VertexSet;
    use crate::peeling::{greedy_p, simple_greedy_p};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_exact_pass_is_greedy() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let g = gnp(12, 0.4, &mut rng);
            let a = greedy_p(&g, 2.0).unwrap();
            let b = greedy_pp(&g, 2.0, 1, Inner::Exact).unwrap();
            assert_eq!(a.order, b.best.order);
            assert_eq!(a.best_density, b.best_density());
        }
    }

    #[test]
    fn triangle_stays_at_two() {
        let s = greedy_pp(&clique(3).unwrap(), 2.0, 3, Inner::Exact).unwrap();
        assert_eq!(s.trajectory.len(), 3);
        for d in &s.per_iteration_best {
            assert!((d.value().unwrap() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn loads_telescope_to_total_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let g = gnp(14, 0.35, &mut rng);
            let total = f_p(&g, &VertexSet::full(g.n()), 1.5).unwrap();
            for t in 1..5 {
                let s = greedy_pp(&g, 1.5, t, Inner::Exact).unwrap();
                let sum: f64 = s.loads.iter().sum();
                assert!((sum - t as f64 * total).abs() <= 1e-9 * (t as f64 * total).max(1.0));
            }
        }
    }

    #[test]
    fn trajectory_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = gnp(30, 0.2, &mut rng);
        for inner in [Inner::Exact, Inner::Lazy { eps: 0.5 }] {
            let s = greedy_pp(&g, 2.0, 10, inner).unwrap();
            let vals: Vec<f64> = s.trajectory.iter().map(|t| t.best_density.unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn zero_iterations_rejected() {
        let g = path(3).unwrap();
        assert_eq!(greedy_pp(&g, 2.0, 0, Inner::Exact).unwrap_err(), PeelError::InvalidIterations);
        assert!(simple_pp(&g, 0, &[PExponent::new(1.0).unwrap()], Exec::Sequential).is_err());
    }

    #[test]
    fn one_simple_pass_is_simple_greedy() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ps: Vec<PExponent> = [-2.0, -1.0, 0.5, 1.0].iter().map(|&x| PExponent::new(x).unwrap()).collect();
        for _ in 0..10 {
            let g = gnp(10, 0.4, &mut rng);
            let states = simple_pp(&g, 1, &ps, Exec::Sequential).unwrap();
            for (s, &p) in states.iter().zip(&ps) {
                let r = simple_greedy_p(&g, p).unwrap();
                assert_eq!(s.best.order, r.order);
                assert_eq!(s.best_density(), r.best_density);
            }
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = gnp(40, 0.15, &mut rng);
        let ps: Vec<PExponent> = [-1.0, 0.5, 1.0].iter().map(|&x| PExponent::new(x).unwrap()).collect();
        let a = simple_pp(&g, 5, &ps, Exec::Sequential).unwrap();
        let b = simple_pp(&g, 5, &ps, Exec::Parallel).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.best.best_set, y.best.best_set);
            assert_eq!(x.best_density(), y.best_density());
        }
    }
}
