//! Frank-Wolfe on `min Σ_v b_v²` over the base contrapolymatroid of `f_p`
//! (`b(S) ≥ f_p(S)` for all `S`, `b(V) = f_p(V)`), followed by rounding the
//! fractional point to a vertex set by its best suffix.

use std::time::Instant;

use thiserror::Error;

use crate::density::{power, DensityError, PExponent};
use crate::graph::{Graph, Vertex};
use crate::peeling::{Guarantee, PeelResult, PeelStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FwError {
    #[error("frank-wolfe needs a finite p >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("iteration count must be at least 1")]
    InvalidIterations,
    #[error("point has length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Density(#[from] DensityError),
}

fn check_p(p: f64) -> Result<(), FwError> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(FwError::InvalidExponent(p))
    }
}

fn check_len(g: &Graph, x: &[f64]) -> Result<(), FwError> {
    if x.len() == g.n() {
        Ok(())
    } else {
        Err(FwError::LengthMismatch { got: x.len(), expected: g.n() })
    }
}

/// Starting point `x_v = d_G(v)^p`.
pub fn fw_initial_point(g: &Graph, p: f64) -> Result<Vec<f64>, FwError> {
    check_p(p)?;
    Ok(g.weighted_degrees().iter().map(|&d| power(d, p).unwrap_or(0.0)).collect())
}

/// Vertices by decreasing `w`, ties by smaller id.
pub fn decreasing_order(w: &[f64]) -> Vec<Vertex> {
    let mut order: Vec<Vertex> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
    order
}

/// Extreme point of the base contrapolymatroid generated by `order`:
/// `z[order[i]] = f_p(order[..=i]) - f_p(order[..i])`.
pub fn extreme_point(g: &Graph, p: f64, order: &[Vertex]) -> Vec<f64> {
    let n = g.n();
    let mut inserted = vec![false; n];
    let mut degree = vec![0.0; n];
    let mut z = vec![0.0; n];
    for &v in order {
        let mut own = 0.0;
        let mut neighbour_gain = 0.0;
        for (u, w) in g.incident(v) {
            if inserted[u] {
                own += w;
                let before = degree[u];
                neighbour_gain += power(before + w, p).unwrap_or(0.0) - power(before, p).unwrap_or(0.0);
            }
        }
        z[v] = power(own, p).unwrap_or(0.0) + neighbour_gain;
        for (u, w) in g.incident(v) {
            if inserted[u] {
                degree[u] += w;
            }
        }
        degree[v] = own;
        inserted[v] = true;
    }
    z
}

/// Linear minimization oracle: `argmin_{z ∈ B} z·w`, attained by the
/// extreme point of the decreasing-`w` order.
pub fn lmo(g: &Graph, p: f64, w: &[f64]) -> Result<Vec<f64>, FwError> {
    check_p(p)?;
    check_len(g, w)?;
    Ok(extreme_point(g, p, &decreasing_order(w)))
}

/// Sorts by increasing `b` (ties by smaller id) and returns the best suffix.
pub fn round_fractional(g: &Graph, p: f64, b: &[f64]) -> Result<PeelResult, FwError> {
    check_len(g, b)?;
    let pexp = PExponent::new(p)?;
    let start = Instant::now();
    let mut order: Vec<Vertex> = (0..b.len()).collect();
    order.sort_by(|&x, &y| b[x].total_cmp(&b[y]).then(x.cmp(&y)));
    let mut result = PeelResult::from_order(g, order, pexp, PeelStats::default(), Guarantee::Heuristic)?;
    result.stats.pops = g.n();
    result.stats.elapsed = start.elapsed();
    Ok(result)
}

#[derive(Clone, Debug)]
pub struct FwOptions {
    pub iterations: usize,
    /// Round the current point every this many iterations (0 disables).
    pub round_every: usize,
}

impl FwOptions {
    pub fn new(iterations: usize) -> FwOptions {
        FwOptions { iterations, round_every: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundingPoint {
    pub iteration: usize,
    pub density: Option<f64>,
    pub cumulative_seconds: f64,
}

#[derive(Clone, Debug)]
pub struct FwState {
    pub b: Vec<f64>,
    /// Completed iterations.
    pub k: usize,
    /// `objective_trace[k]` is `Σ b²` after `k` iterations (index 0 is the
    /// starting point).
    pub objective_trace: Vec<f64>,
    pub rounding_trace: Vec<RoundingPoint>,
    pub rounded: PeelResult,
}

/// Runs `iterations` Frank-Wolfe steps with step size `2/(k+2)`, `k ≥ 1`.
pub fn frank_wolfe(g: &Graph, p: f64, iterations: usize) -> Result<FwState, FwError> {
    frank_wolfe_with(g, p, &FwOptions::new(iterations), |_, _| {})
}

/// As [`frank_wolfe`], calling `observe(k, b)` after every iteration.
pub fn frank_wolfe_with<F: FnMut(usize, &[f64])>(
    g: &Graph,
    p: f64,
    options: &FwOptions,
    mut observe: F,
) -> Result<FwState, FwError> {
    check_p(p)?;
    if options.iterations == 0 {
        return Err(FwError::InvalidIterations);
    }
    let start = Instant::now();
    let mut b = fw_initial_point(g, p)?;
    let mut objective_trace = Vec::with_capacity(options.iterations + 1);
    let mut rounding_trace = Vec::new();
    objective_trace.push(b.iter().map(|x| x * x).sum());
    for k in 1..=options.iterations {
        // gradient 2b sorts the same as b
        let y = extreme_point(g, p, &decreasing_order(&b));
        let alpha = 2.0 / (k as f64 + 2.0);
        for (bv, yv) in b.iter_mut().zip(&y) {
            *bv = (1.0 - alpha) * *bv + alpha * yv;
        }
        objective_trace.push(b.iter().map(|x| x * x).sum());
        observe(k, &b);
        if options.round_every > 0 && k % options.round_every == 0 {
            let r = round_fractional(g, p, &b)?;
            rounding_trace.push(RoundingPoint {
                iteration: k,
                density: r.best_density.value(),
                cumulative_seconds: start.elapsed().as_secs_f64(),
            });
        }
    }
    let mut rounded = round_fractional(g, p, &b)?;
    rounded.stats.elapsed = start.elapsed();
    Ok(FwState { b, k: options.iterations, objective_trace, rounding_trace, rounded })
}
