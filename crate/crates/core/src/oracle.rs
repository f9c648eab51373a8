//! Exhaustive ground-truth solvers for small instances.

use thiserror::Error;

use crate::density::{self, power, Density, DensityError, PExponent};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::par::Exec;

pub const DEFAULT_LIMIT: usize = 22;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("instance too large for enumeration: {what} = {got} exceeds {limit}")]
    TooLarge { what: &'static str, got: usize, limit: usize },
    #[error("exponent {0} outside the supported domain {1}")]
    OutOfDomain(f64, &'static str),
    #[error("length {got} does not match vertex count {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Density(#[from] DensityError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub best_set: VertexSet,
    pub best_density: Density,
    pub sets_examined: u64,
}

/// Resolution used to order candidate densities; values closer than this
/// count as ties and the smaller set wins.
const TIE_GRID: f64 = 1.0 / 4_294_967_296.0;

#[derive(Clone, Copy, Debug)]
struct Candidate {
    key: i64,
    size: u32,
    mask: u64,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        (self.key, std::cmp::Reverse(self.size), std::cmp::Reverse(self.mask))
            > (other.key, std::cmp::Reverse(other.size), std::cmp::Reverse(other.mask))
    }
}

fn pick(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.beats(&x) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Density of the set `mask`, or `None` if undefined.
fn mask_density(g: &Graph, adj: &[u64], pow_table: Option<&[f64]>, p: f64, mask: u64) -> Option<f64> {
    let size = mask.count_ones() as usize;
    let mut acc = if p == f64::NEG_INFINITY { f64::INFINITY } else { 0.0 };
    let mut rest = mask;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let d = if g.is_weighted() {
            g.incident(v).filter(|&(u, _)| mask >> u & 1 == 1).map(|(_, w)| w).sum::<f64>()
        } else {
            (adj[v] & mask).count_ones() as f64
        };
        if p == f64::NEG_INFINITY {
            acc = acc.min(d);
        } else if p == f64::INFINITY {
            acc = acc.max(d);
        } else {
            acc += match pow_table {
                Some(t) => {
                    let x = t[d as usize];
                    if x.is_nan() {
                        return None;
                    }
                    x
                }
                None => power(d, p)?,
            };
        }
    }
    if p.is_finite() {
        Some((acc / size as f64).powf(1.0 / p))
    } else {
        Some(acc)
    }
}

/// Maximizes `M_p` over every nonempty vertex subset. For `p < 0`, sets
/// with an induced-isolated member are infeasible and skipped. Ties within
/// a 2^-32 grid prefer the smaller set, then the smaller bitmask.
pub fn brute_force_opt(g: &Graph, p: PExponent, limit: usize, exec: Exec) -> Result<OracleResult, OracleError> {
    let n = g.n();
    let limit = limit.min(63);
    if n > limit {
        return Err(OracleError::TooLarge { what: "n", got: n, limit });
    }
    if n == 0 {
        return Err(DensityError::EmptySet.into());
    }
    let adj = g.adjacency_masks().expect("n <= 63");
    let pv = p.value();
    let table: Option<Vec<f64>> =
        (!g.is_weighted() && pv.is_finite()).then(|| (0..n).map(|d| power(d as f64, pv).unwrap_or(f64::NAN)).collect());

    let high_bits = n.min(6);
    let low_bits = n - high_bits;
    let chunks = 1usize << high_bits;
    let scan = |chunk: usize| -> Option<Candidate> {
        let base = (chunk as u64) << low_bits;
        let mut best: Option<Candidate> = None;
        for low in 0..(1u64 << low_bits) {
            let mask = base | low;
            if mask == 0 {
                continue;
            }
            let Some(x) = mask_density(g, &adj, table.as_deref(), pv, mask) else { continue };
            let cand = Candidate { key: (x / TIE_GRID).round() as i64, size: mask.count_ones(), mask };
            best = pick(best, Some(cand));
        }
        best
    };
    let winner = exec.map_range(chunks, scan).into_iter().fold(None, pick);
    let sets_examined = (1u64 << n) - 1;
    match winner {
        None => Ok(OracleResult { best_set: VertexSet::empty(n), best_density: Density::Undefined, sets_examined }),
        Some(c) => {
            let best_set = VertexSet::from_mask(n, c.mask);
            let best_density = density::m_p(g, &best_set, p)?;
            Ok(OracleResult { best_set, best_density, sets_examined })
        }
    }
}

/// Optimum as the best over connected components, each solved by
/// enumeration. The ratio `f_p(S)/|S|` of a union never exceeds its best
/// part, so this equals the global optimum while only bounding the largest
/// component by `limit`.
pub fn opt_by_components(g: &Graph, p: PExponent, limit: usize, exec: Exec) -> Result<OracleResult, OracleError> {
    let mut best: Option<(f64, VertexSet)> = None;
    let mut examined = 0u64;
    for comp in g.connected_components() {
        let sub = g.induced_subgraph(&comp);
        let r = brute_force_opt(&sub, p, limit, exec)?;
        examined += r.sets_examined;
        let Some(x) = r.best_density.value() else { continue };
        let lifted = VertexSet::from_vertices(g.n(), r.best_set.iter().map(|v| comp[v]));
        let replace = match &best {
            None => true,
            Some((y, s)) => density::improves(x, lifted.len(), *y, s.len()),
        };
        if replace {
            best = Some((x, lifted));
        }
    }
    match best {
        None => Ok(OracleResult {
            best_set: VertexSet::empty(g.n()),
            best_density: Density::Undefined,
            sets_examined: examined,
        }),
        Some((_, set)) => {
            let best_density = density::m_p(g, &set, p)?;
            Ok(OracleResult { best_set: set, best_density, sets_examined: examined })
        }
    }
}

/// `M_p` of `K_{a,b}` in closed form.
pub fn complete_bipartite_density(a: usize, b: usize, p: PExponent) -> f64 {
    let (a, b) = (a as f64, b as f64);
    match p.value() {
        f64::NEG_INFINITY => a.min(b),
        f64::INFINITY => a.max(b),
        q => ((a * b.powf(q) + b * a.powf(q)) / (a + b)).powf(1.0 / q),
    }
}

/// Optimum of `K_{a,b}`: every induced subgraph with edges is some
/// `K_{a',b'}`, so the best such pair is the answer.
pub fn complete_bipartite_opt(a: usize, b: usize, p: PExponent) -> (usize, usize, f64) {
    let mut best = (a, b, complete_bipartite_density(a, b, p));
    for x in 1..=a {
        for y in 1..=b {
            let v = complete_bipartite_density(x, y, p);
            if density::improves(v, x + y, best.2, best.0 + best.1) {
                best = (x, y, v);
            }
        }
    }
    best
}

/// Outcome of enumerating integer vectors of fixed sum.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatnessReport {
    /// True iff the extremum is attained only by balanced vectors.
    pub holds: bool,
    /// Distinct optimal vectors, each sorted in decreasing order.
    pub optima: Vec<Vec<u32>>,
    pub value: f64,
}

fn compositions(n: usize, s: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == n {
        prefix.push(s);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for x in 0..=s {
        prefix.push(x);
        compositions(n, s - x, prefix, out);
        prefix.pop();
    }
}

/// Over non-negative integer vectors `x` of length `n` summing to `s`,
/// checks that `Σ (c + x_i)^p` is maximized (`p ∈ (0,1)`) or minimized
/// (`p < 0`) only by vectors whose entries differ by at most one.
pub fn int_flat_check(n: usize, c: f64, p: f64, s: usize) -> Result<FlatnessReport, OracleError> {
    if !(p < 0.0 || (p > 0.0 && p < 1.0)) || !p.is_finite() {
        return Err(OracleError::OutOfDomain(p, "(-inf, 0) or (0, 1)"));
    }
    if n == 0 || n > 8 {
        return Err(OracleError::TooLarge { what: "n", got: n, limit: 8 });
    }
    if s > 16 {
        return Err(OracleError::TooLarge { what: "s", got: s, limit: 16 });
    }
    let mut all = Vec::new();
    compositions(n, s as u32, &mut Vec::new(), &mut all);
    let sign = if p > 0.0 { 1.0 } else { -1.0 };
    let scored: Vec<(Vec<u32>, f64)> = all
        .into_iter()
        .filter_map(|x| {
            let total: Option<f64> = x.iter().map(|&xi| power(c + xi as f64, p)).sum();
            let total = total?;
            total.is_finite().then(|| {
                let mut canon = x;
                canon.sort_unstable_by(|a, b| b.cmp(a));
                (canon, total)
            })
        })
        .collect();
    let best = scored.iter().map(|(_, v)| sign * v).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * best.abs().max(1.0);
    let mut optima: Vec<Vec<u32>> =
        scored.into_iter().filter(|(_, v)| sign * v >= best - tol).map(|(x, _)| x).collect();
    optima.sort();
    optima.dedup();
    let hi = s.div_ceil(n) as u32;
    let balanced = |x: &Vec<u32>| x.iter().all(|&e| e == hi || e + 1 == hi);
    let holds = optima.len() == 1 && balanced(&optima[0]);
    Ok(FlatnessReport { holds, optima, value: sign * best })
}

/// Minimizer of `z·w` over the extreme points of every vertex ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct LmoOracle {
    pub z: Vec<f64>,
    pub value: f64,
    pub order: Vec<Vertex>,
}

fn for_each_permutation<F: FnMut(&[Vertex])>(items: &mut Vec<Vertex>, k: usize, f: &mut F) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        for_each_permutation(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Factorial enumeration of ordering extreme points, each evaluated by
/// direct prefix objectives `f_p(prefix_i) - f_p(prefix_{i-1})`.
pub fn brute_force_lmo(g: &Graph, p: f64, w: &[f64]) -> Result<LmoOracle, OracleError> {
    let n = g.n();
    if n > 8 {
        return Err(OracleError::TooLarge { what: "n", got: n, limit: 8 });
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(OracleError::OutOfDomain(p, "[1, inf)"));
    }
    if w.len() != n {
        return Err(OracleError::LengthMismatch { got: w.len(), expected: n });
    }
    let mut best: Option<LmoOracle> = None;
    let mut failure = None;
    let mut items: Vec<Vertex> = (0..n).collect();
    for_each_permutation(&mut items, 0, &mut |order| {
        let mut prefix = VertexSet::empty(n);
        let mut z = vec![0.0; n];
        let mut prev = 0.0;
        for &v in order {
            prefix.insert(v);
            match density::f_p(g, &prefix, p) {
                Ok(cur) => {
                    z[v] = cur - prev;
                    prev = cur;
                }
                Err(e) => failure = Some(e),
            }
        }
        let value: f64 = z.iter().zip(w).map(|(a, b)| a * b).sum();
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(LmoOracle { z, value, order: order.to_vec() });
        }
    });
    if let Some(e) = failure {
        return Err(e.into());
    }
    best.ok_or(OracleError::Density(DensityError::EmptySet))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{clique, complete_bipartite, disjoint_union, gnp, path, star};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64) -> PExponent {
        PExponent::new(x).unwrap()
    }

    fn opt(g: &Graph, x: f64) -> OracleResult {
        brute_force_opt(g, p(x), DEFAULT_LIMIT, Exec::Sequential).unwrap()
    }

    #[test]
    fn clique_beats_path() {
        let g = disjoint_union(&[clique(4).unwrap(), path(3).unwrap()]);
        let r = opt(&g, 1.0);
        assert_eq!(r.best_set.to_vec(), vec![0, 1, 2, 3]);
        assert_eq!(r.best_density, Density::Defined(3.0));
        assert_eq!(r.sets_examined, 127);
    }

    #[test]
    fn bipartite_two_four() {
        let r = opt(&complete_bipartite(2, 4).unwrap(), 1.0);
        assert_eq!(r.best_set.len(), 6);
        assert!((r.best_density.value().unwrap() - 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn star_negative_p_beats_an_edge() {
        // K_{1,3} and K_{1,2} both reach 1.2 > 1; the tie goes to the smaller set
        let r = opt(&star(3).unwrap(), -1.0);
        let whole = density::m_p(&star(3).unwrap(), &VertexSet::full(4), p(-1.0)).unwrap();
        assert!((whole.value().unwrap() - 1.2).abs() < 1e-12);
        assert_eq!(r.best_set.len(), 3);
        assert!((r.best_density.value().unwrap() - whole.value().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn refuses_large_graphs() {
        let g = path(30).unwrap();
        assert!(matches!(
            brute_force_opt(&g, p(1.0), DEFAULT_LIMIT, Exec::Sequential),
            Err(OracleError::TooLarge { .. })
        ));
    }

    #[test]
    fn matches_naive_enumeration_and_is_self_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for i in 0..25 {
            let g = gnp(8, if i % 2 == 0 { 0.3 } else { 0.6 }, &mut rng);
            for &x in &[-2.0, -1.0, 0.5, 1.0, 2.0, f64::NEG_INFINITY, f64::INFINITY] {
                let pe = PExponent::new(x).unwrap();
                let r = brute_force_opt(&g, pe, DEFAULT_LIMIT, Exec::Parallel).unwrap();
                let s = brute_force_opt(&g, pe, DEFAULT_LIMIT, Exec::Sequential).unwrap();
                assert_eq!(r, s);
                let mut naive = f64::NEG_INFINITY;
                for mask in 1u64..(1 << g.n()) {
                    let set = VertexSet::from_mask(g.n(), mask);
                    if let Density::Defined(d) = density::m_p(&g, &set, pe).unwrap() {
                        naive = naive.max(d);
                    }
                }
                match r.best_density {
                    Density::Defined(d) => {
                        assert!((d - naive).abs() <= 1e-9 * naive.abs().max(1.0));
                        assert_eq!(density::m_p(&g, &r.best_set, pe).unwrap(), r.best_density);
                    }
                    Density::Undefined => assert_eq!(naive, f64::NEG_INFINITY),
                }
            }
        }
    }

    #[test]
    fn weighted_enumeration() {
        let g = Graph::from_weighted_edges(4, &[(0, 1, 3.0), (1, 2, 0.5), (2, 3, 0.5)]).unwrap();
        let r = opt(&g, 1.0);
        assert_eq!(r.best_set.to_vec(), vec![0, 1]);
        assert_eq!(r.best_density, Density::Defined(3.0));
    }

    #[test]
    fn components_agree_with_whole_graph() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let g = disjoint_union(&[gnp(5, 0.5, &mut rng), gnp(6, 0.4, &mut rng)]);
            for &x in &[-1.0, 0.5, 2.0] {
                let a = opt(&g, x);
                let b = opt_by_components(&g, p(x), DEFAULT_LIMIT, Exec::Sequential).unwrap();
                match (a.best_density, b.best_density) {
                    (Density::Defined(u), Density::Defined(v)) => assert!((u - v).abs() < 1e-9),
                    (u, v) => assert_eq!(u, v),
                }
            }
        }
    }

    #[test]
    fn bipartite_closed_form_matches_enumeration() {
        for (a, b) in [(1, 1), (2, 3), (3, 5), (2, 7)] {
            for &x in &[-1.0, 0.5, 1.0, 2.0] {
                let g = complete_bipartite(a, b).unwrap();
                let (_, _, v) = complete_bipartite_opt(a, b, p(x));
                let r = opt(&g, x).best_density.value().unwrap();
                assert!((v - r).abs() < 1e-9, "K_{a},{b} p={x}: {v} vs {r}");
            }
        }
    }

    #[test]
    fn flatness_examples() {
        let r = int_flat_check(3, 5.0, 0.5, 4).unwrap();
        assert!(r.holds);
        assert_eq!(r.optima, vec![vec![2, 1, 1]]);
        let r = int_flat_check(4, 5.385, -1.0, 4).unwrap();
        assert!(r.holds);
        assert_eq!(r.optima, vec![vec![1, 1, 1, 1]]);
        assert!(int_flat_check(2, 1.0, 2.0, 2).is_err());
        assert!(int_flat_check(9, 1.0, 0.5, 2).is_err());
        assert!(int_flat_check(3, 1.0, 0.5, 17).is_err());
        // zero offset skips vectors with an infinite term
        assert!(int_flat_check(3, 0.0, -1.0, 6).unwrap().holds);
    }

    #[test]
    fn lmo_oracle_examples() {
        let g = clique(3).unwrap();
        let r = brute_force_lmo(&g, 1.0, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.z, vec![4.0, 2.0, 0.0]);
        let e = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let r = brute_force_lmo(&e, 2.0, &[1.0, 1.0]).unwrap();
        let mut z = r.z.clone();
        z.sort_by(f64::total_cmp);
        assert_eq!(z, vec![0.0, 2.0]);
        assert!(brute_force_lmo(&path(9).unwrap(), 1.0, &[0.0; 9]).is_err());
    }
}
