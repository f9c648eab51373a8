//! Degree-power objectives: `f_p(S) = Σ d_S(v)^p`, `ρ_p = f_p / |S|` and
//! the power mean `M_p(S) = ρ_p(S)^{1/p}` of induced degrees.
//!
//! `0^p` is `0` for `p > 0`. For `p < 0` a member with induced degree zero
//! makes the density [`Density::Undefined`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{Graph, Vertex, VertexSet};

/// Relative tolerance used when comparing densities.
pub const REL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("p = 0 is not supported")]
    ZeroExponent,
    #[error("invalid exponent {0}")]
    InvalidExponent(String),
    #[error("operation needs a finite exponent")]
    NonFiniteExponent,
    #[error("density of the empty set is not defined")]
    EmptySet,
    #[error("vertex {0} is not in the set")]
    NotAMember(Vertex),
    #[error("order is not a permutation of the vertex set")]
    NotAPermutation,
    #[error("p < 0 and the set has a member of induced degree 0")]
    Undefined,
    #[error("set is over {set} vertices but the graph has {graph}")]
    SizeMismatch { set: usize, graph: usize },
}

/// Exponent `p ∈ [-∞, ∞] \ {0}`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct PExponent(f64);

impl PExponent {
    pub const NEG_INFINITY: PExponent = PExponent(f64::NEG_INFINITY);
    pub const INFINITY: PExponent = PExponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<PExponent, DensityError> {
        if p.is_nan() {
            return Err(DensityError::InvalidExponent("NaN".into()));
        }
        if p == 0.0 {
            return Err(DensityError::ZeroExponent);
        }
        Ok(PExponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            f.write_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            f.write_str("-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for PExponent {
    type Err = DensityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        let v = match t.as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => f64::INFINITY,
            "-inf" | "-infinity" => f64::NEG_INFINITY,
            _ => t.parse::<f64>().map_err(|_| DensityError::InvalidExponent(s.to_string()))?,
        };
        PExponent::new(v)
    }
}

/// A power-mean density, or the undefined sentinel for `p < 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Density {
    Defined(f64),
    Undefined,
}

impl Density {
    pub fn value(self) -> Option<f64> {
        match self {
            Density::Defined(x) => Some(x),
            Density::Undefined => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, Density::Defined(_))
    }
}

/// `x^p` with the `0^p` convention; `None` means undefined (`p < 0`, `x = 0`).
#[inline]
pub fn power(x: f64, p: f64) -> Option<f64> {
    if x <= 0.0 {
        if p > 0.0 {
            Some(0.0)
        } else {
            None
        }
    } else {
        Some(x.powf(p))
    }
}

/// `a - b` rounded to zero when the difference is float noise.
#[inline]
pub(crate) fn sub_clamped(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d <= 1e-12 * a.abs().max(1.0) {
        0.0
    } else {
        d
    }
}

fn check_set(g: &Graph, s: &VertexSet) -> Result<(), DensityError> {
    if s.universe() != g.n() {
        return Err(DensityError::SizeMismatch { set: s.universe(), graph: g.n() });
    }
    Ok(())
}

fn finite_exponent(p: f64) -> Result<f64, DensityError> {
    if p.is_nan() {
        Err(DensityError::InvalidExponent("NaN".into()))
    } else if p == 0.0 {
        Err(DensityError::ZeroExponent)
    } else if !p.is_finite() {
        Err(DensityError::NonFiniteExponent)
    } else {
        Ok(p)
    }
}

/// Induced (weighted) degree of `v` within `s`.
pub fn induced_degree(g: &Graph, s: &VertexSet, v: Vertex) -> f64 {
    g.incident(v).filter(|&(u, _)| s.contains(u)).map(|(_, w)| w).sum()
}

/// Induced degrees of all vertices; non-members get 0.
pub fn induced_degrees(g: &Graph, s: &VertexSet) -> Vec<f64> {
    (0..g.n()).map(|v| if s.contains(v) { induced_degree(g, s, v) } else { 0.0 }).collect()
}

/// Power mean of a degree multiset.
pub fn power_mean(degrees: &[f64], p: PExponent) -> Result<Density, DensityError> {
    if degrees.is_empty() {
        return Err(DensityError::EmptySet);
    }
    let p = p.value();
    if p == f64::NEG_INFINITY {
        return Ok(Density::Defined(degrees.iter().copied().fold(f64::INFINITY, f64::min)));
    }
    if p == f64::INFINITY {
        return Ok(Density::Defined(degrees.iter().copied().fold(0.0, f64::max)));
    }
    let mut sum = 0.0;
    for &d in degrees {
        match power(d, p) {
            Some(x) => sum += x,
            None => return Ok(Density::Undefined),
        }
    }
    Ok(Density::Defined((sum / degrees.len() as f64).powf(1.0 / p)))
}

/// `f_p(S) = Σ_{v∈S} d_S(v)^p` for finite `p`.
pub fn f_p(g: &Graph, s: &VertexSet, p: f64) -> Result<f64, DensityError> {
    let p = finite_exponent(p)?;
    check_set(g, s)?;
    s.iter().map(|v| power(induced_degree(g, s, v), p).ok_or(DensityError::Undefined)).sum()
}

/// `ρ_p(S) = f_p(S) / |S|`.
pub fn rho_p(g: &Graph, s: &VertexSet, p: f64) -> Result<f64, DensityError> {
    if s.is_empty() {
        return Err(DensityError::EmptySet);
    }
    Ok(f_p(g, s, p)? / s.len() as f64)
}

/// `M_p(S)`; `p = -∞` gives the minimum induced degree, `p = ∞` the maximum.
pub fn m_p(g: &Graph, s: &VertexSet, p: PExponent) -> Result<Density, DensityError> {
    check_set(g, s)?;
    if s.is_empty() {
        return Err(DensityError::EmptySet);
    }
    let degrees: Vec<f64> = s.iter().map(|v| induced_degree(g, s, v)).collect();
    power_mean(&degrees, p)
}

/// `f_p(S) - f_p(S - v)` via the neighbour-local rewrite
/// `d_S(v)^p + Σ_{u ∈ N(v) ∩ S} d_S(u)^p - (d_S(u) - w_uv)^p`.
pub fn marginal_f_p(g: &Graph, s: &VertexSet, v: Vertex, p: f64) -> Result<f64, DensityError> {
    let p = finite_exponent(p)?;
    check_set(g, s)?;
    if !s.contains(v) {
        return Err(DensityError::NotAMember(v));
    }
    let pw = |x: f64| power(x, p).ok_or(DensityError::Undefined);
    let mut total = pw(induced_degree(g, s, v))?;
    for (u, w) in g.incident(v) {
        if s.contains(u) {
            let du = induced_degree(g, s, u);
            total += pw(du)? - pw(sub_clamped(du, w))?;
        }
    }
    Ok(total)
}

/// Checks that `order` lists every vertex of `g` exactly once.
pub fn check_permutation(n: usize, order: &[Vertex]) -> Result<(), DensityError> {
    if order.len() != n {
        return Err(DensityError::NotAPermutation);
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(DensityError::NotAPermutation);
        }
    }
    Ok(())
}

/// Densities of all suffixes `S_i = {order[i], …, order[n-1]}`, entry `i`
/// for suffix `S_i`. Computed by inserting vertices in reverse order.
pub fn suffix_densities(g: &Graph, order: &[Vertex], p: PExponent) -> Result<Vec<Density>, DensityError> {
    let n = g.n();
    check_permutation(n, order)?;
    let pv = p.value();
    let extreme = !p.is_finite();

    let mut degree = vec![0.0f64; n];
    let mut in_set = vec![false; n];
    let mut sum = 0.0;
    let mut zeros = 0usize;
    // multiset of member degrees, keyed by f64 bits (monotone for x >= 0)
    let mut multiset: BTreeMap<u64, usize> = BTreeMap::new();
    let bump = |ms: &mut BTreeMap<u64, usize>, x: f64, add: bool| {
        let key = x.to_bits();
        if add {
            *ms.entry(key).or_insert(0) += 1;
        } else if let Some(c) = ms.get_mut(&key) {
            *c -= 1;
            if *c == 0 {
                ms.remove(&key);
            }
        }
    };

    let mut out = vec![Density::Undefined; n];
    for i in (0..n).rev() {
        let v = order[i];
        let mut dv = 0.0;
        for (u, w) in g.incident(v) {
            if !in_set[u] {
                continue;
            }
            let old = degree[u];
            let new = old + w;
            if extreme {
                bump(&mut multiset, old, false);
                bump(&mut multiset, new, true);
            } else {
                if old == 0.0 {
                    zeros -= 1;
                } else {
                    sum -= old.powf(pv);
                }
                sum += new.powf(pv);
            }
            degree[u] = new;
            dv += w;
        }
        in_set[v] = true;
        degree[v] = dv;
        if extreme {
            bump(&mut multiset, dv, true);
        } else if dv == 0.0 {
            zeros += 1;
        } else {
            sum += dv.powf(pv);
        }

        let size = (n - i) as f64;
        out[i] = if extreme {
            let pick = if pv > 0.0 { multiset.keys().next_back() } else { multiset.keys().next() };
            Density::Defined(f64::from_bits(*pick.expect("non-empty suffix")))
        } else if pv < 0.0 && zeros > 0 {
            Density::Undefined
        } else {
            Density::Defined((sum.max(0.0) / size).powf(1.0 / pv))
        };
    }
    Ok(out)
}

/// True when `new` (of size `new_size`) should replace the incumbent: it is
/// larger beyond [`REL_TOL`], or tied within tolerance and strictly smaller.
pub fn improves(new: f64, new_size: usize, best: f64, best_size: usize) -> bool {
    let scale = new.abs().max(best.abs());
    if new > best + REL_TOL * scale {
        true
    } else if new >= best - REL_TOL * scale {
        new_size < best_size
    } else {
        false
    }
}

/// Index and value of the best defined suffix density, if any.
pub fn best_suffix(densities: &[Density]) -> Option<(usize, f64)> {
    let n = densities.len();
    let mut best: Option<(usize, f64)> = None;
    for (i, d) in densities.iter().enumerate() {
        let Some(x) = d.value() else { continue };
        match best {
            Some((j, y)) if !improves(x, n - i, y, n - j) => {}
            _ => best = Some((i, x)),
        }
    }
    best
}
