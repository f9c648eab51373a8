//! Deterministic and seeded-random graph constructors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, GraphBuilder, GraphError, Vertex};

pub fn clique(k: usize) -> Result<Graph, GraphError> {
    if k == 0 {
        return Err(GraphError::Construction("clique needs k >= 1".into()));
    }
    let mut b = GraphBuilder::new(k, false);
    for u in 0..k {
        for v in u + 1..k {
            b.add_edge(u, v, 1.0)?;
        }
    }
    Ok(b.build())
}

/// `K_{a,b}`; the `a` side gets ids `0..a`.
pub fn complete_bipartite(a: usize, b: usize) -> Result<Graph, GraphError> {
    if a == 0 || b == 0 {
        return Err(GraphError::Construction("complete_bipartite needs a, b >= 1".into()));
    }
    let mut builder = GraphBuilder::new(a + b, false);
    for u in 0..a {
        for v in a..a + b {
            builder.add_edge(u, v, 1.0)?;
        }
    }
    Ok(builder.build())
}

pub fn path(n: usize) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::Construction("path needs n >= 1".into()));
    }
    let edges: Vec<(Vertex, Vertex)> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges)
}

/// Star `K_{1,leaves}` with the centre at id 0.
pub fn star(leaves: usize) -> Result<Graph, GraphError> {
    complete_bipartite(1, leaves)
}

/// Circulant graph: `i ~ i ± o (mod n)` for every offset `o`.
///
/// Offsets must be distinct and lie in `[1, n/2]`. An offset equal to
/// `n/2` (only possible for even `n`) contributes one edge per vertex.
pub fn circulant(n: usize, offsets: &[usize]) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::Construction("circulant needs n >= 2".into()));
    }
    let mut seen = std::collections::HashSet::new();
    for &o in offsets {
        if o == 0 || 2 * o > n {
            return Err(GraphError::Construction(format!("circulant offset {o} outside [1, n/2] for n = {n}")));
        }
        if !seen.insert(o) {
            return Err(GraphError::Construction(format!("duplicate circulant offset {o}")));
        }
    }
    let mut b = GraphBuilder::new(n, false);
    for i in 0..n {
        for &o in offsets {
            b.add_edge(i, (i + o) % n, 1.0)?;
        }
    }
    Ok(b.build())
}

/// Disjoint union; part `k` occupies the id range following parts `0..k`.
/// The result is weighted iff any part is.
pub fn disjoint_union(parts: &[Graph]) -> Graph {
    let n: usize = parts.iter().map(Graph::n).sum();
    let weighted = parts.iter().any(Graph::is_weighted);
    let mut b = GraphBuilder::new(n, weighted);
    let mut base = 0;
    for g in parts {
        for (u, v, w) in g.edges() {
            b.add_edge(base + u, base + v, w).expect("edges of a valid part");
        }
        base += g.n();
    }
    b.build()
}

/// Erdős–Rényi `G(n, q)`.
pub fn gnp<R: Rng>(n: usize, q: f64, rng: &mut R) -> Graph {
    let mut b = GraphBuilder::new(n, false);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(q) {
                b.add_edge(u, v, 1.0).expect("in range");
            }
        }
    }
    b.build()
}

/// `G(n, q)` redrawn until no vertex is isolated.
pub fn gnp_no_isolated<R: Rng>(n: usize, q: f64, rng: &mut R) -> Graph {
    loop {
        let g = gnp(n, q, rng);
        if g.isolated_count() == 0 {
            return g;
        }
    }
}

/// Parameters of the seeded small-graph suite used for validation and
/// benchmarking: `n` uniform in `[min_n, max_n]`, edge probability cycling
/// through `probs`.
#[derive(Clone, Debug)]
pub struct SuiteSpec {
    pub seed: u64,
    pub count: usize,
    pub min_n: usize,
    pub max_n: usize,
    pub probs: Vec<f64>,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        SuiteSpec { seed: 2023, count: 200, min_n: 4, max_n: 10, probs: vec![0.3, 0.6] }
    }
}

impl SuiteSpec {
    pub fn build(&self) -> Vec<Graph> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count)
            .map(|i| {
                let n = rng.gen_range(self.min_n..=self.max_n);
                let q = self.probs[i % self.probs.len()];
                gnp_no_isolated(n, q, &mut rng)
            })
            .collect()
    }
}
