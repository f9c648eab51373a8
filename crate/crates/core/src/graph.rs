//! Undirected, optionally edge-weighted graphs stored in CSR form.
//!
//! Vertices are dense ids `0..n`. The original labels read from an edge list
//! are kept in a side table so results can be reported in input terms.

use std::collections::VecDeque;
use std::io::BufRead;

use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: edge weight must be positive, got {weight}")]
    InvalidWeight { line: usize, weight: f64 },
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("invalid construction: {0}")]
    Construction(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Immutable undirected graph.
///
/// Adjacency lists are sorted by neighbour id, carry no self-loops and no
/// duplicate entries. When the graph is unweighted every edge has weight 1.
#[derive(Clone, Debug)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<Vertex>,
    weights: Option<Vec<f64>>,
    degree: Vec<usize>,
    weighted_degree: Vec<f64>,
    labels: Vec<u64>,
    m: usize,
}

impl Graph {
    /// Unweighted graph from an edge slice. Self-loops are dropped and
    /// parallel edges collapse to one.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Graph, GraphError> {
        let mut b = GraphBuilder::new(n, false);
        for &(u, v) in edges {
            b.add_edge(u, v, 1.0)?;
        }
        Ok(b.build())
    }

    /// Weighted graph; parallel edges have their weights summed.
    pub fn from_weighted_edges(n: usize, edges: &[(Vertex, Vertex, f64)]) -> Result<Graph, GraphError> {
        let mut b = GraphBuilder::new(n, true);
        for &(u, v, w) in edges {
            b.add_edge(u, v, w)?;
        }
        Ok(b.build())
    }

    pub fn n(&self) -> usize {
        self.degree.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Neighbours of `v` paired with the connecting edge weight.
    pub fn incident(&self, v: Vertex) -> impl Iterator<Item = (Vertex, f64)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        let weights = self.weights.as_deref();
        range.map(move |i| (self.targets[i], weights.map_or(1.0, |w| w[i])))
    }

    /// Number of incident edges.
    pub fn degree(&self, v: Vertex) -> usize {
        self.degree[v]
    }

    /// Sum of incident edge weights (equals `degree` when unweighted).
    pub fn weighted_degree(&self, v: Vertex) -> f64 {
        self.weighted_degree[v]
    }

    pub fn weighted_degrees(&self) -> &[f64] {
        &self.weighted_degree
    }

    pub fn max_degree(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0)
    }

    pub fn label(&self, v: Vertex) -> u64 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn weight_between(&self, u: Vertex, v: Vertex) -> Option<f64> {
        let nbrs = self.neighbors(u);
        nbrs.binary_search(&v).ok().map(|i| self.weights.as_ref().map_or(1.0, |w| w[self.offsets[u] + i]))
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, f64)> + '_ {
        (0..self.n()).flat_map(move |u| self.incident(u).filter(move |&(v, _)| u < v).map(move |(v, w)| (u, v, w)))
    }

    pub fn isolated_count(&self) -> usize {
        self.degree.iter().filter(|&&d| d == 0).count()
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<Vertex>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &u in self.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Subgraph induced by `vertices`; new ids follow the order given.
    pub fn induced_subgraph(&self, vertices: &[Vertex]) -> Graph {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut b = GraphBuilder::new(vertices.len(), self.is_weighted());
        for (i, &v) in vertices.iter().enumerate() {
            for (u, w) in self.incident(v) {
                let j = index[u];
                if j != usize::MAX && i < j {
                    b.push_unchecked(i, j, w);
                }
            }
        }
        let mut g = b.build();
        g.labels = vertices.iter().map(|&v| self.labels[v]).collect();
        g
    }

    /// Copy of the graph with every degree-0 vertex removed.
    pub fn without_isolated(&self) -> Graph {
        let keep: Vec<Vertex> = (0..self.n()).filter(|&v| self.degree[v] > 0).collect();
        self.induced_subgraph(&keep)
    }

    /// Serializes to the edge-list text format, one `u v` (or `u v w`) line
    /// per edge using the original labels.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v, w) in self.edges() {
            if self.is_weighted() {
                out.push_str(&format!("{} {} {}\n", self.labels[u], self.labels[v], w));
            } else {
                out.push_str(&format!("{} {}\n", self.labels[u], self.labels[v]));
            }
        }
        out
    }

    /// Bitmask adjacency rows, available for graphs with at most 64 vertices.
    pub fn adjacency_masks(&self) -> Option<Vec<u64>> {
        if self.n() > 64 {
            return None;
        }
        Some((0..self.n()).map(|v| self.neighbors(v).iter().fold(0u64, |acc, &u| acc | (1u64 << u))).collect())
    }

    /// Relabels vertices with the given labels (must have length `n`).
    pub fn with_labels(mut self, labels: Vec<u64>) -> Graph {
        assert_eq!(labels.len(), self.n(), "label table length must equal n");
        self.labels = labels;
        self
    }
}

/// Accumulates edges and produces a [`Graph`].
#[derive(Debug)]
pub struct GraphBuilder {
    n: usize,
    weighted: bool,
    edges: Vec<(Vertex, Vertex, f64)>,
}

impl GraphBuilder {
    pub fn new(n: usize, weighted: bool) -> GraphBuilder {
        GraphBuilder { n, weighted, edges: Vec::new() }
    }

    /// Adds an undirected edge. Self-loops are silently ignored.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex, w: f64) -> Result<(), GraphError> {
        for x in [u, v] {
            if x >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: x, n: self.n });
            }
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(GraphError::Construction(format!("edge ({u}, {v}) has non-positive or non-finite weight {w}")));
        }
        if u != v {
            self.push_unchecked(u, v, w);
        }
        Ok(())
    }

    fn push_unchecked(&mut self, u: Vertex, v: Vertex, w: f64) {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges.push((a, b, if self.weighted { w } else { 1.0 }));
    }

    pub fn build(mut self) -> Graph {
        self.edges.sort_by_key(|x| (x.0, x.1));
        let mut merged: Vec<(Vertex, Vertex, f64)> = Vec::with_capacity(self.edges.len());
        for (u, v, w) in self.edges {
            match merged.last_mut() {
                Some(last) if last.0 == u && last.1 == v => {
                    if self.weighted {
                        last.2 += w;
                    }
                }
                _ => merged.push((u, v, w)),
            }
        }

        let n = self.n;
        let mut degree = vec![0usize; n];
        for &(u, v, _) in &merged {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0; offsets[n]];
        let mut weights = vec![0.0; offsets[n]];
        for &(u, v, w) in &merged {
            targets[fill[u]] = v;
            weights[fill[u]] = w;
            fill[u] += 1;
        }
        for &(u, v, w) in &merged {
            targets[fill[v]] = u;
            weights[fill[v]] = w;
            fill[v] += 1;
        }
        for v in 0..n {
            let (lo, hi) = (offsets[v], offsets[v + 1]);
            let mut row: Vec<(Vertex, f64)> =
                targets[lo..hi].iter().copied().zip(weights[lo..hi].iter().copied()).collect();
            row.sort_by_key(|&(t, _)| t);
            for (i, (t, w)) in row.into_iter().enumerate() {
                targets[lo + i] = t;
                weights[lo + i] = w;
            }
        }
        let weighted_degree = (0..n).map(|v| weights[offsets[v]..offsets[v + 1]].iter().sum()).collect();
        Graph {
            m: merged.len(),
            offsets,
            targets,
            weights: self.weighted.then_some(weights),
            degree,
            weighted_degree,
            labels: (0..n as u64).collect(),
        }
    }
}

/// Reads an edge list: one `u v` or `u v w` per line, `#` starts a comment.
///
/// Parallel edges are collapsed (weights summed when `weighted`), self-loops
/// dropped, and labels compacted to `0..n` in first-seen order. Because
/// labels are only registered by non-loop edges the result never contains
/// isolated vertices. In unweighted mode a third column is ignored.
pub fn load_edge_list<R: BufRead>(reader: R, weighted: bool) -> Result<Graph, GraphError> {
    let mut ids: std::collections::HashMap<u64, Vertex> = std::collections::HashMap::new();
    let mut labels: Vec<u64> = Vec::new();
    let mut raw: Vec<(Vertex, Vertex, f64)> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| GraphError::Io(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tok = line.split_whitespace();
        let vertex = |t: Option<&str>| -> Result<u64, GraphError> {
            let t = t.ok_or_else(|| GraphError::Parse { line: lineno, msg: "expected two vertex ids".into() })?;
            t.parse::<u64>().map_err(|_| GraphError::Parse { line: lineno, msg: format!("invalid vertex id {t:?}") })
        };
        let a = vertex(tok.next())?;
        let b = vertex(tok.next())?;
        let w = match (weighted, tok.next()) {
            (true, Some(t)) => {
                let w: f64 =
                    t.parse().map_err(|_| GraphError::Parse { line: lineno, msg: format!("invalid weight {t:?}") })?;
                if !(w > 0.0 && w.is_finite()) {
                    return Err(GraphError::InvalidWeight { line: lineno, weight: w });
                }
                w
            }
            _ => 1.0,
        };
        if weighted && tok.next().is_some() {
            return Err(GraphError::Parse { line: lineno, msg: "too many columns".into() });
        }
        if a == b {
            continue;
        }
        let mut intern = |label: u64| {
            *ids.entry(label).or_insert_with(|| {
                labels.push(label);
                labels.len() - 1
            })
        };
        let (u, v) = (intern(a), intern(b));
        raw.push((u, v, w));
    }

    let mut b = GraphBuilder::new(labels.len(), weighted);
    for (u, v, w) in raw {
        b.push_unchecked(u, v, w);
    }
    Ok(b.build().with_labels(labels))
}

pub fn parse_edge_list(text: &str, weighted: bool) -> Result<Graph, GraphError> {
    load_edge_list(text.as_bytes(), weighted)
}

/// Indicator set over the vertices of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSet {
    members: Vec<bool>,
    size: usize,
}

impl VertexSet {
    pub fn empty(n: usize) -> VertexSet {
        VertexSet { members: vec![false; n], size: 0 }
    }

    pub fn full(n: usize) -> VertexSet {
        VertexSet { members: vec![true; n], size: n }
    }

    pub fn from_vertices<I: IntoIterator<Item = Vertex>>(n: usize, vertices: I) -> VertexSet {
        let mut s = VertexSet::empty(n);
        for v in vertices {
            s.insert(v);
        }
        s
    }

    /// Bit `i` of `mask` selects vertex `i`.
    pub fn from_mask(n: usize, mask: u64) -> VertexSet {
        VertexSet::from_vertices(n, (0..n).filter(|&i| mask >> i & 1 == 1))
    }

    pub fn insert(&mut self, v: Vertex) -> bool {
        if self.members[v] {
            return false;
        }
        self.members[v] = true;
        self.size += 1;
        true
    }

    pub fn remove(&mut self, v: Vertex) -> bool {
        if !self.members[v] {
            return false;
        }
        self.members[v] = false;
        self.size -= 1;
        true
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.members.get(v).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Size of the ground set.
    pub fn universe(&self) -> usize {
        self.members.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.members.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }

    pub fn indicator(&self) -> &[bool] {
        &self.members
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_from_text() {
        let g = parse_edge_list("0 1\n1 2\n", false).unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = parse_edge_list("0 1\n0 1\n", false).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(g.weighted_degree(0), 1.0);

        let w = parse_edge_list("0 1 2\n1 0 0.5\n", true).unwrap();
        assert_eq!(w.m(), 1);
        assert_eq!(w.weight_between(0, 1), Some(2.5));
        assert_eq!(w.weighted_degree(1), 2.5);
    }

    #[test]
    fn self_loops_dropped() {
        let g = parse_edge_list("0 0\n0 1\n", false).unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
        // a label seen only on a self-loop never becomes a vertex
        let g = parse_edge_list("7 7\n0 1\n", false).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.isolated_count(), 0);
    }

    #[test]
    fn labels_compacted_in_first_seen_order() {
        let g = parse_edge_list("# header\n10 4\r\n4 99\n", false).unwrap();
        assert_eq!(g.labels(), &[10, 4, 99]);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_edge_list("0 1\n1 x\n", false).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }));
        let err = parse_edge_list("0 1\n2\n", false).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }));
        let err = parse_edge_list("0 1 1\n1 2 -3\n", true).unwrap_err();
        assert_eq!(err, GraphError::InvalidWeight { line: 2, weight: -3.0 });
        let err = parse_edge_list("0 1 0\n", true).unwrap_err();
        assert!(matches!(err, GraphError::InvalidWeight { line: 1, .. }));
    }

    #[test]
    fn unweighted_mode_ignores_third_column() {
        let g = parse_edge_list("0 1 1700000000\n", false).unwrap();
        assert!(!g.is_weighted());
        assert_eq!(g.m(), 1);
    }

    #[test]
    fn symmetric_adjacency() {
        let g = Graph::from_weighted_edges(4, &[(0, 1, 1.5), (2, 1, 0.25), (3, 0, 2.0)]).unwrap();
        for u in 0..g.n() {
            for (v, w) in g.incident(u) {
                assert_eq!(g.weight_between(v, u), Some(w));
            }
            let sum: f64 = g.incident(u).map(|(_, w)| w).sum();
            assert_eq!(sum, g.weighted_degree(u));
        }
    }

    #[test]
    fn components_and_isolated_removal() {
        let g = Graph::from_edges(6, &[(0, 1), (2, 3), (3, 4)]).unwrap();
        assert_eq!(g.connected_components(), vec![vec![0, 1], vec![2, 3, 4], vec![5]]);
        let h = g.without_isolated();
        assert_eq!(h.n(), 5);
        assert_eq!(h.labels(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn vertex_set_bookkeeping() {
        let mut s = VertexSet::from_mask(5, 0b10110);
        assert_eq!(s.to_vec(), vec![1, 2, 4]);
        assert_eq!(s.len(), 3);
        assert!(!s.insert(2));
        assert!(s.remove(1));
        assert_eq!(s.len(), s.indicator().iter().filter(|&&b| b).count());
    }
}
