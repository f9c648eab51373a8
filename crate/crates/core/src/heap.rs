//! Addressable binary min-heap over vertex ids with `f64` keys.
//!
//! Keys are compared after snapping to a fixed absolute grid of
//! [`KEY_GRID`], then by vertex id. Two peelers that compute the same
//! marginals through different float operation orders therefore break ties
//! the same way.

use crate::graph::Vertex;

/// Resolution of key comparisons (2^-24).
pub const KEY_GRID: f64 = 1.0 / 16_777_216.0;

const ABSENT: usize = usize::MAX;

#[inline]
fn snap(k: f64) -> f64 {
    (k / KEY_GRID).round()
}

#[derive(Clone, Debug)]
pub struct IndexedMinHeap {
    heap: Vec<Vertex>,
    pos: Vec<usize>,
    key: Vec<f64>,
}

impl IndexedMinHeap {
    pub fn new(n: usize) -> IndexedMinHeap {
        IndexedMinHeap { heap: Vec::with_capacity(n), pos: vec![ABSENT; n], key: vec![0.0; n] }
    }

    /// Heap containing every vertex `0..keys.len()`, built in O(n).
    pub fn with_keys(keys: Vec<f64>) -> IndexedMinHeap {
        let n = keys.len();
        let mut h = IndexedMinHeap { heap: (0..n).collect(), pos: (0..n).collect(), key: keys };
        for i in (0..n / 2).rev() {
            h.sift_down(i);
        }
        h
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.pos[v] != ABSENT
    }

    pub fn key(&self, v: Vertex) -> f64 {
        self.key[v]
    }

    pub fn peek(&self) -> Option<(Vertex, f64)> {
        self.heap.first().map(|&v| (v, self.key[v]))
    }

    pub fn push(&mut self, v: Vertex, k: f64) {
        assert!(!self.contains(v), "vertex {v} already queued");
        self.key[v] = k;
        self.pos[v] = self.heap.len();
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1);
    }

    pub fn pop(&mut self) -> Option<(Vertex, f64)> {
        let top = *self.heap.first()?;
        self.remove_at(0);
        Some((top, self.key[top]))
    }

    /// Changes the key of a queued vertex in either direction.
    pub fn set_key(&mut self, v: Vertex, k: f64) {
        let i = self.pos[v];
        assert!(i != ABSENT, "vertex {v} not queued");
        let old = self.key[v];
        self.key[v] = k;
        if k < old {
            self.sift_up(i);
        } else {
            self.sift_down(i);
        }
    }

    pub fn remove(&mut self, v: Vertex) -> bool {
        match self.pos[v] {
            ABSENT => false,
            i => {
                self.remove_at(i);
                true
            }
        }
    }

    fn remove_at(&mut self, i: usize) {
        let v = self.heap[i];
        let last = self.heap.len() - 1;
        self.swap(i, last);
        self.heap.pop();
        self.pos[v] = ABSENT;
        if i < self.heap.len() {
            self.sift_up(i);
            self.sift_down(i);
        }
    }

    #[inline]
    fn less(&self, a: Vertex, b: Vertex) -> bool {
        match snap(self.key[a]).total_cmp(&snap(self.key[b])) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => a < b,
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos[self.heap[i]] = i;
        self.pos[self.heap[j]] = j;
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.less(self.heap[i], self.heap[parent]) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.heap.len();
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut m = i;
            if l < n && self.less(self.heap[l], self.heap[m]) {
                m = l;
            }
            if r < n && self.less(self.heap[r], self.heap[m]) {
                m = r;
            }
            if m == i {
                break;
            }
            self.swap(i, m);
            i = m;
        }
    }
}
