//! Dense simple undirected graphs stored as adjacency bit rows.

use std::fmt;

use thiserror::Error;

/// Largest supported order. Keeps the graph6 order header on a single byte.
pub const MAX_ORDER: usize = 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("order {0} outside the supported range 1..={MAX_ORDER}")]
    OrderOutOfRange(usize),
    #[error("vertex {vertex} out of range for a graph of order {order}")]
    VertexOutOfRange { vertex: usize, order: usize },
    #[error("loop on vertex {0}")]
    Loop(usize),
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
}

/// An undirected simple graph on vertices `0..n`.
///
/// Row `i` holds the neighbourhood of vertex `i` as a bit set. The matrix is
/// kept symmetric with an empty diagonal by every mutating method.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    n: usize,
    rows: Vec<u64>,
}

impl Graph {
    /// The edgeless graph of order `n`.
    pub fn empty(n: usize) -> Result<Graph, GraphError> {
        if n == 0 || n > MAX_ORDER {
            return Err(GraphError::OrderOutOfRange(n));
        }
        Ok(Graph { n, rows: vec![0; n] })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut g = Graph::empty(n)?;
        for &(a, b) in edges {
            g.check_vertex(a)?;
            g.check_vertex(b)?;
            if a == b {
                return Err(GraphError::Loop(a));
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }

    /// Caller guarantees symmetric rows with an empty diagonal.
    pub(crate) fn from_rows_unchecked(n: usize, rows: Vec<u64>) -> Graph {
        debug_assert_eq!(rows.len(), n);
        Graph { n, rows }
    }

    pub fn complete(n: usize) -> Result<Graph, GraphError> {
        let mut g = Graph::empty(n)?;
        let all = low_mask(n);
        for v in 0..n {
            g.rows[v] = all & !(1u64 << v);
        }
        Ok(g)
    }

    pub fn path(n: usize) -> Result<Graph, GraphError> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Graph, GraphError> {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        Graph::from_edges(n, &edges)
    }

    /// The star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Result<Graph, GraphError> {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_edges(leaves + 1, &edges)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.rows[a] >> b & 1 == 1
    }

    /// Adds edge `ab`. Panics when `a == b` or either endpoint is out of range.
    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a != b && a < self.n && b < self.n, "invalid edge {a}-{b}");
        self.rows[a] |= 1 << b;
        self.rows[b] |= 1 << a;
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        assert!(a < self.n && b < self.n, "invalid edge {a}-{b}");
        self.rows[a] &= !(1 << b);
        self.rows[b] &= !(1 << a);
    }

    /// Neighbourhood of `v` as a bit set.
    #[inline]
    pub fn neighbors_mask(&self, v: usize) -> u64 {
        self.rows[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        Bits(self.rows[v])
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones() as usize
    }

    /// Bit set with every vertex of the graph.
    #[inline]
    pub fn vertex_mask(&self) -> u64 {
        low_mask(self.n)
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Edges `(a, b)` with `a < b`, ordered by `b` then `a` (graph6 column order).
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.n).flat_map(move |b| (0..b).filter(move |&a| self.has_edge(a, b)).map(move |a| (a, b)))
    }

    pub fn complement(&self) -> Graph {
        let all = self.vertex_mask();
        let rows = (0..self.n).map(|v| all & !self.rows[v] & !(1u64 << v)).collect();
        Graph { n: self.n, rows }
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &VertexPermutation) -> Graph {
        debug_assert_eq!(perm.len(), self.n);
        let mut rows = vec![0u64; self.n];
        for (v, row) in self.rows.iter().enumerate() {
            let mut image = 0u64;
            for u in Bits(*row) {
                image |= 1 << perm.image(u);
            }
            rows[perm.image(v)] = image;
        }
        Graph { n: self.n, rows }
    }

    /// Subgraph induced by the vertices of `keep`, relabelled in increasing order.
    pub fn induced(&self, keep: u64) -> Graph {
        let keep = keep & self.vertex_mask();
        let verts: Vec<usize> = Bits(keep).collect();
        let mut rows = vec![0u64; verts.len()];
        for (i, &v) in verts.iter().enumerate() {
            for (j, &u) in verts.iter().enumerate() {
                if self.has_edge(v, u) {
                    rows[i] |= 1 << j;
                }
            }
        }
        Graph { n: verts.len(), rows }
    }

    /// Removes vertex `v`; vertices above `v` shift down by one.
    /// Returns `None` when the graph has a single vertex.
    pub fn delete_vertex(&self, v: usize) -> Option<Graph> {
        if self.n == 1 {
            return None;
        }
        Some(self.induced(self.vertex_mask() & !(1u64 << v)))
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, order: self.n })
        }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<_> = self.edges().collect();
        f.debug_struct("Graph").field("n", &self.n).field("edges", &edges).finish()
    }
}

/// A bijection on `0..n`; `image(v)` is the new label of `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexPermutation(Vec<usize>);

impl VertexPermutation {
    pub fn new(images: Vec<usize>) -> Result<VertexPermutation, GraphError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(GraphError::NotAPermutation(n));
            }
            seen[i] = true;
        }
        Ok(VertexPermutation(images))
    }

    pub fn identity(n: usize) -> VertexPermutation {
        VertexPermutation((0..n).collect())
    }

    pub(crate) fn from_vec_unchecked(images: Vec<usize>) -> VertexPermutation {
        VertexPermutation(images)
    }

    #[inline]
    pub fn image(&self, v: usize) -> usize {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> VertexPermutation {
        let mut inv = vec![0; self.0.len()];
        for (v, &i) in self.0.iter().enumerate() {
            inv[i] = v;
        }
        VertexPermutation(inv)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// Mask with the lowest `n` bits set.
#[inline]
pub fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterator over the set bits of a word, lowest first.
#[derive(Clone, Copy)]
pub struct Bits(pub u64);

impl Iterator for Bits {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            let i = self.0.trailing_zeros() as usize;
            self.0 &= self.0 - 1;
            Some(i)
        }
    }
}
