//! Canonical labelling by equitable partition refinement.
//!
//! The search individualises vertices of the first non-singleton cell,
//! refines to an equitable partition, and keeps the discrete leaf whose
//! relabelled adjacency rows are lexicographically greatest. Leaves with
//! identical relabelled rows yield automorphisms, which prune both sibling
//! subtrees (orbit pruning) and the remainder of the current subtree.

use crate::graph::{Bits, Graph, VertexPermutation};

/// Returns `C(g)` and the permutation taking `g` onto it.
///
/// Two graphs have equal canonical forms exactly when they are isomorphic.
pub fn canonical_form(g: &Graph) -> (Graph, VertexPermutation) {
    let lab = canonical_order(g);
    let mut images = vec![0; g.order()];
    for (i, &v) in lab.iter().enumerate() {
        images[v as usize] = i;
    }
    let perm = VertexPermutation::from_vec_unchecked(images);
    (g.permute(&perm), perm)
}

pub fn is_isomorphic(g: &Graph, h: &Graph) -> bool {
    if g.order() != h.order() || g.size() != h.size() {
        return false;
    }
    let mut dg: Vec<_> = (0..g.order()).map(|v| g.degree(v)).collect();
    let mut dh: Vec<_> = (0..h.order()).map(|v| h.degree(v)).collect();
    dg.sort_unstable();
    dh.sort_unstable();
    dg == dh && canonical_form(g).0 == canonical_form(h).0
}

/// Generators of the automorphism group found while labelling `g`, as image
/// vectors. Together they generate the full group.
pub fn automorphism_generators(g: &Graph) -> Vec<Vec<usize>> {
    let mut search = Search::new(g.rows());
    search.run();
    search
        .automorphisms
        .into_iter()
        .map(|a| a.into_iter().map(usize::from).collect())
        .collect()
}

/// Vertex orbits of `Aut(g)`: `orbits[v]` is the least vertex in `v`'s orbit.
pub fn automorphism_orbits(g: &Graph) -> Vec<usize> {
    let gens = automorphism_generators(g);
    let mut uf: Vec<usize> = (0..g.order()).collect();
    for gen in &gens {
        for (v, &w) in gen.iter().enumerate() {
            union(&mut uf, v, w);
        }
    }
    (0..g.order()).map(|v| find(&mut uf, v)).collect()
}

/// Vertex order of the canonical leaf: `lab[i]` receives canonical label `i`.
pub(crate) fn canonical_order(g: &Graph) -> Vec<u8> {
    let mut search = Search::new(g.rows());
    search.run();
    search.best.expect("search always reaches a leaf").lab
}

/// Relabelled rows of `g` in canonical order, without building a `Graph`.
pub(crate) fn canonical_rows(g: &Graph) -> Vec<u64> {
    let mut search = Search::new(g.rows());
    search.run();
    search.best.expect("search always reaches a leaf").cert
}

struct Leaf {
    cert: Vec<u64>,
    lab: Vec<u8>,
    path: Vec<u8>,
}

struct Search<'a> {
    rows: &'a [u64],
    n: usize,
    first: Option<Leaf>,
    best: Option<Leaf>,
    automorphisms: Vec<Vec<u8>>,
    queue: Vec<u64>,
}

impl<'a> Search<'a> {
    fn new(rows: &'a [u64]) -> Self {
        Search {
            rows,
            n: rows.len(),
            first: None,
            best: None,
            automorphisms: Vec::new(),
            queue: Vec::with_capacity(64),
        }
    }

    fn run(&mut self) {
        let all = crate::graph::low_mask(self.n);
        let mut cells = vec![all];
        self.queue.clear();
        self.queue.push(all);
        refine(self.rows, &mut cells, &mut self.queue);
        let mut path = Vec::with_capacity(self.n);
        self.search(&cells, &mut path);
    }

    /// Returns `Some(level)` when everything below `level` may be abandoned.
    fn search(&mut self, cells: &[u64], path: &mut Vec<u8>) -> Option<usize> {
        if cells.len() == self.n {
            return self.leaf(cells, path);
        }
        let depth = path.len();
        let (index, target) = cells
            .iter()
            .copied()
            .enumerate()
            .find(|&(_, c)| c & (c - 1) != 0)
            .expect("non-discrete partition has a non-singleton cell");
        let mut explored = 0u64;
        let mut child = Vec::with_capacity(self.n);
        for v in Bits(target) {
            if explored != 0 && self.pruned(v, explored, path) {
                continue;
            }
            explored |= 1 << v;
            child.clear();
            child.extend_from_slice(&cells[..index]);
            child.push(1 << v);
            child.push(target & !(1 << v));
            child.extend_from_slice(&cells[index + 1..]);
            self.queue.clear();
            self.queue.push(1 << v);
            refine(self.rows, &mut child, &mut self.queue);
            path.push(v as u8);
            let jump = self.search(&child, path);
            path.pop();
            if let Some(level) = jump {
                if level < depth {
                    return Some(level);
                }
            }
        }
        None
    }

    fn leaf(&mut self, cells: &[u64], path: &[u8]) -> Option<usize> {
        let lab: Vec<u8> = cells.iter().map(|c| c.trailing_zeros() as u8).collect();
        let cert = certificate(self.rows, &lab);
        let Some(first) = &self.first else {
            let leaf = Leaf { cert: cert.clone(), lab: lab.clone(), path: path.to_vec() };
            self.first = Some(leaf);
            self.best = Some(Leaf { cert, lab, path: path.to_vec() });
            return None;
        };
        if cert == first.cert {
            let level = common_prefix(path, &first.path);
            let gamma = mapping(&first.lab, &lab);
            self.automorphisms.push(gamma);
            return Some(level);
        }
        let best = self.best.as_ref().expect("best set with first");
        match cert.cmp(&best.cert) {
            std::cmp::Ordering::Greater => {
                self.best = Some(Leaf { cert, lab, path: path.to_vec() });
                None
            }
            std::cmp::Ordering::Equal => {
                let level = common_prefix(path, &best.path);
                let gamma = mapping(&best.lab, &lab);
                self.automorphisms.push(gamma);
                Some(level)
            }
            std::cmp::Ordering::Less => None,
        }
    }

    /// Whether `v` shares an orbit with an explored sibling under the
    /// automorphisms found so far that fix the current path pointwise.
    fn pruned(&self, v: usize, explored: u64, path: &[u8]) -> bool {
        let mut uf: Vec<usize> = (0..self.n).collect();
        let mut any = false;
        for gamma in &self.automorphisms {
            if path.iter().all(|&p| gamma[p as usize] == p) {
                any = true;
                for (x, &y) in gamma.iter().enumerate() {
                    union(&mut uf, x, y as usize);
                }
            }
        }
        if !any {
            return false;
        }
        let root = find(&mut uf, v);
        Bits(explored).any(|u| find(&mut uf, u) == root)
    }
}

fn mapping(from: &[u8], to: &[u8]) -> Vec<u8> {
    let mut gamma = vec![0u8; from.len()];
    for (&a, &b) in from.iter().zip(to) {
        gamma[a as usize] = b;
    }
    gamma
}

fn common_prefix(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn find(uf: &mut [usize], mut x: usize) -> usize {
    while uf[x] != x {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    x
}

fn union(uf: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(uf, a), find(uf, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        uf[hi] = lo;
    }
}

/// Rows of the graph relabelled so that `lab[i]` becomes vertex `i`.
fn certificate(rows: &[u64], lab: &[u8]) -> Vec<u64> {
    let mut pos = [0u8; 64];
    for (i, &v) in lab.iter().enumerate() {
        pos[v as usize] = i as u8;
    }
    lab.iter()
        .map(|&v| {
            let mut r = 0u64;
            for u in Bits(rows[v as usize]) {
                r |= 1 << pos[u];
            }
            r
        })
        .collect()
}

/// Refines `cells` to the coarsest equitable partition finer than it, using
/// the splitter cells in `queue`. Fragments are ordered by increasing
/// neighbour count, which keeps the result independent of vertex labels.
fn refine(rows: &[u64], cells: &mut Vec<u64>, queue: &mut Vec<u64>) {
    let n = rows.len();
    let mut head = 0;
    let mut buckets = [0u64; 64];
    while head < queue.len() && cells.len() < n {
        let splitter = queue[head];
        head += 1;
        let mut i = 0;
        while i < cells.len() {
            let cell = cells[i];
            if cell & (cell - 1) == 0 {
                i += 1;
                continue;
            }
            let mut it = Bits(cell);
            let first = it.next().unwrap();
            let c0 = (rows[first] & splitter).count_ones();
            let mut uniform = true;
            let (mut lo, mut hi) = (c0, c0);
            for v in it {
                let c = (rows[v] & splitter).count_ones();
                if c != c0 {
                    uniform = false;
                }
                lo = lo.min(c);
                hi = hi.max(c);
            }
            if uniform {
                i += 1;
                continue;
            }
            for v in Bits(cell) {
                buckets[(rows[v] & splitter).count_ones() as usize] |= 1 << v;
            }
            let mut fragments = Vec::with_capacity(4);
            for b in &mut buckets[lo as usize..=hi as usize] {
                if *b != 0 {
                    fragments.push(*b);
                    *b = 0;
                }
            }
            let count = fragments.len();
            queue.extend_from_slice(&fragments);
            cells.splice(i..=i, fragments);
            i += count;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_equitable(rows: &[u64], cells: &[u64]) -> bool {
        cells.iter().all(|&x| {
            cells.iter().all(|&w| {
                let counts: Vec<u32> = Bits(x).map(|v| (rows[v] & w).count_ones()).collect();
                counts.windows(2).all(|p| p[0] == p[1])
            })
        })
    }

    #[test]
    fn refinement_is_equitable() {
        let g = Graph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (1, 6)]).unwrap();
        let mut cells = vec![g.vertex_mask()];
        let mut queue = vec![g.vertex_mask()];
        refine(g.rows(), &mut cells, &mut queue);
        assert!(is_equitable(g.rows(), &cells));
        assert_eq!(cells.iter().map(|c| c.count_ones()).sum::<u32>(), 7);
    }

    #[test]
    fn relabelled_paths_agree() {
        let p = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let q = Graph::from_edges(3, &[(1, 0), (0, 2)]).unwrap();
        assert_eq!(canonical_form(&p).0, canonical_form(&q).0);
    }

    #[test]
    fn complete_graph_is_fixed() {
        let k = Graph::complete(5).unwrap();
        assert_eq!(canonical_form(&k).0, k);
        let e = Graph::empty(10).unwrap();
        assert_eq!(canonical_form(&e).0, e);
    }

    #[test]
    fn permutation_maps_onto_canonical_form() {
        let g = Graph::from_edges(6, &[(0, 3), (3, 5), (5, 1), (2, 4)]).unwrap();
        let (c, perm) = canonical_form(&g);
        assert_eq!(g.permute(&perm), c);
    }

    #[test]
    fn non_isomorphic_pairs() {
        assert!(!is_isomorphic(&Graph::cycle(4).unwrap(), &Graph::star(3).unwrap()));
        // same degree sequence, different structure: C6 vs two triangles
        let two_k3 = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(!is_isomorphic(&Graph::cycle(6).unwrap(), &two_k3));
    }

    #[test]
    fn orbits_of_a_path() {
        let p = Graph::path(5).unwrap();
        assert_eq!(automorphism_orbits(&p), vec![0, 1, 2, 1, 0]);
        let petersen = Graph::from_edges(
            10,
            &[
                (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
                (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
                (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
            ],
        )
        .unwrap();
        assert!(automorphism_orbits(&petersen).iter().all(|&o| o == 0));
    }

    #[test]
    fn group_order_of_petersen_graph() {
        // |Aut| = 120; check the generators close to a group of that size
        let petersen = Graph::from_edges(
            10,
            &[
                (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
                (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
                (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
            ],
        )
        .unwrap();
        let gens = automorphism_generators(&petersen);
        let mut group: std::collections::HashSet<Vec<usize>> = std::collections::HashSet::new();
        let id: Vec<usize> = (0..10).collect();
        group.insert(id.clone());
        let mut frontier = vec![id];
        while let Some(p) = frontier.pop() {
            for g in &gens {
                let q: Vec<usize> = p.iter().map(|&x| g[x]).collect();
                if group.insert(q.clone()) {
                    frontier.push(q);
                }
            }
        }
        assert_eq!(group.len(), 120);
    }
}
