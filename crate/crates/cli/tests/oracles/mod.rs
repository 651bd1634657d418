//! Brute-force reference implementations, written against plain edge lists
//! and adjacency matrices rather than the library's bitset routines.

use std::collections::{BTreeSet, VecDeque};

pub type Matrix = Vec<Vec<bool>>;

pub fn matrix(n: usize, edges: &[(usize, usize)]) -> Matrix {
    let mut a = vec![vec![false; n]; n];
    for &(u, v) in edges {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// Order byte `n + 63`, then the upper triangle column by column in six-bit
/// big-endian groups offset by 63. Orders below 63 only.
pub fn graph6_decode(text: &str) -> (usize, Vec<(usize, usize)>) {
    let bytes = text.as_bytes();
    let n = (bytes[0] - 63) as usize;
    let bits: Vec<bool> = bytes[1..].iter().flat_map(|&b| (0..6).rev().map(move |k| (b - 63) >> k & 1 == 1)).collect();
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bits[k] {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    (n, edges)
}

pub fn bfs(a: &Matrix, s: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; a.len()];
    dist[s] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(v) = q.pop_front() {
        for w in 0..a.len() {
            if a[v][w] && dist[w].is_none() {
                dist[w] = Some(dist[v].unwrap() + 1);
                q.push_back(w);
            }
        }
    }
    dist
}

pub fn eccentricities(a: &Matrix) -> Option<Vec<i64>> {
    (0..a.len())
        .map(|s| bfs(a, s).into_iter().collect::<Option<Vec<_>>>().map(|d| d.into_iter().max().unwrap_or(0) as i64))
        .collect()
}

pub fn eci(a: &Matrix) -> Option<i64> {
    let ecc = eccentricities(a)?;
    Some((0..a.len()).map(|v| ecc[v] * a[v].iter().filter(|&&x| x).count() as i64).sum())
}

pub fn diameter(a: &Matrix) -> Option<i64> {
    eccentricities(a).map(|e| e.into_iter().max().unwrap_or(0))
}

pub fn clique_number(a: &Matrix) -> i64 {
    let n = a.len();
    (0u32..1 << n)
        .filter(|s| (0..n).all(|i| (0..n).all(|j| i == j || s >> i & 1 == 0 || s >> j & 1 == 0 || a[i][j])))
        .map(|s| s.count_ones() as i64)
        .max()
        .unwrap_or(0)
}

/// Smallest k for which some assignment of k colours is proper.
pub fn chromatic_number(a: &Matrix) -> i64 {
    let n = a.len();
    if n == 0 {
        return 0;
    }
    for k in 1..=n {
        let total = k.pow(n as u32);
        for code in 0..total {
            let mut c = vec![0; n];
            let mut x = code;
            for slot in c.iter_mut() {
                *slot = x % k;
                x /= k;
            }
            if (0..n).all(|i| (i + 1..n).all(|j| !a[i][j] || c[i] != c[j])) {
                return k as i64;
            }
        }
    }
    n as i64
}

pub fn connected(a: &Matrix) -> bool {
    a.is_empty() || bfs(a, 0).iter().all(Option::is_some)
}

fn orient(p: (i64, i64), q: (i64, i64), r: (i64, i64)) -> i128 {
    (q.0 - p.0) as i128 * (r.1 - p.1) as i128 - (q.1 - p.1) as i128 * (r.0 - p.0) as i128
}

/// Hull vertices as endpoints of directed pairs `(p, q)` that keep every
/// point on or left of `pq`, collinear points inside the segment.
pub fn hull_vertices(points: &[(i64, i64)]) -> BTreeSet<(i64, i64)> {
    let pts: BTreeSet<(i64, i64)> = points.iter().copied().collect();
    if pts.len() == 1 {
        return pts;
    }
    let mut out = BTreeSet::new();
    for &p in &pts {
        for &q in &pts {
            if p == q {
                continue;
            }
            let supporting = pts.iter().all(|&r| {
                let o = orient(p, q, r);
                let between = (p.0.min(q.0)..=p.0.max(q.0)).contains(&r.0) && (p.1.min(q.1)..=p.1.max(q.1)).contains(&r.1);
                o > 0 || (o == 0 && between)
            });
            if supporting {
                out.insert(p);
                out.insert(q);
            }
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).filter(move |s| s.count_ones() as usize == k).map(move |s| (0..n).filter(|&v| s >> v & 1 == 1).collect())
}

fn induced_degrees(a: &Matrix, vs: &[usize]) -> Vec<usize> {
    vs.iter().map(|&v| vs.iter().filter(|&&w| a[v][w]).count()).collect()
}

fn induced_connected(a: &Matrix, vs: &[usize]) -> bool {
    let sub: Matrix = vs.iter().map(|&v| vs.iter().map(|&w| a[v][w]).collect()).collect();
    connected(&sub)
}

pub fn cograph(a: &Matrix) -> bool {
    !subsets(a.len(), 4).any(|vs| {
        let mut d = induced_degrees(a, &vs);
        d.sort();
        d == [1, 1, 2, 2] && induced_connected(a, &vs)
    })
}

pub fn chordal(a: &Matrix) -> bool {
    !(4..=a.len()).any(|k| subsets(a.len(), k).any(|vs| induced_degrees(a, &vs).iter().all(|&d| d == 2) && induced_connected(a, &vs)))
}

/// A clique and an independent set covering the vertices, by trying every
/// bipartition.
pub fn split(a: &Matrix) -> bool {
    let n = a.len();
    (0u32..1 << n).any(|s| {
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                let (ci, cj) = (s >> i & 1 == 1, s >> j & 1 == 1);
                if ci && cj {
                    a[i][j]
                } else if !ci && !cj {
                    !a[i][j]
                } else {
                    true
                }
            })
        })
    })
}

pub fn delete_vertex(a: &Matrix, v: usize) -> Matrix {
    (0..a.len()).filter(|&i| i != v).map(|i| (0..a.len()).filter(|&j| j != v).map(|j| a[i][j]).collect()).collect()
}

/// Kahn's algorithm on an explicit arc list.
pub fn acyclic(vertices: usize, arcs: &[(u32, u32)]) -> bool {
    let mut indeg = vec![0usize; vertices];
    let mut out = vec![Vec::new(); vertices];
    for &(s, d) in arcs {
        indeg[d as usize] += 1;
        out[s as usize].push(d as usize);
    }
    let mut queue: VecDeque<usize> = (0..vertices).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop_front() {
        seen += 1;
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    seen == vertices
}
