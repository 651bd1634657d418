//! Exact integer-valued graph invariants and the name registry.

use thiserror::Error;

use crate::graph::{Bits, Graph};

pub type InvariantValue = i64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("invariant {invariant} is undefined on disconnected graphs")]
    Disconnected { invariant: &'static str },
    #[error("unknown invariant {0:?}")]
    Unknown(String),
    #[error("vertex {vertex} out of range for a graph of order {order}")]
    VertexOutOfRange { vertex: usize, order: usize },
}

/// Hop distances between all pairs of vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<u32>,
}

const UNREACHABLE: u32 = u32::MAX;

impl DistanceMatrix {
    /// Distance from `u` to `v`, or `None` when no path exists.
    pub fn get(&self, u: usize, v: usize) -> Option<u32> {
        match self.entries[u * self.n + v] {
            UNREACHABLE => None,
            d => Some(d),
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Largest entry of row `v`, or `None` if some vertex is unreachable.
    pub fn row_max(&self, v: usize) -> Option<u32> {
        let row = &self.entries[v * self.n..(v + 1) * self.n];
        if row.contains(&UNREACHABLE) {
            None
        } else {
            row.iter().copied().max()
        }
    }
}

pub fn distances(g: &Graph) -> DistanceMatrix {
    let n = g.order();
    let mut entries = vec![UNREACHABLE; n * n];
    for v in 0..n {
        let row = &mut entries[v * n..(v + 1) * n];
        row[v] = 0;
        let mut seen = 1u64 << v;
        let mut frontier = seen;
        let mut d = 0;
        while frontier != 0 {
            d += 1;
            let mut next = 0u64;
            for u in Bits(frontier) {
                next |= g.neighbors_mask(u);
            }
            next &= !seen;
            for u in Bits(next) {
                row[u] = d;
            }
            seen |= next;
            frontier = next;
        }
    }
    DistanceMatrix { n, entries }
}

/// Eccentricity of `v` and the set of vertices reachable from it.
fn bfs_depth(g: &Graph, v: usize) -> (u32, u64) {
    let mut seen = 1u64 << v;
    let mut frontier = seen;
    let mut depth = 0;
    loop {
        let mut next = 0u64;
        for u in Bits(frontier) {
            next |= g.neighbors_mask(u);
        }
        next &= !seen;
        if next == 0 {
            return (depth, seen);
        }
        seen |= next;
        frontier = next;
        depth += 1;
    }
}

pub fn is_connected(g: &Graph) -> bool {
    bfs_depth(g, 0).1 == g.vertex_mask()
}

pub fn num_vertices(g: &Graph) -> InvariantValue {
    g.order() as InvariantValue
}

pub fn num_edges(g: &Graph) -> InvariantValue {
    g.size() as InvariantValue
}

pub fn degree_sequence(g: &Graph) -> Vec<usize> {
    let mut d: Vec<usize> = (0..g.order()).map(|v| g.degree(v)).collect();
    d.sort_unstable_by(|a, b| b.cmp(a));
    d
}

pub fn min_degree(g: &Graph) -> InvariantValue {
    (0..g.order()).map(|v| g.degree(v)).min().unwrap_or(0) as InvariantValue
}

pub fn max_degree(g: &Graph) -> InvariantValue {
    (0..g.order()).map(|v| g.degree(v)).max().unwrap_or(0) as InvariantValue
}

pub fn eccentricity(g: &Graph, v: usize) -> Result<InvariantValue, InvariantError> {
    if v >= g.order() {
        return Err(InvariantError::VertexOutOfRange { vertex: v, order: g.order() });
    }
    let (depth, seen) = bfs_depth(g, v);
    if seen != g.vertex_mask() {
        return Err(InvariantError::Disconnected { invariant: "eccentricity" });
    }
    Ok(depth as InvariantValue)
}

fn eccentricities(g: &Graph, invariant: &'static str) -> Result<Vec<InvariantValue>, InvariantError> {
    (0..g.order())
        .map(|v| {
            let (depth, seen) = bfs_depth(g, v);
            if seen == g.vertex_mask() {
                Ok(depth as InvariantValue)
            } else {
                Err(InvariantError::Disconnected { invariant })
            }
        })
        .collect()
}

/// Eccentric connectivity index: sum over vertices of eccentricity times degree.
pub fn eci(g: &Graph) -> Result<InvariantValue, InvariantError> {
    let ecc = eccentricities(g, "eci")?;
    Ok(ecc.iter().enumerate().map(|(v, e)| e * g.degree(v) as InvariantValue).sum())
}

pub fn diameter(g: &Graph) -> Result<InvariantValue, InvariantError> {
    Ok(eccentricities(g, "diameter")?.into_iter().max().unwrap_or(0))
}

pub fn radius(g: &Graph) -> Result<InvariantValue, InvariantError> {
    Ok(eccentricities(g, "radius")?.into_iter().min().unwrap_or(0))
}

pub fn is_tree(g: &Graph) -> bool {
    is_connected(g) && g.size() + 1 == g.order()
}

/// Length of a shortest cycle; 0 for forests.
pub fn girth(g: &Graph) -> InvariantValue {
    let n = g.order();
    let mut best = u32::MAX;
    let mut dist = vec![u32::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = Vec::with_capacity(n);
    for root in 0..n {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        queue.clear();
        dist[root] = 0;
        parent[root] = usize::MAX;
        queue.push(root);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            if 2 * dist[u] + 1 >= best {
                break;
            }
            for w in g.neighbors(u) {
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push(w);
                } else if parent[u] != w {
                    best = best.min(dist[u] + dist[w] + 1);
                }
            }
        }
    }
    if best == u32::MAX {
        0
    } else {
        best as InvariantValue
    }
}

/// Size of a largest clique (branch and bound over pivoted Bron–Kerbosch).
pub fn clique_number(g: &Graph) -> InvariantValue {
    let mut best = 0u32;
    expand_clique(g, 0, g.vertex_mask(), 0, &mut best);
    best as InvariantValue
}

fn expand_clique(g: &Graph, size: u32, mut candidates: u64, mut excluded: u64, best: &mut u32) {
    if candidates == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + candidates.count_ones() <= *best {
        return;
    }
    let pivot = Bits(candidates | excluded)
        .max_by_key(|&u| (g.neighbors_mask(u) & candidates).count_ones())
        .expect("non-empty");
    for v in Bits(candidates & !g.neighbors_mask(pivot)) {
        let nv = g.neighbors_mask(v);
        expand_clique(g, size + 1, candidates & nv, excluded & nv, best);
        candidates &= !(1 << v);
        excluded |= 1 << v;
        if size + candidates.count_ones() <= *best {
            return;
        }
    }
}

pub fn independence_number(g: &Graph) -> InvariantValue {
    clique_number(&g.complement())
}

/// Exact chromatic number: clique lower bound, DSATUR upper bound, and a
/// backtracking k-colourability test in between.
pub fn chromatic_number(g: &Graph) -> InvariantValue {
    let lower = clique_number(g) as usize;
    let (upper, _) = dsatur(g);
    if lower == upper {
        return lower as InvariantValue;
    }
    let mut order: Vec<usize> = (0..g.order()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
    for k in lower..upper {
        let mut colour = vec![usize::MAX; g.order()];
        if colourable(g, &order, 0, k, 0, &mut colour) {
            return k as InvariantValue;
        }
    }
    upper as InvariantValue
}

fn dsatur(g: &Graph) -> (usize, Vec<usize>) {
    let n = g.order();
    let mut colour = vec![usize::MAX; n];
    let mut used = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| colour[v] == usize::MAX)
            .max_by_key(|&v| {
                let sat: u64 = g
                    .neighbors(v)
                    .filter(|&u| colour[u] != usize::MAX)
                    .fold(0, |acc, u| acc | 1 << colour[u]);
                (sat.count_ones(), g.degree(v), std::cmp::Reverse(v))
            })
            .expect("uncoloured vertex remains");
        let taken: u64 = g
            .neighbors(v)
            .filter(|&u| colour[u] != usize::MAX)
            .fold(0, |acc, u| acc | 1 << colour[u]);
        let c = (!taken).trailing_zeros() as usize;
        colour[v] = c;
        used = used.max(c + 1);
    }
    (used, colour)
}

fn colourable(g: &Graph, order: &[usize], i: usize, k: usize, used: usize, colour: &mut [usize]) -> bool {
    if i == order.len() {
        return true;
    }
    let v = order[i];
    let taken: u64 = g
        .neighbors(v)
        .filter(|&u| colour[u] != usize::MAX)
        .fold(0, |acc, u| acc | 1 << colour[u]);
    // a fresh colour is interchangeable with any other unused one
    for c in 0..k.min(used + 1) {
        if taken >> c & 1 == 0 {
            colour[v] = c;
            if colourable(g, order, i + 1, k, used.max(c + 1), colour) {
                return true;
            }
            colour[v] = usize::MAX;
        }
    }
    false
}

/// Size of a maximum matching (Edmonds' blossom augmenting paths).
pub fn matching_number(g: &Graph) -> InvariantValue {
    let n = g.order();
    let mut mate = vec![usize::MAX; n];
    let mut size = 0;
    // greedy start
    for v in 0..n {
        if mate[v] == usize::MAX {
            if let Some(u) = g.neighbors(v).find(|&u| mate[u] == usize::MAX) {
                mate[v] = u;
                mate[u] = v;
                size += 1;
            }
        }
    }
    for root in 0..n {
        if mate[root] != usize::MAX {
            continue;
        }
        if let Some((end, parent)) = augmenting_path(g, &mate, root) {
            let mut v = end;
            while v != usize::MAX {
                let pv = parent[v];
                let next = mate[pv];
                mate[v] = pv;
                mate[pv] = v;
                v = next;
            }
            size += 1;
        }
    }
    size as InvariantValue
}

fn augmenting_path(g: &Graph, mate: &[usize], root: usize) -> Option<(usize, Vec<usize>)> {
    let n = g.order();
    let none = usize::MAX;
    let mut used = vec![false; n];
    let mut parent = vec![none; n];
    let mut base: Vec<usize> = (0..n).collect();
    let mut queue = vec![root];
    used[root] = true;
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for to in g.neighbors(v) {
            if base[v] == base[to] || mate[v] == to {
                continue;
            }
            if to == root || (mate[to] != none && parent[mate[to]] != none) {
                let b = lowest_common_base(mate, &parent, &base, v, to);
                let mut blossom = vec![false; n];
                mark_path(mate, &mut parent, &base, &mut blossom, v, b, to);
                mark_path(mate, &mut parent, &base, &mut blossom, to, b, v);
                for i in 0..n {
                    if blossom[base[i]] {
                        base[i] = b;
                        if !used[i] {
                            used[i] = true;
                            queue.push(i);
                        }
                    }
                }
            } else if parent[to] == none {
                parent[to] = v;
                if mate[to] == none {
                    return Some((to, parent));
                }
                let w = mate[to];
                used[w] = true;
                queue.push(w);
            }
        }
    }
    None
}

fn lowest_common_base(mate: &[usize], parent: &[usize], base: &[usize], mut a: usize, mut b: usize) -> usize {
    let mut on_path = vec![false; mate.len()];
    loop {
        a = base[a];
        on_path[a] = true;
        if mate[a] == usize::MAX {
            break;
        }
        a = parent[mate[a]];
    }
    loop {
        b = base[b];
        if on_path[b] {
            return b;
        }
        b = parent[mate[b]];
    }
}

fn mark_path(
    mate: &[usize],
    parent: &mut [usize],
    base: &[usize],
    blossom: &mut [bool],
    mut v: usize,
    b: usize,
    mut child: usize,
) {
    while base[v] != b {
        blossom[base[v]] = true;
        blossom[base[mate[v]]] = true;
        parent[v] = child;
        child = mate[v];
        v = parent[mate[v]];
    }
}

/// A registered invariant, addressed by a stable lowercase name.
pub struct InvariantDef {
    pub name: &'static str,
    pub description: &'static str,
    /// Undefined (an error) on disconnected graphs.
    pub requires_connected: bool,
    pub compute: fn(&Graph) -> Result<InvariantValue, InvariantError>,
}

macro_rules! total {
    ($f:expr) => {
        |g: &Graph| -> Result<InvariantValue, InvariantError> { Ok($f(g)) }
    };
}

pub static REGISTRY: &[InvariantDef] = &[
    InvariantDef { name: "num_vertices", description: "order n", requires_connected: false, compute: total!(num_vertices) },
    InvariantDef { name: "num_edges", description: "size m", requires_connected: false, compute: total!(num_edges) },
    InvariantDef { name: "eci", description: "eccentric connectivity index", requires_connected: true, compute: eci },
    InvariantDef { name: "diameter", description: "largest eccentricity", requires_connected: true, compute: diameter },
    InvariantDef { name: "radius", description: "smallest eccentricity", requires_connected: true, compute: radius },
    InvariantDef {
        name: "is_connected",
        description: "1 if connected, else 0",
        requires_connected: false,
        compute: total!(|g| is_connected(g) as InvariantValue),
    },
    InvariantDef { name: "clique_number", description: "largest clique", requires_connected: false, compute: total!(clique_number) },
    InvariantDef {
        name: "chromatic_number",
        description: "fewest colours of a proper colouring",
        requires_connected: false,
        compute: total!(chromatic_number),
    },
    InvariantDef {
        name: "independence_number",
        description: "largest independent set",
        requires_connected: false,
        compute: total!(independence_number),
    },
    InvariantDef {
        name: "is_tree",
        description: "1 if a tree, else 0",
        requires_connected: false,
        compute: total!(|g| is_tree(g) as InvariantValue),
    },
    InvariantDef { name: "girth", description: "shortest cycle length, 0 if acyclic", requires_connected: false, compute: total!(girth) },
    InvariantDef { name: "min_degree", description: "smallest degree", requires_connected: false, compute: total!(min_degree) },
    InvariantDef { name: "max_degree", description: "largest degree", requires_connected: false, compute: total!(max_degree) },
    InvariantDef {
        name: "matching_number",
        description: "size of a maximum matching",
        requires_connected: false,
        compute: total!(matching_number),
    },
];

pub fn lookup(name: &str) -> Result<&'static InvariantDef, InvariantError> {
    REGISTRY
        .iter()
        .find(|d| d.name == name)
        .ok_or_else(|| InvariantError::Unknown(name.to_owned()))
}

pub fn compute(name: &str, g: &Graph) -> Result<InvariantValue, InvariantError> {
    (lookup(name)?.compute)(g)
}
