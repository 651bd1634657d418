//! Substructure matching and minimal forbidden substructures of graph classes.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumerate::{enumerate_all, EnumerationError};
use crate::graph::{low_mask, Bits, Graph};
use crate::graph6::Signature;
use crate::invariants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Subgraph,
    Induced,
}

impl Relation {
    pub fn name(self) -> &'static str {
        match self {
            Relation::Subgraph => "subgraph",
            Relation::Induced => "induced",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relation {
    type Err = ObstructionError;

    fn from_str(s: &str) -> Result<Relation, ObstructionError> {
        match s {
            "subgraph" => Ok(Relation::Subgraph),
            "induced" | "induced-subgraph" => Ok(Relation::Induced),
            _ => Err(ObstructionError::UnknownRelation(s.to_owned())),
        }
    }
}

#[derive(Debug, Error)]
pub enum ObstructionError {
    #[error("unknown relation {0:?} (expected \"subgraph\" or \"induced\")")]
    UnknownRelation(String),
    #[error("unknown class {0:?}")]
    UnknownClass(String),
    #[error("class {class} is not closed under {relation}: {graph} is in the class but its substructure {substructure} is not")]
    NotClosed {
        class: String,
        relation: Relation,
        graph: Signature,
        substructure: Signature,
    },
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

/// Whether `pattern` embeds into `host` (as an induced subgraph when
/// `relation` is [`Relation::Induced`]).
pub fn has_substructure(host: &Graph, pattern: &Graph, relation: Relation) -> bool {
    let (n, k) = (host.order(), pattern.order());
    if k > n {
        return false;
    }
    if pattern.size() > host.size() {
        return false;
    }
    let order = matching_order(pattern);
    let host_deg: Vec<usize> = (0..n).map(|v| host.degree(v)).collect();
    let mut image = vec![usize::MAX; k];
    extend(host, pattern, relation, &order, &host_deg, &mut image, 0, 0)
}

/// Pattern vertices ordered so each one after the first of its component is
/// adjacent to an earlier one, most constrained first.
fn matching_order(p: &Graph) -> Vec<usize> {
    let k = p.order();
    let mut order = Vec::with_capacity(k);
    let mut placed = 0u64;
    while order.len() < k {
        let frontier = order.iter().fold(0u64, |acc, &u| acc | p.neighbors_mask(u)) & !placed;
        let pool = if frontier != 0 { frontier } else { low_mask(k) & !placed };
        let next = Bits(pool)
            .max_by_key(|&v| ((p.neighbors_mask(v) & placed).count_ones(), p.degree(v), std::cmp::Reverse(v)))
            .expect("pool is non-empty");
        order.push(next);
        placed |= 1 << next;
    }
    order
}

#[allow(clippy::too_many_arguments)]
fn extend(
    host: &Graph,
    pattern: &Graph,
    relation: Relation,
    order: &[usize],
    host_deg: &[usize],
    image: &mut [usize],
    used: u64,
    depth: usize,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let u = order[depth];
    let mut cand = low_mask(host.order()) & !used;
    for &w in &order[..depth] {
        let hw = host.neighbors_mask(image[w]);
        if pattern.has_edge(u, w) {
            cand &= hw;
        } else if relation == Relation::Induced {
            cand &= !hw;
        }
    }
    let need = pattern.degree(u);
    for v in Bits(cand) {
        if host_deg[v] < need {
            continue;
        }
        image[u] = v;
        if extend(host, pattern, relation, order, host_deg, image, used | 1 << v, depth + 1) {
            return true;
        }
    }
    image[u] = usize::MAX;
    false
}

/// A named graph class given by a membership predicate.
pub struct ClassDef {
    pub name: &'static str,
    pub description: &'static str,
    pub contains: fn(&Graph) -> bool,
}

impl fmt::Debug for ClassDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassDef").field("name", &self.name).finish()
    }
}

static CLASSES: [ClassDef; 10] = [
    ClassDef { name: "connected", description: "connected graphs", contains: invariants::is_connected },
    ClassDef { name: "tree", description: "connected acyclic graphs", contains: invariants::is_tree },
    ClassDef { name: "forest", description: "acyclic graphs", contains: is_forest },
    ClassDef { name: "bipartite", description: "2-colourable graphs", contains: is_bipartite },
    ClassDef { name: "triangle-free", description: "no K3 subgraph", contains: is_triangle_free },
    ClassDef { name: "chordal", description: "every cycle of length 4 or more has a chord", contains: is_chordal },
    ClassDef { name: "cograph", description: "built from K1 by disjoint union and complement", contains: is_cograph },
    ClassDef { name: "split", description: "vertex set splits into a clique and an independent set", contains: is_split },
    ClassDef { name: "claw-free", description: "no induced K1,3", contains: is_claw_free },
    ClassDef { name: "C4-free", description: "no C4 subgraph", contains: is_c4_free },
];

pub fn builtin_classes() -> &'static [ClassDef] {
    &CLASSES
}

pub fn lookup_class(name: &str) -> Result<&'static ClassDef, ObstructionError> {
    CLASSES
        .iter()
        .find(|c| c.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| ObstructionError::UnknownClass(name.to_owned()))
}

fn components(g: &Graph) -> Vec<u64> {
    let mut out = Vec::new();
    let mut left = low_mask(g.order());
    while left != 0 {
        let mut comp = left & left.wrapping_neg();
        let mut frontier = comp;
        while frontier != 0 {
            let next = Bits(frontier).fold(0u64, |acc, v| acc | g.neighbors_mask(v)) & !comp;
            comp |= next;
            frontier = next;
        }
        out.push(comp);
        left &= !comp;
    }
    out
}

pub fn is_forest(g: &Graph) -> bool {
    g.size() + components(g).len() == g.order()
}

pub fn is_bipartite(g: &Graph) -> bool {
    let mut colour = vec![None::<bool>; g.order()];
    for s in 0..g.order() {
        if colour[s].is_some() {
            continue;
        }
        colour[s] = Some(false);
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            let c = colour[v].expect("coloured before push");
            for w in g.neighbors(v) {
                match colour[w] {
                    None => {
                        colour[w] = Some(!c);
                        stack.push(w);
                    }
                    Some(d) if d == c => return false,
                    Some(_) => {}
                }
            }
        }
    }
    true
}

pub fn is_triangle_free(g: &Graph) -> bool {
    g.edges().all(|(u, v)| g.neighbors_mask(u) & g.neighbors_mask(v) == 0)
}

/// Repeatedly strips simplicial vertices.
pub fn is_chordal(g: &Graph) -> bool {
    let mut left = low_mask(g.order());
    'strip: while left != 0 {
        for v in Bits(left) {
            let nb = g.neighbors_mask(v) & left;
            if Bits(nb).all(|w| nb & !(1 << w) & !g.neighbors_mask(w) == 0) {
                left &= !(1 << v);
                continue 'strip;
            }
        }
        return false;
    }
    true
}

/// Every induced subgraph on two or more vertices is disconnected or has a
/// disconnected complement.
pub fn is_cograph(g: &Graph) -> bool {
    fn check(g: &Graph) -> bool {
        if g.order() <= 1 {
            return true;
        }
        let mut parts = components(g);
        if parts.len() == 1 {
            let co = g.complement();
            parts = components(&co);
            if parts.len() == 1 {
                return false;
            }
        }
        parts.iter().all(|&p| check(&g.induced(p)))
    }
    check(g)
}

/// Tries every clique/independent-set partition.
pub fn is_split(g: &Graph) -> bool {
    let n = g.order();
    let all = low_mask(n);
    let is_clique = |s: u64| Bits(s).all(|v| s & !(1 << v) & !g.neighbors_mask(v) == 0);
    let is_independent = |s: u64| Bits(s).all(|v| s & g.neighbors_mask(v) == 0);
    (0..=all).any(|k| is_clique(k) && is_independent(all & !k))
}

pub fn is_claw_free(g: &Graph) -> bool {
    (0..g.order()).all(|v| {
        let nb: Vec<usize> = g.neighbors(v).collect();
        for (i, &a) in nb.iter().enumerate() {
            for (j, &b) in nb.iter().enumerate().skip(i + 1) {
                if g.has_edge(a, b) {
                    continue;
                }
                if nb[j + 1..].iter().any(|&c| !g.has_edge(a, c) && !g.has_edge(b, c)) {
                    return false;
                }
            }
        }
        true
    })
}

/// No two vertices share two common neighbours.
pub fn is_c4_free(g: &Graph) -> bool {
    let n = g.order();
    (0..n).all(|u| (u + 1..n).all(|v| (g.neighbors_mask(u) & g.neighbors_mask(v)).count_ones() < 2))
}

/// Every one-step proper substructure: vertex deletions, plus edge deletions
/// under [`Relation::Subgraph`].
pub fn one_step_substructures(g: &Graph, relation: Relation) -> Vec<Graph> {
    let mut out: Vec<Graph> = (0..g.order()).filter_map(|v| g.delete_vertex(v)).collect();
    if relation == Relation::Subgraph {
        for (u, v) in g.edges() {
            let mut h = g.clone();
            h.remove_edge(u, v);
            out.push(h);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionSet {
    pub relation: Relation,
    pub class: String,
    pub max_n: usize,
    /// Sorted by order, then signature.
    pub obstructions: Vec<Signature>,
}

enum Verdict {
    Inside,
    Minimal,
    Outside,
    Violation(Graph),
}

/// Graphs of order at most `max_n` outside `class` whose one-step
/// substructures all lie inside it. Fails if a member of the class has a
/// substructure outside it.
pub fn minimal_obstructions(class: &ClassDef, relation: Relation, max_n: usize) -> Result<ObstructionSet, ObstructionError> {
    let mut obstructions = Vec::new();
    for n in 1..=max_n {
        let graphs: Vec<Graph> = enumerate_all(n)?.collect();
        let verdicts: Vec<Verdict> = graphs
            .par_iter()
            .map(|g| {
                let subs = one_step_substructures(g, relation);
                if (class.contains)(g) {
                    match subs.into_iter().find(|h| !(class.contains)(h)) {
                        Some(h) => Verdict::Violation(h),
                        None => Verdict::Inside,
                    }
                } else if subs.iter().all(|h| (class.contains)(h)) {
                    Verdict::Minimal
                } else {
                    Verdict::Outside
                }
            })
            .collect();
        for (g, verdict) in graphs.iter().zip(verdicts) {
            match verdict {
                Verdict::Violation(h) => {
                    return Err(ObstructionError::NotClosed {
                        class: class.name.to_owned(),
                        relation,
                        graph: Signature::of_canonical(g),
                        substructure: Signature::of(&h),
                    })
                }
                Verdict::Minimal => obstructions.push(Signature::of_canonical(g)),
                Verdict::Inside | Verdict::Outside => {}
            }
        }
    }
    Ok(ObstructionSet { relation, class: class.name.to_owned(), max_n, obstructions })
}
