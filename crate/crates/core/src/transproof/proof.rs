//! Improvement-filtered views of a metagraph and the proof-by-transformation
//! report computed on them.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{Metagraph, Transformation};
use crate::enumerate::GraphClass;
use crate::graph6::Signature;
use crate::invariants::InvariantValue;
use crate::store::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ViewArc {
    pub src: u32,
    pub dst: u32,
    pub tid: Transformation,
}

/// Arcs of a metagraph that strictly improve one invariant while keeping
/// others fixed. Vertices where any of these invariants is undefined are
/// left out.
#[derive(Debug)]
pub struct FilteredView<'a> {
    pub metagraph: &'a Metagraph,
    pub invariant: String,
    pub direction: Direction,
    pub preserve: Vec<String>,
    included: Vec<bool>,
    arcs: Vec<ViewArc>,
    offsets: Vec<usize>,
}

impl FilteredView<'_> {
    pub fn arcs(&self) -> &[ViewArc] {
        &self.arcs
    }

    pub fn out_arcs(&self, v: u32) -> &[ViewArc] {
        &self.arcs[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn contains(&self, v: u32) -> bool {
        self.included[v as usize]
    }

    pub fn vertex_count(&self) -> usize {
        self.included.iter().filter(|&&b| b).count()
    }
}

/// Keeps the arcs `(G, H)` with `values[H]` strictly better than `values[G]`
/// in `direction` and equal values in every `preserve` table.
pub fn filtered_metagraph<'a>(
    mg: &'a Metagraph,
    invariant: (&str, &[Option<InvariantValue>]),
    direction: Direction,
    preserve: &[(&str, &[Option<InvariantValue>])],
) -> FilteredView<'a> {
    let (name, values) = invariant;
    let included: Vec<bool> = (0..mg.graph_count())
        .map(|v| values[v].is_some() && preserve.iter().all(|(_, p)| p[v].is_some()))
        .collect();
    let mut arcs = Vec::new();
    let mut offsets = vec![0];
    for v in 0..mg.graph_count() as u32 {
        for a in mg.out_arcs(v) {
            let (s, d) = (a.src as usize, a.dst as usize);
            if !(included[s] && included[d]) {
                continue;
            }
            let (Some(x), Some(y)) = (values[s], values[d]) else { continue };
            if direction.better(y, x) && preserve.iter().all(|(_, p)| p[s] == p[d]) {
                arcs.push(ViewArc { src: a.src, dst: a.dst, tid: a.tid });
            }
        }
        offsets.push(arcs.len());
    }
    FilteredView {
        metagraph: mg,
        invariant: name.to_owned(),
        direction,
        preserve: preserve.iter().map(|(n, _)| (*n).to_owned()).collect(),
        included,
        arcs,
        offsets,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformationUsage {
    pub transformation: Transformation,
    /// Arcs of this transformation in the view.
    pub arcs: usize,
    /// Arcs of this transformation on the chosen shortest paths to the
    /// extremal set.
    pub on_shortest_paths: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDistance {
    pub signature: Signature,
    /// Length of a shortest improving path to the extremal set.
    pub distance: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofReport {
    pub n: usize,
    pub class: GraphClass,
    pub invariant: String,
    pub direction: Direction,
    pub preserve: Vec<String>,
    pub vertices: usize,
    pub arcs: usize,
    pub extremal: usize,
    pub acyclic: bool,
    /// One directed cycle when the view is not acyclic.
    pub cycle: Vec<Signature>,
    pub sinks: Vec<Signature>,
    /// Sinks outside the extremal set.
    pub counterexamples: Vec<Signature>,
    /// Non-extremal graphs with no improving path to the extremal set.
    pub unreachable: Vec<Signature>,
    pub max_distance: Option<u32>,
    pub distances: Vec<GraphDistance>,
    pub usage: Vec<TransformationUsage>,
}

/// Acyclicity, sinks, counterexamples, distances and transformation usage of
/// `view` against the extremal set `extremal`. Signatures outside the view
/// are ignored.
pub fn proof_report(view: &FilteredView<'_>, extremal: &[Signature]) -> ProofReport {
    let mg = view.metagraph;
    let count = mg.graph_count();
    let mut in_e = vec![false; count];
    for s in extremal {
        if let Ok(v) = mg.resolve(s) {
            if view.contains(v) {
                in_e[v as usize] = true;
            }
        }
    }
    let vertices: Vec<u32> = (0..count as u32).filter(|&v| view.contains(v)).collect();
    let mut preds: Vec<Vec<(u32, Transformation)>> = vec![Vec::new(); count];
    for a in view.arcs() {
        preds[a.dst as usize].push((a.src, a.tid));
    }

    // Kahn's algorithm; leftovers all lie on or behind cycles
    let mut indeg = vec![0usize; count];
    for a in view.arcs() {
        indeg[a.dst as usize] += 1;
    }
    let mut queue: VecDeque<u32> = vertices.iter().copied().filter(|&v| indeg[v as usize] == 0).collect();
    let mut removed = vec![false; count];
    while let Some(v) = queue.pop_front() {
        removed[v as usize] = true;
        for a in view.out_arcs(v) {
            indeg[a.dst as usize] -= 1;
            if indeg[a.dst as usize] == 0 {
                queue.push_back(a.dst);
            }
        }
    }
    let leftover: Vec<u32> = vertices.iter().copied().filter(|&v| !removed[v as usize]).collect();
    let cycle = match leftover.first() {
        None => Vec::new(),
        Some(&start) => find_cycle(start, &preds, &removed).iter().map(|&v| mg.signature(v).clone()).collect(),
    };

    let sinks: Vec<u32> = vertices.iter().copied().filter(|&v| view.out_arcs(v).is_empty()).collect();

    let mut dist: Vec<Option<u32>> = vec![None; count];
    let mut queue: VecDeque<u32> = VecDeque::new();
    for &v in &vertices {
        if in_e[v as usize] {
            dist[v as usize] = Some(0);
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize].expect("queued vertices have distances");
        for &(u, _) in &preds[v as usize] {
            if dist[u as usize].is_none() {
                dist[u as usize] = Some(d + 1);
                queue.push_back(u);
            }
        }
    }

    let mut usage: BTreeMap<Transformation, TransformationUsage> = mg
        .transformations()
        .iter()
        .map(|&t| (t, TransformationUsage { transformation: t, arcs: 0, on_shortest_paths: 0 }))
        .collect();
    for a in view.arcs() {
        usage.get_mut(&a.tid).expect("arc transformations are listed").arcs += 1;
    }
    for &v in &vertices {
        let Some(d) = dist[v as usize].filter(|&d| d > 0) else { continue };
        let step = view
            .out_arcs(v)
            .iter()
            .find(|a| dist[a.dst as usize] == Some(d - 1))
            .expect("a finite distance has a predecessor on the path");
        usage.get_mut(&step.tid).expect("arc transformations are listed").on_shortest_paths += 1;
    }

    let sig = |v: u32| mg.signature(v).clone();
    ProofReport {
        n: mg.order(),
        class: mg.class(),
        invariant: view.invariant.clone(),
        direction: view.direction,
        preserve: view.preserve.clone(),
        vertices: vertices.len(),
        arcs: view.arcs().len(),
        extremal: in_e.iter().filter(|&&b| b).count(),
        acyclic: leftover.is_empty(),
        cycle,
        counterexamples: sinks.iter().copied().filter(|&v| !in_e[v as usize]).map(sig).collect(),
        sinks: sinks.into_iter().map(sig).collect(),
        unreachable: vertices.iter().copied().filter(|&v| dist[v as usize].is_none()).map(sig).collect(),
        max_distance: vertices.iter().filter_map(|&v| dist[v as usize]).max(),
        distances: vertices.iter().map(|&v| GraphDistance { signature: sig(v), distance: dist[v as usize] }).collect(),
        usage: usage.into_values().collect(),
    }
}

/// Walks predecessors among the vertices Kahn's algorithm could not remove
/// (each has one there) until a vertex repeats; returns that cycle in arc
/// order.
fn find_cycle(start: u32, preds: &[Vec<(u32, Transformation)>], removed: &[bool]) -> Vec<u32> {
    let mut seen: BTreeMap<u32, usize> = BTreeMap::new();
    let mut walk = vec![start];
    let mut v = start;
    loop {
        seen.insert(v, walk.len() - 1);
        let &(u, _) = preds[v as usize]
            .iter()
            .find(|(u, _)| !removed[*u as usize])
            .expect("leftover vertices keep a leftover predecessor");
        if let Some(&i) = seen.get(&u) {
            let mut cycle = walk[i..].to_vec();
            cycle.reverse();
            return cycle;
        }
        walk.push(u);
        v = u;
    }
}
