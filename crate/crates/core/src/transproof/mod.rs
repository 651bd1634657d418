//! Local edge-edit transformations, the metagraph they induce on an order,
//! and proof-by-transformation queries over it.

mod metagraph;
mod proof;

pub use metagraph::{
    build_metagraph, projected_applications, Arc, ArcCountMode, BuildOptions, Calibration, MetaDirection, MetaError,
    Metagraph, DEFAULT_MAX_BYTES, RECORD_BYTES,
};
pub use proof::{filtered_metagraph, proof_report, FilteredView, GraphDistance, ProofReport, TransformationUsage, ViewArc};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{low_mask, Bits, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum Transformation {
    /// `(a, b)`, `ab` an edge: delete it.
    RemoveEdge = 0,
    /// `(a, b)`, `ab` a non-edge: insert it.
    AddEdge = 1,
    /// `(a, b, c)`: replace `ab` by `ac`.
    Rotation = 2,
    /// `(a, b, c, d)`: replace `ab` by `cd`.
    MoveEdge = 3,
    /// `(a, b, c)`: replace `ab` by the path `a c b`.
    Detour = 4,
    /// `(a, b, c)`: replace the path `a c b` by `ab`.
    Shortcut = 5,
    /// `(a, b, c, d)`: replace `ab`, `cd` by `ac`, `bd`.
    TwoOpt = 6,
    /// `(a, b, c)`: rotation with `bc` an edge.
    Slide = 7,
}

impl Transformation {
    pub const ALL: [Transformation; 8] = [
        Transformation::RemoveEdge,
        Transformation::AddEdge,
        Transformation::Rotation,
        Transformation::MoveEdge,
        Transformation::Detour,
        Transformation::Shortcut,
        Transformation::TwoOpt,
        Transformation::Slide,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Transformation> {
        Transformation::ALL.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Transformation::RemoveEdge => "remove_edge",
            Transformation::AddEdge => "add_edge",
            Transformation::Rotation => "rotation",
            Transformation::MoveEdge => "move_edge",
            Transformation::Detour => "detour",
            Transformation::Shortcut => "shortcut",
            Transformation::TwoOpt => "two_opt",
            Transformation::Slide => "slide",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Transformation::RemoveEdge | Transformation::AddEdge => 2,
            Transformation::Rotation | Transformation::Detour | Transformation::Shortcut | Transformation::Slide => 3,
            Transformation::MoveEdge | Transformation::TwoOpt => 4,
        }
    }

    /// Change in edge count.
    pub fn size_delta(self) -> i64 {
        match self {
            Transformation::AddEdge | Transformation::Detour => 1,
            Transformation::RemoveEdge | Transformation::Shortcut => -1,
            _ => 0,
        }
    }

    /// Number of ordered vertex tuples naming the same application as one
    /// canonical tuple.
    pub fn symmetry(self) -> u64 {
        match self {
            Transformation::Rotation | Transformation::Slide => 1,
            Transformation::RemoveEdge | Transformation::AddEdge | Transformation::Detour | Transformation::Shortcut => 2,
            Transformation::MoveEdge | Transformation::TwoOpt => 4,
        }
    }

    /// Parses a comma-separated list of names, or `all`.
    pub fn parse_list(text: &str) -> Result<Vec<Transformation>, TransformError> {
        if text.trim() == "all" {
            return Ok(Transformation::ALL.to_vec());
        }
        let mut out = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let t: Transformation = part.parse()?;
            if !out.contains(&t) {
                out.push(t);
            }
        }
        out.sort();
        Ok(out)
    }
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Transformation {
    type Err = TransformError;

    fn from_str(s: &str) -> Result<Transformation, TransformError> {
        Transformation::ALL
            .into_iter()
            .find(|t| t.name() == s || t.name().replace('_', "-") == s)
            .ok_or_else(|| TransformError::UnknownTransformation(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("unknown transformation {0:?}")]
    UnknownTransformation(String),
    #[error("{tid} takes {expected} parameters, got {got}")]
    Arity { tid: Transformation, expected: usize, got: usize },
    #[error("vertex {vertex} out of range for order {order}")]
    VertexOutOfRange { vertex: usize, order: usize },
    #[error("{tid} precondition failed: {condition}")]
    Precondition { tid: Transformation, condition: &'static str },
}

/// Vertex parameters of one application; unused slots hold `0xFF`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Params([u8; 4]);

impl Params {
    pub const UNUSED: u8 = 0xFF;

    pub fn new(vertices: &[usize]) -> Params {
        assert!(vertices.len() <= 4, "at most four parameters");
        let mut raw = [Params::UNUSED; 4];
        for (slot, &v) in raw.iter_mut().zip(vertices) {
            *slot = u8::try_from(v).ok().filter(|&b| b != Params::UNUSED).expect("vertex below 255");
        }
        Params(raw)
    }

    pub fn from_bytes(raw: [u8; 4]) -> Params {
        Params(raw)
    }

    pub fn bytes(&self) -> [u8; 4] {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.iter().take_while(|&&b| b != Params::UNUSED).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.0[..self.len()].iter().map(|&b| b as usize).collect()
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices().iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

type Edits = (Vec<(usize, usize)>, Vec<(usize, usize)>);

/// Checks the preconditions of `tid` on `params` and returns the removed and
/// added edges.
fn edits(g: &Graph, tid: Transformation, p: &[usize]) -> Result<Edits, TransformError> {
    if p.len() != tid.arity() {
        return Err(TransformError::Arity { tid, expected: tid.arity(), got: p.len() });
    }
    if let Some(&vertex) = p.iter().find(|&&v| v >= g.order()) {
        return Err(TransformError::VertexOutOfRange { vertex, order: g.order() });
    }
    let fail = |condition| Err(TransformError::Precondition { tid, condition });
    let e = |a: usize, b: usize| g.has_edge(a, b);
    match tid {
        Transformation::RemoveEdge => {
            let (a, b) = (p[0], p[1]);
            if !e(a, b) {
                return fail("ab must be an edge");
            }
            Ok((vec![(a, b)], vec![]))
        }
        Transformation::AddEdge => {
            let (a, b) = (p[0], p[1]);
            if a == b {
                return fail("a != b");
            }
            if e(a, b) {
                return fail("ab must not be an edge");
            }
            Ok((vec![], vec![(a, b)]))
        }
        Transformation::Rotation | Transformation::Slide => {
            let (a, b, c) = (p[0], p[1], p[2]);
            if a == b || a == c || b == c {
                return fail("a, b, c must be distinct");
            }
            if !e(a, b) {
                return fail("ab must be an edge");
            }
            if e(a, c) {
                return fail("ac must not be an edge");
            }
            if tid == Transformation::Slide && !e(b, c) {
                return fail("bc must be an edge");
            }
            Ok((vec![(a, b)], vec![(a, c)]))
        }
        Transformation::MoveEdge => {
            let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
            if c == d {
                return fail("c != d");
            }
            if (a.min(b), a.max(b)) == (c.min(d), c.max(d)) {
                return fail("{a,b} != {c,d}");
            }
            if !e(a, b) {
                return fail("ab must be an edge");
            }
            if e(c, d) {
                return fail("cd must not be an edge");
            }
            Ok((vec![(a, b)], vec![(c, d)]))
        }
        Transformation::Detour => {
            let (a, b, c) = (p[0], p[1], p[2]);
            if c == a || c == b {
                return fail("c must differ from a and b");
            }
            if !e(a, b) {
                return fail("ab must be an edge");
            }
            if e(c, a) {
                return fail("ca must not be an edge");
            }
            if e(c, b) {
                return fail("cb must not be an edge");
            }
            Ok((vec![(a, b)], vec![(a, c), (c, b)]))
        }
        Transformation::Shortcut => {
            let (a, b, c) = (p[0], p[1], p[2]);
            if a == b {
                return fail("a != b");
            }
            if c == a || c == b {
                return fail("c must differ from a and b");
            }
            if !e(a, c) {
                return fail("ac must be an edge");
            }
            if !e(c, b) {
                return fail("cb must be an edge");
            }
            if e(a, b) {
                return fail("ab must not be an edge");
            }
            Ok((vec![(a, c), (c, b)], vec![(a, b)]))
        }
        Transformation::TwoOpt => {
            let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
            let distinct = a != b && a != c && a != d && b != c && b != d && c != d;
            if !distinct {
                return fail("a, b, c, d must be distinct");
            }
            if !e(a, b) {
                return fail("ab must be an edge");
            }
            if !e(c, d) {
                return fail("cd must be an edge");
            }
            if e(a, c) {
                return fail("ac must not be an edge");
            }
            if e(b, d) {
                return fail("bd must not be an edge");
            }
            Ok((vec![(a, b), (c, d)], vec![(a, c), (b, d)]))
        }
    }
}

/// Applies `tid` with `params` to `g`. Vertices keep their labels.
pub fn apply(g: &Graph, tid: Transformation, params: &[usize]) -> Result<Graph, TransformError> {
    let (removed, added) = edits(g, tid, params)?;
    let mut h = g.clone();
    for (a, b) in removed {
        h.remove_edge(a, b);
    }
    for (a, b) in added {
        h.add_edge(a, b);
    }
    Ok(h)
}

/// The representative of `params` among the tuples naming the same edit.
pub fn canonical_params(tid: Transformation, p: &[usize]) -> Vec<usize> {
    match tid {
        Transformation::RemoveEdge | Transformation::AddEdge if p.len() == 2 => vec![p[0].min(p[1]), p[0].max(p[1])],
        Transformation::Detour | Transformation::Shortcut if p.len() == 3 => vec![p[0].min(p[1]), p[0].max(p[1]), p[2]],
        Transformation::MoveEdge if p.len() == 4 => {
            vec![p[0].min(p[1]), p[0].max(p[1]), p[2].min(p[3]), p[2].max(p[3])]
        }
        Transformation::TwoOpt if p.len() == 4 => two_opt_orbit(p[0], p[1], p[2], p[3])
            .into_iter()
            .min()
            .expect("orbit is non-empty")
            .to_vec(),
        _ => p.to_vec(),
    }
}

fn two_opt_orbit(a: usize, b: usize, c: usize, d: usize) -> [[usize; 4]; 4] {
    [[a, b, c, d], [c, d, a, b], [b, a, d, c], [d, c, b, a]]
}

/// Every canonical parameter tuple satisfying the preconditions of `tid` on
/// `g`, in lexicographic order, with the resulting graph.
pub fn enumerate_applications(g: &Graph, tid: Transformation) -> Vec<(Params, Graph)> {
    enumerate_params(g, tid)
        .into_iter()
        .map(|p| {
            let h = apply(g, tid, &p).expect("enumerated parameters satisfy the preconditions");
            (Params::new(&p), h)
        })
        .collect()
}

pub(crate) fn enumerate_params(g: &Graph, tid: Transformation) -> Vec<Vec<usize>> {
    let n = g.order();
    let all = low_mask(n);
    let nb = |v: usize| g.neighbors_mask(v);
    let mut out = Vec::new();
    match tid {
        Transformation::RemoveEdge => {
            for a in 0..n {
                for b in Bits(nb(a) & !low_mask(a + 1)) {
                    out.push(vec![a, b]);
                }
            }
        }
        Transformation::AddEdge => {
            for a in 0..n {
                for b in Bits(all & !nb(a) & !low_mask(a + 1)) {
                    out.push(vec![a, b]);
                }
            }
        }
        Transformation::Rotation | Transformation::Slide => {
            for a in 0..n {
                for b in Bits(nb(a)) {
                    let pool = if tid == Transformation::Slide { nb(b) } else { all };
                    for c in Bits(pool & !nb(a) & !(1 << a) & !(1 << b)) {
                        out.push(vec![a, b, c]);
                    }
                }
            }
        }
        Transformation::MoveEdge => {
            let mut edges: Vec<(usize, usize)> = g.edges().map(|(u, v)| (u.min(v), u.max(v))).collect();
            edges.sort_unstable();
            let mut non_edges = Vec::new();
            for c in 0..n {
                for d in c + 1..n {
                    if !g.has_edge(c, d) {
                        non_edges.push((c, d));
                    }
                }
            }
            for &(a, b) in &edges {
                for &(c, d) in &non_edges {
                    out.push(vec![a, b, c, d]);
                }
            }
        }
        Transformation::Detour => {
            for a in 0..n {
                for b in Bits(nb(a) & !low_mask(a + 1)) {
                    for c in Bits(all & !nb(a) & !nb(b) & !(1 << a) & !(1 << b)) {
                        out.push(vec![a, b, c]);
                    }
                }
            }
        }
        Transformation::Shortcut => {
            for a in 0..n {
                for b in a + 1..n {
                    if g.has_edge(a, b) {
                        continue;
                    }
                    for c in Bits(nb(a) & nb(b)) {
                        out.push(vec![a, b, c]);
                    }
                }
            }
        }
        Transformation::TwoOpt => {
            for a in 0..n {
                for b in Bits(nb(a)) {
                    for c in Bits(all & !nb(a) & !(1 << a) & !(1 << b)) {
                        for d in Bits(nb(c) & !nb(b) & !(1 << a) & !(1 << b)) {
                            let t = [a, b, c, d];
                            if two_opt_orbit(a, b, c, d).iter().all(|o| t <= *o) {
                                out.push(t.to_vec());
                            }
                        }
                    }
                }
            }
        }
    }
    out
}
