//! Isomorph-free exhaustive enumeration.
//!
//! Every graph of order `n` arises from a canonical graph of order `n - 1` by
//! adding a vertex of maximum degree, so candidates are the canonical parents
//! extended by neighbourhoods `S` with `|S|` at least every resulting degree.
//! Candidates are canonicalised and deduplicated through packed edge-bit
//! keys. Since the keys carry the graph6 bit string most significant bit
//! first, sorting keys sorts the signatures.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::canonical_rows;
use crate::graph::{Graph, MAX_ORDER};
use crate::graph6::Signature;
use crate::invariants::is_connected;

/// Largest order accepted by [`enumerate_all`].
pub const MAX_ENUMERATION_ORDER: usize = 10;

/// Number of parents expanded before intermediate keys are compacted.
const PARENT_CHUNK: usize = 8192;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("order {0} outside the supported range 1..={MAX_ENUMERATION_ORDER}")]
    OrderOutOfRange(usize),
}

/// Class of graphs a store, hull or metagraph is built over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphClass {
    All,
    Connected,
}

impl GraphClass {
    pub fn admits(self, g: &Graph) -> bool {
        match self {
            GraphClass::All => true,
            GraphClass::Connected => is_connected(g),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GraphClass::All => "all",
            GraphClass::Connected => "connected",
        }
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown graph class {0:?} (expected \"all\" or \"connected\")")]
pub struct UnknownClass(pub String);

impl FromStr for GraphClass {
    type Err = UnknownClass;

    fn from_str(s: &str) -> Result<GraphClass, UnknownClass> {
        match s {
            "all" => Ok(GraphClass::All),
            "connected" => Ok(GraphClass::Connected),
            _ => Err(UnknownClass(s.to_owned())),
        }
    }
}

/// Canonical representatives of order `n`, sorted by signature.
pub struct Enumeration {
    n: usize,
    keys: std::vec::IntoIter<u64>,
}

impl Enumeration {
    pub fn order(&self) -> usize {
        self.n
    }
}

impl Iterator for Enumeration {
    type Item = Graph;

    fn next(&mut self) -> Option<Graph> {
        self.keys.next().map(|k| unpack(self.n, k))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.keys.size_hint()
    }
}

impl ExactSizeIterator for Enumeration {}

/// All graphs of order `n` up to isomorphism, each in canonical form, in
/// signature order.
pub fn enumerate_all(n: usize) -> Result<Enumeration, EnumerationError> {
    Ok(Enumeration { n, keys: enumerate_keys(n)?.into_iter() })
}

/// Like [`enumerate_all`], keeping only graphs of `class`.
pub fn enumerate_class(n: usize, class: GraphClass) -> Result<Vec<Graph>, EnumerationError> {
    Ok(enumerate_all(n)?.filter(|g| class.admits(g)).collect())
}

/// Like [`enumerate_all`], keeping only graphs accepted by `keep`.
pub fn enumerate_filtered<F>(n: usize, keep: F) -> Result<Vec<Graph>, EnumerationError>
where
    F: Fn(&Graph) -> bool + Sync,
{
    let keys = enumerate_keys(n)?;
    Ok(keys.into_par_iter().map(|k| unpack(n, k)).filter(|g| keep(g)).collect())
}

pub fn enumerate_signatures(n: usize, class: GraphClass) -> Result<Vec<Signature>, EnumerationError> {
    Ok(enumerate_class(n, class)?.iter().map(Signature::of_canonical).collect())
}

fn enumerate_keys(n: usize) -> Result<Vec<u64>, EnumerationError> {
    if n == 0 || n > MAX_ENUMERATION_ORDER {
        return Err(EnumerationError::OrderOutOfRange(n));
    }
    debug_assert!(n <= MAX_ORDER);
    let mut keys = vec![0u64];
    for order in 2..=n {
        keys = extend_order(order, &keys);
    }
    Ok(keys)
}

fn extend_order(n: usize, parents: &[u64]) -> Vec<u64> {
    let mut acc: Vec<u64> = Vec::new();
    for chunk in parents.chunks(PARENT_CHUNK) {
        let mut fresh: Vec<u64> = chunk
            .par_iter()
            .flat_map_iter(|&key| children(n, &unpack(n - 1, key)))
            .collect();
        fresh.par_sort_unstable();
        fresh.dedup();
        acc = merge_dedup(acc, fresh);
    }
    acc
}

fn merge_dedup(a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    if a.is_empty() {
        return b;
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Canonical keys of every child of `parent` whose new vertex has maximum degree.
fn children(n: usize, parent: &Graph) -> Vec<u64> {
    let m = n - 1;
    let degrees: Vec<u32> = (0..m).map(|v| parent.degree(v) as u32).collect();
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let mut saturated = vec![0u64; n];
    for (v, &d) in degrees.iter().enumerate() {
        saturated[d as usize] |= 1 << v;
    }
    let mut keys = Vec::new();
    let mut rows = parent.rows().to_vec();
    rows.push(0);
    for s in 0u64..(1u64 << m) {
        let k = s.count_ones();
        if k < max_degree {
            continue;
        }
        // vertices already at degree k would exceed the new vertex when joined
        if s & saturated[k as usize] != 0 {
            continue;
        }
        for (v, row) in rows.iter_mut().take(m).enumerate() {
            *row = parent.rows()[v] | ((s >> v & 1) << m);
        }
        rows[m] = s;
        let child = Graph::from_rows_unchecked(n, rows.clone());
        keys.push(pack_rows(&canonical_rows(&child)));
    }
    keys
}

/// graph6 edge bits as an integer, first bit most significant. Needs `n <= 11`.
pub(crate) fn pack_rows(rows: &[u64]) -> u64 {
    let mut key = 0u64;
    for j in 1..rows.len() {
        for row in &rows[..j] {
            key = key << 1 | (row >> j & 1);
        }
    }
    key
}

pub(crate) fn unpack(n: usize, key: u64) -> Graph {
    let bits = n * (n - 1) / 2;
    let mut rows = vec![0u64; n];
    let mut k = bits;
    for j in 1..n {
        for i in 0..j {
            k -= 1;
            if key >> k & 1 == 1 {
                rows[i] |= 1 << j;
                rows[j] |= 1 << i;
            }
        }
    }
    Graph::from_rows_unchecked(n, rows)
}
