//! Metagraph construction, on-disk layout and queries.
//!
//! A metagraph directory holds:
//!
//! - `meta.json`: order, class, transformation subset, graph and arc counts;
//! - `signatures.g6`: one canonical signature per line, sorted; line `i` is graph `i`;
//! - `arcs.bin`: 13-byte records `src u32 LE, dst u32 LE, tid u8, params [u8; 4]`,
//!   grouped by source in index order;
//! - `index.bin`: `graphs + 1` little-endian `u64` record offsets, one per source.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{apply, enumerate_params, Params, Transformation};
use crate::canon::canonical_rows;
use crate::enumerate::{enumerate_class, pack_rows, EnumerationError, GraphClass};
use crate::graph6::Signature;
use crate::invariants::{self, InvariantError, InvariantValue};
use crate::store::{Store, StoreError};

pub const RECORD_BYTES: u64 = 13;
/// Arc-file size above which [`build_metagraph`] refuses to run by default.
pub const DEFAULT_MAX_BYTES: u64 = 4 << 30;
const FORMAT: &str = "phoeg-metagraph 1";

#[derive(Debug, Error)]
pub enum MetaError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("meta.json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("projected arc file of {projected} bytes exceeds the limit of {limit} bytes")]
    TooLarge { projected: u64, limit: u64 },
    #[error("signature {0} is not a vertex of this metagraph")]
    UnknownSignature(String),
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error("arc {index} does not re-derive: {reason}")]
    Inconsistent { index: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub src: u32,
    pub dst: u32,
    pub tid: Transformation,
    /// Vertices in the labelling of the canonical form of `src`.
    pub params: Params,
}

impl Arc {
    fn encode(&self) -> [u8; RECORD_BYTES as usize] {
        let mut out = [0u8; RECORD_BYTES as usize];
        out[0..4].copy_from_slice(&self.src.to_le_bytes());
        out[4..8].copy_from_slice(&self.dst.to_le_bytes());
        out[8] = self.tid.id();
        out[9..13].copy_from_slice(&self.params.bytes());
        out
    }

    fn decode(rec: &[u8]) -> Option<Arc> {
        let src = u32::from_le_bytes(rec[0..4].try_into().ok()?);
        let dst = u32::from_le_bytes(rec[4..8].try_into().ok()?);
        let tid = Transformation::from_id(rec[8])?;
        let params = Params::from_bytes(rec[9..13].try_into().ok()?);
        Some(Arc { src, dst, tid, params })
    }

    pub fn is_self(&self) -> bool {
        self.src == self.dst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcCountMode {
    /// One per `(src, tid, params)` application.
    Raw,
    /// Distinct `(src, tid, dst)`.
    PerTriple,
    /// Distinct `(src, dst)`.
    PerPair,
}

impl FromStr for ArcCountMode {
    type Err = String;

    fn from_str(s: &str) -> Result<ArcCountMode, String> {
        match s {
            "raw" => Ok(ArcCountMode::Raw),
            "per-triple" => Ok(ArcCountMode::PerTriple),
            "per-pair" => Ok(ArcCountMode::PerPair),
            _ => Err(format!("unknown count mode {s:?} (expected raw, per-triple or per-pair)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetaDirection {
    Out,
    In,
}

impl FromStr for MetaDirection {
    type Err = String;

    fn from_str(s: &str) -> Result<MetaDirection, String> {
        match s {
            "out" => Ok(MetaDirection::Out),
            "in" => Ok(MetaDirection::In),
            _ => Err(format!("unknown direction {s:?} (expected out or in)")),
        }
    }
}

/// Arc counts of one metagraph under every counting convention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Calibration {
    pub n: usize,
    pub graphs: usize,
    pub raw: u64,
    pub raw_no_self: u64,
    pub per_triple: u64,
    pub per_triple_no_self: u64,
    pub per_pair: u64,
    pub per_pair_no_self: u64,
    /// Applications counted over ordered vertex tuples.
    pub ordered: u64,
    pub ordered_no_self: u64,
}

impl Calibration {
    pub fn conventions(&self) -> [(&'static str, u64); 8] {
        [
            ("raw", self.raw),
            ("raw-no-self", self.raw_no_self),
            ("per-triple", self.per_triple),
            ("per-triple-no-self", self.per_triple_no_self),
            ("per-pair", self.per_pair),
            ("per-pair-no-self", self.per_pair_no_self),
            ("ordered", self.ordered),
            ("ordered-no-self", self.ordered_no_self),
        ]
    }

    /// Convention closest to `reference`, with its signed deviation.
    pub fn closest(&self, reference: u64) -> (&'static str, i64) {
        self.conventions()
            .into_iter()
            .map(|(name, v)| (name, v as i64 - reference as i64))
            .min_by_key(|&(_, d)| d.unsigned_abs())
            .expect("conventions are non-empty")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    pub max_bytes: u64,
}

impl Default for BuildOptions {
    fn default() -> BuildOptions {
        BuildOptions { max_bytes: DEFAULT_MAX_BYTES }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    n: usize,
    class: GraphClass,
    transformations: Vec<Transformation>,
    graphs: usize,
    arcs: u64,
}

#[derive(Debug)]
pub struct Metagraph {
    n: usize,
    class: GraphClass,
    transformations: Vec<Transformation>,
    signatures: Vec<Signature>,
    arcs: Vec<Arc>,
    offsets: Vec<u64>,
    incoming: OnceLock<(Vec<u64>, Vec<u32>)>,
}

/// Number of applications a build would enumerate, before dropping results
/// outside the class.
pub fn projected_applications(n: usize, class: GraphClass, tids: &[Transformation]) -> Result<u64, MetaError> {
    let graphs = enumerate_class(n, class)?;
    Ok(graphs
        .par_iter()
        .map(|g| tids.iter().map(|&t| enumerate_params(g, t).len() as u64).sum::<u64>())
        .sum())
}

/// Arcs of every application of `tids` to every order-`n` graph of `class`.
/// Results outside the class are dropped.
pub fn build_metagraph(
    n: usize,
    class: GraphClass,
    tids: &[Transformation],
    options: &BuildOptions,
) -> Result<Metagraph, MetaError> {
    let mut tids = tids.to_vec();
    tids.sort();
    tids.dedup();
    let projected = projected_applications(n, class, &tids)? * RECORD_BYTES;
    if projected > options.max_bytes {
        return Err(MetaError::TooLarge { projected, limit: options.max_bytes });
    }
    let graphs = enumerate_class(n, class)?;
    let keys: Vec<u64> = graphs.iter().map(|g| pack_rows(g.rows())).collect();
    debug_assert!(keys.windows(2).all(|w| w[0] < w[1]));
    let per_source: Vec<Vec<Arc>> = graphs
        .par_iter()
        .enumerate()
        .map(|(src, g)| {
            let mut out = Vec::new();
            for &tid in &tids {
                for p in enumerate_params(g, tid) {
                    let h = apply(g, tid, &p).expect("enumerated parameters apply");
                    if !class.admits(&h) {
                        continue;
                    }
                    let key = pack_rows(&canonical_rows(&h));
                    let dst = keys.binary_search(&key).expect("every class graph is a vertex");
                    out.push(Arc { src: src as u32, dst: dst as u32, tid, params: Params::new(&p) });
                }
            }
            out
        })
        .collect();
    let mut offsets = Vec::with_capacity(graphs.len() + 1);
    let mut arcs = Vec::with_capacity(per_source.iter().map(Vec::len).sum());
    offsets.push(0);
    for chunk in per_source {
        arcs.extend(chunk);
        offsets.push(arcs.len() as u64);
    }
    Ok(Metagraph {
        n,
        class,
        transformations: tids,
        signatures: graphs.iter().map(Signature::of_canonical).collect(),
        arcs,
        offsets,
        incoming: OnceLock::new(),
    })
}

impl Metagraph {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn class(&self) -> GraphClass {
        self.class
    }

    pub fn transformations(&self) -> &[Transformation] {
        &self.transformations
    }

    pub fn signatures(&self) -> &[Signature] {
        &self.signatures
    }

    pub fn signature(&self, index: u32) -> &Signature {
        &self.signatures[index as usize]
    }

    pub fn graph_count(&self) -> usize {
        self.signatures.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn index_of(&self, sig: &Signature) -> Option<u32> {
        self.signatures.binary_search(sig).ok().map(|i| i as u32)
    }

    /// Looks up `sig` after canonicalising it.
    pub fn resolve(&self, sig: &Signature) -> Result<u32, MetaError> {
        self.index_of(sig)
            .or_else(|| self.index_of(&Signature::of(&sig.decode())))
            .ok_or_else(|| MetaError::UnknownSignature(sig.to_string()))
    }

    pub fn out_arcs(&self, v: u32) -> &[Arc] {
        let (a, b) = (self.offsets[v as usize] as usize, self.offsets[v as usize + 1] as usize);
        &self.arcs[a..b]
    }

    pub fn in_arcs(&self, v: u32) -> Vec<Arc> {
        let (offsets, slots) = self.incoming.get_or_init(|| {
            let mut counts = vec![0u64; self.graph_count() + 1];
            for a in &self.arcs {
                counts[a.dst as usize + 1] += 1;
            }
            for i in 1..counts.len() {
                counts[i] += counts[i - 1];
            }
            let mut fill = counts.clone();
            let mut slots = vec![0u32; self.arcs.len()];
            for (i, a) in self.arcs.iter().enumerate() {
                slots[fill[a.dst as usize] as usize] = i as u32;
                fill[a.dst as usize] += 1;
            }
            (counts, slots)
        });
        let (a, b) = (offsets[v as usize] as usize, offsets[v as usize + 1] as usize);
        slots[a..b].iter().map(|&i| self.arcs[i as usize]).collect()
    }

    pub fn neighbors(
        &self,
        sig: &Signature,
        direction: MetaDirection,
        tid: Option<Transformation>,
    ) -> Result<Vec<Arc>, MetaError> {
        let v = self.resolve(sig)?;
        let arcs = match direction {
            MetaDirection::Out => self.out_arcs(v).to_vec(),
            MetaDirection::In => self.in_arcs(v),
        };
        Ok(arcs.into_iter().filter(|a| tid.is_none_or(|t| a.tid == t)).collect())
    }

    pub fn arc_count(&self, mode: ArcCountMode, include_self: bool) -> u64 {
        let kept = self.arcs.iter().filter(|a| include_self || !a.is_self());
        match mode {
            ArcCountMode::Raw => kept.count() as u64,
            ArcCountMode::PerTriple => kept.map(|a| (a.src, a.tid, a.dst)).collect::<HashSet<_>>().len() as u64,
            ArcCountMode::PerPair => kept.map(|a| (a.src, a.dst)).collect::<HashSet<_>>().len() as u64,
        }
    }

    /// Applications counted over ordered vertex tuples.
    pub fn ordered_count(&self, include_self: bool) -> u64 {
        self.arcs.iter().filter(|a| include_self || !a.is_self()).map(|a| a.tid.symmetry()).sum()
    }

    pub fn count_by_transformation(&self) -> BTreeMap<Transformation, u64> {
        let mut out: BTreeMap<Transformation, u64> = self.transformations.iter().map(|&t| (t, 0)).collect();
        for a in &self.arcs {
            *out.entry(a.tid).or_default() += 1;
        }
        out
    }

    /// Distinct `(src, dst)` pairs of `tid` arcs.
    pub fn pairs(&self, tid: Transformation) -> BTreeSet<(u32, u32)> {
        self.arcs.iter().filter(|a| a.tid == tid).map(|a| (a.src, a.dst)).collect()
    }

    pub fn calibration(&self) -> Calibration {
        Calibration {
            n: self.n,
            graphs: self.graph_count(),
            raw: self.arc_count(ArcCountMode::Raw, true),
            raw_no_self: self.arc_count(ArcCountMode::Raw, false),
            per_triple: self.arc_count(ArcCountMode::PerTriple, true),
            per_triple_no_self: self.arc_count(ArcCountMode::PerTriple, false),
            per_pair: self.arc_count(ArcCountMode::PerPair, true),
            per_pair_no_self: self.arc_count(ArcCountMode::PerPair, false),
            ordered: self.ordered_count(true),
            ordered_no_self: self.ordered_count(false),
        }
    }

    /// Recomputes every arc's target from its source, transformation and
    /// parameters.
    pub fn verify(&self) -> Result<(), MetaError> {
        let graphs: Vec<_> = self.signatures.iter().map(Signature::decode).collect();
        let bad = self.arcs.par_iter().enumerate().find_first(|(_, a)| {
            match apply(&graphs[a.src as usize], a.tid, &a.params.vertices()) {
                Ok(h) => Signature::of(&h) != self.signatures[a.dst as usize],
                Err(_) => true,
            }
        });
        match bad {
            None => Ok(()),
            Some((index, a)) => {
                let reason = match apply(&graphs[a.src as usize], a.tid, &a.params.vertices()) {
                    Ok(h) => format!("{} {} on {} gives {}", a.tid, a.params, self.signature(a.src), Signature::of(&h)),
                    Err(e) => e.to_string(),
                };
                Err(MetaError::Inconsistent { index, reason })
            }
        }
    }

    /// Values of `name` per vertex, computed from the graphs. Undefined
    /// values (eccentricity invariants on disconnected graphs) are `None`.
    pub fn invariant_values(&self, name: &str) -> Result<Vec<Option<InvariantValue>>, MetaError> {
        let def = invariants::lookup(name)?;
        self.signatures
            .par_iter()
            .map(|s| match (def.compute)(&s.decode()) {
                Ok(v) => Ok(Some(v)),
                Err(InvariantError::Disconnected { .. }) => Ok(None),
                Err(e) => Err(MetaError::from(e)),
            })
            .collect()
    }

    /// Values of `name` per vertex, read from a store column of the same class.
    pub fn store_values(&self, store: &Store, name: &str) -> Result<Vec<Option<InvariantValue>>, MetaError> {
        let col = store.load_column(self.class, name)?;
        Ok(self.signatures.iter().map(|s| col.get(s)).collect())
    }

    pub fn save(&self, dir: &Path) -> Result<(), MetaError> {
        fs::create_dir_all(dir)?;
        let header = Header {
            format: FORMAT.to_owned(),
            n: self.n,
            class: self.class,
            transformations: self.transformations.clone(),
            graphs: self.graph_count(),
            arcs: self.arcs.len() as u64,
        };
        let mut meta = serde_json::to_string_pretty(&header)?;
        meta.push('\n');
        fs::write(dir.join("meta.json"), meta)?;
        let mut w = BufWriter::new(fs::File::create(dir.join("signatures.g6"))?);
        for s in &self.signatures {
            writeln!(w, "{s}")?;
        }
        w.flush()?;
        let mut w = BufWriter::new(fs::File::create(dir.join("arcs.bin"))?);
        for a in &self.arcs {
            w.write_all(&a.encode())?;
        }
        w.flush()?;
        let mut w = BufWriter::new(fs::File::create(dir.join("index.bin"))?);
        for o in &self.offsets {
            w.write_all(&o.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Metagraph, MetaError> {
        let format_err = |file: &str, reason: String| MetaError::Format { path: dir.join(file), reason };
        let header: Header = serde_json::from_slice(&fs::read(dir.join("meta.json"))?)?;
        if header.format != FORMAT {
            return Err(format_err("meta.json", format!("unsupported format {:?}", header.format)));
        }
        let mut signatures = Vec::with_capacity(header.graphs);
        for (i, line) in BufReader::new(fs::File::open(dir.join("signatures.g6"))?).lines().enumerate() {
            let line = line?;
            let sig = Signature::parse(&line).map_err(|e| format_err("signatures.g6", format!("line {}: {e}", i + 1)))?;
            if sig.order() != header.n {
                return Err(format_err("signatures.g6", format!("line {}: order {} != {}", i + 1, sig.order(), header.n)));
            }
            signatures.push(sig);
        }
        if signatures.len() != header.graphs {
            return Err(format_err("signatures.g6", format!("{} signatures, header says {}", signatures.len(), header.graphs)));
        }
        if !signatures.windows(2).all(|w| w[0] < w[1]) {
            return Err(format_err("signatures.g6", "signatures not strictly sorted".into()));
        }
        let mut raw = Vec::new();
        fs::File::open(dir.join("arcs.bin"))?.read_to_end(&mut raw)?;
        if raw.len() as u64 != header.arcs * RECORD_BYTES {
            return Err(format_err("arcs.bin", format!("{} bytes, expected {}", raw.len(), header.arcs * RECORD_BYTES)));
        }
        let mut arcs = Vec::with_capacity(header.arcs as usize);
        for (i, rec) in raw.chunks_exact(RECORD_BYTES as usize).enumerate() {
            let arc = Arc::decode(rec)
                .filter(|a| (a.src as usize) < header.graphs && (a.dst as usize) < header.graphs)
                .filter(|a| a.params.len() == a.tid.arity() && header.transformations.contains(&a.tid))
                .ok_or_else(|| format_err("arcs.bin", format!("record {i} is malformed")))?;
            arcs.push(arc);
        }
        let mut raw = Vec::new();
        fs::File::open(dir.join("index.bin"))?.read_to_end(&mut raw)?;
        if raw.len() != (header.graphs + 1) * 8 {
            return Err(format_err("index.bin", format!("{} bytes, expected {}", raw.len(), (header.graphs + 1) * 8)));
        }
        let offsets: Vec<u64> =
            raw.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect();
        if offsets[0] != 0 || offsets[header.graphs] != header.arcs || offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(format_err("index.bin", "offsets are not a monotone cover of the arcs".into()));
        }
        for (v, w) in offsets.windows(2).enumerate() {
            if arcs[w[0] as usize..w[1] as usize].iter().any(|a| a.src as usize != v) {
                return Err(format_err("index.bin", format!("source {v} owns arcs of another source")));
            }
        }
        Ok(Metagraph {
            n: header.n,
            class: header.class,
            transformations: header.transformations,
            signatures,
            arcs,
            offsets,
            incoming: OnceLock::new(),
        })
    }

    /// Graphviz rendering, one node per graph and one edge per arc.
    pub fn write_dot<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "digraph metagraph_{}_{} {{", self.n, self.class)?;
        for (i, s) in self.signatures.iter().enumerate() {
            writeln!(w, "  g{i} [label=\"{}\"];", dot_escape(s.as_str()))?;
        }
        for a in &self.arcs {
            writeln!(w, "  g{} -> g{} [label=\"{} {}\"];", a.src, a.dst, a.tid, a.params)?;
        }
        writeln!(w, "}}")
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl fmt::Display for Calibration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} graphs={}", self.n, self.graphs)?;
        for (name, v) in self.conventions() {
            write!(f, " {name}={v}")?;
        }
        Ok(())
    }
}
