//! Per-invariant column files keyed by signature, and the queries run on them.
//!
//! A store is a directory with one subdirectory per graph class. Each column
//! lives in `<root>/<class>/<invariant>.col`:
//!
//! ```text
//! phoeg-column 1
//! class connected
//! orders 1 7
//! <signature>\t<value>
//! ...
//! ```
//!
//! Rows are sorted by signature bytes, which groups them by order since the
//! first graph6 byte encodes the order.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumerate::{enumerate_class, EnumerationError, GraphClass, MAX_ENUMERATION_ORDER};
use crate::graph6::{Graph6Error, Signature};
use crate::invariants::{self, InvariantError, InvariantValue};

const FORMAT_HEADER: &str = "phoeg-column 1";

/// Sample signatures kept per coordinate unless a caller asks otherwise.
pub const DEFAULT_SAMPLES: usize = 4;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error("invariant {invariant} undefined on {signature}, which class {class} admits")]
    ClassMismatch { invariant: String, signature: Signature, class: GraphClass },
    #[error("missing column {name} for class {class} (expected at {path})")]
    MissingColumn { name: String, class: GraphClass, path: PathBuf },
    #[error("column {name} covers orders {min}..={max}, query needs {wanted}")]
    Coverage { name: String, min: usize, max: usize, wanted: usize },
    #[error("{path}:{line}: {reason}")]
    Format { path: PathBuf, line: usize, reason: String },
    #[error("{path}:{line}: bad signature: {source}")]
    Signature { path: PathBuf, line: usize, source: Graph6Error },
}

/// Direction of an extremal query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Max,
    Min,
}

impl Direction {
    /// Whether `a` is strictly better than `b`.
    pub fn better(self, a: InvariantValue, b: InvariantValue) -> bool {
        match self {
            Direction::Max => a > b,
            Direction::Min => a < b,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Max => "max",
            Direction::Min => "min",
        })
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Direction, String> {
        match s {
            "max" | "increase" => Ok(Direction::Max),
            "min" | "decrease" => Ok(Direction::Min),
            _ => Err(format!("unknown direction {s:?} (expected max or min)")),
        }
    }
}

/// Values of one invariant for every graph of a class within an order range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantColumn {
    pub name: String,
    pub class: GraphClass,
    pub min_order: usize,
    pub max_order: usize,
    rows: Vec<(Signature, InvariantValue)>,
}

impl InvariantColumn {
    /// Sorts and checks the rows: unique signatures inside the order range.
    pub fn new(
        name: &str,
        class: GraphClass,
        min_order: usize,
        max_order: usize,
        mut rows: Vec<(Signature, InvariantValue)>,
    ) -> InvariantColumn {
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        debug_assert!(rows.windows(2).all(|w| w[0].0 != w[1].0));
        InvariantColumn { name: name.to_owned(), class, min_order, max_order, rows }
    }

    pub fn rows(&self) -> &[(Signature, InvariantValue)] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, sig: &Signature) -> Option<InvariantValue> {
        self.rows.binary_search_by(|(s, _)| s.cmp(sig)).ok().map(|i| self.rows[i].1)
    }

    /// Rows whose graphs have order `n`.
    pub fn order_rows(&self, n: usize) -> &[(Signature, InvariantValue)] {
        let lo = self.rows.partition_point(|(s, _)| s.order() < n);
        let hi = self.rows.partition_point(|(s, _)| s.order() <= n);
        &self.rows[lo..hi]
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{FORMAT_HEADER}")?;
        writeln!(w, "class {}", self.class)?;
        writeln!(w, "orders {} {}", self.min_order, self.max_order)?;
        for (sig, v) in &self.rows {
            writeln!(w, "{sig}\t{v}")?;
        }
        w.flush()
    }

    pub fn save(&self, path: &Path) -> Result<(), StoreError> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension("col.tmp");
        self.write_to(BufWriter::new(fs::File::create(&tmp)?))?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Loads and validates a column file; the name comes from the file stem.
    pub fn load(path: &Path) -> Result<InvariantColumn, StoreError> {
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_owned();
        let file = fs::File::open(path)?;
        let fmt_err = |line: usize, reason: &str| StoreError::Format {
            path: path.to_owned(),
            line,
            reason: reason.to_owned(),
        };
        let mut lines = BufReader::new(file).lines();
        let mut header = |i: usize| -> Result<String, StoreError> {
            lines.next().transpose()?.ok_or_else(|| fmt_err(i, "truncated header"))
        };
        if header(1)? != FORMAT_HEADER {
            return Err(fmt_err(1, "unknown format version"));
        }
        let class_line = header(2)?;
        let class = class_line
            .strip_prefix("class ")
            .and_then(|c| c.parse::<GraphClass>().ok())
            .ok_or_else(|| fmt_err(2, "bad class line"))?;
        let orders_line = header(3)?;
        let orders: Vec<usize> = orders_line
            .strip_prefix("orders ")
            .map(|r| r.split(' ').filter_map(|x| x.parse().ok()).collect())
            .unwrap_or_default();
        let [min_order, max_order] = orders[..] else {
            return Err(fmt_err(3, "bad orders line"));
        };
        let mut rows: Vec<(Signature, InvariantValue)> = Vec::new();
        for (i, line) in lines.enumerate() {
            let lineno = i + 4;
            let line = line?;
            let (sig, value) = line.split_once('\t').ok_or_else(|| fmt_err(lineno, "expected signature<TAB>value"))?;
            let sig = Signature::parse(sig).map_err(|source| StoreError::Signature {
                path: path.to_owned(),
                line: lineno,
                source,
            })?;
            let value: InvariantValue = value.parse().map_err(|_| fmt_err(lineno, "bad integer value"))?;
            if let Some((prev, _)) = rows.last() {
                if *prev >= sig {
                    return Err(fmt_err(lineno, "signatures not strictly increasing"));
                }
            }
            if sig.order() < min_order || sig.order() > max_order {
                return Err(fmt_err(lineno, "signature order outside the header range"));
            }
            if !class.admits(&sig.decode()) {
                return Err(fmt_err(lineno, "graph outside the column's class"));
            }
            rows.push((sig, value));
        }
        Ok(InvariantColumn { name, class, min_order, max_order, rows })
    }

    fn require_order(&self, n: usize) -> Result<(), StoreError> {
        if n < self.min_order || n > self.max_order {
            return Err(StoreError::Coverage {
                name: self.name.clone(),
                min: self.min_order,
                max: self.max_order,
                wanted: n,
            });
        }
        Ok(())
    }
}

/// A directory of invariant columns.
#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Store {
        Store { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn column_path(&self, class: GraphClass, name: &str) -> PathBuf {
        self.root.join(class.name()).join(format!("{name}.col"))
    }

    pub fn has_column(&self, class: GraphClass, name: &str) -> bool {
        self.column_path(class, name).is_file()
    }

    pub fn load_column(&self, class: GraphClass, name: &str) -> Result<InvariantColumn, StoreError> {
        let path = self.column_path(class, name);
        if !path.is_file() {
            return Err(StoreError::MissingColumn { name: name.to_owned(), class, path });
        }
        InvariantColumn::load(&path)
    }

    /// Computes the named invariants for every graph of `class` with order
    /// `1..=max_n` and writes one column file per invariant.
    ///
    /// Rebuilding with the same arguments produces byte-identical files.
    pub fn build(&self, max_n: usize, class: GraphClass, names: &[&str]) -> Result<Vec<PathBuf>, StoreError> {
        if max_n == 0 || max_n > MAX_ENUMERATION_ORDER {
            return Err(EnumerationError::OrderOutOfRange(max_n).into());
        }
        let defs = names.iter().map(|n| invariants::lookup(n)).collect::<Result<Vec<_>, _>>()?;
        let mut columns: Vec<Vec<(Signature, InvariantValue)>> = vec![Vec::new(); defs.len()];
        for n in 1..=max_n {
            let graphs = enumerate_class(n, class)?;
            let values: Vec<(Signature, Vec<InvariantValue>)> = graphs
                .par_iter()
                .map(|g| {
                    let sig = Signature::of_canonical(g);
                    let vals = defs
                        .iter()
                        .map(|d| {
                            (d.compute)(g).map_err(|_| StoreError::ClassMismatch {
                                invariant: d.name.to_owned(),
                                signature: sig.clone(),
                                class,
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok((sig, vals))
                })
                .collect::<Result<_, StoreError>>()?;
            for (sig, vals) in values {
                for (col, v) in columns.iter_mut().zip(vals) {
                    col.push((sig.clone(), v));
                }
            }
        }
        let mut paths = Vec::with_capacity(defs.len());
        for (def, rows) in defs.iter().zip(columns) {
            let column = InvariantColumn::new(def.name, class, 1, max_n, rows);
            let path = self.column_path(class, def.name);
            column.save(&path)?;
            paths.push(path);
        }
        Ok(paths)
    }

    /// For each `(n, m)` cell with `n <= max_n`, the optimum of `invariant`
    /// and every graph attaining it (rank-one rows under a dense ranking
    /// partitioned by order and size). Sorted by `(n, m)`.
    pub fn query_extremal(
        &self,
        invariant: &str,
        direction: Direction,
        max_n: usize,
        class: GraphClass,
    ) -> Result<Vec<CellExtremalResult>, StoreError> {
        let orders = self.load_column(class, "num_vertices")?;
        let sizes = self.load_column(class, "num_edges")?;
        let values = self.load_column(class, invariant)?;
        for col in [&orders, &sizes, &values] {
            col.require_order(max_n)?;
        }
        let mut cells: BTreeMap<(InvariantValue, InvariantValue), CellExtremalResult> = BTreeMap::new();
        for (sig, v) in values.rows() {
            let (Some(n), Some(m)) = (orders.get(sig), sizes.get(sig)) else {
                continue;
            };
            if n > max_n as InvariantValue {
                continue;
            }
            let cell = cells.entry((n, m)).or_insert_with(|| CellExtremalResult {
                n,
                m,
                optimum: *v,
                witnesses: Vec::new(),
                direction,
            });
            if direction.better(*v, cell.optimum) {
                cell.optimum = *v;
                cell.witnesses.clear();
            }
            if *v == cell.optimum {
                cell.witnesses.push(sig.clone());
            }
        }
        Ok(cells.into_values().collect())
    }

    /// Distinct `(x, y)` coordinates of the order-`n` graphs of `class`, with
    /// multiplicities and up to `sample_cap` sample signatures each.
    pub fn query_points(
        &self,
        x: &str,
        y: &str,
        class: GraphClass,
        n: usize,
        sample_cap: usize,
    ) -> Result<PointSet, StoreError> {
        let xs = self.load_column(class, x)?;
        let ys = self.load_column(class, y)?;
        xs.require_order(n)?;
        ys.require_order(n)?;
        let ys_rows = ys.order_rows(n);
        let mut grouped: BTreeMap<(InvariantValue, InvariantValue), CoordinatePoint> = BTreeMap::new();
        for (sig, xv) in xs.order_rows(n) {
            let Ok(i) = ys_rows.binary_search_by(|(s, _)| s.cmp(sig)) else {
                continue;
            };
            let yv = ys_rows[i].1;
            let p = grouped.entry((*xv, yv)).or_insert_with(|| CoordinatePoint {
                x: *xv,
                y: yv,
                multiplicity: 0,
                samples: Vec::new(),
            });
            p.multiplicity += 1;
            if p.samples.len() < sample_cap {
                p.samples.push(sig.clone());
            }
        }
        Ok(PointSet {
            x: x.to_owned(),
            y: y.to_owned(),
            class,
            n,
            points: grouped.into_values().collect(),
        })
    }

    /// Every signature at each coordinate of `points` (the uncapped sample lists).
    pub fn signatures_by_point(
        &self,
        points: &PointSet,
    ) -> Result<BTreeMap<(InvariantValue, InvariantValue), Vec<Signature>>, StoreError> {
        let xs = self.load_column(points.class, &points.x)?;
        let ys = self.load_column(points.class, &points.y)?;
        let ys_rows = ys.order_rows(points.n);
        let mut out: BTreeMap<_, Vec<Signature>> = BTreeMap::new();
        for (sig, xv) in xs.order_rows(points.n) {
            if let Ok(i) = ys_rows.binary_search_by(|(s, _)| s.cmp(sig)) {
                out.entry((*xv, ys_rows[i].1)).or_default().push(sig.clone());
            }
        }
        Ok(out)
    }

    /// Aggregates `annotation` over all graphs sharing each coordinate.
    pub fn annotate_points(
        &self,
        points: &PointSet,
        annotation: &str,
        aggregator: Direction,
    ) -> Result<Vec<AnnotatedPoint>, StoreError> {
        let ann = self.load_column(points.class, annotation)?;
        ann.require_order(points.n)?;
        let by_point = self.signatures_by_point(points)?;
        points
            .points
            .iter()
            .map(|p| {
                let sigs = by_point.get(&(p.x, p.y)).map(Vec::as_slice).unwrap_or(&[]);
                let mut agg: Option<InvariantValue> = None;
                for sig in sigs {
                    let v = ann.get(sig).ok_or_else(|| StoreError::MissingColumn {
                        name: annotation.to_owned(),
                        class: points.class,
                        path: self.column_path(points.class, annotation),
                    })?;
                    agg = Some(match agg {
                        Some(a) if !aggregator.better(v, a) => a,
                        _ => v,
                    });
                }
                Ok(AnnotatedPoint {
                    point: p.clone(),
                    annotation: annotation.to_owned(),
                    aggregator,
                    value: agg.expect("every coordinate has at least one graph"),
                })
            })
            .collect()
    }
}

/// Optimum of an invariant in one `(n, m)` cell, with all graphs attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellExtremalResult {
    pub n: InvariantValue,
    pub m: InvariantValue,
    pub optimum: InvariantValue,
    pub witnesses: Vec<Signature>,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinatePoint {
    pub x: InvariantValue,
    pub y: InvariantValue,
    pub multiplicity: usize,
    pub samples: Vec<Signature>,
}

/// Coordinates of one order of one class in a two-invariant plane.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSet {
    pub x: String,
    pub y: String,
    pub class: GraphClass,
    pub n: usize,
    pub points: Vec<CoordinatePoint>,
}

impl PointSet {
    pub fn population(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedPoint {
    #[serde(flatten)]
    pub point: CoordinatePoint,
    pub annotation: String,
    pub aggregator: Direction,
    pub value: InvariantValue,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn sig(g: &Graph) -> Signature {
        Signature::of(g)
    }

    #[test]
    fn build_row_counts() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path());
        store.build(5, GraphClass::All, &["num_edges"]).unwrap();
        assert_eq!(store.load_column(GraphClass::All, "num_edges").unwrap().len(), 52);
        store.build(3, GraphClass::Connected, &["eci"]).unwrap();
        let col = store.load_column(GraphClass::Connected, "eci").unwrap();
        assert_eq!(col.len(), 4);
        let k3 = Graph::complete(3).unwrap();
        assert_eq!(col.get(&sig(&k3)), Some(6));
    }

    #[test]
    fn rebuild_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path());
        let path = store.build(5, GraphClass::Connected, &["eci"]).unwrap().remove(0);
        let first = fs::read(&path).unwrap();
        store.build(5, GraphClass::Connected, &["eci"]).unwrap();
        assert_eq!(first, fs::read(&path).unwrap());
    }

    #[test]
    fn build_errors() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path());
        assert!(matches!(
            store.build(3, GraphClass::All, &["bogus"]),
            Err(StoreError::Invariant(InvariantError::Unknown(_)))
        ));
        assert!(matches!(
            store.build(3, GraphClass::All, &["eci"]),
            Err(StoreError::ClassMismatch { .. })
        ));
        assert!(matches!(
            store.query_extremal("eci", Direction::Max, 3, GraphClass::All),
            Err(StoreError::MissingColumn { .. })
        ));
    }

    #[test]
    fn extremal_cell_four_three() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path());
        store.build(4, GraphClass::Connected, &["num_vertices", "num_edges", "eci"]).unwrap();
        let cells = store.query_extremal("eci", Direction::Max, 4, GraphClass::Connected).unwrap();
        let cell = cells.iter().find(|c| c.n == 4 && c.m == 3).unwrap();
        assert_eq!(cell.optimum, 14);
        assert_eq!(cell.witnesses, vec![sig(&Graph::path(4).unwrap())]);
        let min = store.query_extremal("eci", Direction::Min, 4, GraphClass::Connected).unwrap();
        let cell = min.iter().find(|c| c.n == 4 && c.m == 3).unwrap();
        assert_eq!((cell.optimum, cell.witnesses.clone()), (9, vec![sig(&Graph::star(3).unwrap())]));
        assert!(matches!(
            store.query_extremal("eci", Direction::Max, 5, GraphClass::Connected),
            Err(StoreError::Coverage { .. })
        ));
    }

    #[test]
    fn num_edges_cells_keep_every_graph() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path());
        store.build(5, GraphClass::All, &["num_vertices", "num_edges"]).unwrap();
        let cells = store.query_extremal("num_edges", Direction::Max, 5, GraphClass::All).unwrap();
        assert_eq!(cells.iter().map(|c| c.witnesses.len()).sum::<usize>(), 52);
        assert!(cells.iter().all(|c| c.optimum == c.m));
    }

    #[test]
    fn points_for_k2() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path());
        store.build(2, GraphClass::Connected, &["eci", "num_edges"]).unwrap();
        let ps = store.query_points("eci", "num_edges", GraphClass::Connected, 2, 4).unwrap();
        assert_eq!(ps.points.len(), 1);
        assert_eq!((ps.points[0].x, ps.points[0].y, ps.points[0].multiplicity), (2, 1, 1));
    }

    #[test]
    fn annotation_of_constant_column() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path());
        store.build(5, GraphClass::Connected, &["eci", "num_edges", "num_vertices"]).unwrap();
        let ps = store.query_points("eci", "num_edges", GraphClass::Connected, 5, 1).unwrap();
        let ann = store.annotate_points(&ps, "num_vertices", Direction::Min).unwrap();
        assert!(ann.iter().all(|a| a.value == 5));
    }

    #[test]
    fn load_rejects_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.col");
        fs::write(&path, "phoeg-column 1\nclass all\norders 1 3\nBw\t3\nA_\t1\n").unwrap();
        assert!(matches!(InvariantColumn::load(&path), Err(StoreError::Format { line: 5, .. })));
        fs::write(&path, "phoeg-column 1\nclass connected\norders 1 3\nA?\t0\n").unwrap();
        assert!(matches!(InvariantColumn::load(&path), Err(StoreError::Format { line: 4, .. })));
        fs::write(&path, "phoeg-column 1\nclass all\norders 1 3\nBx\t0\n").unwrap();
        assert!(matches!(InvariantColumn::load(&path), Err(StoreError::Signature { line: 4, .. })));
        fs::write(&path, "phoeg-column 2\n").unwrap();
        assert!(matches!(InvariantColumn::load(&path), Err(StoreError::Format { line: 1, .. })));
    }
}
