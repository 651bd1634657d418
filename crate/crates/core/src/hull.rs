//! Exact 2D convex hulls of invariant point clouds and their facets.
//!
//! Orientation tests use `i128` arithmetic on coordinate differences, so
//! every `i64` input is handled exactly. Facets are reported as normalised
//! integer inequalities `a*x + b*y <= c` or `>= c`, with `gcd(|a|,|b|,|c|) = 1`
//! and `a > 0`, or `a == 0` and `b > 0`.

use std::fmt::{self, Write as _};
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumerate::GraphClass;
use crate::graph6::Signature;
use crate::invariants::InvariantValue;
use crate::store::{PointSet, Store, StoreError};

#[derive(Debug, Error)]
pub enum HullError {
    #[error("empty point cloud")]
    Empty,
    #[error("duplicate point ({0}, {1})")]
    DuplicatePoint(InvariantValue, InvariantValue),
    #[error("point ({0}, {1}) has multiplicity 0")]
    ZeroMultiplicity(InvariantValue, InvariantValue),
    #[error("facet coefficient exceeds the 64-bit range")]
    Overflow,
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: InvariantValue,
    pub y: InvariantValue,
}

impl Point {
    pub fn new(x: InvariantValue, y: InvariantValue) -> Point {
        Point { x, y }
    }
}

/// `(b - a) x (c - a)`: positive for a left turn.
fn cross(a: Point, b: Point, c: Point) -> i128 {
    let (abx, aby) = (b.x as i128 - a.x as i128, b.y as i128 - a.y as i128);
    let (acx, acy) = (c.x as i128 - a.x as i128, c.y as i128 - a.y as i128);
    abx * acy - aby * acx
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloudPoint {
    pub point: Point,
    pub multiplicity: usize,
    pub samples: Vec<Signature>,
}

/// Distinct integer points in the plane of two invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCloud {
    pub x: String,
    pub y: String,
    pub class: GraphClass,
    pub n: usize,
    points: Vec<CloudPoint>,
}

impl PointCloud {
    pub fn new(x: &str, y: &str, class: GraphClass, n: usize, mut points: Vec<CloudPoint>) -> Result<PointCloud, HullError> {
        points.sort_by_key(|p| p.point);
        for w in points.windows(2) {
            if w[0].point == w[1].point {
                return Err(HullError::DuplicatePoint(w[0].point.x, w[0].point.y));
            }
        }
        if let Some(p) = points.iter().find(|p| p.multiplicity == 0) {
            return Err(HullError::ZeroMultiplicity(p.point.x, p.point.y));
        }
        Ok(PointCloud { x: x.to_owned(), y: y.to_owned(), class, n, points })
    }

    /// Unlabelled cloud of unit multiplicities, mostly for tests and tooling.
    pub fn from_points(points: &[Point]) -> Result<PointCloud, HullError> {
        let pts = points.iter().map(|&point| CloudPoint { point, multiplicity: 1, samples: Vec::new() }).collect();
        PointCloud::new("x", "y", GraphClass::All, 0, pts)
    }

    pub fn points(&self) -> &[CloudPoint] {
        &self.points
    }

    pub fn population(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity).sum()
    }

    fn find(&self, p: Point) -> Option<&CloudPoint> {
        self.points.binary_search_by_key(&p, |c| c.point).ok().map(|i| &self.points[i])
    }
}

impl From<PointSet> for PointCloud {
    fn from(ps: PointSet) -> PointCloud {
        let points = ps
            .points
            .into_iter()
            .map(|p| CloudPoint { point: Point::new(p.x, p.y), multiplicity: p.multiplicity, samples: p.samples })
            .collect();
        PointCloud::new(&ps.x, &ps.y, ps.class, ps.n, points).expect("store points are grouped and non-empty")
    }
}

/// Counter-clockwise hull vertices starting from the lowest-leftmost point
/// (Andrew's monotone chain). Points inside an edge are not vertices.
pub fn convex_hull_points(points: &[Point]) -> Result<Vec<Point>, HullError> {
    if points.is_empty() {
        return Err(HullError::Empty);
    }
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return Ok(pts);
    }
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() + 1);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    // all collinear: the chain collapses onto the two extremes
    if hull.len() == 2 && hull[0] == hull[1] {
        hull.pop();
    }
    Ok(hull)
}

pub fn convex_hull(cloud: &PointCloud) -> Result<Vec<Point>, HullError> {
    let pts: Vec<Point> = cloud.points.iter().map(|p| p.point).collect();
    convex_hull_points(&pts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

impl Sense {
    fn flip(self) -> Sense {
        match self {
            Sense::AtMost => Sense::AtLeast,
            Sense::AtLeast => Sense::AtMost,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sense::AtMost => "<=",
            Sense::AtLeast => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TightPoint {
    pub point: Point,
    pub multiplicity: usize,
    pub witnesses: Vec<Signature>,
}

/// A hull edge read as the inequality `a*x + b*y (sense) c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facet {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub sense: Sense,
    /// Cloud points on the supporting line, sorted.
    pub tight: Vec<TightPoint>,
}

impl Facet {
    /// Normalised facet with outward normal `(a, b)`: `a*x + b*y <= c`.
    fn from_outward(a: i128, b: i128, c: i128) -> Result<Facet, HullError> {
        let g = gcd(gcd(a.abs(), b.abs()), c.abs()).max(1);
        let (mut a, mut b, mut c) = (a / g, b / g, c / g);
        let mut sense = Sense::AtMost;
        if a < 0 || (a == 0 && b < 0) {
            a = -a;
            b = -b;
            c = -c;
            sense = sense.flip();
        }
        let conv = |v: i128| i64::try_from(v).map_err(|_| HullError::Overflow);
        Ok(Facet { a: conv(a)?, b: conv(b)?, c: conv(c)?, sense, tight: Vec::new() })
    }

    fn lhs(&self, p: Point) -> i128 {
        self.a as i128 * p.x as i128 + self.b as i128 * p.y as i128
    }

    pub fn holds(&self, p: Point) -> bool {
        match self.sense {
            Sense::AtMost => self.lhs(p) <= self.c as i128,
            Sense::AtLeast => self.lhs(p) >= self.c as i128,
        }
    }

    pub fn is_tight(&self, p: Point) -> bool {
        self.lhs(p) == self.c as i128
    }

    /// Same normalised coefficients and sense.
    pub fn same_inequality(&self, other: &Facet) -> bool {
        (self.a, self.b, self.c, self.sense) == (other.a, other.b, other.c, other.sense)
    }

    /// `3*eci - 2*num_edges <= 5`.
    pub fn render(&self, x: &str, y: &str) -> String {
        let mut s = String::new();
        let term = |coef: i64, name: &str, s: &mut String| {
            if coef == 0 {
                return;
            }
            if s.is_empty() {
                if coef < 0 {
                    s.push('-');
                }
            } else {
                s.push_str(if coef < 0 { " - " } else { " + " });
            }
            if coef.abs() != 1 {
                let _ = write!(s, "{}*", coef.abs());
            }
            s.push_str(name);
        };
        term(self.a, x, &mut s);
        term(self.b, y, &mut s);
        let _ = write!(s, " {} {}", self.sense.symbol(), self.c);
        s
    }

    /// The inequality solved for `x` when `a != 0`, else for `y`:
    /// `eci <= 3/2*num_edges + 4`.
    pub fn render_solved(&self, x: &str, y: &str) -> String {
        let (lead, lead_name, other, other_name) =
            if self.a != 0 { (self.a, x, self.b, y) } else { (self.b, y, self.a, x) };
        // lead > 0 after normalisation, so dividing keeps the sense
        let slope = Ratio::new(-(other as i128), lead as i128);
        let offset = Ratio::new(self.c as i128, lead as i128);
        let mut rhs = String::new();
        if !slope.is_zero() {
            rhs.push_str(&slope.times(other_name));
        }
        if !offset.is_zero() || rhs.is_empty() {
            if rhs.is_empty() {
                rhs = offset.to_string();
            } else if offset.num < 0 {
                let _ = write!(rhs, " - {}", Ratio { num: -offset.num, den: offset.den });
            } else {
                let _ = write!(rhs, " + {offset}");
            }
        }
        format!("{lead_name} {} {rhs}", self.sense.symbol())
    }
}

#[derive(Clone, Copy)]
struct Ratio {
    num: i128,
    den: i128,
}

impl Ratio {
    fn new(num: i128, den: i128) -> Ratio {
        let g = gcd(num.abs(), den.abs()).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Ratio { num: s * num / g, den: s * den / g }
    }

    fn is_zero(self) -> bool {
        self.num == 0
    }

    fn times(self, name: &str) -> String {
        match (self.num, self.den) {
            (1, 1) => name.to_owned(),
            (-1, 1) => format!("-{name}"),
            _ => format!("{self}*{name}"),
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// One facet per edge of the counter-clockwise hull cycle. A two-vertex hull
/// (collinear cloud) yields the two opposite inequalities of its line; a
/// single point yields none.
pub fn facets(hull: &[Point], cloud: &PointCloud) -> Result<Vec<Facet>, HullError> {
    if hull.len() < 2 {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(hull.len());
    for (i, &p) in hull.iter().enumerate() {
        let q = hull[(i + 1) % hull.len()];
        let (dx, dy) = (q.x as i128 - p.x as i128, q.y as i128 - p.y as i128);
        let mut facet = Facet::from_outward(dy, -dx, dy * p.x as i128 - dx * p.y as i128)?;
        facet.tight = cloud
            .points
            .iter()
            .filter(|c| facet.is_tight(c.point))
            .map(|c| TightPoint { point: c.point, multiplicity: c.multiplicity, witnesses: c.samples.clone() })
            .collect();
        out.push(facet);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullVertex {
    pub point: Point,
    pub multiplicity: usize,
    /// Every graph at this coordinate.
    pub witnesses: Vec<Signature>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderReport {
    pub n: usize,
    pub graphs: usize,
    pub points: usize,
    /// Fewer than three hull vertices.
    pub degenerate: bool,
    pub hull: Vec<HullVertex>,
    pub facets: Vec<Facet>,
    pub bounds: Vec<String>,
    /// Every cloud point satisfies every facet and every facet has two or
    /// more tight points.
    pub verified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coincidence {
    /// Identical normalised inequality at both orders.
    Identical,
    /// Same normal and sense, different right-hand side.
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityNote {
    pub from_n: usize,
    pub to_n: usize,
    pub kind: Coincidence,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub x: String,
    pub y: String,
    pub class: GraphClass,
    pub orders: Vec<OrderReport>,
    pub stability: Vec<StabilityNote>,
}

pub fn order_report(store: &Store, x: &str, y: &str, class: GraphClass, n: usize, sample_cap: usize) -> Result<OrderReport, HullError> {
    let points = store.query_points(x, y, class, n, sample_cap)?;
    let all = store.signatures_by_point(&points)?;
    let cloud = PointCloud::from(points);
    let hull = convex_hull(&cloud)?;
    let facets = facets(&hull, &cloud)?;
    let verified = facets
        .iter()
        .all(|f| cloud.points.iter().all(|p| f.holds(p.point)) && f.tight.len() >= 2);
    let hull_vertices = hull
        .iter()
        .map(|&p| HullVertex {
            point: p,
            multiplicity: cloud.find(p).map_or(0, |c| c.multiplicity),
            witnesses: all.get(&(p.x, p.y)).cloned().unwrap_or_default(),
        })
        .collect();
    Ok(OrderReport {
        n,
        graphs: cloud.population(),
        points: cloud.points.len(),
        degenerate: hull.len() < 3,
        hull: hull_vertices,
        bounds: facets.iter().map(|f| f.render_solved(x, y)).collect(),
        facets,
        verified,
    })
}

/// Facets, hull-vertex witnesses and cross-order coincidences for each order
/// of `orders`.
pub fn conjecture_report(
    store: &Store,
    x: &str,
    y: &str,
    class: GraphClass,
    orders: RangeInclusive<usize>,
    sample_cap: usize,
) -> Result<ConjectureReport, HullError> {
    let reports = orders
        .map(|n| order_report(store, x, y, class, n, sample_cap))
        .collect::<Result<Vec<_>, _>>()?;
    let mut stability = Vec::new();
    for w in reports.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        for f in &lo.facets {
            let mut best: Option<(Coincidence, &Facet)> = None;
            for g in &hi.facets {
                if f.same_inequality(g) {
                    best = Some((Coincidence::Identical, g));
                    break;
                }
                if best.is_none() && (f.a, f.b, f.sense) == (g.a, g.b, g.sense) {
                    best = Some((Coincidence::Parallel, g));
                }
            }
            if let Some((kind, g)) = best {
                stability.push(StabilityNote {
                    from_n: lo.n,
                    to_n: hi.n,
                    kind,
                    from: f.render(x, y),
                    to: g.render(x, y),
                });
            }
        }
    }
    Ok(ConjectureReport { x: x.to_owned(), y: y.to_owned(), class, orders: reports, stability })
}

impl fmt::Display for ConjectureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.orders {
            writeln!(
                f,
                "n = {}: {} {} graphs, {} distinct points, {} hull vertices{}",
                r.n,
                r.graphs,
                self.class,
                r.points,
                r.hull.len(),
                if r.degenerate { " (degenerate)" } else { "" }
            )?;
            for b in &r.bounds {
                writeln!(f, "  {b}  for all {} graphs, n = {}", self.class, r.n)?;
            }
            for v in &r.hull {
                let sigs: Vec<&str> = v.witnesses.iter().map(Signature::as_str).collect();
                writeln!(f, "  vertex ({}, {}) x{}: {}", v.point.x, v.point.y, v.multiplicity, sigs.join(" "))?;
            }
            writeln!(f, "  verified: {}", r.verified)?;
        }
        for s in &self.stability {
            let kind = match s.kind {
                Coincidence::Identical => "identical",
                Coincidence::Parallel => "parallel",
            };
            writeln!(f, "n = {} -> {}: {kind}: {}  |  {}", s.from_n, s.to_n, s.from, s.to)?;
        }
        Ok(())
    }
}

/// pgfplots picture: scatter of the cloud coloured by multiplicity plus the
/// closed hull polyline.
pub fn to_tikz(cloud: &PointCloud, hull: &[Point]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "\\begin{{tikzpicture}}");
    let _ = writeln!(
        s,
        "  \\begin{{axis}}[title={{n = {}, {} graphs}}, xlabel={{{}}}, ylabel={{{}}}, colorbar]",
        cloud.n,
        cloud.class,
        cloud.x.replace('_', "\\_"),
        cloud.y.replace('_', "\\_")
    );
    let _ = writeln!(s, "    \\addplot[scatter, only marks, point meta=\\thisrow{{mult}}] table[x=x, y=y] {{");
    let _ = writeln!(s, "      x y mult");
    for p in &cloud.points {
        let _ = writeln!(s, "      {} {} {}", p.point.x, p.point.y, p.multiplicity);
    }
    let _ = writeln!(s, "    }};");
    let _ = write!(s, "    \\addplot[no marks] coordinates {{");
    for p in hull.iter().chain(hull.first()) {
        let _ = write!(s, " ({},{})", p.x, p.y);
    }
    let _ = writeln!(s, " }};");
    let _ = writeln!(s, "  \\end{{axis}}");
    let _ = writeln!(s, "\\end{{tikzpicture}}");
    s
}
