//! Acceptance suite: one [PASS]/[FAIL] line per criterion, exit status 1 if
//! any fails. Run with `cargo test -p phoeg-cli --test acceptance`.

mod oracles;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use phoeg_core::canon::is_isomorphic;
use phoeg_core::enumerate::enumerate_class;
use phoeg_core::hull::{order_report, Point};
use phoeg_core::obstruction::{lookup_class, minimal_obstructions, Relation};
use phoeg_core::store::{Direction, Store};
use phoeg_core::transproof::{
    build_metagraph, enumerate_applications, filtered_metagraph, proof_report, BuildOptions, Metagraph, Transformation,
};
use phoeg_core::{decode_graph6, encode_graph6, enumerate_all, Graph, GraphClass, Signature, VertexPermutation};

use oracles::Matrix;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
type ObstructionCase = (&'static str, usize, fn(&Matrix) -> bool, Vec<Signature>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn phoeg(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_phoeg"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot run phoeg: {e}"))?;
    if !out.status.success() {
        return Err(format!("phoeg {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn as_matrix(g: &Graph) -> Matrix {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    oracles::matrix(g.order(), &edges)
}

fn edge_count(a: &Matrix) -> i64 {
    a.iter().map(|r| r.iter().filter(|&&x| x).count()).sum::<usize>() as i64 / 2
}

fn enumeration_counts() -> Outcome {
    let want = [1, 2, 4, 11, 34, 156, 1044, 12346, 274668];
    let mut got = Vec::new();
    for k in 1..=9 {
        let text = phoeg(&["enumerate", "--n", &k.to_string()])?;
        let lines: Vec<&str> = text.lines().collect();
        let distinct: HashSet<&&str> = lines.iter().collect();
        ensure!(distinct.len() == lines.len(), "n={k}: duplicate lines");
        got.push(lines.len());
    }
    ensure!(got == want, "counts {got:?}, expected {want:?}");
    Ok(format!("{got:?}"))
}

fn random_graph(rng: &mut impl Rng, n: usize) -> Graph {
    let p: f64 = rng.gen();
    let mut edges = Vec::new();
    for j in 1..n {
        for i in 0..j {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

fn canonical_forms() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(0xC0FFEE);
    for n in 3..=10 {
        for _ in 0..1000 {
            let g = random_graph(&mut rng, n);
            let mut images: Vec<usize> = (0..n).collect();
            images.shuffle(&mut rng);
            let h = g.permute(&VertexPermutation::new(images).unwrap());
            ensure!(Signature::of(&g) == Signature::of(&h), "n={n}: {} and {} differ", encode_graph6(&g), encode_graph6(&h));
        }
    }
    let mut total = 0;
    for n in 1..=7 {
        let sigs: Vec<Signature> = enumerate_all(n).unwrap().map(|g| Signature::of(&g)).collect();
        let distinct: HashSet<&Signature> = sigs.iter().collect();
        ensure!(distinct.len() == sigs.len(), "n={n}: repeated signature");
        total += sigs.len();
    }
    // spot-check that distinct signatures really are non-isomorphic at n = 5
    let five: Vec<Graph> = enumerate_all(5).unwrap().collect();
    for (i, a) in five.iter().enumerate() {
        for b in &five[i + 1..] {
            ensure!(!is_isomorphic(a, b), "isomorphic representatives {} {}", encode_graph6(a), encode_graph6(b));
        }
    }
    Ok(format!("8000 relabelled pairs, {total} distinct representatives"))
}

fn graph6_roundtrip() -> Outcome {
    let mut total = 0;
    for n in 1..=8 {
        for g in enumerate_all(n).unwrap() {
            let text = encode_graph6(&g);
            ensure!(decode_graph6(&text).ok().as_ref() == Some(&g), "round trip fails on {text}");
            total += 1;
        }
    }
    let mut rng = rand::rngs::StdRng::seed_from_u64(6);
    for _ in 0..100 {
        let n = rng.gen_range(1..=40);
        let g = random_graph(&mut rng, n);
        let text = encode_graph6(&g);
        let mut want: Vec<(usize, usize)> = g.edges().collect();
        want.sort_by_key(|&(a, b)| (b, a));
        ensure!(oracles::graph6_decode(&text) == (n, want), "reference decoder disagrees on {text}");
    }
    Ok(format!("{total} graphs round-trip, 100 random encodings match the reference decoder"))
}

fn invariant_oracles() -> Outcome {
    use phoeg_core::invariants;
    let mut checked = 0;
    for n in 1..=6 {
        for g in enumerate_class(n, GraphClass::Connected).unwrap() {
            let a = as_matrix(&g);
            let tag = encode_graph6(&g);
            ensure!(invariants::eci(&g).ok() == oracles::eci(&a), "eci on {tag}");
            ensure!(invariants::diameter(&g).ok() == oracles::diameter(&a), "diameter on {tag}");
            ensure!(invariants::clique_number(&g) == oracles::clique_number(&a), "clique_number on {tag}");
            ensure!(invariants::chromatic_number(&g) == oracles::chromatic_number(&a), "chromatic_number on {tag}");
            checked += 1;
        }
    }
    Ok(format!("{checked} connected graphs"))
}

fn read_csv(text: &str) -> Result<Vec<BTreeMap<String, String>>, String> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    rdr.records()
        .map(|r| {
            let r = r.map_err(|e| e.to_string())?;
            Ok(headers.iter().zip(r.iter()).map(|(h, v)| (h.to_owned(), v.to_owned())).collect())
        })
        .collect()
}

fn extremal_query(dir: &Path) -> Outcome {
    let store = dir.to_str().unwrap();
    phoeg(&["store", "build", "--n", "7", "--class", "connected", "--invariants", "num_vertices,num_edges,eci", "--store", store])?;
    let mut scanned: BTreeMap<(i64, i64), Vec<(i64, String)>> = BTreeMap::new();
    for n in 1..=7 {
        for g in enumerate_class(n, GraphClass::Connected).unwrap() {
            let a = as_matrix(&g);
            scanned.entry((n as i64, edge_count(&a))).or_default().push((oracles::eci(&a).unwrap(), Signature::of(&g).to_string()));
        }
    }
    let mut cells = 0;
    for dir in ["max", "min"] {
        let rows = read_csv(&phoeg(&["query", "extremal", "--invariant", "eci", "--dir", dir, "--n", "7", "--store", store])?)?;
        ensure!(rows.len() == scanned.len(), "{dir}: {} cells, scan has {}", rows.len(), scanned.len());
        for row in rows {
            let key: (i64, i64) = (row["n"].parse().unwrap(), row["m"].parse().unwrap());
            let entries = scanned.get(&key).ok_or(format!("unexpected cell {key:?}"))?;
            let best = if dir == "max" { entries.iter().map(|e| e.0).max() } else { entries.iter().map(|e| e.0).min() }.unwrap();
            let want: BTreeSet<&str> = entries.iter().filter(|e| e.0 == best).map(|e| e.1.as_str()).collect();
            let got: BTreeSet<&str> = row["witnesses"].split(' ').collect();
            ensure!(row["optimum"].parse::<i64>().unwrap() == best, "{dir} {key:?}: optimum {} vs {best}", row["optimum"]);
            ensure!(got == want, "{dir} {key:?}: witnesses differ");
            cells += 1;
        }
    }
    let rows = read_csv(&phoeg(&["query", "extremal", "--invariant", "eci", "--n", "4", "--store", store])?)?;
    let cell = rows.iter().find(|r| r["n"] == "4" && r["m"] == "3").ok_or("no (4, 3) cell")?;
    let p4 = Signature::of(&Graph::path(4).unwrap()).to_string();
    ensure!(cell["optimum"] == "14" && cell["witnesses"] == p4, "(4, 3): {} {}", cell["optimum"], cell["witnesses"]);
    Ok(format!("(4, 3) max eci 14 by P4 ({p4}); {cells} cells equal the scan"))
}

fn hull_sample_problem(dir: &Path) -> Outcome {
    let store = Store::open(dir);
    let report = order_report(&store, "eci", "num_edges", GraphClass::Connected, 7, 5).map_err(|e| e.to_string())?;
    let mut coords: BTreeMap<(i64, i64), BTreeSet<String>> = BTreeMap::new();
    for g in enumerate_class(7, GraphClass::Connected).unwrap() {
        let a = as_matrix(&g);
        coords.entry((oracles::eci(&a).unwrap(), edge_count(&a))).or_default().insert(Signature::of(&g).to_string());
    }
    let points: Vec<(i64, i64)> = coords.keys().copied().collect();
    ensure!(report.points == points.len(), "{} points, oracle {}", report.points, points.len());
    let hull: BTreeSet<(i64, i64)> = report.hull.iter().map(|v| (v.point.x, v.point.y)).collect();
    ensure!(hull == oracles::hull_vertices(&points), "hull differs from brute force");
    for f in &report.facets {
        let text = f.render("eci", "num_edges");
        for &(x, y) in &points {
            ensure!(f.holds(Point::new(x, y)), "({x}, {y}) violates {text}");
        }
        ensure!(f.tight.len() >= 2, "{text} has {} tight points", f.tight.len());
        for t in &f.tight {
            let at = &coords[&(t.point.x, t.point.y)];
            ensure!(!t.witnesses.is_empty(), "{text}: no witness at {:?}", t.point);
            ensure!(t.witnesses.iter().all(|w| at.contains(w.as_str())), "{text}: witness off its point");
            ensure!(f.is_tight(t.point), "{text}: listed point not tight");
        }
        let tight_count = points.iter().filter(|&&(x, y)| f.is_tight(Point::new(x, y))).count();
        ensure!(tight_count == f.tight.len(), "{text}: tight list incomplete");
    }
    let tikz = phoeg(&["hull", "--x", "eci", "--y", "num_edges", "--n", "7", "--format", "tikz", "--store", dir.to_str().unwrap()])?;
    ensure!(tikz.contains("\\begin{tikzpicture}") && tikz.contains("\\end{tikzpicture}"), "no tikz picture emitted");
    for &(x, y) in &points {
        ensure!(tikz.lines().any(|l| l.split_whitespace().take(2).eq([x.to_string(), y.to_string()])), "tikz lacks ({x}, {y})");
    }
    let bounds: Vec<String> = report.facets.iter().map(|f| f.render_solved("eci", "num_edges")).collect();
    Ok(format!("{} points, {} hull vertices, {} facets: {}", points.len(), hull.len(), report.facets.len(), bounds.join("; ")))
}

fn obstruction_sets() -> Outcome {
    let sig = |g: Graph| Signature::of(&g);
    let two_k2 = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
    let cases: [ObstructionCase; 3] = [
        ("cograph", 6, oracles::cograph, vec![sig(Graph::path(4).unwrap())]),
        ("chordal", 6, oracles::chordal, (4..=6).map(|k| sig(Graph::cycle(k).unwrap())).collect()),
        ("split", 5, oracles::split, vec![sig(two_k2), sig(Graph::cycle(4).unwrap()), sig(Graph::cycle(5).unwrap())]),
    ];
    let mut summary = Vec::new();
    for (name, max_n, oracle, want) in cases {
        let set = minimal_obstructions(lookup_class(name).unwrap(), Relation::Induced, max_n).map_err(|e| e.to_string())?;
        let got: BTreeSet<&Signature> = set.obstructions.iter().collect();
        ensure!(got == want.iter().collect(), "{name}: got {:?}", set.obstructions.iter().map(Signature::as_str).collect::<Vec<_>>());
        // every listed graph is a minimal non-member by the oracle
        for s in &set.obstructions {
            let a = as_matrix(&s.decode());
            ensure!(!oracle(&a), "{name}: {s} lies inside the class");
            ensure!((0..a.len()).all(|v| oracle(&oracles::delete_vertex(&a, v))), "{name}: {s} not minimal");
        }
        // and no other graph up to max_n is
        let mut minimal = 0;
        for n in 1..=max_n {
            for g in enumerate_all(n).unwrap() {
                let a = as_matrix(&g);
                if !oracle(&a) && (0..n).all(|v| oracle(&oracles::delete_vertex(&a, v))) {
                    minimal += 1;
                }
            }
        }
        ensure!(minimal == want.len(), "{name}: oracle finds {minimal} minimal non-members");
        summary.push(format!("{name}/{max_n}: {}", set.obstructions.iter().map(Signature::as_str).collect::<Vec<_>>().join(" ")));
    }
    Ok(summary.join("; "))
}

const REFERENCE_ARCS: [(usize, u64); 5] = [(2, 4), (3, 36), (4, 362), (5, 3188), (6, 34376)];

fn metagraph_calibration() -> Outcome {
    println!("    n  graphs      raw  raw-ns  triple  trip-ns    pair  pair-ns  ordered  ord-ns  reference  closest (deviation)");
    for (n, reference) in REFERENCE_ARCS {
        let mg = build_metagraph(n, GraphClass::All, &Transformation::ALL, &BuildOptions::default()).map_err(|e| e.to_string())?;
        mg.verify().map_err(|e| format!("n={n}: {e}"))?;
        let flip = |t| mg.pairs(t).into_iter().map(|(a, b)| (b, a)).collect::<BTreeSet<_>>();
        ensure!(flip(Transformation::RemoveEdge) == mg.pairs(Transformation::AddEdge), "n={n}: remove/add pairing");
        ensure!(flip(Transformation::Detour) == mg.pairs(Transformation::Shortcut), "n={n}: detour/shortcut pairing");
        ensure!(mg.pairs(Transformation::RemoveEdge).len() == mg.pairs(Transformation::AddEdge).len(), "n={n}: pairing sizes");
        let c = mg.calibration();
        let matches: Vec<&str> = c.conventions().iter().filter(|(_, v)| *v == reference).map(|(k, _)| *k).collect();
        let (closest, deviation) = c.closest(reference);
        let verdict = if matches.is_empty() { format!("{closest} ({deviation:+})") } else { format!("match: {}", matches.join(", ")) };
        println!(
            "    {n}  {:>6}  {:>7}  {:>6}  {:>6}  {:>7}  {:>6}  {:>7}  {:>7}  {:>6}  {reference:>9}  {verdict}",
            c.graphs, c.raw, c.raw_no_self, c.per_triple, c.per_triple_no_self, c.per_pair, c.per_pair_no_self, c.ordered, c.ordered_no_self
        );
    }
    Ok("every arc re-derives; remove/add and detour/shortcut pair exactly; table above".into())
}

fn transformation_invariants() -> Outcome {
    use Transformation::*;
    let deltas = [(RemoveEdge, -1), (AddEdge, 1), (Rotation, 0), (MoveEdge, 0), (Detour, 1), (Shortcut, -1), (TwoOpt, 0), (Slide, 0)];
    let mut applications = 0;
    for n in 1..=6 {
        for g in enumerate_all(n).unwrap() {
            let a = as_matrix(&g);
            let mut degrees: Vec<usize> = a.iter().map(|r| r.iter().filter(|&&x| x).count()).collect();
            degrees.sort();
            for (t, delta) in deltas {
                for (p, h) in enumerate_applications(&g, t) {
                    let b = as_matrix(&h);
                    let tag = format!("{t} {p} on {}", encode_graph6(&g));
                    ensure!(edge_count(&b) - edge_count(&a) == delta, "{tag}: size change");
                    if t == TwoOpt {
                        let mut after: Vec<usize> = b.iter().map(|r| r.iter().filter(|&&x| x).count()).collect();
                        after.sort();
                        ensure!(after == degrees, "{tag}: degrees changed");
                    }
                    if t == Slide && oracles::connected(&a) {
                        ensure!(oracles::connected(&b), "{tag}: disconnects");
                    }
                    applications += 1;
                }
            }
        }
    }
    Ok(format!("{applications} applications on all graphs of order <= 6"))
}

fn proof_reports() -> Outcome {
    let mut summary = Vec::new();
    for n in [5, 6] {
        let mg: Metagraph = build_metagraph(n, GraphClass::Connected, &Transformation::ALL, &BuildOptions::default()).map_err(|e| e.to_string())?;
        let mats: Vec<Matrix> = mg.signatures().iter().map(|s| as_matrix(&s.decode())).collect();
        let eci: Vec<Option<i64>> = mats.iter().map(oracles::eci).collect();
        let m: Vec<Option<i64>> = mats.iter().map(|a| Some(edge_count(a))).collect();
        let mut best: BTreeMap<i64, i64> = BTreeMap::new();
        for (v, e) in m.iter().zip(&eci) {
            let slot = best.entry(v.unwrap()).or_insert(i64::MIN);
            *slot = (*slot).max(e.unwrap());
        }
        let extremal: Vec<Signature> =
            (0..mats.len()).filter(|&i| eci[i] == Some(best[&m[i].unwrap()])).map(|i| mg.signatures()[i].clone()).collect();
        let view = filtered_metagraph(&mg, ("eci", &eci), Direction::Max, &[("num_edges", &m)]);
        let report = proof_report(&view, &extremal);
        let arcs: Vec<(u32, u32)> = view.arcs().iter().map(|a| (a.src, a.dst)).collect();
        ensure!(arcs.iter().all(|&(s, d)| m[s as usize] == m[d as usize] && eci[d as usize] > eci[s as usize]), "n={n}: arc breaks the filter");
        let acyclic = oracles::acyclic(mg.graph_count(), &arcs);
        ensure!(report.acyclic && acyclic, "n={n}: cycle {:?}", report.cycle);
        let sources: BTreeSet<u32> = arcs.iter().map(|a| a.0).collect();
        let sinks: BTreeSet<&Signature> = (0..mg.graph_count() as u32).filter(|v| !sources.contains(v)).map(|v| mg.signature(v)).collect();
        ensure!(report.sinks.iter().collect::<BTreeSet<_>>() == sinks, "n={n}: sink list differs from oracle");
        let outside: Vec<&str> = sinks.iter().filter(|s| !extremal.contains(s)).map(|s| s.as_str()).collect();
        ensure!(report.counterexamples.iter().map(Signature::as_str).collect::<Vec<_>>() == outside, "n={n}: sinks outside E differ");
        summary.push(format!(
            "n={n}: {} graphs, {} arcs, acyclic, |E|={}, sinks outside E: [{}]",
            mg.graph_count(),
            arcs.len(),
            extremal.len(),
            outside.join(" ")
        ));
    }
    Ok(summary.join("; "))
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temporary directory");
    let store_dir = dir.path().join("store");
    let criteria: Vec<Criterion> = vec![
        ("enumeration counts", Box::new(enumeration_counts)),
        ("canonical forms", Box::new(canonical_forms)),
        ("graph6 round trip", Box::new(graph6_roundtrip)),
        ("invariant oracles", Box::new(invariant_oracles)),
        ("extremal query", Box::new(|| extremal_query(&store_dir))),
        ("hull soundness and tightness", Box::new(|| hull_sample_problem(&store_dir))),
        ("obstruction sets", Box::new(obstruction_sets)),
        ("metagraph calibration", Box::new(metagraph_calibration)),
        ("transformation invariants", Box::new(transformation_invariants)),
        ("proof reports", Box::new(proof_reports)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {}. {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {}. {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    } else {
        println!("all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    }
}
