use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, Write};

use anyhow::{Context, Result};
use serde_json::json;

use phoeg_core::enumerate::enumerate_class;
use phoeg_core::hull::{conjecture_report, convex_hull, to_tikz, PointCloud};
use phoeg_core::invariants::{self, InvariantError, InvariantValue};
use phoeg_core::obstruction::{builtin_classes, lookup_class, minimal_obstructions, Relation};
use phoeg_core::store::{Direction, Store};
use phoeg_core::transproof::{
    apply, build_metagraph, enumerate_applications, filtered_metagraph, proof_report, ArcCountMode, BuildOptions,
    MetaDirection, Metagraph, Transformation,
};
use phoeg_core::{decode_graph6, encode_graph6, GraphClass, Signature};

use crate::args::*;
use crate::output::{csv_writer, json, sink, unsupported};

pub fn run(cli: &Cli) -> Result<()> {
    let out = || sink(cli.output.as_deref());
    match &cli.command {
        Command::Enumerate { n, class, format } => enumerate(out()?, *n as usize, (*class).into(), *format),
        Command::Invariant(args) => invariant(out()?, args),
        Command::Store(StoreCommand::Build { n, class, invariants, store }) => {
            let names: Vec<&str> = if invariants == "all" {
                invariants::REGISTRY.iter().map(|d| d.name).collect()
            } else {
                invariants.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
            };
            let paths = Store::open(&store.store).build(*n as usize, (*class).into(), &names)?;
            let mut w = out()?;
            for p in paths {
                writeln!(w, "{}", p.display())?;
            }
            w.flush()?;
            Ok(())
        }
        Command::Query(q) => query(out()?, q),
        Command::Hull(args) => hull(out()?, args),
        Command::Obstruct(args) => obstruct(out()?, args),
        Command::Meta(m) => meta(out, m),
        Command::Transform(t) => transform(out()?, t),
    }
}

fn enumerate(mut w: Box<dyn Write>, n: usize, class: GraphClass, format: Format) -> Result<()> {
    let graphs = enumerate_class(n, class)?;
    match format {
        Format::G6 => {
            for g in &graphs {
                writeln!(w, "{}", encode_graph6(g))?;
            }
        }
        Format::Json => {
            let sigs: Vec<String> = graphs.iter().map(encode_graph6).collect();
            json(&mut w, &sigs)?;
        }
        f => return Err(unsupported("enumerate", f, &["g6", "json"])),
    }
    w.flush()?;
    Ok(())
}

fn read_lines(source: &str) -> Result<Vec<String>> {
    let lines: Vec<String> = if source == "-" {
        io::stdin().lock().lines().collect::<io::Result<_>>()?
    } else {
        fs::read_to_string(source).with_context(|| format!("cannot read {source}"))?.lines().map(str::to_owned).collect()
    };
    Ok(lines.into_iter().map(|l| l.trim().to_owned()).filter(|l| !l.is_empty()).collect())
}

fn invariant(mut w: Box<dyn Write>, args: &InvariantArgs) -> Result<()> {
    if args.list {
        for d in invariants::REGISTRY {
            let note = if d.requires_connected { " (connected graphs only)" } else { "" };
            writeln!(w, "{}\t{}{note}", d.name, d.description)?;
        }
        w.flush()?;
        return Ok(());
    }
    let name = args.name.as_deref().expect("clap requires a name without --list");
    let def = invariants::lookup(name)?;
    let source = args.g6.as_deref().expect("clap requires --g6 without --list");
    let mut rows: Vec<(String, InvariantValue)> = Vec::new();
    for (i, line) in read_lines(source)?.into_iter().enumerate() {
        let g = decode_graph6(&line).with_context(|| format!("input line {}: bad graph6 {line:?}", i + 1))?;
        let v = (def.compute)(&g).map_err(|e| match e {
            InvariantError::Disconnected { .. } => anyhow::anyhow!("input line {}: {e} ({line})", i + 1),
            other => other.into(),
        })?;
        rows.push((line, v));
    }
    match args.format {
        Format::Text => {
            for (_, v) in &rows {
                writeln!(w, "{v}")?;
            }
        }
        Format::Csv => {
            let mut c = csv_writer(&mut w);
            c.write_record(["g6", name])?;
            for (g, v) in &rows {
                c.write_record([g.as_str(), &v.to_string()])?;
            }
            c.flush()?;
        }
        Format::Json => {
            let items: Vec<_> = rows.iter().map(|(g, v)| json!({"g6": g, name: v})).collect();
            json(&mut w, &items)?;
        }
        f => return Err(unsupported("invariant", f, &["text", "csv", "json"])),
    }
    w.flush()?;
    Ok(())
}

fn join_sigs(sigs: &[Signature]) -> String {
    sigs.iter().map(Signature::as_str).collect::<Vec<_>>().join(" ")
}

fn query(mut w: Box<dyn Write>, q: &QueryCommand) -> Result<()> {
    match q {
        QueryCommand::Extremal { invariant, dir, n, class, format, store } => {
            let cells = Store::open(&store.store).query_extremal(invariant, (*dir).into(), *n as usize, (*class).into())?;
            match format {
                Format::Csv => {
                    let mut c = csv_writer(&mut w);
                    c.write_record(["n", "m", "direction", "optimum", "witnesses"])?;
                    for cell in &cells {
                        c.write_record([
                            cell.n.to_string(),
                            cell.m.to_string(),
                            cell.direction.to_string(),
                            cell.optimum.to_string(),
                            join_sigs(&cell.witnesses),
                        ])?;
                    }
                    c.flush()?;
                }
                Format::Json => json(&mut w, &cells)?,
                f => return Err(unsupported("query extremal", *f, &["csv", "json"])),
            }
        }
        QueryCommand::Points { plane, format } => {
            let ps = Store::open(&plane.store.store).query_points(
                &plane.x,
                &plane.y,
                plane.class.into(),
                plane.n as usize,
                plane.samples,
            )?;
            match format {
                Format::Csv => {
                    let mut c = csv_writer(&mut w);
                    c.write_record([ps.x.as_str(), ps.y.as_str(), "multiplicity", "samples"])?;
                    for p in &ps.points {
                        c.write_record([p.x.to_string(), p.y.to_string(), p.multiplicity.to_string(), join_sigs(&p.samples)])?;
                    }
                    c.flush()?;
                }
                Format::Json => json(&mut w, &ps)?,
                f => return Err(unsupported("query points", *f, &["csv", "json"])),
            }
        }
        QueryCommand::Annotate { plane, annotation, agg, format } => {
            let store = Store::open(&plane.store.store);
            let ps = store.query_points(&plane.x, &plane.y, plane.class.into(), plane.n as usize, plane.samples)?;
            let rows = store.annotate_points(&ps, annotation, (*agg).into())?;
            match format {
                Format::Csv => {
                    let mut c = csv_writer(&mut w);
                    let head = format!("{}_{}", Direction::from(*agg), annotation);
                    c.write_record([ps.x.as_str(), ps.y.as_str(), "multiplicity", head.as_str()])?;
                    for r in &rows {
                        c.write_record([
                            r.point.x.to_string(),
                            r.point.y.to_string(),
                            r.point.multiplicity.to_string(),
                            r.value.to_string(),
                        ])?;
                    }
                    c.flush()?;
                }
                Format::Json => json(&mut w, &rows)?,
                f => return Err(unsupported("query annotate", *f, &["csv", "json"])),
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn hull(mut w: Box<dyn Write>, args: &HullArgs) -> Result<()> {
    let store = Store::open(&args.store.store);
    let class: GraphClass = args.class.into();
    let (lo, hi) = (args.n as usize, args.n_max.map_or(args.n as usize, usize::from));
    if hi < lo {
        return Err(crate::output::UsageError(format!("--n-max {hi} is below --n {lo}")).into());
    }
    match args.format {
        Format::Tikz => {
            for n in lo..=hi {
                let cloud = PointCloud::from(store.query_points(&args.x, &args.y, class, n, args.samples)?);
                let h = convex_hull(&cloud)?;
                write!(w, "{}", to_tikz(&cloud, &h))?;
            }
        }
        Format::Text | Format::Json | Format::Csv => {
            let report = conjecture_report(&store, &args.x, &args.y, class, lo..=hi, args.samples)?;
            match args.format {
                Format::Text => write!(w, "{report}")?,
                Format::Json => json(&mut w, &report)?,
                _ => {
                    let mut c = csv_writer(&mut w);
                    c.write_record(["n", "a", "b", "c", "sense", "bound", "tight_points", "witnesses"])?;
                    for r in &report.orders {
                        for (f, bound) in r.facets.iter().zip(&r.bounds) {
                            let tight: Vec<String> = f.tight.iter().map(|t| format!("{}:{}", t.point.x, t.point.y)).collect();
                            let wit: Vec<&str> =
                                f.tight.iter().flat_map(|t| t.witnesses.iter().map(Signature::as_str)).collect();
                            c.write_record([
                                r.n.to_string(),
                                f.a.to_string(),
                                f.b.to_string(),
                                f.c.to_string(),
                                f.sense.symbol().to_owned(),
                                bound.clone(),
                                tight.join(" "),
                                wit.join(" "),
                            ])?;
                        }
                    }
                    c.flush()?;
                }
            }
        }
        f => return Err(unsupported("hull", f, &["text", "csv", "json", "tikz"])),
    }
    w.flush()?;
    Ok(())
}

fn obstruct(mut w: Box<dyn Write>, args: &ObstructArgs) -> Result<()> {
    if args.list {
        for c in builtin_classes() {
            writeln!(w, "{}\t{}", c.name, c.description)?;
        }
        w.flush()?;
        return Ok(());
    }
    let class = lookup_class(args.class.as_deref().expect("clap requires --class without --list"))?;
    let relation = match args.relation {
        RelationArg::Subgraph => Relation::Subgraph,
        RelationArg::Induced => Relation::Induced,
    };
    let set = minimal_obstructions(class, relation, args.max_n as usize)?;
    match args.format {
        Format::G6 => {
            for s in &set.obstructions {
                writeln!(w, "{s}")?;
            }
        }
        Format::Csv => {
            let mut c = csv_writer(&mut w);
            c.write_record(["order", "size", "g6"])?;
            for s in &set.obstructions {
                c.write_record([s.order().to_string(), s.decode().size().to_string(), s.to_string()])?;
            }
            c.flush()?;
        }
        Format::Json => json(&mut w, &set)?,
        f => return Err(unsupported("obstruct", f, &["g6", "csv", "json"])),
    }
    w.flush()?;
    Ok(())
}

/// Reference arc counts for the full eight-transformation metagraph over
/// all graphs, by order.
const REFERENCE_ARCS: [(usize, u64); 8] = [
    (2, 4),
    (3, 36),
    (4, 362),
    (5, 3_188),
    (6, 34_376),
    (7, 468_936),
    (8, 10_143_824),
    (9, 380_814_904),
];

pub fn reference_arcs(n: usize) -> Option<u64> {
    REFERENCE_ARCS.iter().find(|(k, _)| *k == n).map(|&(_, v)| v)
}

fn meta(out: impl Fn() -> Result<Box<dyn Write>>, m: &MetaCommand) -> Result<()> {
    match m {
        MetaCommand::Build { n, class, transformations, out: dir, max_bytes } => {
            let tids = Transformation::parse_list(transformations)?;
            let mg = build_metagraph(*n as usize, (*class).into(), &tids, &BuildOptions { max_bytes: *max_bytes })?;
            mg.save(dir)?;
            let mut w = out()?;
            writeln!(w, "{}\t{} graphs\t{} arcs", dir.display(), mg.graph_count(), mg.arcs().len())?;
            w.flush()?;
        }
        MetaCommand::Count { meta, mode, no_self } => {
            let mg = Metagraph::load(&meta.meta)?;
            let include = !no_self;
            let count = match mode {
                CountMode::Raw => mg.arc_count(ArcCountMode::Raw, include),
                CountMode::PerTriple => mg.arc_count(ArcCountMode::PerTriple, include),
                CountMode::PerPair => mg.arc_count(ArcCountMode::PerPair, include),
                CountMode::Ordered => mg.ordered_count(include),
            };
            let mut w = out()?;
            writeln!(w, "{count}")?;
            w.flush()?;
        }
        MetaCommand::Calibrate { n_min, n_max, format } => {
            if n_max < n_min {
                return Err(crate::output::UsageError(format!("--n-max {n_max} is below --n-min {n_min}")).into());
            }
            let mut rows = Vec::new();
            for n in *n_min..=*n_max {
                let mg = build_metagraph(n as usize, GraphClass::All, &Transformation::ALL, &BuildOptions::default())?;
                mg.verify()?;
                rows.push(mg.calibration());
            }
            let mut w = out()?;
            match format {
                Format::Text | Format::Csv => {
                    let mut c = csv_writer(&mut w);
                    let mut head = vec!["n", "graphs"];
                    head.extend(rows[0].conventions().iter().map(|(k, _)| *k));
                    head.extend(["reference", "match", "closest", "deviation"]);
                    c.write_record(&head)?;
                    for r in &rows {
                        let mut rec = vec![r.n.to_string(), r.graphs.to_string()];
                        rec.extend(r.conventions().iter().map(|(_, v)| v.to_string()));
                        match reference_arcs(r.n) {
                            Some(refv) => {
                                let matches: Vec<&str> =
                                    r.conventions().iter().filter(|(_, v)| *v == refv).map(|(k, _)| *k).collect();
                                let (closest, dev) = r.closest(refv);
                                rec.extend([
                                    refv.to_string(),
                                    if matches.is_empty() { "none".into() } else { matches.join(" ") },
                                    closest.to_owned(),
                                    dev.to_string(),
                                ]);
                            }
                            None => rec.extend(["".into(), "".into(), "".into(), "".into()]),
                        }
                        c.write_record(&rec)?;
                    }
                    c.flush()?;
                }
                Format::Json => {
                    let items: Vec<_> = rows
                        .iter()
                        .map(|r| {
                            let refv = reference_arcs(r.n);
                            json!({
                                "counts": r,
                                "reference": refv,
                                "closest": refv.map(|v| r.closest(v)),
                            })
                        })
                        .collect();
                    json(&mut w, &items)?;
                }
                f => return Err(unsupported("meta calibrate", *f, &["text", "csv", "json"])),
            }
            w.flush()?;
        }
        MetaCommand::Neighbors { meta, g6, direction, transformation, format } => {
            let mg = Metagraph::load(&meta.meta)?;
            let sig = Signature::parse(g6).with_context(|| format!("bad graph6 {g6:?}"))?;
            let tid = transformation.as_deref().map(str::parse::<Transformation>).transpose()?;
            let dir = match direction {
                ArcDirection::Out => MetaDirection::Out,
                ArcDirection::In => MetaDirection::In,
            };
            let arcs = mg.neighbors(&sig, dir, tid)?;
            let mut w = out()?;
            write_arcs(&mut w, &mg, &arcs, *format, "meta neighbors")?;
            w.flush()?;
        }
        MetaCommand::Export { meta, format } => {
            let mg = Metagraph::load(&meta.meta)?;
            let mut w = out()?;
            match format {
                Format::Dot => mg.write_dot(&mut w)?,
                f => write_arcs(&mut w, &mg, mg.arcs(), *f, "meta export")?,
            }
            w.flush()?;
        }
        MetaCommand::Proof { meta, invariant, dir, preserve, extremal_from, values_from, store, format } => {
            let mg = Metagraph::load(&meta.meta)?;
            let store = Store::open(store);
            let values = |name: &str| -> Result<Vec<Option<InvariantValue>>> {
                Ok(match values_from {
                    ValueSource::Computed => mg.invariant_values(name)?,
                    ValueSource::Store => mg.store_values(&store, name)?,
                })
            };
            let target = values(invariant)?;
            let preserve_names: Vec<&str> = preserve.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            let kept: Vec<Vec<Option<InvariantValue>>> =
                preserve_names.iter().map(|p| values(p)).collect::<Result<_>>()?;
            let tables: Vec<(&str, &[Option<InvariantValue>])> =
                preserve_names.iter().copied().zip(kept.iter().map(Vec::as_slice)).collect();
            let direction: Direction = (*dir).into();
            let view = filtered_metagraph(&mg, (invariant, &target), direction, &tables);
            let extremal = match extremal_from {
                ValueSource::Store => store
                    .query_extremal(invariant, direction, mg.order(), mg.class())?
                    .into_iter()
                    .filter(|c| c.n == mg.order() as InvariantValue)
                    .flat_map(|c| c.witnesses)
                    .collect(),
                ValueSource::Computed => extremal_by_cell(&mg, &target, &kept, direction),
            };
            let report = proof_report(&view, &extremal);
            let mut w = out()?;
            match format {
                Format::Json => json(&mut w, &report)?,
                Format::Text => {
                    writeln!(
                        w,
                        "n = {}, {} graphs: {} {} along arcs{}",
                        report.n,
                        report.class,
                        report.direction,
                        report.invariant,
                        if report.preserve.is_empty() {
                            String::new()
                        } else {
                            format!(" preserving {}", report.preserve.join(", "))
                        }
                    )?;
                    writeln!(w, "vertices {}  arcs {}  extremal {}", report.vertices, report.arcs, report.extremal)?;
                    writeln!(w, "acyclic: {}", report.acyclic)?;
                    if !report.cycle.is_empty() {
                        writeln!(w, "cycle: {}", join_sigs(&report.cycle))?;
                    }
                    writeln!(w, "sinks: {}", report.sinks.len())?;
                    writeln!(w, "counterexamples ({}): {}", report.counterexamples.len(), join_sigs(&report.counterexamples))?;
                    writeln!(w, "unreachable: {}", report.unreachable.len())?;
                    if let Some(d) = report.max_distance {
                        writeln!(w, "longest shortest path to extremal: {d}")?;
                    }
                    for u in &report.usage {
                        writeln!(w, "{:<12} arcs {:>8}  on shortest paths {:>6}", u.transformation.name(), u.arcs, u.on_shortest_paths)?;
                    }
                }
                f => return Err(unsupported("meta proof", *f, &["text", "json"])),
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Best vertices of each class of equal preserved values.
fn extremal_by_cell(
    mg: &Metagraph,
    target: &[Option<InvariantValue>],
    kept: &[Vec<Option<InvariantValue>>],
    direction: Direction,
) -> Vec<Signature> {
    let mut best: BTreeMap<Vec<InvariantValue>, (InvariantValue, Vec<usize>)> = BTreeMap::new();
    for (v, t) in target.iter().enumerate() {
        let Some(t) = *t else { continue };
        let Some(key) = kept.iter().map(|k| k[v]).collect::<Option<Vec<_>>>() else { continue };
        let entry = best.entry(key).or_insert((t, Vec::new()));
        if direction.better(t, entry.0) {
            *entry = (t, Vec::new());
        }
        if t == entry.0 {
            entry.1.push(v);
        }
    }
    let mut out: Vec<Signature> = best.into_values().flat_map(|(_, vs)| vs).map(|v| mg.signatures()[v].clone()).collect();
    out.sort();
    out
}

fn write_arcs(
    w: &mut dyn Write,
    mg: &Metagraph,
    arcs: &[phoeg_core::transproof::Arc],
    format: Format,
    command: &str,
) -> Result<()> {
    match format {
        Format::Csv => {
            let mut c = csv_writer(w);
            c.write_record(["src", "transformation", "params", "dst"])?;
            for a in arcs {
                c.write_record([
                    mg.signature(a.src).as_str(),
                    a.tid.name(),
                    &a.params.to_string(),
                    mg.signature(a.dst).as_str(),
                ])?;
            }
            c.flush()?;
        }
        Format::Json => {
            let items: Vec<_> = arcs
                .iter()
                .map(|a| {
                    json!({
                        "src": mg.signature(a.src),
                        "transformation": a.tid,
                        "params": a.params.vertices(),
                        "dst": mg.signature(a.dst),
                    })
                })
                .collect();
            json(w, &items)?;
        }
        f => return Err(unsupported(command, f, &["csv", "json", "dot"])),
    }
    Ok(())
}

fn transform(mut w: Box<dyn Write>, t: &TransformCommand) -> Result<()> {
    match t {
        TransformCommand::Apply { g6, transformation, params, canonical } => {
            let g = decode_graph6(g6).with_context(|| format!("bad graph6 {g6:?}"))?;
            let tid: Transformation = transformation.parse()?;
            let h = apply(&g, tid, params)?;
            if *canonical {
                writeln!(w, "{}", Signature::of(&h))?;
            } else {
                writeln!(w, "{}", encode_graph6(&h))?;
            }
        }
        TransformCommand::List { g6, transformation, format } => {
            let g = decode_graph6(g6).with_context(|| format!("bad graph6 {g6:?}"))?;
            let tids = Transformation::parse_list(transformation)?;
            let rows: Vec<(Transformation, String, Signature)> = tids
                .iter()
                .flat_map(|&tid| {
                    enumerate_applications(&g, tid).into_iter().map(move |(p, h)| (tid, p.to_string(), Signature::of(&h)))
                })
                .collect();
            match format {
                Format::Csv => {
                    let mut c = csv_writer(&mut w);
                    c.write_record(["transformation", "params", "result"])?;
                    for (tid, p, s) in &rows {
                        c.write_record([tid.name(), p.as_str(), s.as_str()])?;
                    }
                    c.flush()?;
                }
                Format::Json => {
                    let items: Vec<_> =
                        rows.iter().map(|(tid, p, s)| json!({"transformation": tid, "params": p, "result": s})).collect();
                    json(&mut w, &items)?;
                }
                f => return Err(unsupported("transform list", *f, &["csv", "json"])),
            }
        }
    }
    w.flush()?;
    Ok(())
}
