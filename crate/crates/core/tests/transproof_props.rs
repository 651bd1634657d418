use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};

use phoeg_core::canon::is_isomorphic;
use phoeg_core::invariants::{degree_sequence, is_connected};
use phoeg_core::transproof::{apply, build_metagraph, enumerate_applications, BuildOptions, Metagraph, Transformation};
use phoeg_core::{enumerate_all, encode_graph6, GraphClass, Graph, Signature};

fn full(n: usize) -> Metagraph {
    build_metagraph(n, GraphClass::All, &Transformation::ALL, &BuildOptions::default()).unwrap()
}

fn reversed(pairs: &BTreeSet<(u32, u32)>) -> BTreeSet<(u32, u32)> {
    pairs.iter().map(|&(a, b)| (b, a)).collect()
}

#[test]
fn inverse_pairings() {
    for n in 2..=6 {
        let mg = full(n);
        mg.verify().unwrap();
        use Transformation::*;
        assert_eq!(reversed(&mg.pairs(RemoveEdge)), mg.pairs(AddEdge), "n={n}");
        assert_eq!(reversed(&mg.pairs(Detour)), mg.pairs(Shortcut), "n={n}");
        for t in [Rotation, MoveEdge, TwoOpt, Slide] {
            assert_eq!(reversed(&mg.pairs(t)), mg.pairs(t), "{t} n={n}");
        }
    }
}

#[test]
fn in_arcs_mirror_out_arcs() {
    for n in 2..=5 {
        let mg = full(n);
        for v in 0..mg.graph_count() as u32 {
            let mut want: Vec<_> = mg.arcs().iter().filter(|a| a.dst == v).copied().collect();
            let mut got = mg.in_arcs(v);
            want.sort_by_key(|a| (a.src, a.tid, a.params.bytes()));
            got.sort_by_key(|a| (a.src, a.tid, a.params.bytes()));
            assert_eq!(got, want);
            assert!(mg.out_arcs(v).iter().all(|a| a.src == v));
        }
    }
}

#[test]
fn size_changes_and_local_invariants() {
    for n in 1..=6 {
        for g in enumerate_all(n).unwrap() {
            for t in Transformation::ALL {
                for (p, h) in enumerate_applications(&g, t) {
                    let tag = format!("{t} {p} on {}", encode_graph6(&g));
                    assert_eq!(h.size() as i64 - g.size() as i64, t.size_delta(), "{tag}");
                    if t == Transformation::TwoOpt {
                        assert_eq!((0..n).map(|v| g.degree(v)).collect::<Vec<_>>(), (0..n).map(|v| h.degree(v)).collect::<Vec<_>>(), "{tag}");
                    }
                    if matches!(t, Transformation::Rotation | Transformation::Slide) {
                        let a = p.vertices()[0];
                        assert_eq!(g.degree(a), h.degree(a), "{tag}");
                    }
                }
            }
        }
    }
}

#[test]
fn slide_keeps_graphs_connected() {
    for n in 3..=7 {
        for g in enumerate_all(n).unwrap().filter(is_connected) {
            for (p, h) in enumerate_applications(&g, Transformation::Slide) {
                assert!(is_connected(&h), "slide {p} on {}", encode_graph6(&g));
            }
        }
    }
}

/// Covering pairs of the edge-deletion order, found by trying every edge and
/// matching against the representatives with a plain isomorphism test.
#[test]
fn remove_edge_pairs_match_naive_cover_relation() {
    let n = 4;
    let mg = full(n);
    let reps: Vec<Graph> = mg.signatures().iter().map(Signature::decode).collect();
    let mut naive = BTreeSet::new();
    for (i, g) in reps.iter().enumerate() {
        for (a, b) in g.edges().collect::<Vec<_>>() {
            let mut h = g.clone();
            h.remove_edge(a, b);
            let j = reps.iter().position(|r| is_isomorphic(r, &h)).unwrap();
            naive.insert((i as u32, j as u32));
        }
    }
    assert_eq!(mg.pairs(Transformation::RemoveEdge), naive);
}

#[test]
fn random_two_opt_instances() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(20);
    let mut applied = 0;
    while applied < 100 {
        let n = rng.gen_range(4..=14);
        let mut g = Graph::empty(n).unwrap();
        for j in 1..n {
            for i in 0..j {
                if rng.gen_bool(0.4) {
                    g.add_edge(i, j);
                }
            }
        }
        let p: Vec<usize> = (0..4).map(|_| rng.gen_range(0..n)).collect();
        let distinct = p.iter().collect::<BTreeSet<_>>().len() == 4;
        let valid = distinct && g.has_edge(p[0], p[1]) && g.has_edge(p[2], p[3]) && !g.has_edge(p[0], p[2]) && !g.has_edge(p[1], p[3]);
        match apply(&g, Transformation::TwoOpt, &p) {
            Ok(h) => {
                assert!(valid);
                assert_eq!(degree_sequence(&g), degree_sequence(&h));
                assert!(h.has_edge(p[0], p[2]) && h.has_edge(p[1], p[3]));
                assert!(!h.has_edge(p[0], p[1]) && !h.has_edge(p[2], p[3]));
                applied += 1;
            }
            Err(_) => assert!(!valid),
        }
    }
}

#[test]
fn connected_metagraph_stays_inside_the_class() {
    let mg = build_metagraph(5, GraphClass::Connected, &Transformation::ALL, &BuildOptions::default()).unwrap();
    assert_eq!(mg.graph_count(), 21);
    mg.verify().unwrap();
    let graphs: Vec<Graph> = mg.signatures().iter().map(Signature::decode).collect();
    assert!(graphs.iter().all(is_connected));
    // slide never leaves the class, so its arcs match the unrestricted build
    let all = full(5);
    let slide_all: usize = all
        .arcs()
        .iter()
        .filter(|a| a.tid == Transformation::Slide && is_connected(&all.signature(a.src).decode()))
        .count();
    assert_eq!(mg.arcs().iter().filter(|a| a.tid == Transformation::Slide).count(), slide_all);
}

#[test]
fn save_and_load_roundtrip() {
    let mg = full(5);
    let dir = tempfile::tempdir().unwrap();
    mg.save(dir.path()).unwrap();
    let back = Metagraph::load(dir.path()).unwrap();
    assert_eq!(back.signatures(), mg.signatures());
    assert_eq!(back.arcs(), mg.arcs());
    assert_eq!(back.calibration().to_string(), mg.calibration().to_string());
    std::fs::write(dir.path().join("arcs.bin"), [0u8; 7]).unwrap();
    assert!(Metagraph::load(dir.path()).is_err());
}
