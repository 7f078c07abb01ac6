use fourcolor::corpus_io::{corpus_instance, Instance};
use fourcolor::kempe_vertex::{
    build_generator_graph, check_beta_triangulation, color_triangulated_ring,
    derive_twin_bad_examples, is_impasse, kempe_chain, kempe_four_color, kempe_switch,
    oracle_coloring, resolve_impasse, verify_two_path_decomposition, KempeError, KempeOutcome,
    MaximalPlanarGraph, TriangulatedRing, VColor, VertexColoring, RESOLVE_MOVES,
};
use fourcolor::triangulation::Triangulation;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus_graph(name: &str) -> (MaximalPlanarGraph, VertexColoring) {
    match corpus_instance(name).unwrap().instance().unwrap() {
        Instance::Graph { graph, coloring } => (graph, coloring.expect("coloured instance")),
        Instance::Map { .. } => panic!("{name} is a map"),
    }
}

fn k4() -> MaximalPlanarGraph {
    MaximalPlanarGraph::from_neighbor_rotations(&[
        vec![1, 2, 3],
        vec![0, 3, 2],
        vec![0, 1, 3],
        vec![0, 2, 1],
    ])
    .unwrap()
}

fn random_graph(n: usize, seed: u64) -> MaximalPlanarGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MaximalPlanarGraph::from_triangulation(&Triangulation::random(n, &mut rng))
}

/// Relabels vertices by `perm` (old id -> new id).
fn relabel(
    g: &MaximalPlanarGraph,
    c: &VertexColoring,
    perm: &[usize],
) -> (MaximalPlanarGraph, VertexColoring) {
    let mut rot = vec![Vec::new(); g.n()];
    let mut colors = vec![VColor::White; g.n()];
    for v in 0..g.n() {
        rot[perm[v]] = g.rotation(v).iter().map(|&w| perm[w]).collect();
        colors[perm[v]] = c.get(v);
    }
    (
        MaximalPlanarGraph::from_neighbor_rotations(&rot).unwrap(),
        VertexColoring::from_colors(colors),
    )
}

/// Cyclic sequence equality up to rotation and reflection.
fn same_cycle<T: PartialEq + Clone>(a: &[T], b: &[T]) -> bool {
    let n = a.len();
    if n != b.len() {
        return false;
    }
    let mut rev = b.to_vec();
    rev.reverse();
    (0..n)
        .any(|s| (0..n).all(|i| a[i] == b[(i + s) % n]) || (0..n).all(|i| a[i] == rev[(i + s) % n]))
}

#[test]
fn k4_is_coloured_with_four_distinct_colours() {
    let KempeOutcome::Colored(c) = kempe_four_color(&k4()) else {
        panic!("K4 reached an impasse");
    };
    assert!(c.is_proper(&k4()) && c.is_complete());
    let mut cs = c.colors().to_vec();
    cs.sort();
    cs.dedup();
    assert_eq!(cs.len(), 4);
}

#[test]
fn non_triangulations_are_rejected() {
    let square = MaximalPlanarGraph::from_neighbor_rotations(&[
        vec![1, 3],
        vec![2, 0],
        vec![3, 1],
        vec![0, 2],
    ]);
    assert!(matches!(square, Err(KempeError::NotMaximalPlanar(_))));
}

#[test]
fn chain_switch_round_trip_on_errera() {
    let (g, c) = corpus_graph("errera");
    let v = c.undecided.unwrap();
    let n0 = g.rotation(v)[0];
    let own = c.get(n0);
    let other = VColor::PALETTE.into_iter().find(|&x| x != own).unwrap();
    let chain = kempe_chain(&g, &c, n0, (own, other));
    assert!(chain.contains(n0));
    assert!(!chain.contains(v));
    let once = kempe_switch(&c, &chain);
    assert_eq!(once.get(n0), other);
    assert_eq!(kempe_switch(&once, &chain), c);
}

#[test]
fn generator_yellow_red_chain_from_v1() {
    let gen = build_generator_graph(6).unwrap();
    let chain = kempe_chain(
        &gen.graph,
        &gen.coloring,
        gen.vertex("v1"),
        (VColor::Yellow, VColor::Red),
    );
    for name in ["u2", "v7", "u6", "v5", "u7"] {
        assert!(chain.contains(gen.vertex(name)), "{name} missing");
    }
}

#[test]
fn generator_graphs_have_expected_sizes() {
    for (ring, n) in [(6, 16), (4, 12)] {
        let gen = build_generator_graph(ring).unwrap();
        assert_eq!(gen.graph.n(), n);
        assert!(gen.coloring.is_proper(&gen.graph) && gen.coloring.is_complete());
        let (g1, g2) = gen.decomposition();
        assert!(check_beta_triangulation(&gen.graph, &g1, &g2));
    }
    assert!(matches!(
        build_generator_graph(5),
        Err(KempeError::UnsupportedRingSize(5))
    ));
}

#[test]
fn standard_rings_colour_properly() {
    for k in [4, 6, 8] {
        let ring = TriangulatedRing::standard(k);
        let c = color_triangulated_ring(&ring).unwrap();
        assert!(c.colors().iter().all(|&x| x != VColor::White));
    }
}

#[test]
fn twin_g1_pentagon_reads_ygrbr() {
    let gen = build_generator_graph(6).unwrap();
    let (g1, g2) = derive_twin_bad_examples(&gen).unwrap();
    let read = |t: &fourcolor::kempe_vertex::TwinExample| -> Vec<VColor> {
        t.pentagon.iter().map(|&w| t.coloring.get(w)).collect()
    };
    use VColor::*;
    assert!(same_cycle(&read(&g1), &[Yellow, Green, Red, Blue, Red]));
    assert_eq!(g1.pentagon.len(), 5);
    assert_eq!(g2.pentagon.len(), 5);
    for t in [&g1, &g2] {
        assert_eq!(t.graph.degree(t.apex), 5);
        assert!(is_impasse(&t.graph, &t.coloring).unwrap().0);
    }
}

#[test]
fn ring_four_twins_are_impasses() {
    let gen = build_generator_graph(4).unwrap();
    let (g1, g2) = derive_twin_bad_examples(&gen).unwrap();
    for t in [&g1, &g2] {
        assert!(is_impasse(&t.graph, &t.coloring).unwrap().0);
    }
}

#[test]
fn three_neighbour_colours_is_not_an_impasse() {
    let (g, c) = corpus_graph("errera");
    let v = c.undecided.unwrap();
    let full = oracle_coloring(&g).unwrap();
    let mut partial = full.clone();
    partial.set(v, VColor::White);
    partial.undecided = Some(v);
    assert!(partial.neighbor_colors(&g, v).len() <= 3);
    let (impasse, ev) = is_impasse(&g, &partial).unwrap();
    assert!(!impasse);
    assert!(ev.attempts.is_empty());
}

#[test]
fn malformed_instances_are_rejected() {
    let (g, c) = corpus_graph("errera");
    let mut two_white = c.clone();
    let v = c.undecided.unwrap();
    two_white.set(g.rotation(v)[0], VColor::White);
    assert!(matches!(
        is_impasse(&g, &two_white),
        Err(KempeError::MalformedInstance(_))
    ));
}

#[test]
fn corpus_impasses_hold_and_resolve() {
    for name in [
        "fritsch", "soifer", "errera", "poussin", "kittell", "heawood",
    ] {
        let (g, c) = corpus_graph(name);
        let (impasse, ev) = is_impasse(&g, &c).unwrap();
        assert!(impasse, "{name}");
        assert!(ev.attempts.iter().all(|a| !a.freed), "{name}");
        let r = resolve_impasse(&g, &c, RESOLVE_MOVES).unwrap();
        assert!(
            r.coloring.is_complete() && r.coloring.is_proper(&g),
            "{name}"
        );
        assert!(!r.moves.is_empty(), "{name}");
    }
}

#[test]
fn errera_has_seventeen_vertices() {
    let (g, c) = corpus_graph("errera");
    assert_eq!(g.n(), 17);
    assert_eq!(g.degree(c.undecided.unwrap()), 5);
}

#[test]
fn twin_g1_resolves() {
    let gen = build_generator_graph(6).unwrap();
    let (g1, _) = derive_twin_bad_examples(&gen).unwrap();
    let r = resolve_impasse(&g1.graph, &g1.coloring, RESOLVE_MOVES).unwrap();
    assert!(r.coloring.is_complete() && r.coloring.is_proper(&g1.graph));
}

#[test]
fn complete_colouring_resolves_to_itself() {
    let (g, _) = corpus_graph("errera");
    let full = oracle_coloring(&g).unwrap();
    let r = resolve_impasse(&g, &full, RESOLVE_MOVES).unwrap();
    assert_eq!(r.coloring, full);
    assert!(r.moves.is_empty());
}

#[test]
fn k4_two_path_decomposition_is_two_edges() {
    let g = k4();
    let c = oracle_coloring(&g).unwrap();
    let d = verify_two_path_decomposition(&g, &c).unwrap();
    assert_eq!((d.p1_edges, d.p2_edges), (1, 1));
    assert_eq!(d.p1_vertices.len() + d.p2_vertices.len(), 4);
}

#[test]
fn errera_resolution_admits_two_path_decomposition() {
    let (g, c) = corpus_graph("errera");
    let r = resolve_impasse(&g, &c, RESOLVE_MOVES).unwrap();
    let d = verify_two_path_decomposition(&g, &r.coloring).unwrap();
    assert!(d.paths);
    assert_eq!((d.p1_vertices.len(), d.p2_vertices.len()), (9, 8));
    assert_eq!((d.p1_edges, d.p2_edges), (8, 7));
}

#[test]
fn impasse_verdict_ignores_vertex_labels() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for name in ["fritsch", "errera", "kittell"] {
        let (g, c) = corpus_graph(name);
        for _ in 0..10 {
            let mut perm: Vec<usize> = (0..g.n()).collect();
            perm.shuffle(&mut rng);
            let (h, d) = relabel(&g, &c, &perm);
            assert!(is_impasse(&h, &d).unwrap().0, "{name}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kempe_colouring_is_proper_or_traced(n in 4usize..40, seed in any::<u64>()) {
        let g = random_graph(n, seed);
        match kempe_four_color(&g) {
            KempeOutcome::Colored(c) => {
                prop_assert!(c.is_complete());
                prop_assert!(c.is_proper(&g));
            }
            KempeOutcome::Impasse(t) => {
                prop_assert_eq!(g.degree(t.vertex), 5);
                prop_assert!(t.attempts.iter().all(|a| !a.freed));
            }
        }
    }

    #[test]
    fn kempe_switch_is_an_involution(n in 4usize..30, seed in any::<u64>(), pick in any::<usize>()) {
        let g = random_graph(n, seed);
        let c = oracle_coloring(&g).unwrap();
        let v = pick % n;
        let other = VColor::PALETTE[(pick / n) % 4];
        prop_assume!(other != c.get(v));
        let chain = kempe_chain(&g, &c, v, (c.get(v), other));
        let once = kempe_switch(&c, &chain);
        prop_assert!(once.is_proper(&g));
        prop_assert_eq!(kempe_switch(&once, &chain), c);
    }

    #[test]
    fn colour_pair_classes_split_the_vertices(n in 4usize..30, seed in any::<u64>()) {
        let g = random_graph(n, seed);
        let c = oracle_coloring(&g).unwrap();
        if let Some(d) = verify_two_path_decomposition(&g, &c) {
            prop_assert_eq!(d.p1_vertices.len() + d.p2_vertices.len(), n);
            prop_assert!(d.p1_vertices.iter().all(|v| !d.p2_vertices.contains(v)));
        }
    }
}
