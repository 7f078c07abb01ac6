//! Rebuilds the searched corpus files in `corpus/`. Every result is
//! deterministic; the corpus checks re-validate them on load.

use std::collections::BTreeSet;
use std::fs;

use fourcolor::corpus_io::MapFile;
use fourcolor::kempe_vertex::*;
use fourcolor::planar_map::validate_normal_map;
use fourcolor::triangulation::Triangulation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus");
const PREFER: [VColor; 5] = [
    VColor::Blue,
    VColor::Green,
    VColor::Red,
    VColor::Green,
    VColor::Yellow,
];

fn write(name: &str, file: &MapFile) {
    fs::write(format!("{DIR}/{name}"), file.serialize()).unwrap();
    println!("wrote {name}");
}

fn graph_of(file: &MapFile) -> MaximalPlanarGraph {
    MaximalPlanarGraph::from_neighbor_rotations(&file.rotation).unwrap()
}

/// First degree-5 vertex with an impasse colouring, preferring the
/// B,G,R,G,Y neighbourhood.
fn impasse(g: &MaximalPlanarGraph) -> VertexColoring {
    let mut fallback = None;
    for v in 0..g.n() {
        if g.degree(v) != 5 {
            continue;
        }
        if let Some(c) = find_impasse(g, v, Some(&PREFER), 50_000_000) {
            let cols: Vec<VColor> = g.rotation(v).iter().map(|&w| c.get(w)).collect();
            let mut rotations: Vec<Vec<VColor>> = Vec::new();
            for s in 0..5 {
                rotations.push((0..5).map(|i| cols[(s + i) % 5]).collect());
                rotations.push((0..5).map(|i| cols[(s + 5 - i) % 5]).collect());
            }
            if rotations.iter().any(|r| r[..] == PREFER[..]) {
                return c;
            }
            fallback.get_or_insert(c);
        }
    }
    fallback.expect("graph has an impasse")
}

fn annotate(name: &str) {
    let path = format!("{DIR}/{name}.graph");
    let mut file = MapFile::parse(&fs::read_to_string(&path).unwrap()).unwrap();
    let g = graph_of(&file);
    let c = impasse(&g);
    file.coloring = c
        .colors()
        .iter()
        .enumerate()
        .map(|(v, c)| (v, c.name().into()))
        .collect();
    write(&format!("{name}.graph"), &file);
}

fn nine_vertex() {
    let mut found = Vec::new();
    for t in Triangulation::enumerate(9) {
        let g = MaximalPlanarGraph::from_triangulation(&t);
        if (0..9).any(|v| g.degree(v) == 5 && find_impasse(&g, v, None, 10_000_000).is_some()) {
            found.push(g);
        }
    }
    assert_eq!(
        found.len(),
        2,
        "expected exactly two 9-vertex impasse graphs"
    );
    for (name, g) in ["fritsch", "soifer"].iter().zip(&found) {
        let c = impasse(g);
        let note =
            "nine-vertex triangulation with a Kempe impasse, found by exhaustive enumeration";
        write(
            &format!("{name}.graph"),
            &MapFile::from_graph(g, Some(&c), &[note]),
        );
    }
}

/// Grows the hex twin G1 by face insertions that keep the impasse and keep
/// an equitable 4-colouring available.
fn heawood() {
    let gen = build_generator_graph(6).unwrap();
    let (t, _) = derive_twin_bad_examples(&gen).unwrap();
    let mut tri =
        Triangulation::from_rotations((0..t.graph.n()).map(|v| t.graph.rotation(v)).collect());
    let mut colors: Vec<VColor> = t.coloring.colors().to_vec();
    let apex = t.apex;
    while tri.vertex_count() < 25 {
        let g = MaximalPlanarGraph::from_triangulation(&tri);
        let dist = distances(&g, apex);
        let mut faces = tri.faces();
        faces.sort_by_key(|f| {
            (
                std::cmp::Reverse(f.iter().map(|&v| dist[v]).min().unwrap()),
                *f,
            )
        });
        let mut grown = false;
        for f in faces {
            if f.contains(&apex) {
                continue;
            }
            let used: BTreeSet<VColor> = f.iter().map(|&v| colors[v]).collect();
            let missing = VColor::PALETTE
                .into_iter()
                .find(|c| !used.contains(c))
                .unwrap();
            let mut next = tri.clone();
            next.insert_vertex(f);
            let mut cols = colors.clone();
            cols.push(missing);
            let g = MaximalPlanarGraph::from_triangulation(&next);
            let mut c = VertexColoring::from_colors(cols.clone());
            c.undecided = Some(apex);
            let equitable = matches!(
                fourcolor::oracle::equitable_claim_search(g.adjacency(), 10_000_000),
                fourcolor::oracle::EquitableVerdict::Witness(_)
            );
            if equitable && matches!(is_impasse(&g, &c), Ok((true, _))) {
                tri = next;
                colors = cols;
                grown = true;
                break;
            }
        }
        assert!(grown, "no insertion keeps the impasse");
    }
    let g = MaximalPlanarGraph::from_triangulation(&tri);
    let mut c = VertexColoring::from_colors(colors);
    c.undecided = Some(apex);
    let note = "25-vertex bad example: hex twin G1 grown by face insertions keeping the impasse";
    write("heawood.graph", &MapFile::from_graph(&g, Some(&c), &[note]));
}

/// Flip search for an Eulerian triangulation on 17 vertices; its dual has
/// only even regions.
fn heawood_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut tri = Triangulation::random(17, &mut rng);
    let odd = |t: &Triangulation| {
        (0..t.vertex_count())
            .filter(|&v| t.degree(v) % 2 == 1)
            .count()
    };
    let mut steps = 0;
    while odd(&tri) > 0 {
        steps += 1;
        assert!(steps < 2_000_000, "flip search did not converge");
        let a = rng.gen_range(0..tri.vertex_count());
        let nb = tri.neighbors(a).to_vec();
        let b = nb[rng.gen_range(0..nb.len())];
        if !tri.can_flip(a, b) {
            continue;
        }
        let mut next = tri.clone();
        next.flip(a, b);
        let (before, after) = (odd(&tri), odd(&next));
        if after <= before || rng.gen_bool(0.1) {
            tri = next;
        }
    }
    let map = validate_normal_map(tri.to_rotation_system().dual(), None).unwrap();
    let note = "17-region map with only even regions (dual of an Eulerian triangulation)";
    write("heawood-map.map", &MapFile::from_map(&map, None, &[note]));
}

/// Map without triangles where x, a, b, c are pairwise adjacent and the
/// outer region y touches a, b, c but not x.
fn referee() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..1_000_000 {
        let n = rng.gen_range(10..=14);
        let mut tri = Triangulation::random(n, &mut rng);
        for _ in 0..3 * n {
            let a = rng.gen_range(0..n);
            let nb = tri.neighbors(a).to_vec();
            let b = nb[rng.gen_range(0..nb.len())];
            if tri.can_flip(a, b) {
                tri.flip(a, b);
            }
        }
        if (0..n).any(|v| tri.degree(v) < 4) {
            continue;
        }
        let map = validate_normal_map(tri.to_rotation_system().dual(), None).unwrap();
        let adj = map.adjacency();
        let f = map.face_count();
        for x in 0..f {
            for y in 0..f {
                if x == y || map.are_adjacent(x, y) {
                    continue;
                }
                let common: Vec<usize> = adj[x]
                    .iter()
                    .copied()
                    .filter(|&w| map.are_adjacent(w, y))
                    .collect();
                for i in 0..common.len() {
                    for j in i + 1..common.len() {
                        for k in j + 1..common.len() {
                            let (a, b, c) = (common[i], common[j], common[k]);
                            if map.are_adjacent(a, b)
                                && map.are_adjacent(b, c)
                                && map.are_adjacent(a, c)
                            {
                                let map = map.with_outer(y).unwrap();
                                let mut file = MapFile::from_map(&map, None, &["map without triangles; x, a, b, c pairwise adjacent, outer y touches a, b, c"]);
                                file.labels = vec![
                                    (x, "x".into()),
                                    (y, "y".into()),
                                    (a, "a".into()),
                                    (b, "b".into()),
                                    (c, "c".into()),
                                ];
                                file.labels.sort();
                                write("referee.map", &file);
                                return;
                            }
                        }
                    }
                }
            }
        }
    }
    panic!("no referee map found");
}

fn main() {
    nine_vertex();
    for name in ["errera", "poussin", "kittell"] {
        annotate(name);
    }
    heawood();
    heawood_map();
    referee();
}
