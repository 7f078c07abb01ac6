use fourcolor::color_steps::{MapColor, PartialMapColoring};
use fourcolor::corpus_io::{corpus_instance, Instance};
use fourcolor::embedding::{EmbeddingError, RotationSystem};
use fourcolor::oracle::backtrack_four_color;
use fourcolor::planar_map::{
    build_normal_map, contract_small_faces, euler_polygon_check, expand_small_faces,
    random_normal_map, MapError,
};
use fourcolor::{validate_normal_map, NormalMap};
use proptest::prelude::*;

fn corpus_map(name: &str) -> NormalMap {
    match corpus_instance(name).unwrap().instance().unwrap() {
        Instance::Map { map, .. } => map,
        Instance::Graph { .. } => panic!("{name} is a graph"),
    }
}

fn oracle_coloring(map: &NormalMap) -> PartialMapColoring {
    let c = backtrack_four_color(map.adjacency()).expect("planar maps are 4-colourable");
    PartialMapColoring::from_colors(c.into_iter().map(MapColor::from_index).collect())
}

/// Tries both orientations of the new vertices' rotations; exactly one is
/// planar.
fn build_either(base: &[Vec<usize>], a: &[Vec<usize>], b: &[Vec<usize>]) -> NormalMap {
    for extra in [a, b] {
        let mut rot = base.to_vec();
        rot.extend_from_slice(extra);
        if let Ok(m) = build_normal_map(&rot, None) {
            return m;
        }
    }
    panic!("neither orientation is planar");
}

/// Splits edge `e` with a digon.
fn insert_digon(map: &NormalMap, e: usize) -> NormalMap {
    let rs = map.embedding();
    let mut rot = rs.edge_rotations();
    let m = rs.edge_count();
    let (e1, e2, e3) = (m, m + 1, m + 2);
    let (_, v) = rs.endpoints(e);
    for r in rot[v].iter_mut() {
        if *r == e {
            *r = e3;
        }
    }
    build_either(
        &rot,
        &[vec![e, e1, e2], vec![e3, e2, e1]],
        &[vec![e, e1, e2], vec![e3, e1, e2]],
    )
}

/// Replaces vertex `w` by a small triangle.
fn truncate_vertex(map: &NormalMap, w: usize) -> NormalMap {
    let rs = map.embedding();
    let mut rot = rs.edge_rotations();
    let r = rot[w].clone();
    let m = rs.edge_count();
    let s = [m, m + 1, m + 2];
    let fwd = |i: usize| vec![r[i], s[i], s[(i + 2) % 3]];
    let bwd = |i: usize| vec![r[i], s[(i + 2) % 3], s[i]];
    let mut a = [fwd(0), fwd(1), fwd(2)].to_vec();
    let mut b = [bwd(0), bwd(1), bwd(2)].to_vec();
    let mut rot_a = rot.clone();
    rot_a[w] = a.remove(0);
    rot[w] = b.remove(0);
    for extra in [(&rot_a, a), (&rot, b)] {
        let mut all = extra.0.clone();
        all.extend(extra.1);
        if let Ok(m) = build_normal_map(&all, None) {
            return m;
        }
    }
    panic!("neither orientation is planar");
}

#[test]
fn platonic_counts() {
    for (name, v, e, f, size) in [
        ("k4map", 4, 6, 4, 3),
        ("cube", 8, 12, 6, 4),
        ("dodecahedron", 20, 30, 12, 5),
    ] {
        let m = corpus_map(name);
        assert_eq!(
            (m.vertex_count(), m.edge_count(), m.face_count()),
            (v, e, f),
            "{name}"
        );
        assert!(m.faces().iter().all(|x| x.len() == size), "{name}");
        let (stats, ok) = euler_polygon_check(&m);
        assert!(ok, "{name}");
        assert_eq!((stats.lhs(), stats.rhs()), (12, 12), "{name}");
    }
}

#[test]
fn k5_has_no_planar_rotation() {
    // Every rotation system of K5: fix vertex 0, permute the rest.
    let perms = |xs: Vec<usize>| -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut p = xs.clone();
        fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if k == 1 {
                out.push(p.clone());
                return;
            }
            for i in 0..k {
                heap(k - 1, p, out);
                let j = if k.is_multiple_of(2) { i } else { 0 };
                p.swap(j, k - 1);
            }
        }
        let k = p.len();
        heap(k, &mut p, &mut out);
        out.into_iter().filter(|q| q[0] == xs[0]).collect()
    };
    let rots: Vec<Vec<Vec<usize>>> = (0..5)
        .map(|v| perms((0..5).filter(|&w| w != v).collect()))
        .collect();
    let mut tried = 0;
    for a in &rots[0] {
        for b in &rots[1] {
            for c in &rots[2] {
                for d in &rots[3] {
                    for e in &rots[4] {
                        let rot = vec![a.clone(), b.clone(), c.clone(), d.clone(), e.clone()];
                        let err = RotationSystem::from_neighbor_rotations(&rot).unwrap_err();
                        assert!(matches!(err, EmbeddingError::EulerViolation { .. }));
                        tried += 1;
                    }
                }
            }
        }
    }
    assert_eq!(tried, 6usize.pow(5));
}

#[test]
fn two_triangles_joined_by_an_edge_have_a_bridge() {
    let rs = RotationSystem::from_neighbor_rotations(&[
        vec![1, 2],
        vec![2, 0],
        vec![0, 3, 1],
        vec![2, 4, 5],
        vec![5, 3],
        vec![3, 4],
    ])
    .unwrap();
    assert!(matches!(
        validate_normal_map(rs, None),
        Err(MapError::HasBridge { .. })
    ));
}

#[test]
fn default_outer_is_largest_face() {
    let m = random_normal_map(30, 2).unwrap();
    let max = (0..m.face_count()).map(|f| m.face_size(f)).max().unwrap();
    assert_eq!(m.face_size(m.outer()), max);
}

#[test]
fn cube_contracts_to_itself() {
    let cube = corpus_map("cube");
    let (c, log) = contract_small_faces(&cube).unwrap();
    assert!(log.is_empty());
    assert!(!log.degenerate);
    assert_eq!(c, cube);
}

#[test]
fn k4_map_collapses_to_a_degenerate_residue() {
    let k4 = corpus_map("k4map");
    let (c, log) = contract_small_faces(&k4).unwrap();
    assert!(log.degenerate);
    assert!(c.face_count() < 4);
    assert_eq!(log.replay(&c), k4);
}

#[test]
fn digon_between_hexagons_round_trips() {
    let cube = corpus_map("cube");
    let with_digon = insert_digon(&cube, 0);
    assert_eq!(with_digon.face_count(), 7);
    let sizes: Vec<usize> = (0..7).map(|f| with_digon.face_size(f)).collect();
    assert_eq!(sizes.iter().filter(|&&s| s == 2).count(), 1);
    assert_eq!(sizes.iter().filter(|&&s| s == 6).count(), 2);

    let (c, log) = contract_small_faces(&with_digon).unwrap();
    assert_eq!(c.face_count(), 6);
    assert_eq!(log.steps.len(), 1);
    assert_eq!(log.steps[0].size, 2);
    assert_eq!(log.replay(&c), with_digon);

    let expanded = expand_small_faces(&oracle_coloring(&c), &log).unwrap();
    assert!(expanded.is_complete() && expanded.is_proper(&with_digon));
}

#[test]
fn reinserted_triangle_takes_the_spare_colour() {
    let dodeca = corpus_map("dodecahedron");
    let m = truncate_vertex(&dodeca, 0);
    assert_eq!(m.face_count(), 13);
    let tri = (0..13).find(|&f| m.face_size(f) == 3).unwrap();
    let (c, log) = contract_small_faces(&m).unwrap();
    assert_eq!(c.face_count(), 12);
    let expanded = expand_small_faces(&oracle_coloring(&c), &log).unwrap();
    assert!(expanded.is_proper(&m));
    let mut around: Vec<MapColor> = m.neighbors(tri).iter().map(|&g| expanded.get(g)).collect();
    around.sort();
    around.dedup();
    assert_eq!(around.len(), 3);
    assert!(!around.contains(&expanded.get(tri)));
}

#[test]
fn expand_rejects_improper_input() {
    let m = truncate_vertex(&corpus_map("dodecahedron"), 0);
    let (c, log) = contract_small_faces(&m).unwrap();
    let mono = PartialMapColoring::from_colors(vec![MapColor::Brown; c.face_count()]);
    assert!(matches!(
        expand_small_faces(&mono, &log),
        Err(MapError::ImproperInput(_))
    ));
}

#[test]
fn random_map_thirty_seven_validates() {
    let m = random_normal_map(30, 7).unwrap();
    assert_eq!(m.face_count(), 30);
    let again = validate_normal_map(m.embedding().clone(), Some(m.outer())).unwrap();
    assert_eq!(again, m);
    assert!(euler_polygon_check(&m).1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_maps_are_normal(faces in 4usize..60, seed in any::<u64>()) {
        let m = random_normal_map(faces, seed).unwrap();
        prop_assert_eq!(m.face_count(), faces);
        prop_assert_eq!(2 * m.edge_count(), 3 * m.vertex_count());
        let sizes: usize = m.faces().iter().map(|f| f.len()).sum();
        prop_assert_eq!(sizes, 2 * m.edge_count());
        prop_assert_eq!(
            m.vertex_count() as i64 - m.edge_count() as i64 + m.face_count() as i64,
            2
        );
        prop_assert!(euler_polygon_check(&m).1);
        prop_assert_eq!(random_normal_map(faces, seed).unwrap(), m);
    }

    #[test]
    fn contraction_round_trips(faces in 4usize..40, seed in any::<u64>()) {
        let m = random_normal_map(faces, seed).unwrap();
        let (c, log) = contract_small_faces(&m).unwrap();
        prop_assert!(log.degenerate || (0..c.face_count()).all(|f| c.face_size(f) >= 4));
        prop_assert_eq!(log.replay(&c), m.clone());
        let expanded = expand_small_faces(&oracle_coloring(&c), &log).unwrap();
        prop_assert!(expanded.is_complete());
        prop_assert!(expanded.is_proper(&m));
    }
}
