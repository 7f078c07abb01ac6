use fourcolor::corpus_io::{corpus_instance, Instance};
use fourcolor::planar_map::random_normal_map;
use fourcolor::{spiral_order, Direction, NormalMap};
use proptest::prelude::*;

fn corpus_map(name: &str) -> NormalMap {
    match corpus_instance(name).unwrap().instance().unwrap() {
        Instance::Map { map, .. } => map,
        Instance::Graph { .. } => panic!("{name} is a graph"),
    }
}

fn chains_are_adjacent(map: &NormalMap, chains: &[Vec<usize>]) -> bool {
    chains
        .iter()
        .all(|c| c.windows(2).all(|w| map.are_adjacent(w[0], w[1])))
}

#[test]
fn k4_map_is_one_chain() {
    let m = corpus_map("k4map");
    let s = spiral_order(&m, Direction::Clockwise);
    assert_eq!(s.chains.len(), 1);
    assert_eq!(s.chains[0].len(), 4);
    assert_eq!(s.order[0], m.outer());
}

#[test]
fn cube_is_one_chain_of_six() {
    let m = corpus_map("cube");
    for dir in [Direction::Clockwise, Direction::Counterclockwise] {
        let s = spiral_order(&m, dir);
        assert_eq!(s.chains.len(), 1);
        assert_eq!(s.chains[0].len(), 6);
        assert!(chains_are_adjacent(&m, &s.chains));
        assert!(s.is_valid_for(&m));
    }
}

#[test]
fn directions_are_mirror_images_on_the_cube() {
    let m = corpus_map("cube");
    let cw = spiral_order(&m, Direction::Clockwise);
    let ccw = spiral_order(&m, Direction::Counterclockwise);
    assert_eq!(cw.order[0], ccw.order[0]);
    assert_ne!(cw.order, ccw.order);
}

#[test]
fn corpus_maps_give_valid_orders() {
    for name in ["tutte", "gardner", "appel-haken", "referee", "dodecahedron"] {
        let m = corpus_map(name);
        let s = spiral_order(&m, Direction::Clockwise);
        assert!(s.is_valid_for(&m), "{name}");
        assert!(chains_are_adjacent(&m, &s.chains), "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn spiral_invariants(faces in 4usize..60, seed in any::<u64>(), ccw in any::<bool>()) {
        let m = random_normal_map(faces, seed).unwrap();
        let dir = if ccw { Direction::Counterclockwise } else { Direction::Clockwise };
        let s = spiral_order(&m, dir);
        prop_assert!(s.is_valid_for(&m));
        prop_assert_eq!(s.order[0], m.outer());
        prop_assert_eq!(s.chains.iter().map(|c| c.len()).sum::<usize>(), faces);
        prop_assert!(chains_are_adjacent(&m, &s.chains));
        let flat: Vec<usize> = s.chains.concat();
        prop_assert_eq!(&flat, &s.order);
        for (i, &f) in s.order.iter().enumerate() {
            prop_assert_eq!(s.position(f), i);
        }
        prop_assert_eq!(spiral_order(&m, dir), s);
    }
}
