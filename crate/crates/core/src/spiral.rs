//! Spiral ordering of regions: start at the outer region and keep crossing
//! into the leftmost unvisited neighbour; when stuck, start a new chain at the
//! closest unvisited region.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::embedding::FaceId;
use crate::planar_map::NormalMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Scan a region's borders in boundary-walk order.
    #[default]
    Clockwise,
    /// Scan in reverse boundary-walk order.
    Counterclockwise,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpiralOrder {
    pub order: Vec<FaceId>,
    pub chains: Vec<Vec<FaceId>>,
    pub direction: Direction,
    position: Vec<usize>,
}

impl SpiralOrder {
    /// Index of a face in the order.
    pub fn position(&self, f: FaceId) -> usize {
        self.position[f]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Checks the structural invariants against a map.
    pub fn is_valid_for(&self, map: &NormalMap) -> bool {
        let n = map.face_count();
        let mut seen = vec![false; n];
        for &f in &self.order {
            if f >= n || seen[f] {
                return false;
            }
            seen[f] = true;
        }
        let flat: Vec<FaceId> = self.chains.iter().flatten().copied().collect();
        flat == self.order
            && self.order.len() == n
            && self.order.first() == Some(&map.outer())
            && self
                .chains
                .iter()
                .all(|c| !c.is_empty() && c.windows(2).all(|w| map.are_adjacent(w[0], w[1])))
    }
}

/// Walk positions of a face of size `k`, beginning at `start`, in the given
/// direction.
fn scan(k: usize, start: usize, direction: Direction) -> impl Iterator<Item = usize> {
    (0..k).map(move |i| match direction {
        Direction::Clockwise => (start + i) % k,
        Direction::Counterclockwise => (start + k - i) % k,
    })
}

fn step(k: usize, pos: usize, direction: Direction) -> usize {
    match direction {
        Direction::Clockwise => (pos + 1) % k,
        Direction::Counterclockwise => (pos + k - 1) % k,
    }
}

pub fn spiral_order(map: &NormalMap, direction: Direction) -> SpiralOrder {
    let n = map.face_count();
    let rs = map.embedding();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut chains: Vec<Vec<FaceId>> = Vec::new();
    let mut chain = Vec::new();

    let mut current = map.outer();
    let mut start = 0;
    loop {
        visited[current] = true;
        order.push(current);
        chain.push(current);
        if order.len() == n {
            break;
        }
        let walk = &map.face(current).darts;
        let k = walk.len();
        let next = scan(k, start, direction)
            .map(|i| (i, walk[i]))
            .find(|&(_, d)| !visited[rs.dart_face(d.twin())]);
        match next {
            Some((_, d)) => {
                let to = rs.dart_face(d.twin());
                let entry = map
                    .face(to)
                    .darts
                    .iter()
                    .position(|&x| x == d.twin())
                    .expect("twin lies on the neighbouring face");
                start = step(map.face_size(to), entry, direction);
                current = to;
            }
            None => {
                chains.push(std::mem::take(&mut chain));
                current = closest_unvisited(map, current, &visited);
                let walk = &map.face(current).darts;
                start = walk
                    .iter()
                    .position(|&d| visited[rs.dart_face(d.twin())])
                    .map_or(0, |p| step(walk.len(), p, direction));
            }
        }
    }
    chains.push(chain);

    let mut position = vec![0; n];
    for (i, &f) in order.iter().enumerate() {
        position[f] = i;
    }
    SpiralOrder {
        order,
        chains,
        direction,
        position,
    }
}

/// Unvisited face at minimum dual distance from `from`, lowest id on ties.
fn closest_unvisited(map: &NormalMap, from: FaceId, visited: &[bool]) -> FaceId {
    let mut dist = vec![usize::MAX; map.face_count()];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    let mut best: Option<(usize, FaceId)> = None;
    while let Some(f) = queue.pop_front() {
        if let Some((d, _)) = best {
            if dist[f] > d {
                break;
            }
        }
        if !visited[f] {
            let cand = (dist[f], f);
            if best.is_none_or(|b| cand < b) {
                best = Some(cand);
            }
            continue;
        }
        for &g in map.neighbors(f) {
            if dist[g] == usize::MAX {
                dist[g] = dist[f] + 1;
                queue.push_back(g);
            }
        }
    }
    best.expect("dual of a normal map is connected").1
}
