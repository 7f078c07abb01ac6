//! Normal maps: connected, bridgeless, cubic plane embeddings whose faces are
//! the regions to be coloured.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color_steps::{MapColor, PartialMapColoring};
use crate::embedding::{Dart, EdgeId, EmbeddingError, Face, FaceId, RotationSystem, VertexId};
use crate::triangulation::Triangulation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error("vertex {vertex} has degree {degree}, expected 3")]
    NotCubic { vertex: VertexId, degree: usize },
    #[error("edge {edge} is a bridge (same face on both sides)")]
    HasBridge { edge: EdgeId },
    #[error("map is disconnected")]
    Disconnected,
    #[error("face {0} does not exist")]
    NoSuchFace(FaceId),
    #[error("a normal map needs at least 4 faces, got {0}")]
    TooFewFaces(usize),
    #[error("improper input coloring: {0}")]
    ImproperInput(String),
}

/// A cubic, bridgeless plane map with a designated outer region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalMap {
    embedding: RotationSystem,
    outer: FaceId,
    adjacency: Vec<Vec<FaceId>>,
}

impl NormalMap {
    pub fn embedding(&self) -> &RotationSystem {
        &self.embedding
    }

    pub fn face_count(&self) -> usize {
        self.embedding.face_count()
    }

    pub fn vertex_count(&self) -> usize {
        self.embedding.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.embedding.edge_count()
    }

    pub fn faces(&self) -> &[Face] {
        self.embedding.faces()
    }

    pub fn face(&self, f: FaceId) -> &Face {
        self.embedding.face(f)
    }

    /// Number of sides of a region.
    pub fn face_size(&self, f: FaceId) -> usize {
        self.embedding.face(f).len()
    }

    pub fn outer(&self) -> FaceId {
        self.outer
    }

    /// Simple face adjacency: faces sharing at least one border, sorted.
    pub fn neighbors(&self, f: FaceId) -> &[FaceId] {
        &self.adjacency[f]
    }

    pub fn adjacency(&self) -> &[Vec<FaceId>] {
        &self.adjacency
    }

    pub fn are_adjacent(&self, a: FaceId, b: FaceId) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Face on the other side of the border traversed by `d`.
    pub fn across(&self, d: Dart) -> FaceId {
        self.embedding.dart_face(d.twin())
    }

    /// The three regions meeting at a corner.
    pub fn vertex_faces(&self, v: VertexId) -> [FaceId; 3] {
        let rot = self.embedding.rotation(v);
        [
            self.embedding.dart_face(rot[0]),
            self.embedding.dart_face(rot[1]),
            self.embedding.dart_face(rot[2]),
        ]
    }

    /// Corners on the boundary of a face, in walk order.
    pub fn face_vertices(&self, f: FaceId) -> impl Iterator<Item = VertexId> + '_ {
        self.face(f).darts.iter().map(|&d| self.embedding.origin(d))
    }

    /// Dual multigraph: one entry per border edge.
    pub fn dual_edges(&self) -> Vec<(FaceId, FaceId)> {
        (0..self.edge_count())
            .map(|e| self.embedding.edge_faces(e))
            .collect()
    }

    /// Re-designates the outer region. Pure relabelling.
    pub fn with_outer(mut self, outer: FaceId) -> Result<Self, MapError> {
        if outer >= self.face_count() {
            return Err(MapError::NoSuchFace(outer));
        }
        self.outer = outer;
        Ok(self)
    }

    /// The largest face, lowest id on ties.
    pub fn largest_face(&self) -> FaceId {
        largest_face(&self.embedding)
    }
}

fn largest_face(rs: &RotationSystem) -> FaceId {
    let mut best = 0;
    for f in 1..rs.face_count() {
        if rs.face(f).len() > rs.face(best).len() {
            best = f;
        }
    }
    best
}

/// Checks that an embedding is a normal map and designates the outer face
/// (largest face unless given).
pub fn validate_normal_map(
    embedding: RotationSystem,
    outer: Option<FaceId>,
) -> Result<NormalMap, MapError> {
    for e in 0..embedding.edge_count() {
        let (a, b) = embedding.edge_faces(e);
        if a == b {
            return Err(MapError::HasBridge { edge: e });
        }
    }
    for v in 0..embedding.vertex_count() {
        let degree = embedding.degree(v);
        if degree != 3 {
            return Err(MapError::NotCubic { vertex: v, degree });
        }
    }
    let outer = match outer {
        Some(f) if f >= embedding.face_count() => return Err(MapError::NoSuchFace(f)),
        Some(f) => f,
        None => largest_face(&embedding),
    };
    let mut adjacency = vec![Vec::new(); embedding.face_count()];
    for e in 0..embedding.edge_count() {
        let (a, b) = embedding.edge_faces(e);
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }
    Ok(NormalMap {
        embedding,
        outer,
        adjacency,
    })
}

/// Builds and validates in one go; `MapError::Disconnected` is reported for
/// disconnected input.
pub fn build_normal_map(
    edge_rotations: &[Vec<EdgeId>],
    outer: Option<FaceId>,
) -> Result<NormalMap, MapError> {
    let rs = RotationSystem::from_edge_rotations(edge_rotations).map_err(|e| match e {
        EmbeddingError::Disconnected => MapError::Disconnected,
        other => MapError::Embedding(other),
    })?;
    validate_normal_map(rs, outer)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerStats {
    /// face size -> number of faces of that size
    pub p: BTreeMap<usize, usize>,
    pub k_max: usize,
}

impl EulerStats {
    pub fn of(map: &NormalMap) -> Self {
        let mut p = BTreeMap::new();
        for f in map.faces() {
            *p.entry(f.len()).or_insert(0) += 1;
        }
        let k_max = p.keys().next_back().copied().unwrap_or(0);
        EulerStats { p, k_max }
    }

    pub fn count(&self, k: usize) -> usize {
        self.p.get(&k).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.p.values().sum()
    }

    /// Left side `4p2 + 3p3 + 2p4 + p5` (faces of size 1 would weigh 5).
    pub fn lhs(&self) -> i64 {
        self.p
            .iter()
            .filter(|(&k, _)| k < 6)
            .map(|(&k, &n)| (6 - k as i64) * n as i64)
            .sum()
    }

    /// Right side `sum_{k >= 7} (k - 6) p_k + 12`.
    pub fn rhs(&self) -> i64 {
        self.p
            .iter()
            .filter(|(&k, _)| k > 6)
            .map(|(&k, &n)| (k as i64 - 6) * n as i64)
            .sum::<i64>()
            + 12
    }
}

/// Polygon-count identity for cubic sphere maps.
pub fn euler_polygon_check(map: &NormalMap) -> (EulerStats, bool) {
    let stats = EulerStats::of(map);
    let holds = stats.lhs() == stats.rhs();
    (stats, holds)
}

/// One contraction: the map before it, and the face that was shrunk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionStep {
    /// Original id of the contracted face.
    pub face: FaceId,
    pub size: usize,
    /// Original ids of the faces around it, in boundary order.
    pub neighbors: Vec<FaceId>,
    /// Embedding immediately before this contraction.
    pub before: RotationSystem,
    /// Face index in `before` -> original face id.
    pub before_labels: Vec<FaceId>,
    pub before_outer: FaceId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionLog {
    pub steps: Vec<ContractionStep>,
    /// Face index in the contracted map -> original face id.
    pub labels: Vec<FaceId>,
    pub original_face_count: usize,
    /// Set when the residue still has faces of size < 4 (at most three faces
    /// left, every pair adjacent).
    pub degenerate: bool,
}

impl ContractionLog {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Undoes every contraction, returning the original map.
    pub fn replay(&self, contracted: &NormalMap) -> NormalMap {
        let mut current = contracted.clone();
        let mut labels = self.labels.clone();
        for step in self.steps.iter().rev() {
            debug_assert_eq!(labels.len() + 1, step.before_labels.len());
            debug_assert!(labels.iter().all(|l| step.before_labels.contains(l)));
            current = validate_normal_map(step.before.clone(), Some(step.before_outer))
                .expect("logged embedding was a valid normal map");
            labels = step.before_labels.clone();
        }
        current
    }
}

fn is_small(size: usize) -> bool {
    size < 4
}

/// Repeatedly shrinks the small face (digon or triangle) with the lowest
/// original id to a point, until none remain or only three faces are left.
pub fn contract_small_faces(map: &NormalMap) -> Result<(NormalMap, ContractionLog), MapError> {
    let original_face_count = map.face_count();
    let mut rs = map.embedding().clone();
    let mut labels: Vec<FaceId> = (0..rs.face_count()).collect();
    let mut outer_label = map.outer();
    let mut outer = map.outer();
    let mut steps = Vec::new();
    let mut degenerate = false;

    loop {
        let target = (0..rs.face_count())
            .filter(|&f| is_small(rs.face(f).len()))
            .min_by_key(|&f| labels[f]);
        let Some(face) = target else { break };
        if rs.face_count() <= 3 {
            degenerate = true;
            break;
        }
        let walk = rs.face(face).darts.clone();
        let neighbors = walk
            .iter()
            .map(|&d| labels[rs.dart_face(d.twin())])
            .collect();
        let dart_label: Vec<FaceId> = (0..rs.dart_count())
            .map(|d| labels[rs.dart_face(Dart(d))])
            .collect();
        let (next, next_dart_label) = match walk.len() {
            3 => contract_triangle(&rs, &walk, &dart_label),
            2 => contract_digon(&rs, &walk, &dart_label),
            n => unreachable!("face of size {n} is not contractible"),
        }?;
        steps.push(ContractionStep {
            face: labels[face],
            size: walk.len(),
            neighbors,
            before: rs.clone(),
            before_labels: labels.clone(),
            before_outer: outer,
        });
        labels = next
            .faces()
            .iter()
            .map(|f| next_dart_label[f.darts[0].0])
            .collect();
        outer = match labels.iter().position(|&l| l == outer_label) {
            Some(f) => f,
            None => {
                let f = largest_face(&next);
                outer_label = labels[f];
                f
            }
        };
        rs = next;
    }

    let contracted = validate_normal_map(rs, Some(outer))?;
    Ok((
        contracted,
        ContractionLog {
            steps,
            labels,
            original_face_count,
            degenerate,
        },
    ))
}

/// Rebuilds an embedding from per-vertex dart lists over old dart ids,
/// renumbering surviving vertices and edges in increasing order.
fn compact(
    rotations: Vec<Option<Vec<Dart>>>,
    edge_alive: &[bool],
    dart_label: &[FaceId],
) -> Result<(RotationSystem, Vec<FaceId>), MapError> {
    let mut new_edge = vec![usize::MAX; edge_alive.len()];
    let mut next = 0;
    for (e, &alive) in edge_alive.iter().enumerate() {
        if alive {
            new_edge[e] = next;
            next += 1;
        }
    }
    let mut labels = vec![0; 2 * next];
    let rot: Vec<Vec<Dart>> = rotations
        .into_iter()
        .flatten()
        .map(|r| {
            r.into_iter()
                .map(|d| {
                    let nd = Dart(2 * new_edge[d.edge()] + (d.0 & 1));
                    labels[nd.0] = dart_label[d.0];
                    nd
                })
                .collect()
        })
        .collect();
    Ok((RotationSystem::from_dart_rotations(rot)?, labels))
}

fn contract_triangle(
    rs: &RotationSystem,
    walk: &[Dart],
    dart_label: &[FaceId],
) -> Result<(RotationSystem, Vec<FaceId>), MapError> {
    let [d0, d1, d2] = [walk[0], walk[1], walk[2]];
    let (a, b, c) = (rs.origin(d0), rs.origin(d1), rs.origin(d2));
    let (xa, xb, xc) = (
        rs.rotation_next(d0),
        rs.rotation_next(d1),
        rs.rotation_next(d2),
    );
    let mut rotations: Vec<Option<Vec<Dart>>> = rs.rotations().iter().cloned().map(Some).collect();
    rotations[a] = Some(vec![xa, xc, xb]);
    rotations[b] = None;
    rotations[c] = None;
    let mut alive = vec![true; rs.edge_count()];
    for d in walk {
        alive[d.edge()] = false;
    }
    compact(rotations, &alive, dart_label)
}

fn contract_digon(
    rs: &RotationSystem,
    walk: &[Dart],
    dart_label: &[FaceId],
) -> Result<(RotationSystem, Vec<FaceId>), MapError> {
    let [d0, d1] = [walk[0], walk[1]];
    let (a, b) = (rs.origin(d0), rs.origin(d1));
    let xa = rs.rotation_next(d0);
    let xb = rs.rotation_next(d1);
    let b_prime = rs.head(xb);
    let mut rotations: Vec<Option<Vec<Dart>>> = rs.rotations().iter().cloned().map(Some).collect();
    // The edge at `a` absorbs the edge at `b`: its far end moves to b'.
    if let Some(rot) = rotations[b_prime].as_mut() {
        for d in rot.iter_mut() {
            if *d == xb.twin() {
                *d = xa;
            }
        }
    }
    rotations[a] = None;
    rotations[b] = None;
    let mut alive = vec![true; rs.edge_count()];
    alive[d0.edge()] = false;
    alive[d1.edge()] = false;
    alive[xb.edge()] = false;
    compact(rotations, &alive, dart_label)
}

const SPARE_ORDER: [MapColor; 4] = [
    MapColor::Brown,
    MapColor::Green,
    MapColor::LightBlue,
    MapColor::DarkBlue,
];

/// Puts contracted faces back, each taking the first colour not used by its
/// (at most three) neighbours.
pub fn expand_small_faces(
    coloring: &PartialMapColoring,
    log: &ContractionLog,
) -> Result<PartialMapColoring, MapError> {
    if coloring.len() != log.labels.len() {
        return Err(MapError::ImproperInput(format!(
            "coloring covers {} faces, contracted map has {}",
            coloring.len(),
            log.labels.len()
        )));
    }
    let mut out = PartialMapColoring::all_white(log.original_face_count);
    for (f, &orig) in log.labels.iter().enumerate() {
        let c = coloring.get(f);
        if c == MapColor::White {
            return Err(MapError::ImproperInput(format!("face {f} is uncoloured")));
        }
        out.set(orig, c);
    }
    for step in log.steps.iter().rev() {
        let used: Vec<MapColor> = step.neighbors.iter().map(|&n| out.get(n)).collect();
        if used.contains(&MapColor::White) {
            return Err(MapError::ImproperInput(format!(
                "a neighbour of face {} is uncoloured",
                step.face
            )));
        }
        let spare = SPARE_ORDER
            .into_iter()
            .find(|c| !used.contains(c))
            .ok_or_else(|| {
                MapError::ImproperInput(format!("no spare colour for face {}", step.face))
            })?;
        out.set(step.face, spare);
    }
    if let Some(first) = log.steps.first() {
        let original = validate_normal_map(first.before.clone(), Some(first.before_outer))?;
        if !out.is_proper(&original) {
            return Err(MapError::ImproperInput(
                "expanded coloring is not proper".into(),
            ));
        }
    }
    Ok(out)
}

/// A random normal map with exactly `face_count` regions: the dual of a
/// random triangulation grown by vertex insertion, with degree-3 vertices
/// flipped away where possible.
pub fn random_normal_map(face_count: usize, seed: u64) -> Result<NormalMap, MapError> {
    if face_count < 4 {
        return Err(MapError::TooFewFaces(face_count));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tri = Triangulation::random(face_count, &mut rng);
    tri.flip_away_degree_three(&mut rng);
    validate_normal_map(tri.to_rotation_system().dual(), None)
}
