//! Combinatorial plane embeddings as rotation systems.
//!
//! Every edge `e` owns two darts, `2e` and `2e + 1`, one per end. A vertex
//! stores the cyclic order of the darts leaving it. Faces are the orbits of
//! `next(d) = succ_{head(d)}(twin(d))`.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;

/// One end of an edge, directed away from the vertex it is attached to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dart(pub usize);

impl Dart {
    #[inline]
    pub fn edge(self) -> EdgeId {
        self.0 / 2
    }

    #[inline]
    pub fn twin(self) -> Dart {
        Dart(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("inconsistent rotation: {0}")]
    InconsistentRotation(String),
    #[error("embedding is disconnected")]
    Disconnected,
    #[error("Euler characteristic violated: V - E + F = {vertices} - {edges} + {faces} != 2")]
    EulerViolation {
        vertices: usize,
        edges: usize,
        faces: usize,
    },
}

/// A facial walk, stored as the darts traversed in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub darts: Vec<Dart>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }
}

/// A validated genus-0 rotation system with its traced faces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationSystem {
    rotations: Vec<Vec<Dart>>,
    origin: Vec<VertexId>,
    position: Vec<usize>,
    faces: Vec<Face>,
    dart_face: Vec<FaceId>,
}

impl RotationSystem {
    /// Builds an embedding from per-vertex cyclic lists of edge ids.
    ///
    /// Each edge id must occur exactly twice overall. The first occurrence
    /// (scanning vertices in order) becomes dart `2e`, the second `2e + 1`.
    pub fn from_edge_rotations(rotations: &[Vec<EdgeId>]) -> Result<Self, EmbeddingError> {
        let edge_count = rotations.iter().map(Vec::len).sum::<usize>();
        if edge_count % 2 != 0 {
            return Err(EmbeddingError::InconsistentRotation(
                "odd number of edge ends".into(),
            ));
        }
        let edge_count = edge_count / 2;
        let mut seen = vec![0u8; edge_count];
        let mut darts = Vec::with_capacity(rotations.len());
        for (v, rot) in rotations.iter().enumerate() {
            let mut out = Vec::with_capacity(rot.len());
            for &e in rot {
                if e >= edge_count {
                    return Err(EmbeddingError::InconsistentRotation(format!(
                        "vertex {v} references edge {e} but only {edge_count} edges exist"
                    )));
                }
                if seen[e] >= 2 {
                    return Err(EmbeddingError::InconsistentRotation(format!(
                        "edge {e} referenced more than twice"
                    )));
                }
                out.push(Dart(2 * e + seen[e] as usize));
                seen[e] += 1;
            }
            darts.push(out);
        }
        if let Some(e) = seen.iter().position(|&c| c != 2) {
            return Err(EmbeddingError::InconsistentRotation(format!(
                "edge {e} has a dangling end"
            )));
        }
        Self::from_dart_rotations(darts)
    }

    /// Builds an embedding of a simple graph from cyclic neighbour lists.
    pub fn from_neighbor_rotations(neighbors: &[Vec<VertexId>]) -> Result<Self, EmbeddingError> {
        let n = neighbors.len();
        let mut edge_of: HashMap<(VertexId, VertexId), EdgeId> = HashMap::new();
        let mut rotations = Vec::with_capacity(n);
        for (u, list) in neighbors.iter().enumerate() {
            let mut rot = Vec::with_capacity(list.len());
            for &v in list {
                if v >= n || v == u {
                    return Err(EmbeddingError::InconsistentRotation(format!(
                        "vertex {u} lists invalid neighbour {v}"
                    )));
                }
                let key = (u.min(v), u.max(v));
                let next = edge_of.len();
                rot.push(*edge_of.entry(key).or_insert(next));
            }
            rotations.push(rot);
        }
        for (u, list) in neighbors.iter().enumerate() {
            for &v in list {
                if !neighbors[v].contains(&u) {
                    return Err(EmbeddingError::InconsistentRotation(format!(
                        "edge {u}-{v} is listed only at {u}"
                    )));
                }
            }
        }
        Self::from_edge_rotations(&rotations)
    }

    /// Builds an embedding from explicit dart rotations; darts must be exactly
    /// `0..2E`, each used once.
    pub fn from_dart_rotations(rotations: Vec<Vec<Dart>>) -> Result<Self, EmbeddingError> {
        let dart_count: usize = rotations.iter().map(Vec::len).sum();
        if !dart_count.is_multiple_of(2) {
            return Err(EmbeddingError::InconsistentRotation(
                "odd number of darts".into(),
            ));
        }
        let mut origin = vec![usize::MAX; dart_count];
        let mut position = vec![0; dart_count];
        for (v, rot) in rotations.iter().enumerate() {
            if rot.is_empty() {
                return Err(EmbeddingError::InconsistentRotation(format!(
                    "vertex {v} has no incident edges"
                )));
            }
            for (i, d) in rot.iter().enumerate() {
                if d.0 >= dart_count || origin[d.0] != usize::MAX {
                    return Err(EmbeddingError::InconsistentRotation(format!(
                        "dart {} is missing or duplicated",
                        d.0
                    )));
                }
                origin[d.0] = v;
                position[d.0] = i;
            }
        }
        let mut rs = RotationSystem {
            rotations,
            origin,
            position,
            faces: Vec::new(),
            dart_face: Vec::new(),
        };
        if !rs.is_connected() {
            return Err(EmbeddingError::Disconnected);
        }
        rs.trace();
        let (v, e, f) = (rs.vertex_count(), rs.edge_count(), rs.faces.len());
        if v + f != e + 2 {
            return Err(EmbeddingError::EulerViolation {
                vertices: v,
                edges: e,
                faces: f,
            });
        }
        Ok(rs)
    }

    fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &d in &self.rotations[v] {
                let w = self.head(d);
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == n
    }

    fn trace(&mut self) {
        let darts = self.dart_count();
        let mut dart_face = vec![usize::MAX; darts];
        let mut faces = Vec::new();
        for start in 0..darts {
            if dart_face[start] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut walk = Vec::new();
            let mut d = Dart(start);
            loop {
                dart_face[d.0] = id;
                walk.push(d);
                d = self.face_next(d);
                if d.0 == start {
                    break;
                }
            }
            faces.push(Face { darts: walk });
        }
        self.faces = faces;
        self.dart_face = dart_face;
    }

    pub fn vertex_count(&self) -> usize {
        self.rotations.len()
    }

    pub fn edge_count(&self) -> usize {
        self.origin.len() / 2
    }

    pub fn dart_count(&self) -> usize {
        self.origin.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.rotations[v].len()
    }

    pub fn rotation(&self, v: VertexId) -> &[Dart] {
        &self.rotations[v]
    }

    pub fn rotations(&self) -> &[Vec<Dart>] {
        &self.rotations
    }

    pub fn origin(&self, d: Dart) -> VertexId {
        self.origin[d.0]
    }

    pub fn head(&self, d: Dart) -> VertexId {
        self.origin[d.twin().0]
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        (self.origin[2 * e], self.origin[2 * e + 1])
    }

    /// Successor of `d` in the rotation at its origin.
    pub fn rotation_next(&self, d: Dart) -> Dart {
        let v = self.origin(d);
        let rot = &self.rotations[v];
        rot[(self.position[d.0] + 1) % rot.len()]
    }

    pub fn rotation_prev(&self, d: Dart) -> Dart {
        let v = self.origin(d);
        let rot = &self.rotations[v];
        rot[(self.position[d.0] + rot.len() - 1) % rot.len()]
    }

    /// The dart following `d` along the face to which `d` belongs.
    pub fn face_next(&self, d: Dart) -> Dart {
        self.rotation_next(d.twin())
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: FaceId) -> &Face {
        &self.faces[f]
    }

    pub fn dart_face(&self, d: Dart) -> FaceId {
        self.dart_face[d.0]
    }

    /// The two faces on either side of an edge.
    pub fn edge_faces(&self, e: EdgeId) -> (FaceId, FaceId) {
        (self.dart_face[2 * e], self.dart_face[2 * e + 1])
    }

    /// Cyclic neighbour lists (with repetition for parallel edges).
    pub fn neighbor_rotations(&self) -> Vec<Vec<VertexId>> {
        self.rotations
            .iter()
            .map(|rot| rot.iter().map(|&d| self.head(d)).collect())
            .collect()
    }

    /// Per-vertex lists of edge ids in rotation order.
    pub fn edge_rotations(&self) -> Vec<Vec<EdgeId>> {
        self.rotations
            .iter()
            .map(|rot| rot.iter().map(|d| d.edge()).collect())
            .collect()
    }

    /// The dual embedding. Dual vertex `f` is primal face `f`; dual dart `d`
    /// crosses primal edge `d.edge()` leaving face `dart_face(d)`.
    pub fn dual(&self) -> RotationSystem {
        let rotations = self.faces.iter().map(|f| f.darts.clone()).collect();
        RotationSystem::from_dart_rotations(rotations)
            .expect("dual of a plane embedding is a plane embedding")
    }

    /// Simple graph adjacency (parallel edges and loops collapsed).
    pub fn simple_adjacency(&self) -> Vec<Vec<VertexId>> {
        let mut adj: Vec<Vec<VertexId>> = self
            .rotations
            .iter()
            .enumerate()
            .map(|(v, rot)| {
                let mut n: Vec<VertexId> = rot
                    .iter()
                    .map(|&d| self.head(d))
                    .filter(|&w| w != v)
                    .collect();
                n.sort_unstable();
                n.dedup();
                n
            })
            .collect();
        adj.shrink_to_fit();
        adj
    }
}
