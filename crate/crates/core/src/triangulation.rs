//! Plane triangulations as neighbour rotations. Used to grow random normal
//! maps (through the dual), to enumerate small maps, and to build graphs from
//! triangle lists.

use std::collections::{BTreeMap, HashSet, VecDeque};

use rand::Rng;
use thiserror::Error;

use crate::embedding::{RotationSystem, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangulationError {
    #[error("triangle list is not a closed orientable surface: {0}")]
    NotASurface(String),
    #[error("triangle list does not describe a sphere")]
    NotASphere,
}

/// Neighbour rotations of a plane triangulation. The face to the left of
/// `a -> b` is `(a, b, succ_b(a))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    rot: Vec<Vec<VertexId>>,
}

impl Triangulation {
    pub fn from_rotations(rot: Vec<Vec<VertexId>>) -> Self {
        Triangulation { rot }
    }

    /// Two triangles glued along their boundary.
    pub fn triangle() -> Self {
        Triangulation {
            rot: vec![vec![1, 2], vec![2, 0], vec![0, 1]],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.rot.len()
    }

    pub fn edge_count(&self) -> usize {
        self.rot.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.rot[v].len()
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.rot[v]
    }

    pub fn rotations(&self) -> &[Vec<VertexId>] {
        &self.rot
    }

    pub fn adjacent(&self, a: VertexId, b: VertexId) -> bool {
        self.rot[a].contains(&b)
    }

    fn pos(&self, v: VertexId, w: VertexId) -> usize {
        self.rot[v]
            .iter()
            .position(|&x| x == w)
            .expect("vertices are adjacent")
    }

    /// Successor of `w` in the rotation at `v`.
    pub fn succ(&self, v: VertexId, w: VertexId) -> VertexId {
        let r = &self.rot[v];
        r[(self.pos(v, w) + 1) % r.len()]
    }

    fn insert_after(&mut self, v: VertexId, after: VertexId, new: VertexId) {
        let p = self.pos(v, after);
        self.rot[v].insert(p + 1, new);
    }

    fn remove(&mut self, v: VertexId, w: VertexId) {
        let p = self.pos(v, w);
        self.rot[v].remove(p);
    }

    /// All triangular faces, each once, as `(a, b, succ_b(a))`.
    pub fn faces(&self) -> Vec<[VertexId; 3]> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for a in 0..self.rot.len() {
            for &b in &self.rot[a] {
                if seen.contains(&(a, b)) {
                    continue;
                }
                let c = self.succ(b, a);
                seen.insert((a, b));
                seen.insert((b, c));
                seen.insert((c, a));
                out.push([a, b, c]);
            }
        }
        out
    }

    /// Adds a vertex inside face `(a, b, c)` (with `c = succ_b(a)`), joined to
    /// all three corners. Returns the new vertex.
    pub fn insert_vertex(&mut self, face: [VertexId; 3]) -> VertexId {
        let [a, b, c] = face;
        let x = self.rot.len();
        self.rot.push(vec![a, c, b]);
        self.insert_after(b, a, x);
        self.insert_after(c, b, x);
        self.insert_after(a, c, x);
        x
    }

    /// The two apexes `(c, d)` of the triangles on edge `ab`.
    pub fn apexes(&self, a: VertexId, b: VertexId) -> (VertexId, VertexId) {
        (self.succ(b, a), self.succ(a, b))
    }

    /// An edge can be flipped when its apexes are distinct and non-adjacent
    /// and both ends keep degree at least 3.
    pub fn can_flip(&self, a: VertexId, b: VertexId) -> bool {
        let (c, d) = self.apexes(a, b);
        c != d && !self.adjacent(c, d) && self.degree(a) > 3 && self.degree(b) > 3
    }

    /// Replaces edge `ab` by the edge between its apexes.
    pub fn flip(&mut self, a: VertexId, b: VertexId) {
        let (c, d) = self.apexes(a, b);
        self.remove(a, b);
        self.remove(b, a);
        self.insert_after(c, b, d);
        self.insert_after(d, a, c);
    }

    /// Grows a triangulation on `n >= 3` vertices by inserting each new vertex
    /// into a uniformly chosen face.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut t = Self::triangle();
        while t.vertex_count() < n {
            let faces = t.faces();
            let f = faces[rng.gen_range(0..faces.len())];
            t.insert_vertex(f);
        }
        t
    }

    /// Flips edges opposite degree-3 vertices until none can be removed this
    /// way. Each flip lowers the number of degree-3 vertices by one.
    pub fn flip_away_degree_three<R: Rng>(&mut self, rng: &mut R) {
        loop {
            let mut options = Vec::new();
            for v in 0..self.rot.len() {
                if self.degree(v) != 3 {
                    continue;
                }
                let r = self.rot[v].clone();
                for i in 0..3 {
                    let (x, y) = (r[i], r[(i + 1) % 3]);
                    let (c, d) = self.apexes(x, y);
                    let other = if c == v {
                        d
                    } else if d == v {
                        c
                    } else {
                        continue;
                    };
                    if other != v
                        && !self.adjacent(v, other)
                        && self.degree(x) >= 5
                        && self.degree(y) >= 5
                    {
                        options.push((x, y));
                    }
                }
            }
            if options.is_empty() {
                return;
            }
            let (x, y) = options[rng.gen_range(0..options.len())];
            self.flip(x, y);
        }
    }

    pub fn to_rotation_system(&self) -> RotationSystem {
        RotationSystem::from_neighbor_rotations(&self.rot)
            .expect("triangulation rotations are planar")
    }

    /// Builds a triangulation from an unoriented list of triangles, choosing a
    /// consistent orientation.
    pub fn from_faces(n: usize, faces: &[[VertexId; 3]]) -> Result<Self, TriangulationError> {
        let bad = |m: &str| TriangulationError::NotASurface(m.to_string());
        let mut by_edge: BTreeMap<(VertexId, VertexId), Vec<usize>> = BTreeMap::new();
        for (i, f) in faces.iter().enumerate() {
            if f.iter().any(|&v| v >= n) || f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(bad(&format!("triangle {i} is malformed")));
            }
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                by_edge.entry((a.min(b), a.max(b))).or_default().push(i);
            }
        }
        if let Some((e, _)) = by_edge.iter().find(|(_, v)| v.len() != 2) {
            return Err(bad(&format!(
                "edge {}-{} is not on two triangles",
                e.0, e.1
            )));
        }
        // Orient by BFS: neighbouring triangles traverse their shared edge in
        // opposite directions.
        let mut oriented: Vec<Option<[VertexId; 3]>> = vec![None; faces.len()];
        let has = |f: &[VertexId; 3], a: VertexId, b: VertexId| {
            (0..3).any(|k| f[k] == a && f[(k + 1) % 3] == b)
        };
        for start in 0..faces.len() {
            if oriented[start].is_some() {
                continue;
            }
            if start > 0 {
                return Err(TriangulationError::NotASphere);
            }
            oriented[0] = Some(faces[0]);
            let mut queue = VecDeque::from([0usize]);
            while let Some(i) = queue.pop_front() {
                let f = oriented[i].unwrap();
                for k in 0..3 {
                    let (a, b) = (f[k], f[(k + 1) % 3]);
                    for &j in &by_edge[&(a.min(b), a.max(b))] {
                        if j == i {
                            continue;
                        }
                        let g = faces[j];
                        let want = if has(&g, b, a) { g } else { [g[0], g[2], g[1]] };
                        match oriented[j] {
                            None => {
                                oriented[j] = Some(want);
                                queue.push_back(j);
                            }
                            Some(o) if !has(&o, b, a) => {
                                return Err(bad("not orientable"));
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        // Face (a, b, c) means succ_b(a) = c.
        let mut succ: Vec<BTreeMap<VertexId, VertexId>> = vec![BTreeMap::new(); n];
        for f in oriented.into_iter().flatten() {
            for k in 0..3 {
                let (a, b, c) = (f[k], f[(k + 1) % 3], f[(k + 2) % 3]);
                if succ[b].insert(a, c).is_some() {
                    return Err(bad("corner used twice"));
                }
            }
        }
        let mut rot = Vec::with_capacity(n);
        for (v, s) in succ.iter().enumerate() {
            let Some((&first, _)) = s.iter().next() else {
                return Err(bad(&format!("vertex {v} is on no triangle")));
            };
            let mut r = vec![first];
            let mut cur = s[&first];
            while cur != first {
                r.push(cur);
                cur = *s.get(&cur).ok_or_else(|| bad("broken vertex link"))?;
                if r.len() > s.len() {
                    return Err(bad("vertex link is not a cycle"));
                }
            }
            if r.len() != s.len() {
                return Err(bad(&format!("vertex {v} is pinched")));
            }
            rot.push(r);
        }
        let t = Triangulation { rot };
        let (v, e, f) = (n as i64, t.edge_count() as i64, faces.len() as i64);
        if v - e + f != 2 {
            return Err(TriangulationError::NotASphere);
        }
        Ok(t)
    }

    /// Canonical code: identical for triangulations that agree up to
    /// relabelling and reflection.
    pub fn canonical_code(&self) -> Vec<u32> {
        let mut best: Option<Vec<u32>> = None;
        for u in 0..self.rot.len() {
            for &v in &self.rot[u] {
                for mirror in [false, true] {
                    let code = self.code_from(u, v, mirror);
                    if best.as_ref().is_none_or(|b| code < *b) {
                        best = Some(code);
                    }
                }
            }
        }
        best.unwrap_or_default()
    }

    fn code_from(&self, root: VertexId, first: VertexId, mirror: bool) -> Vec<u32> {
        let n = self.rot.len();
        let mut num = vec![u32::MAX; n];
        let mut anchor = vec![usize::MAX; n];
        num[root] = 0;
        anchor[root] = first;
        let mut next = 1;
        let mut queue = VecDeque::from([root]);
        let mut code = Vec::with_capacity(2 * self.edge_count() + n);
        while let Some(v) = queue.pop_front() {
            let r = &self.rot[v];
            let k = r.len();
            let start = self.pos(v, anchor[v]);
            for i in 0..k {
                let idx = if mirror {
                    (start + k - i) % k
                } else {
                    (start + i) % k
                };
                let w = r[idx];
                if num[w] == u32::MAX {
                    num[w] = next;
                    next += 1;
                    anchor[w] = v;
                    queue.push_back(w);
                }
                code.push(num[w]);
            }
            code.push(u32::MAX);
        }
        code
    }

    /// All triangulations (simple, 3-connected) with `n >= 4` vertices up to
    /// isomorphism and reflection, by search over the edge-flip graph.
    pub fn enumerate(n: usize) -> Vec<Triangulation> {
        assert!(n >= 4, "triangulations need at least 4 vertices");
        let mut start = Self::triangle();
        start.insert_vertex([0, 1, 2]);
        while start.vertex_count() < n {
            let f = start.faces()[0];
            start.insert_vertex(f);
        }
        let mut seen = HashSet::new();
        seen.insert(start.canonical_code());
        let mut out = vec![start.clone()];
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            for a in 0..n {
                for &b in &t.rot[a] {
                    if a > b || !t.can_flip(a, b) {
                        continue;
                    }
                    let mut f = t.clone();
                    f.flip(a, b);
                    if seen.insert(f.canonical_code()) {
                        out.push(f.clone());
                        queue.push_back(f);
                    }
                }
            }
        }
        out
    }
}
