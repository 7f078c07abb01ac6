//! Vertex colouring of maximal planar graphs: Kempe chains, Kempe's
//! reinsertion algorithm with impasse detection, impasse resolution, the
//! triangulated-ring generator of twin bad examples, and decomposition
//! checks.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{RotationSystem, VertexId};
use crate::oracle;
use crate::triangulation::Triangulation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KempeError {
    #[error("graph is not maximal planar: {0}")]
    NotMaximalPlanar(String),
    #[error("malformed instance: {0}")]
    MalformedInstance(String),
    #[error("no resolution within {moves} moves ({states} states examined)")]
    SearchExhausted { moves: usize, states: usize },
    #[error("ring cycles have odd length")]
    OddCycleRing,
    #[error("ring is not a beta-triangulation")]
    NotBeta,
    #[error("ring size must be 4 or 6, got {0}")]
    UnsupportedRingSize(usize),
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(rename_all = "lowercase")]
pub enum VColor {
    #[default]
    White,
    Red,
    Blue,
    Yellow,
    Green,
}

impl VColor {
    pub const PALETTE: [VColor; 4] = [VColor::Red, VColor::Blue, VColor::Yellow, VColor::Green];

    pub fn name(self) -> &'static str {
        match self {
            VColor::White => "white",
            VColor::Red => "red",
            VColor::Blue => "blue",
            VColor::Yellow => "yellow",
            VColor::Green => "green",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "white" => Some(VColor::White),
            "red" => Some(VColor::Red),
            "blue" => Some(VColor::Blue),
            "yellow" => Some(VColor::Yellow),
            "green" => Some(VColor::Green),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            VColor::White => 'W',
            VColor::Red => 'R',
            VColor::Blue => 'B',
            VColor::Yellow => 'Y',
            VColor::Green => 'G',
        }
    }

    /// Oracle index: White 0, palette 1..=4.
    pub fn index(self) -> u8 {
        match self {
            VColor::White => 0,
            VColor::Red => 1,
            VColor::Blue => 2,
            VColor::Yellow => 3,
            VColor::Green => 4,
        }
    }

    pub fn from_index(i: u8) -> Self {
        match i {
            1 => VColor::Red,
            2 => VColor::Blue,
            3 => VColor::Yellow,
            4 => VColor::Green,
            _ => VColor::White,
        }
    }
}

/// Plane triangulation: simple, every face a triangle, `E = 3V - 6`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalPlanarGraph {
    embedding: RotationSystem,
    adjacency: Vec<Vec<VertexId>>,
}

impl MaximalPlanarGraph {
    pub fn from_embedding(embedding: RotationSystem) -> Result<Self, KempeError> {
        let n = embedding.vertex_count();
        if n < 3 {
            return Err(KempeError::NotMaximalPlanar(format!("{n} vertices")));
        }
        if n > 3 && embedding.edge_count() != 3 * n - 6 {
            return Err(KempeError::NotMaximalPlanar(format!(
                "{} edges, expected {}",
                embedding.edge_count(),
                3 * n - 6
            )));
        }
        if let Some(f) = embedding.faces().iter().position(|f| f.len() != 3) {
            return Err(KempeError::NotMaximalPlanar(format!(
                "face {f} has {} sides",
                embedding.face(f).len()
            )));
        }
        let adjacency = embedding.simple_adjacency();
        let simple_edges: usize = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        if simple_edges != embedding.edge_count() {
            return Err(KempeError::NotMaximalPlanar(
                "loops or parallel edges".into(),
            ));
        }
        Ok(MaximalPlanarGraph {
            embedding,
            adjacency,
        })
    }

    pub fn from_neighbor_rotations(rot: &[Vec<VertexId>]) -> Result<Self, KempeError> {
        let rs = RotationSystem::from_neighbor_rotations(rot)
            .map_err(|e| KempeError::NotMaximalPlanar(e.to_string()))?;
        Self::from_embedding(rs)
    }

    pub fn from_triangulation(t: &Triangulation) -> Self {
        Self::from_embedding(t.to_rotation_system()).expect("triangulations are maximal planar")
    }

    pub fn n(&self) -> usize {
        self.embedding.vertex_count()
    }

    pub fn embedding(&self) -> &RotationSystem {
        &self.embedding
    }

    /// Sorted neighbour lists.
    pub fn adjacency(&self) -> &[Vec<VertexId>] {
        &self.adjacency
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn adjacent(&self, a: VertexId, b: VertexId) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Neighbours of `v` in rotation order.
    pub fn rotation(&self, v: VertexId) -> Vec<VertexId> {
        self.embedding
            .rotation(v)
            .iter()
            .map(|&d| self.embedding.head(d))
            .collect()
    }

    /// Triangular faces as vertex triples.
    pub fn triangles(&self) -> Vec<[VertexId; 3]> {
        self.embedding
            .faces()
            .iter()
            .map(|f| {
                [
                    self.embedding.origin(f.darts[0]),
                    self.embedding.origin(f.darts[1]),
                    self.embedding.origin(f.darts[2]),
                ]
            })
            .collect()
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for (v, ns) in self.adjacency.iter().enumerate() {
            for &w in ns {
                if v < w {
                    out.push((v, w));
                }
            }
        }
        out
    }
}

/// Vertex colouring; White means uncoloured. `undecided` marks the vertex
/// awaiting a colour, if any.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexColoring {
    colors: Vec<VColor>,
    pub undecided: Option<VertexId>,
}

impl VertexColoring {
    pub fn all_white(n: usize) -> Self {
        VertexColoring {
            colors: vec![VColor::White; n],
            undecided: None,
        }
    }

    pub fn from_colors(colors: Vec<VColor>) -> Self {
        let undecided = colors.iter().position(|&c| c == VColor::White);
        VertexColoring { colors, undecided }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn get(&self, v: VertexId) -> VColor {
        self.colors[v]
    }

    pub fn set(&mut self, v: VertexId, c: VColor) {
        self.colors[v] = c;
    }

    pub fn colors(&self) -> &[VColor] {
        &self.colors
    }

    pub fn is_proper(&self, g: &MaximalPlanarGraph) -> bool {
        g.edges().iter().all(|&(a, b)| {
            let (ca, cb) = (self.colors[a], self.colors[b]);
            ca == VColor::White || ca != cb
        })
    }

    pub fn is_complete(&self) -> bool {
        self.colors.iter().all(|&c| c != VColor::White)
    }

    pub fn oracle_colors(&self) -> Vec<u8> {
        self.colors.iter().map(|c| c.index()).collect()
    }

    /// Distinct non-White colours among the neighbours of `v`.
    pub fn neighbor_colors(&self, g: &MaximalPlanarGraph, v: VertexId) -> BTreeSet<VColor> {
        g.adjacency()[v]
            .iter()
            .map(|&w| self.colors[w])
            .filter(|&c| c != VColor::White)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KempeChainV {
    pub vertices: Vec<VertexId>,
    pub pair: (VColor, VColor),
}

impl KempeChainV {
    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }
}

/// Maximal connected set of vertices coloured within `pair` containing
/// `start`, in breadth-first order.
pub fn kempe_chain(
    g: &MaximalPlanarGraph,
    coloring: &VertexColoring,
    start: VertexId,
    pair: (VColor, VColor),
) -> KempeChainV {
    let inside = |v: VertexId| coloring.get(v) == pair.0 || coloring.get(v) == pair.1;
    let mut vertices = Vec::new();
    if inside(start) {
        let mut seen = vec![false; g.n()];
        seen[start] = true;
        vertices.push(start);
        let mut i = 0;
        while i < vertices.len() {
            let v = vertices[i];
            i += 1;
            for &w in &g.adjacency()[v] {
                if !seen[w] && inside(w) {
                    seen[w] = true;
                    vertices.push(w);
                }
            }
        }
    }
    KempeChainV { vertices, pair }
}

/// Exchanges the two colours on the chain.
pub fn kempe_switch(coloring: &VertexColoring, chain: &KempeChainV) -> VertexColoring {
    let mut out = coloring.clone();
    let (a, b) = chain.pair;
    for &v in &chain.vertices {
        let c = coloring.get(v);
        out.set(
            v,
            if c == a {
                b
            } else if c == b {
                a
            } else {
                c
            },
        );
    }
    out
}

/// One switch (or pair of simultaneous switches) tried at an undecided
/// vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchAttempt {
    pub description: String,
    pub chains: Vec<KempeChainV>,
    /// Neighbour colours after the switch, in rotation order.
    pub neighbor_colors_after: Vec<VColor>,
    pub proper: bool,
    /// The neighbourhood uses at most three colours afterwards.
    pub freed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpasseTrace {
    pub vertex: VertexId,
    pub neighbors: Vec<VertexId>,
    pub neighbor_colors: Vec<VColor>,
    pub attempts: Vec<SwitchAttempt>,
    pub coloring: VertexColoring,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum KempeOutcome {
    Colored(VertexColoring),
    Impasse(ImpasseTrace),
}

const PAIRS: [(VColor, VColor); 6] = [
    (VColor::Red, VColor::Blue),
    (VColor::Red, VColor::Yellow),
    (VColor::Red, VColor::Green),
    (VColor::Blue, VColor::Yellow),
    (VColor::Blue, VColor::Green),
    (VColor::Yellow, VColor::Green),
];

fn attempt(
    g: &MaximalPlanarGraph,
    coloring: &VertexColoring,
    v: VertexId,
    chains: Vec<KempeChainV>,
    description: String,
) -> (SwitchAttempt, VertexColoring) {
    let mut after = coloring.clone();
    for chain in &chains {
        for &w in &chain.vertices {
            let c = coloring.get(w);
            let (a, b) = chain.pair;
            after.set(
                w,
                if c == a {
                    b
                } else if c == b {
                    a
                } else {
                    c
                },
            );
        }
    }
    let rotation = g.rotation(v);
    let neighbor_colors_after: Vec<VColor> = rotation.iter().map(|&w| after.get(w)).collect();
    let proper = after.is_proper(g);
    let freed = proper && after.neighbor_colors(g, v).len() <= 3;
    (
        SwitchAttempt {
            description,
            chains,
            neighbor_colors_after,
            proper,
            freed,
        },
        after,
    )
}

/// Every single chain switch that touches the neighbourhood of `v`, each
/// applied to the original colouring.
fn single_switch_attempts(
    g: &MaximalPlanarGraph,
    coloring: &VertexColoring,
    v: VertexId,
) -> Vec<(SwitchAttempt, VertexColoring)> {
    let mut out = Vec::new();
    for pair in PAIRS {
        let mut seen: Vec<Vec<VertexId>> = Vec::new();
        for w in g.rotation(v) {
            let chain = kempe_chain(g, coloring, w, pair);
            if chain.vertices.is_empty() {
                continue;
            }
            let mut key = chain.vertices.clone();
            key.sort_unstable();
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            let desc = format!(
                "switch ({},{}) chain from {w}",
                pair.0.letter(),
                pair.1.letter()
            );
            out.push(attempt(g, coloring, v, vec![chain], desc));
        }
    }
    out
}

/// Kempe's simultaneous double switch for a degree-5 vertex whose repeated
/// colour sits at two non-adjacent positions of its rotation.
fn double_switch_attempt(
    g: &MaximalPlanarGraph,
    coloring: &VertexColoring,
    v: VertexId,
) -> Option<(SwitchAttempt, VertexColoring)> {
    let rot: Vec<VertexId> = g
        .rotation(v)
        .into_iter()
        .filter(|&w| coloring.get(w) != VColor::White)
        .collect();
    if rot.len() != 5 {
        return None;
    }
    let cols: Vec<VColor> = rot.iter().map(|&w| coloring.get(w)).collect();
    let a = (0..5).find(|&i| cols[i] == cols[(i + 2) % 5])?;
    let (na, nc) = (rot[a], rot[(a + 2) % 5]);
    let (x, y) = (rot[(a + 3) % 5], rot[(a + 4) % 5]);
    let r = cols[a];
    let (cx, cy) = (coloring.get(x), coloring.get(y));
    // Each repeated vertex swaps with the colour of the neighbour it does
    // not touch along the rotation.
    let first = kempe_chain(g, coloring, na, (r, cx));
    let second = kempe_chain(g, coloring, nc, (r, cy));
    let desc = format!(
        "simultaneous ({},{}) from {na} and ({},{}) from {nc}",
        r.letter(),
        cx.letter(),
        r.letter(),
        cy.letter()
    );
    Some(attempt(g, coloring, v, vec![first, second], desc))
}

fn first_free(coloring: &VertexColoring, g: &MaximalPlanarGraph, v: VertexId) -> Option<VColor> {
    let used = coloring.neighbor_colors(g, v);
    VColor::PALETTE.into_iter().find(|c| !used.contains(c))
}

/// Colours the single undecided vertex `v` by Kempe's argument, or reports
/// the impasse.
pub fn kempe_insert(
    g: &MaximalPlanarGraph,
    coloring: &VertexColoring,
    v: VertexId,
) -> Result<VertexColoring, ImpasseTrace> {
    if let Some(c) = first_free(coloring, g, v) {
        let mut out = coloring.clone();
        out.set(v, c);
        out.undecided = None;
        return Ok(out);
    }
    let mut attempts = Vec::new();
    let mut tries = single_switch_attempts(g, coloring, v);
    tries.extend(double_switch_attempt(g, coloring, v));
    for (att, after) in tries {
        let freed = att.freed;
        attempts.push(att);
        if freed {
            let mut out = after;
            let c = first_free(&out, g, v).expect("switch freed a colour");
            out.set(v, c);
            out.undecided = None;
            return Ok(out);
        }
    }
    let rotation = g.rotation(v);
    Err(ImpasseTrace {
        vertex: v,
        neighbor_colors: rotation.iter().map(|&w| coloring.get(w)).collect(),
        neighbors: rotation,
        attempts,
        coloring: VertexColoring {
            colors: coloring.colors.clone(),
            undecided: Some(v),
        },
    })
}

/// Smallest-last vertex order: repeatedly remove a vertex of minimum
/// remaining degree (lowest id on ties).
pub fn removal_order(g: &MaximalPlanarGraph) -> Vec<VertexId> {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut gone = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !gone[v])
            .min_by_key(|&v| (deg[v], v))
            .expect("vertices remain");
        gone[v] = true;
        order.push(v);
        for &w in &g.adjacency()[v] {
            if !gone[w] {
                deg[w] -= 1;
            }
        }
    }
    order
}

/// Kempe's induction: remove low-degree vertices, then reinsert them in
/// reverse order, switching chains when no colour is free.
pub fn kempe_four_color(g: &MaximalPlanarGraph) -> KempeOutcome {
    let mut coloring = VertexColoring::all_white(g.n());
    for v in removal_order(g).into_iter().rev() {
        match kempe_insert(g, &coloring, v) {
            Ok(next) => coloring = next,
            Err(trace) => return KempeOutcome::Impasse(trace),
        }
    }
    KempeOutcome::Colored(coloring)
}

/// Evidence gathered by [`is_impasse`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpasseEvidence {
    pub vertex: VertexId,
    pub neighbor_colors: Vec<VColor>,
    pub attempts: Vec<SwitchAttempt>,
}

fn check_instance(
    g: &MaximalPlanarGraph,
    partial: &VertexColoring,
) -> Result<VertexId, KempeError> {
    if partial.len() != g.n() {
        return Err(KempeError::MalformedInstance(
            "coloring size mismatch".into(),
        ));
    }
    let v = partial
        .undecided
        .ok_or_else(|| KempeError::MalformedInstance("no undecided vertex".into()))?;
    if partial.get(v) != VColor::White {
        return Err(KempeError::MalformedInstance(format!(
            "undecided vertex {v} is coloured"
        )));
    }
    if (0..g.n()).any(|w| w != v && partial.get(w) == VColor::White) {
        return Err(KempeError::MalformedInstance(
            "more than one uncoloured vertex".into(),
        ));
    }
    if !partial.is_proper(g) {
        return Err(KempeError::MalformedInstance(
            "coloring is not proper".into(),
        ));
    }
    Ok(v)
}

/// True when no single Kempe switch touching the neighbourhood of the
/// undecided vertex, nor Kempe's simultaneous double switch, leaves the
/// neighbourhood with at most three colours.
pub fn is_impasse(
    g: &MaximalPlanarGraph,
    partial: &VertexColoring,
) -> Result<(bool, ImpasseEvidence), KempeError> {
    let v = check_instance(g, partial)?;
    let neighbor_colors = g.rotation(v).iter().map(|&w| partial.get(w)).collect();
    if partial.neighbor_colors(g, v).len() < 4 {
        return Ok((
            false,
            ImpasseEvidence {
                vertex: v,
                neighbor_colors,
                attempts: Vec::new(),
            },
        ));
    }
    let mut attempts: Vec<SwitchAttempt> = single_switch_attempts(g, partial, v)
        .into_iter()
        .map(|(a, _)| a)
        .collect();
    attempts.extend(double_switch_attempt(g, partial, v).map(|(a, _)| a));
    let impasse = !attempts.iter().any(|a| a.freed);
    Ok((
        impasse,
        ImpasseEvidence {
            vertex: v,
            neighbor_colors,
            attempts,
        },
    ))
}

/// Default number of moves for [`resolve_impasse`].
pub const RESOLVE_MOVES: usize = 4;
const RESOLVE_STATES: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub coloring: VertexColoring,
    /// Moves in order: Kempe switches and joker recolourings.
    pub moves: Vec<String>,
}

/// Breadth-first search over at most `k` moves. A move is a Kempe switch of
/// any chain meeting the undecided vertex's neighbourhood or a conflict, or
/// a joker: one neighbour takes another colour, possibly creating a
/// conflict for later switches to repair. The goal is a proper colouring
/// with a colour free at the undecided vertex.
pub fn resolve_impasse(
    g: &MaximalPlanarGraph,
    partial: &VertexColoring,
    k: usize,
) -> Result<Resolution, KempeError> {
    if partial.is_complete() && partial.is_proper(g) {
        return Ok(Resolution {
            coloring: partial.clone(),
            moves: Vec::new(),
        });
    }
    let v = check_instance(g, partial)?;
    let finish = |c: &VertexColoring| -> Option<VertexColoring> {
        if !c.is_proper(g) {
            return None;
        }
        let free = first_free(c, g, v)?;
        let mut out = c.clone();
        out.set(v, free);
        out.undecided = None;
        Some(out)
    };
    let mut seen: HashSet<Vec<VColor>> = HashSet::new();
    seen.insert(partial.colors.clone());
    let mut frontier: Vec<(VertexColoring, Vec<String>)> = vec![(partial.clone(), Vec::new())];
    let mut states = 0;
    for depth in 0..=k {
        for (state, moves) in &frontier {
            if let Some(out) = finish(state) {
                return Ok(Resolution {
                    coloring: out,
                    moves: moves.clone(),
                });
            }
        }
        if depth == k {
            break;
        }
        let mut next = Vec::new();
        for (state, moves) in &frontier {
            let mut focus: BTreeSet<VertexId> = g.adjacency()[v].iter().copied().collect();
            for (a, b) in g.edges() {
                if a != v && b != v && state.get(a) == state.get(b) {
                    focus.insert(a);
                    focus.insert(b);
                }
            }
            let mut succ: Vec<(VertexColoring, String)> = Vec::new();
            for pair in PAIRS {
                let mut done: Vec<VertexId> = Vec::new();
                for &w in &focus {
                    if done.contains(&w) {
                        continue;
                    }
                    let chain = kempe_chain(g, state, w, pair);
                    if chain.vertices.is_empty() {
                        continue;
                    }
                    done.extend(chain.vertices.iter().copied());
                    succ.push((
                        kempe_switch(state, &chain),
                        format!(
                            "switch ({},{}) chain from {w}",
                            pair.0.letter(),
                            pair.1.letter()
                        ),
                    ));
                }
            }
            for &w in &g.adjacency()[v] {
                for c in VColor::PALETTE {
                    if c != state.get(w) {
                        let mut s = state.clone();
                        s.set(w, c);
                        succ.push((s, format!("joker {} at {w}", c.letter())));
                    }
                }
            }
            for (s, m) in succ {
                states += 1;
                if states > RESOLVE_STATES {
                    return Err(KempeError::SearchExhausted { moves: k, states });
                }
                if seen.insert(s.colors.clone()) {
                    let mut mv = moves.clone();
                    mv.push(m);
                    next.push((s, mv));
                }
            }
        }
        frontier = next;
    }
    Err(KempeError::SearchExhausted { moves: k, states })
}

/// Two vertex-disjoint cycles joined by triangles, each triangle having one
/// edge on a cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulatedRing {
    pub vertex_count: usize,
    pub inner: Vec<VertexId>,
    pub outer: Vec<VertexId>,
    pub triangles: Vec<[VertexId; 3]>,
    pub beta: bool,
}

fn cycle_edges(cycle: &[VertexId]) -> BTreeSet<(VertexId, VertexId)> {
    (0..cycle.len())
        .map(|i| {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            (a.min(b), a.max(b))
        })
        .collect()
}

impl TriangulatedRing {
    pub fn new(
        vertex_count: usize,
        inner: Vec<VertexId>,
        outer: Vec<VertexId>,
        triangles: Vec<[VertexId; 3]>,
    ) -> Self {
        let mut ring = TriangulatedRing {
            vertex_count,
            inner,
            outer,
            triangles,
            beta: false,
        };
        let mut cycles = cycle_edges(&ring.inner);
        cycles.extend(cycle_edges(&ring.outer));
        ring.beta = check_triangles(&ring.triangles, &cycles);
        ring
    }

    /// The ring with `k` vertices on each cycle: inner `u_i` is `i`, outer
    /// `v_i` is `k + i`; `v_i` is joined to `u_i` and `u_{i+1}`.
    pub fn standard(k: usize) -> Self {
        let u = |i: usize| i % k;
        let v = |i: usize| k + i % k;
        let mut triangles = Vec::new();
        for i in 0..k {
            triangles.push([v(i), u(i), u(i + 1)]);
            triangles.push([v(i), v(i + 1), u(i + 1)]);
        }
        Self::new(
            2 * k,
            (0..k).map(u).collect(),
            (0..k).map(v).collect(),
            triangles,
        )
    }
}

fn check_triangles(triangles: &[[VertexId; 3]], chosen: &BTreeSet<(VertexId, VertexId)>) -> bool {
    triangles.iter().all(|t| {
        (0..3)
            .filter(|&i| {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                chosen.contains(&(a.min(b), a.max(b)))
            })
            .count()
            == 1
    })
}

/// Inner cycle alternates Blue/Red, outer cycle alternates Yellow/Green.
pub fn color_triangulated_ring(ring: &TriangulatedRing) -> Result<VertexColoring, KempeError> {
    if ring.inner.len() % 2 == 1 || ring.outer.len() % 2 == 1 {
        return Err(KempeError::OddCycleRing);
    }
    if !ring.beta {
        return Err(KempeError::NotBeta);
    }
    let mut c = VertexColoring::all_white(ring.vertex_count);
    for (i, &u) in ring.inner.iter().enumerate() {
        c.set(
            u,
            if i % 2 == 0 {
                VColor::Blue
            } else {
                VColor::Red
            },
        );
    }
    for (i, &v) in ring.outer.iter().enumerate() {
        c.set(
            v,
            if i % 2 == 0 {
                VColor::Yellow
            } else {
                VColor::Green
            },
        );
    }
    c.undecided = None;
    Ok(c)
}

/// Every triangular face has exactly one edge in `g1 ∪ g2`.
pub fn check_beta_triangulation(
    g: &MaximalPlanarGraph,
    g1: &[(VertexId, VertexId)],
    g2: &[(VertexId, VertexId)],
) -> bool {
    let chosen: BTreeSet<(VertexId, VertexId)> = g1
        .iter()
        .chain(g2)
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    check_triangles(&g.triangles(), &chosen)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorGraph {
    pub ring_size: usize,
    pub ring: TriangulatedRing,
    pub e_i: (VertexId, VertexId),
    pub e_o: (VertexId, VertexId),
    pub graph: MaximalPlanarGraph,
    pub coloring: VertexColoring,
    /// Vertex names `u1.., v1..` by id.
    pub names: Vec<String>,
    pub triangles: Vec<[VertexId; 3]>,
}

impl GeneratorGraph {
    pub fn vertex(&self, name: &str) -> VertexId {
        self.names
            .iter()
            .position(|n| n == name)
            .unwrap_or_else(|| panic!("no vertex {name}"))
    }

    /// Inner cycle with the outer edge, and outer cycle with the inner
    /// edge: the two 2-coloured subgraphs.
    pub fn decomposition(&self) -> (Vec<(VertexId, VertexId)>, Vec<(VertexId, VertexId)>) {
        let mut g1: Vec<_> = cycle_edges(&self.ring.inner).into_iter().collect();
        g1.push(self.e_o);
        let mut g2: Vec<_> = cycle_edges(&self.ring.outer).into_iter().collect();
        g2.push(self.e_i);
        (g1, g2)
    }
}

/// Places an edge inside the inner cycle and another outside the outer
/// cycle of the standard ring, triangulates, and colours: inner cycle and
/// outer edge with Blue/Red, outer cycle and inner edge with Yellow/Green.
pub fn build_generator_graph(ring_size: usize) -> Result<GeneratorGraph, KempeError> {
    let k = ring_size;
    if k != 4 && k != 6 {
        return Err(KempeError::UnsupportedRingSize(k));
    }
    let ring = TriangulatedRing::standard(k);
    // Ids: u1..uk = 0..k, v1..vk = k..2k, inner edge (v_{k+1}, v_{k+2}),
    // outer edge (u_{k+1}, u_{k+2}).
    let u = |i: usize| (i - 1) % k;
    let v = |i: usize| k + (i - 1) % k;
    let (vi1, vi2, uo1, uo2) = (2 * k, 2 * k + 1, 2 * k + 2, 2 * k + 3);
    let half = k / 2;
    let mut triangles = ring.triangles.clone();
    // Inner edge: vi1 sees u_k, u_1..u_{half}; vi2 sees u_{half}..u_k.
    triangles.push([vi1, u(k), u(1)]);
    for i in 1..half {
        triangles.push([vi1, u(i), u(i + 1)]);
    }
    triangles.push([vi1, vi2, u(half)]);
    for i in half..k {
        triangles.push([vi2, u(i), u(i + 1)]);
    }
    triangles.push([vi2, vi1, u(k)]);
    // Outer edge: uo2 sees v_1..v_{k-1}; uo1 sees v_{k-1}, v_k, v_1.
    for i in 1..k - 1 {
        triangles.push([uo2, v(i), v(i + 1)]);
    }
    triangles.push([uo1, v(k - 1), v(k)]);
    triangles.push([uo1, v(k), v(1)]);
    triangles.push([uo1, uo2, v(1)]);
    triangles.push([uo1, uo2, v(k - 1)]);

    let n = 2 * k + 4;
    let t = Triangulation::from_faces(n, &triangles)
        .map_err(|e| KempeError::NotMaximalPlanar(e.to_string()))?;
    let graph = MaximalPlanarGraph::from_triangulation(&t);
    let mut coloring = color_triangulated_ring(&ring)?;
    coloring.colors.resize(n, VColor::White);
    coloring.set(vi1, VColor::Yellow);
    coloring.set(vi2, VColor::Green);
    coloring.set(uo1, VColor::Red);
    coloring.set(uo2, VColor::Blue);
    coloring.undecided = None;

    let mut names: Vec<String> = (1..=k).map(|i| format!("u{i}")).collect();
    names.extend((1..=k).map(|i| format!("v{i}")));
    names.push(format!("v{}", k + 1));
    names.push(format!("v{}", k + 2));
    names.push(format!("u{}", k + 1));
    names.push(format!("u{}", k + 2));

    let gen = GeneratorGraph {
        ring_size: k,
        ring: TriangulatedRing {
            vertex_count: n,
            ..ring
        },
        e_i: (vi1, vi2),
        e_o: (uo1, uo2),
        graph,
        coloring,
        names,
        triangles,
    };
    debug_assert!(gen.coloring.is_proper(&gen.graph));
    Ok(gen)
}

/// A bad example: a triangulation with one undecided degree-5 vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwinExample {
    pub graph: MaximalPlanarGraph,
    pub coloring: VertexColoring,
    pub apex: VertexId,
    /// Neighbours of the apex in cyclic order (the 5-face it fills).
    pub pentagon: Vec<VertexId>,
}

/// Removes two triangle-splitting edges at a common vertex `hub` (the edges
/// `hub-a` and `hub-b`) so that three triangles merge into a pentagon, then
/// fills it with a new vertex.
fn insert_apex(
    gen: &GeneratorGraph,
    hub: VertexId,
    a: VertexId,
    b: VertexId,
) -> Result<TwinExample, KempeError> {
    let removed = |t: &[VertexId; 3]| t.contains(&hub) && (t.contains(&a) || t.contains(&b));
    let merged: Vec<[VertexId; 3]> = gen.triangles.iter().copied().filter(removed).collect();
    if merged.len() != 3 {
        return Err(KempeError::MalformedInstance(format!(
            "edges {hub}-{a} and {hub}-{b} do not bound three triangles"
        )));
    }
    let mut kept: Vec<[VertexId; 3]> = gen
        .triangles
        .iter()
        .copied()
        .filter(|t| !removed(t))
        .collect();
    // Boundary of the merged pentagon: edges used by exactly one merged
    // triangle.
    let mut count = std::collections::BTreeMap::new();
    for t in &merged {
        for i in 0..3 {
            let (x, y) = (t[i], t[(i + 1) % 3]);
            *count.entry((x.min(y), x.max(y))).or_insert(0) += 1;
        }
    }
    let boundary: Vec<(VertexId, VertexId)> = count
        .into_iter()
        .filter(|&(_, c)| c == 1)
        .map(|(e, _)| e)
        .collect();
    let apex = gen.graph.n();
    for &(x, y) in &boundary {
        kept.push([apex, x, y]);
    }
    let t = Triangulation::from_faces(apex + 1, &kept)
        .map_err(|e| KempeError::NotMaximalPlanar(e.to_string()))?;
    let graph = MaximalPlanarGraph::from_triangulation(&t);
    let mut coloring = gen.coloring.clone();
    coloring.colors.push(VColor::White);
    coloring.undecided = Some(apex);
    let pentagon = graph.rotation(apex);
    Ok(TwinExample {
        graph,
        coloring,
        apex,
        pentagon,
    })
}

/// Which two edges to delete: both leave `hub`, towards `a` and `b`, which
/// must be adjacent so that three triangles merge into a pentagon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwinChoice {
    pub hub: String,
    pub a: String,
    pub b: String,
}

impl TwinChoice {
    fn new(hub: &str, a: &str, b: &str) -> Self {
        TwinChoice {
            hub: hub.into(),
            a: a.into(),
            b: b.into(),
        }
    }

    /// Default choices `(G1, G2)` for a ring size. For ring 6 the edges are
    /// `u3-v7, u3-v8` (inner face) and `v1-u7, v1-u8` (outer face). The
    /// analogous ring-4 pairs leave a free switch, so ring 4 uses
    /// `u4-u1, u4-v5` next to the inner edge and `v1-u5, v1-v4` next to the
    /// outer edge.
    pub fn defaults(ring_size: usize) -> (TwinChoice, TwinChoice) {
        if ring_size == 4 {
            (
                TwinChoice::new("u4", "u1", "v5"),
                TwinChoice::new("v1", "u5", "v4"),
            )
        } else {
            (
                TwinChoice::new("u3", "v7", "v8"),
                TwinChoice::new("v1", "u7", "u8"),
            )
        }
    }
}

fn lookup(gen: &GeneratorGraph, name: &str) -> Result<VertexId, KempeError> {
    gen.names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| KempeError::MalformedInstance(format!("no vertex {name}")))
}

pub fn derive_twin(gen: &GeneratorGraph, choice: &TwinChoice) -> Result<TwinExample, KempeError> {
    insert_apex(
        gen,
        lookup(gen, &choice.hub)?,
        lookup(gen, &choice.a)?,
        lookup(gen, &choice.b)?,
    )
}

/// Twin bad examples: trouble in the inner face (G1) and in the outer face
/// (G2), using the default edge choices.
pub fn derive_twin_bad_examples(
    gen: &GeneratorGraph,
) -> Result<(TwinExample, TwinExample), KempeError> {
    let (c1, c2) = TwinChoice::defaults(gen.ring_size);
    Ok((derive_twin(gen, &c1)?, derive_twin(gen, &c2)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPathDecomposition {
    /// Colour pairs of the two parts.
    pub pairs: [(VColor, VColor); 2],
    pub p1_vertices: Vec<VertexId>,
    pub p2_vertices: Vec<VertexId>,
    pub p1_edges: usize,
    pub p2_edges: usize,
    /// Both parts have maximum degree at most 2 (disjoint paths).
    pub paths: bool,
}

fn induced_forest(g: &MaximalPlanarGraph, members: &[bool]) -> Option<(usize, usize)> {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut edges = 0;
    let mut max_deg = 0;
    for v in 0..g.n() {
        if !members[v] {
            continue;
        }
        let d = g.adjacency()[v].iter().filter(|&&w| members[w]).count();
        max_deg = max_deg.max(d);
    }
    for (a, b) in g.edges() {
        if members[a] && members[b] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return None;
            }
            parent[ra] = rb;
            edges += 1;
        }
    }
    Some((edges, max_deg))
}

/// Looks for a colour pairing whose two induced 2-coloured subgraphs are
/// both acyclic; reports vertex and edge counts.
pub fn verify_two_path_decomposition(
    g: &MaximalPlanarGraph,
    coloring: &VertexColoring,
) -> Option<TwoPathDecomposition> {
    use VColor::*;
    let pairings = [
        [(Red, Blue), (Yellow, Green)],
        [(Red, Yellow), (Blue, Green)],
        [(Red, Green), (Blue, Yellow)],
    ];
    if !coloring.is_complete() || !coloring.is_proper(g) {
        return None;
    }
    for pairs in pairings {
        let part = |p: (VColor, VColor)| -> Vec<bool> {
            (0..g.n())
                .map(|v| coloring.get(v) == p.0 || coloring.get(v) == p.1)
                .collect()
        };
        let (m1, m2) = (part(pairs[0]), part(pairs[1]));
        let (Some((e1, d1)), Some((e2, d2))) = (induced_forest(g, &m1), induced_forest(g, &m2))
        else {
            continue;
        };
        return Some(TwoPathDecomposition {
            pairs,
            p1_vertices: (0..g.n()).filter(|&v| m1[v]).collect(),
            p2_vertices: (0..g.n()).filter(|&v| m2[v]).collect(),
            p1_edges: e1,
            p2_edges: e2,
            paths: d1 <= 2 && d2 <= 2,
        });
    }
    None
}

/// Exact 4-colouring of the graph by the oracle.
pub fn oracle_coloring(g: &MaximalPlanarGraph) -> Option<VertexColoring> {
    oracle::backtrack_four_color(g.adjacency())
        .map(|c| VertexColoring::from_colors(c.into_iter().map(VColor::from_index).collect()))
}

/// Searches proper colourings of `g - v` (v of degree 5) for one that is an
/// impasse at `v`, visiting at most `budget` search nodes. Colourings whose
/// neighbour colours in rotation order match `prefer` (up to rotation and
/// reflection) are returned first when found.
pub fn find_impasse(
    g: &MaximalPlanarGraph,
    v: VertexId,
    prefer: Option<&[VColor]>,
    budget: u64,
) -> Option<VertexColoring> {
    let n = g.n();
    // Graph without v: drop its edges.
    let adj: Vec<Vec<VertexId>> = (0..n)
        .map(|w| {
            if w == v {
                Vec::new()
            } else {
                g.adjacency()[w]
                    .iter()
                    .copied()
                    .filter(|&x| x != v)
                    .collect()
            }
        })
        .collect();
    let rotation = g.rotation(v);
    let mut fallback: Option<VertexColoring> = None;
    let mut found: Option<VertexColoring> = None;
    let _ = oracle::for_each_coloring(&adj, 4, budget, |cols| {
        let ring: BTreeSet<u8> = rotation.iter().map(|&w| cols[w]).collect();
        if ring.len() < 4 {
            return false;
        }
        // v itself got some colour in the search; blank it.
        let mut colors: Vec<VColor> = cols.iter().map(|&c| VColor::from_index(c)).collect();
        colors[v] = VColor::White;
        // Canonical renaming: try all 24 permutations only for the preferred
        // pattern check below.
        let candidate = VertexColoring {
            colors,
            undecided: Some(v),
        };
        let Ok((true, _)) = is_impasse(g, &candidate) else {
            return false;
        };
        if let Some(p) = prefer {
            if let Some(renamed) = rename_to_pattern(&candidate, &rotation, p) {
                found = Some(renamed);
                return true;
            }
            if fallback.is_none() {
                fallback = Some(candidate);
            }
            false
        } else {
            found = Some(candidate);
            true
        }
    });
    found.or(fallback)
}

/// Renames colours so that the neighbour colours read `pattern` along the
/// rotation (in some rotation or reflection), if possible.
fn rename_to_pattern(
    c: &VertexColoring,
    rotation: &[VertexId],
    pattern: &[VColor],
) -> Option<VertexColoring> {
    let k = rotation.len();
    if pattern.len() != k {
        return None;
    }
    let seq: Vec<VColor> = rotation.iter().map(|&w| c.get(w)).collect();
    for reflect in [false, true] {
        for shift in 0..k {
            let mut map: Vec<(VColor, VColor)> = Vec::new();
            let mut ok = true;
            for i in 0..k {
                let j = if reflect {
                    (shift + k - i) % k
                } else {
                    (shift + i) % k
                };
                let (from, to) = (seq[j], pattern[i]);
                match map.iter().find(|(f, _)| *f == from) {
                    Some(&(_, t)) if t != to => ok = false,
                    Some(_) => {}
                    None => {
                        if map.iter().any(|&(_, t)| t == to) {
                            ok = false;
                        } else {
                            map.push((from, to));
                        }
                    }
                }
                if !ok {
                    break;
                }
            }
            if !ok {
                continue;
            }
            // Complete the renaming to a permutation of the palette.
            for from in VColor::PALETTE {
                if !map.iter().any(|(f, _)| *f == from) {
                    let to = VColor::PALETTE
                        .into_iter()
                        .find(|t| !map.iter().any(|(_, x)| x == t))
                        .expect("palette has a free colour");
                    map.push((from, to));
                }
            }
            let colors = c
                .colors()
                .iter()
                .map(|&x| {
                    if x == VColor::White {
                        x
                    } else {
                        map.iter().find(|(f, _)| *f == x).map(|&(_, t)| t).unwrap()
                    }
                })
                .collect();
            return Some(VertexColoring {
                colors,
                undecided: c.undecided,
            });
        }
    }
    None
}

/// Breadth-first distances, used to pick far-away faces when growing
/// examples.
pub fn distances(g: &MaximalPlanarGraph, from: VertexId) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[from] = 0;
    let mut q = VecDeque::from([from]);
    while let Some(v) = q.pop_front() {
        for &w in &g.adjacency()[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                q.push_back(w);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> MaximalPlanarGraph {
        MaximalPlanarGraph::from_neighbor_rotations(&[
            vec![1, 2, 3],
            vec![0, 3, 2],
            vec![0, 1, 3],
            vec![0, 2, 1],
        ])
        .unwrap()
    }

    fn octahedron() -> MaximalPlanarGraph {
        let faces = [
            [0, 1, 2],
            [0, 2, 3],
            [0, 3, 4],
            [0, 4, 1],
            [5, 2, 1],
            [5, 3, 2],
            [5, 4, 3],
            [5, 1, 4],
        ];
        MaximalPlanarGraph::from_triangulation(&Triangulation::from_faces(6, &faces).unwrap())
    }

    #[test]
    fn kempe_on_small_graphs() {
        match kempe_four_color(&k4()) {
            KempeOutcome::Colored(c) => {
                assert!(c.is_proper(&k4()) && c.is_complete());
                let set: BTreeSet<VColor> = c.colors().iter().copied().collect();
                assert_eq!(set.len(), 4);
            }
            other => panic!("{other:?}"),
        }
        let o = octahedron();
        match kempe_four_color(&o) {
            KempeOutcome::Colored(c) => assert!(c.is_proper(&o) && c.is_complete()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn chain_and_switch() {
        let g = octahedron();
        let c = oracle_coloring(&g).unwrap();
        let chain = kempe_chain(&g, &c, 0, (c.get(0), c.get(1)));
        assert!(chain.contains(0));
        let once = kempe_switch(&c, &chain);
        assert!(once.is_proper(&g));
        assert_eq!(kempe_switch(&once, &chain), c);
    }

    #[test]
    fn beta_checks() {
        let g = k4();
        let edges = g.edges();
        for &(a, b) in &edges {
            let rest: Vec<VertexId> = (0..4).filter(|&x| x != a && x != b).collect();
            assert!(check_beta_triangulation(
                &g,
                &[(a, b)],
                &[(rest[0], rest[1])]
            ));
        }
        let o = octahedron();
        let t1 = [(0, 1), (1, 2), (0, 2)];
        let t2 = [(5, 3), (3, 4), (5, 4)];
        assert!(!check_beta_triangulation(&o, &t1, &t2));
    }

    #[test]
    fn rings() {
        for k in [4, 6] {
            let r = TriangulatedRing::standard(k);
            assert!(r.beta);
            let _ = color_triangulated_ring(&r).unwrap();
        }
        assert_eq!(
            color_triangulated_ring(&TriangulatedRing::standard(5)),
            Err(KempeError::OddCycleRing)
        );
    }

    #[test]
    fn k4_two_path() {
        let g = k4();
        let c = oracle_coloring(&g).unwrap();
        let d = verify_two_path_decomposition(&g, &c).unwrap();
        assert_eq!((d.p1_vertices.len(), d.p2_vertices.len()), (2, 2));
        assert_eq!((d.p1_edges, d.p2_edges), (1, 1));
    }
}
