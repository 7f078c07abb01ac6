//! The three-step map colouring: a maximal Brown set along the spiral, a
//! maximal Green set that leaves no spots, odd White ring blocking by
//! face-level Kempe switches, then a two-colouring of what is left.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{FaceId, VertexId};
use crate::oracle;
use crate::planar_map::{contract_small_faces, expand_small_faces, MapError, NormalMap};
use crate::spiral::{spiral_order, Direction, SpiralOrder};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(rename_all = "kebab-case")]
pub enum MapColor {
    #[default]
    White,
    Brown,
    Green,
    LightBlue,
    DarkBlue,
}

impl MapColor {
    pub const PALETTE: [MapColor; 4] = [
        MapColor::Brown,
        MapColor::Green,
        MapColor::LightBlue,
        MapColor::DarkBlue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MapColor::White => "white",
            MapColor::Brown => "brown",
            MapColor::Green => "green",
            MapColor::LightBlue => "light-blue",
            MapColor::DarkBlue => "dark-blue",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "white" => Some(MapColor::White),
            "brown" => Some(MapColor::Brown),
            "green" => Some(MapColor::Green),
            "light-blue" => Some(MapColor::LightBlue),
            "dark-blue" => Some(MapColor::DarkBlue),
            _ => None,
        }
    }

    /// Oracle colour index: White is 0, the palette is 1..=4.
    pub fn index(self) -> u8 {
        match self {
            MapColor::White => 0,
            MapColor::Brown => 1,
            MapColor::Green => 2,
            MapColor::LightBlue => 3,
            MapColor::DarkBlue => 4,
        }
    }

    pub fn from_index(i: u8) -> Self {
        match i {
            1 => MapColor::Brown,
            2 => MapColor::Green,
            3 => MapColor::LightBlue,
            4 => MapColor::DarkBlue,
            _ => MapColor::White,
        }
    }

    fn other_highland(self) -> Self {
        match self {
            MapColor::Brown => MapColor::Green,
            MapColor::Green => MapColor::Brown,
            c => c,
        }
    }
}

/// Face colouring where White means "not yet coloured".
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialMapColoring {
    colors: Vec<MapColor>,
}

impl PartialMapColoring {
    pub fn all_white(faces: usize) -> Self {
        PartialMapColoring {
            colors: vec![MapColor::White; faces],
        }
    }

    pub fn from_colors(colors: Vec<MapColor>) -> Self {
        PartialMapColoring { colors }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn get(&self, f: FaceId) -> MapColor {
        self.colors[f]
    }

    pub fn set(&mut self, f: FaceId, c: MapColor) {
        self.colors[f] = c;
    }

    pub fn colors(&self) -> &[MapColor] {
        &self.colors
    }

    pub fn faces_with(&self, c: MapColor) -> Vec<FaceId> {
        (0..self.colors.len())
            .filter(|&f| self.colors[f] == c)
            .collect()
    }

    pub fn count(&self, c: MapColor) -> usize {
        self.colors.iter().filter(|&&x| x == c).count()
    }

    pub fn is_complete(&self) -> bool {
        self.colors.iter().all(|&c| c != MapColor::White)
    }

    pub fn colors_used(&self) -> usize {
        MapColor::PALETTE
            .iter()
            .filter(|c| self.colors.contains(c))
            .count()
    }

    /// No two regions sharing a border carry the same non-White colour.
    pub fn is_proper(&self, map: &NormalMap) -> bool {
        self.colors.len() == map.face_count()
            && (0..map.face_count()).all(|f| {
                let c = self.colors[f];
                c == MapColor::White || map.neighbors(f).iter().all(|&g| self.colors[g] != c)
            })
    }

    pub fn oracle_colors(&self) -> Vec<u8> {
        self.colors.iter().map(|c| c.index()).collect()
    }

    fn has_neighbor(&self, map: &NormalMap, f: FaceId, c: MapColor) -> bool {
        map.neighbors(f).iter().any(|&g| self.colors[g] == c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColorError {
    #[error("step 2 is stuck with {spots} spot(s) and {triangles} White 3-ring(s)")]
    Stuck { spots: usize, triangles: usize },
    #[error("could not block odd White ring {ring:?}")]
    BlockingFailed { ring: Vec<FaceId> },
    #[error("White regions contain the odd cycle {cycle:?}")]
    NotBipartite { cycle: Vec<FaceId> },
    #[error("heuristic failed without fallback: {0}")]
    HeuristicFailed(String),
    #[error("sub-map has no surrounding ring")]
    NoSurroundingRing,
    #[error("sub-map is empty, disconnected or contains White regions")]
    InvalidSubmap,
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("output coloring failed verification")]
    VerificationFailed,
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub step: String,
    pub face: FaceId,
    pub color: MapColor,
    pub rule: String,
}

fn decide(log: &mut Vec<Decision>, step: &str, face: FaceId, color: MapColor, rule: &str) {
    log.push(Decision {
        step: step.to_string(),
        face,
        color,
        rule: rule.to_string(),
    });
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpotSet {
    pub spots: Vec<VertexId>,
}

impl SpotSet {
    pub fn len(&self) -> usize {
        self.spots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spots.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.spots.binary_search(&v).is_ok()
    }
}

fn is_spot(map: &NormalMap, col: &PartialMapColoring, v: VertexId) -> bool {
    map.vertex_faces(v)
        .iter()
        .all(|&f| col.get(f) == MapColor::White)
}

/// Corners whose three regions are all White.
pub fn compute_spots(map: &NormalMap, coloring: &PartialMapColoring) -> SpotSet {
    SpotSet {
        spots: (0..map.vertex_count())
            .filter(|&v| is_spot(map, coloring, v))
            .collect(),
    }
}

fn spot_count(map: &NormalMap, col: &PartialMapColoring) -> usize {
    (0..map.vertex_count())
        .filter(|&v| is_spot(map, col, v))
        .count()
}

fn face_spot_count(map: &NormalMap, col: &PartialMapColoring, f: FaceId) -> usize {
    map.face_vertices(f)
        .filter(|&v| is_spot(map, col, v))
        .count()
}

/// The subgraph of the map's edges joining two spots has no cycle. Parallel
/// edges count as a cycle.
pub fn spots_acyclic(map: &NormalMap, spots: &SpotSet) -> bool {
    let rs = map.embedding();
    let mut parent: Vec<usize> = (0..map.vertex_count()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in 0..map.edge_count() {
        let (a, b) = rs.endpoints(e);
        if spots.contains(a) && spots.contains(b) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
    }
    true
}

fn within_two(map: &NormalMap, f: FaceId) -> Vec<FaceId> {
    let mut seen = vec![false; map.face_count()];
    seen[f] = true;
    let mut out = Vec::new();
    for &g in map.neighbors(f) {
        if !seen[g] {
            seen[g] = true;
            out.push(g);
        }
        for &h in map.neighbors(g) {
            if !seen[h] {
                seen[h] = true;
                out.push(h);
            }
        }
    }
    out
}

/// Step 1: Brown the outer region, then keep Browning a White region with
/// no Brown neighbour, preferring the second neighbourhood of the last
/// Browned region, then the most sides, then spiral position.
pub fn step1_monochromatic(map: &NormalMap, spiral: &SpiralOrder) -> PartialMapColoring {
    step1_logged(map, spiral, &mut Vec::new())
}

fn step1_logged(
    map: &NormalMap,
    spiral: &SpiralOrder,
    log: &mut Vec<Decision>,
) -> PartialMapColoring {
    let mut col = PartialMapColoring::all_white(map.face_count());
    let outer = map.outer();
    col.set(outer, MapColor::Brown);
    decide(log, "step1", outer, MapColor::Brown, "outer");
    let eligible = |col: &PartialMapColoring, f: FaceId| {
        col.get(f) == MapColor::White && !col.has_neighbor(map, f, MapColor::Brown)
    };
    let key = |f: FaceId| (Reverse(map.face_size(f)), spiral.position(f), f);
    let mut last = outer;
    loop {
        let near: Vec<FaceId> = within_two(map, last)
            .into_iter()
            .filter(|&f| eligible(&col, f))
            .collect();
        let (pick, rule) = if let Some(&f) = near.iter().min_by_key(|&&f| key(f)) {
            (f, "second-neighbourhood")
        } else if let Some(&f) = spiral.order.iter().find(|&&f| eligible(&col, f)) {
            (f, "spiral")
        } else {
            break;
        };
        col.set(pick, MapColor::Brown);
        decide(log, "step1", pick, MapColor::Brown, rule);
        last = pick;
    }
    debug_assert!(col.is_proper(map));
    col
}

/// White regions that can no longer change during step 2: they touch both
/// a Brown and a Green region.
fn frozen(map: &NormalMap, col: &PartialMapColoring, f: FaceId) -> bool {
    col.get(f) == MapColor::White && col.has_neighbor(map, f, MapColor::Green)
}

/// Number of connected components of the frozen White regions that contain
/// an odd cycle.
fn odd_frozen_components(map: &NormalMap, col: &PartialMapColoring) -> usize {
    let n = map.face_count();
    let mut side = vec![u8::MAX; n];
    let mut odd = 0;
    for s in 0..n {
        if side[s] != u8::MAX || !frozen(map, col, s) {
            continue;
        }
        side[s] = 0;
        let mut stack = vec![s];
        let mut bad = false;
        while let Some(f) = stack.pop() {
            for &g in map.neighbors(f) {
                if !frozen(map, col, g) {
                    continue;
                }
                if side[g] == u8::MAX {
                    side[g] = 1 - side[f];
                    stack.push(g);
                } else if side[g] == side[f] {
                    bad = true;
                }
            }
        }
        odd += bad as usize;
    }
    odd
}

/// Spots none of whose three regions can still turn Green.
fn dead_spots(map: &NormalMap, col: &PartialMapColoring) -> usize {
    (0..map.vertex_count())
        .filter(|&v| {
            let fs = map.vertex_faces(v);
            fs.iter().all(|&f| col.get(f) == MapColor::White)
                && fs
                    .iter()
                    .all(|&f| col.has_neighbor(map, f, MapColor::Green))
        })
        .count()
}

/// Greedy Green phase. Returns after no further region can be Greened.
fn green_greedy(
    map: &NormalMap,
    spiral: &SpiralOrder,
    col: &mut PartialMapColoring,
    log: &mut Vec<Decision>,
) {
    loop {
        let base = odd_frozen_components(map, col);
        let greenable =
            |f: FaceId| col.get(f) == MapColor::White && !col.has_neighbor(map, f, MapColor::Green);
        // Regions that are the last Greenable region of some spot.
        let mut forced = vec![false; map.face_count()];
        for v in 0..map.vertex_count() {
            if is_spot(map, col, v) {
                let open: Vec<FaceId> = map
                    .vertex_faces(v)
                    .into_iter()
                    .filter(|&f| greenable(f))
                    .collect();
                if open.len() == 1 {
                    forced[open[0]] = true;
                }
            }
        }
        let mut best = None;
        for f in 0..map.face_count() {
            if col.get(f) != MapColor::White || col.has_neighbor(map, f, MapColor::Green) {
                continue;
            }
            let spots = face_spot_count(map, col, f);
            col.set(f, MapColor::Green);
            let penalty = odd_frozen_components(map, col);
            let dead = dead_spots(map, col);
            col.set(f, MapColor::White);
            if spots == 0 && penalty > base {
                continue;
            }
            let size = map.face_size(f);
            let key = (
                dead,
                !forced[f],
                Reverse(spots),
                penalty,
                size % 2,
                Reverse(size),
                spiral.position(f),
                f,
            );
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, f));
            }
        }
        let Some((key, f)) = best else { return };
        col.set(f, MapColor::Green);
        let rule = if key.2 .0 > 0 { "spots" } else { "maximal" };
        decide(log, "step2", f, MapColor::Green, rule);
    }
}

/// Three mutually adjacent White regions.
fn white_triangle(map: &NormalMap, col: &PartialMapColoring) -> Option<[FaceId; 3]> {
    for a in 0..map.face_count() {
        if col.get(a) != MapColor::White {
            continue;
        }
        for &b in map.neighbors(a) {
            if b <= a || col.get(b) != MapColor::White {
                continue;
            }
            for &c in map.neighbors(b) {
                if c > b && col.get(c) == MapColor::White && map.are_adjacent(a, c) {
                    return Some([a, b, c]);
                }
            }
        }
    }
    None
}

fn count_white_triangles(map: &NormalMap, col: &PartialMapColoring) -> usize {
    let mut n = 0;
    for a in 0..map.face_count() {
        if col.get(a) != MapColor::White {
            continue;
        }
        for &b in map.neighbors(a) {
            if b <= a || col.get(b) != MapColor::White {
                continue;
            }
            for &c in map.neighbors(b) {
                if c > b && col.get(c) == MapColor::White && map.are_adjacent(a, c) {
                    n += 1;
                }
            }
        }
    }
    n
}

/// Step 2: Green regions greedily, most spots first; then repair any spot or
/// White 3-ring left over with face-level Kempe switches.
pub fn step2_dichromatic(
    map: &NormalMap,
    m_b: &PartialMapColoring,
    spiral: &SpiralOrder,
) -> Result<PartialMapColoring, ColorError> {
    step2_logged(map, m_b, spiral, &mut Vec::new())
}

fn step2_logged(
    map: &NormalMap,
    m_b: &PartialMapColoring,
    spiral: &SpiralOrder,
    log: &mut Vec<Decision>,
) -> Result<PartialMapColoring, ColorError> {
    let mut col = m_b.clone();
    let targets = [MapColor::Green, MapColor::Brown];
    let mut rounds = map.face_count();
    loop {
        green_greedy(map, spiral, &mut col, log);
        let spots = compute_spots(map, &col);
        let trouble: Vec<FaceId> = if let Some(&v) = spots.spots.first() {
            map.vertex_faces(v).to_vec()
        } else if let Some(t) = white_triangle(map, &col) {
            t.to_vec()
        } else {
            break;
        };
        let rule = if spots.is_empty() {
            "ring-repair"
        } else {
            "spot-repair"
        };
        let mut fixed = false;
        // One budget per trouble spot, shared by its three regions.
        let budget = &mut map.face_count().pow(2);
        if rounds > 0 {
            rounds -= 1;
            for &f in &trouble {
                let max_spots = spots.len().saturating_sub(1);
                if let Some(next) = free_face(map, &col, f, &targets, max_spots, budget) {
                    log_changes(log, "step2", &col, &next, rule);
                    col = next;
                    fixed = true;
                    break;
                }
            }
        }
        if !fixed {
            return Err(ColorError::Stuck {
                spots: spots.len(),
                triangles: count_white_triangles(map, &col),
            });
        }
    }
    debug_assert!(col.is_proper(map));
    Ok(col)
}

fn log_changes(
    log: &mut Vec<Decision>,
    step: &str,
    before: &PartialMapColoring,
    after: &PartialMapColoring,
    rule: &str,
) {
    for f in 0..before.len() {
        if before.get(f) != after.get(f) {
            let r = if after.get(f) == MapColor::White || before.get(f) != MapColor::White {
                "kempe"
            } else {
                rule
            };
            decide(log, step, f, after.get(f), r);
        }
    }
}

/// Connected component of regions coloured `a` or `b` containing `start`,
/// with the two colours exchanged. White may be one of the pair.
pub fn kempe_switch_faces(
    map: &NormalMap,
    coloring: &PartialMapColoring,
    start: FaceId,
    pair: (MapColor, MapColor),
) -> PartialMapColoring {
    let (a, b) = pair;
    let mut out = coloring.clone();
    let in_pair = |f: FaceId| coloring.get(f) == a || coloring.get(f) == b;
    if !in_pair(start) {
        return out;
    }
    for f in component(map, start, in_pair) {
        out.set(f, if coloring.get(f) == a { b } else { a });
    }
    out
}

fn component(map: &NormalMap, start: FaceId, member: impl Fn(FaceId) -> bool) -> Vec<FaceId> {
    let mut seen = vec![false; map.face_count()];
    seen[start] = true;
    let mut out = vec![start];
    let mut i = 0;
    while i < out.len() {
        let f = out[i];
        i += 1;
        for &g in map.neighbors(f) {
            if !seen[g] && member(g) {
                seen[g] = true;
                out.push(g);
            }
        }
    }
    out
}

/// Component of `start` in the graph whose edges join a `t`-region to a
/// White region, never entering `skip`.
fn alternating_chain(
    map: &NormalMap,
    col: &PartialMapColoring,
    start: FaceId,
    t: MapColor,
    skip: FaceId,
) -> Vec<FaceId> {
    let mut seen = vec![false; map.face_count()];
    seen[start] = true;
    seen[skip] = true;
    let mut out = vec![start];
    let mut i = 0;
    while i < out.len() {
        let f = out[i];
        i += 1;
        let want = if col.get(f) == t { MapColor::White } else { t };
        for &g in map.neighbors(f) {
            if !seen[g] && col.get(g) == want {
                seen[g] = true;
                out.push(g);
            }
        }
    }
    out
}

fn highland(c: MapColor) -> bool {
    matches!(c, MapColor::Brown | MapColor::Green)
}

/// Candidate switches that may help free `f`.
fn candidate_moves(
    map: &NormalMap,
    col: &PartialMapColoring,
    f: FaceId,
    targets: &[MapColor],
) -> Vec<PartialMapColoring> {
    let mut moves = Vec::new();
    let mut done = vec![false; map.face_count()];
    let mut chains: Vec<Vec<FaceId>> = Vec::new();
    for &g in map.neighbors(f) {
        if highland(col.get(g)) && !done[g] {
            let chain = component(map, g, |h| highland(col.get(h)));
            for &h in &chain {
                done[h] = true;
            }
            chains.push(chain);
        }
    }
    let flip = |col: &PartialMapColoring, chains: &[&Vec<FaceId>]| {
        let mut next = col.clone();
        for chain in chains {
            for &h in chain.iter() {
                next.set(h, col.get(h).other_highland());
            }
        }
        next
    };
    // Flip every chain whose neighbours of f all carry the target colour.
    for &t in targets {
        let mut wanted = Vec::new();
        let mut ok = true;
        for chain in &chains {
            let touching: Vec<MapColor> = chain
                .iter()
                .filter(|&&h| map.are_adjacent(f, h))
                .map(|&h| col.get(h))
                .collect();
            if touching.iter().all(|&c| c == t) {
                wanted.push(chain);
            } else if touching.contains(&t) {
                ok = false;
            }
        }
        if ok && !wanted.is_empty() {
            moves.push(flip(col, &wanted));
        }
    }
    for chain in &chains {
        moves.push(flip(col, &[chain]));
    }
    for &t in targets {
        for &g in map.neighbors(f) {
            if col.get(g) == t {
                let chain = alternating_chain(map, col, g, t, f);
                let mut next = col.clone();
                for &h in &chain {
                    next.set(h, if col.get(h) == t { MapColor::White } else { t });
                }
                moves.push(next);
            }
        }
    }
    // Induced (t, White) chains through f, as in the classical switch.
    for &t in targets {
        moves.push(kempe_switch_faces(map, col, f, (t, MapColor::White)));
    }
    // Single-region changes next to f: a neighbour gives up its colour, or a
    // White region two steps away takes one.
    for &g in map.neighbors(f) {
        let c = col.get(g);
        if highland(c) {
            let mut next = col.clone();
            next.set(g, MapColor::White);
            moves.push(next);
            continue;
        }
        for &h in map.neighbors(g) {
            if h == f || col.get(h) != MapColor::White {
                continue;
            }
            for &t in targets {
                if !col.has_neighbor(map, h, t) {
                    let mut next = col.clone();
                    next.set(h, t);
                    moves.push(next);
                }
            }
        }
    }
    moves
}

const FREE_DEPTH: usize = 2;

/// Tries to colour White region `f` with one of `targets`, switching Kempe
/// chains if needed. Intermediate colourings stay proper; the final one may
/// have at most `max_spots` spots. Each examined switch costs one unit of
/// budget.
fn free_face(
    map: &NormalMap,
    col: &PartialMapColoring,
    f: FaceId,
    targets: &[MapColor],
    max_spots: usize,
    budget: &mut usize,
) -> Option<PartialMapColoring> {
    let finish = |c: &PartialMapColoring| {
        if c.get(f) != MapColor::White {
            return (spot_count(map, c) <= max_spots).then(|| c.clone());
        }
        targets.iter().find_map(|&t| {
            if c.has_neighbor(map, f, t) {
                return None;
            }
            let mut out = c.clone();
            out.set(f, t);
            (spot_count(map, &out) <= max_spots).then_some(out)
        })
    };
    // Best-first: states with fewer conflicts at f are expanded first.
    let score = |c: &PartialMapColoring| {
        let blockers = targets
            .iter()
            .map(|&t| map.neighbors(f).iter().filter(|&&g| c.get(g) == t).count())
            .min()
            .unwrap_or(0);
        blockers + spot_count(map, c).saturating_sub(max_spots)
    };
    let mut seen: HashSet<PartialMapColoring> = HashSet::new();
    seen.insert(col.clone());
    let mut states = vec![col.clone()];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((score(col), 0usize, 0usize)));
    while let Some(Reverse((_, depth, id))) = heap.pop() {
        let state = states[id].clone();
        if let Some(out) = finish(&state) {
            return Some(out);
        }
        if depth == FREE_DEPTH {
            continue;
        }
        for cand in candidate_moves(map, &state, f, targets) {
            if !cand.is_proper(map) {
                continue;
            }
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            if seen.insert(cand.clone()) {
                heap.push(Reverse((score(&cand), depth + 1, states.len())));
                states.push(cand);
            }
        }
    }
    None
}

/// A cycle of White regions, each sharing a border with the next.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhiteRing {
    pub faces: Vec<FaceId>,
    pub parity: u8,
    /// Regions off the ring on the side away from the outer region.
    pub enclosed: Vec<FaceId>,
}

impl WhiteRing {
    pub fn new(map: &NormalMap, faces: Vec<FaceId>) -> Self {
        let parity = (faces.len() % 2) as u8;
        let enclosed = enclosed_by(map, &faces);
        WhiteRing {
            faces,
            parity,
            enclosed,
        }
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn is_odd(&self) -> bool {
        self.parity == 1
    }
}

/// Faces off `ring` not connected to the outer region (or, when the outer
/// region is on the ring, to the lowest face off the ring).
fn enclosed_by(map: &NormalMap, ring: &[FaceId]) -> Vec<FaceId> {
    let n = map.face_count();
    let mut on = vec![false; n];
    for &f in ring {
        on[f] = true;
    }
    let anchor = if on[map.outer()] {
        match (0..n).find(|&f| !on[f]) {
            Some(f) => f,
            None => return Vec::new(),
        }
    } else {
        map.outer()
    };
    let outside = component(map, anchor, |g| !on[g]);
    let mut out_mask = vec![false; n];
    for f in outside {
        out_mask[f] = true;
    }
    (0..n).filter(|&f| !on[f] && !out_mask[f]).collect()
}

pub const RING_ENUMERATION_CAP: usize = 20_000;

/// Chordless cycles of White regions that leave at least one region off the
/// ring. Enumeration stops after `RING_ENUMERATION_CAP` rings.
pub fn white_rings(map: &NormalMap, coloring: &PartialMapColoring) -> Vec<WhiteRing> {
    white_rings_capped(map, coloring, RING_ENUMERATION_CAP).0
}

/// As [`white_rings`], also reporting whether the enumeration was complete.
pub fn white_rings_capped(
    map: &NormalMap,
    coloring: &PartialMapColoring,
    cap: usize,
) -> (Vec<WhiteRing>, bool) {
    let n = map.face_count();
    let white: Vec<bool> = (0..n).map(|f| coloring.get(f) == MapColor::White).collect();
    let mut cycles: Vec<Vec<FaceId>> = Vec::new();
    let mut complete = true;
    for s in 0..n {
        if !white[s] {
            continue;
        }
        let mut path = vec![s];
        if !chordless_from(map, &white, &mut path, &mut cycles, cap) {
            complete = false;
            break;
        }
    }
    let rings = cycles
        .into_iter()
        .filter(|c| c.len() < n)
        .map(|c| WhiteRing::new(map, c))
        .collect();
    (rings, complete)
}

fn chordless_from(
    map: &NormalMap,
    white: &[bool],
    path: &mut Vec<FaceId>,
    out: &mut Vec<Vec<FaceId>>,
    cap: usize,
) -> bool {
    let s = path[0];
    let last = *path.last().unwrap();
    for &w in map.neighbors(last) {
        if w <= s || !white[w] || path.contains(&w) {
            continue;
        }
        if path.len() >= 2 {
            let inner = &path[1..path.len() - 1];
            if inner.iter().any(|&p| map.are_adjacent(p, w)) {
                continue;
            }
            if map.are_adjacent(s, w) {
                if path[1] < w {
                    let mut c = path.clone();
                    c.push(w);
                    out.push(c);
                    if out.len() >= cap {
                        return false;
                    }
                }
                continue;
            }
        }
        path.push(w);
        let ok = chordless_from(map, white, path, out, cap);
        path.pop();
        if !ok {
            return false;
        }
    }
    true
}

/// A shortest odd cycle among White regions, if any. A shortest odd cycle
/// has no chord.
pub fn shortest_odd_white_cycle(map: &NormalMap, col: &PartialMapColoring) -> Option<Vec<FaceId>> {
    let n = map.face_count();
    let white = |f: FaceId| col.get(f) == MapColor::White;
    let mut best: Option<Vec<FaceId>> = None;
    for r in 0..n {
        if !white(r) {
            continue;
        }
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[r] = 0;
        let mut queue = VecDeque::from([r]);
        let mut found: Option<(FaceId, FaceId)> = None;
        'bfs: while let Some(f) = queue.pop_front() {
            for &g in map.neighbors(f) {
                if !white(g) {
                    continue;
                }
                if dist[g] == usize::MAX {
                    dist[g] = dist[f] + 1;
                    parent[g] = f;
                    queue.push_back(g);
                } else if dist[g] == dist[f] && f < g {
                    found = Some((f, g));
                    break 'bfs;
                }
            }
        }
        let Some((u, w)) = found else { continue };
        let (mut a, mut b) = (u, w);
        let mut left = vec![a];
        let mut right = vec![b];
        while a != b {
            a = parent[a];
            b = parent[b];
            left.push(a);
            right.push(b);
        }
        right.pop();
        right.reverse();
        left.extend(right);
        if best.as_ref().is_none_or(|c| left.len() < c.len()) {
            best = Some(left);
        }
    }
    best
}

/// Colours a region of an odd White ring Brown or Green through Kempe
/// switches that keep the colouring proper and spot-free.
pub fn block_odd_ring(
    map: &NormalMap,
    coloring: &PartialMapColoring,
    ring: &WhiteRing,
) -> Result<PartialMapColoring, ColorError> {
    let mut budget = map.face_count().pow(2);
    block_with_budget(map, coloring, &ring.faces, &mut budget)
}

fn block_with_budget(
    map: &NormalMap,
    coloring: &PartialMapColoring,
    ring: &[FaceId],
    budget: &mut usize,
) -> Result<PartialMapColoring, ColorError> {
    let targets = [MapColor::Brown, MapColor::Green];
    for &f in ring {
        let spots = spot_count(map, coloring);
        if let Some(next) = free_face(map, coloring, f, &targets, spots, budget) {
            return Ok(next);
        }
    }
    Err(ColorError::BlockingFailed {
        ring: ring.to_vec(),
    })
}

/// Repeatedly blocks the shortest odd White cycle until none remains.
fn block_all(
    map: &NormalMap,
    col: &mut PartialMapColoring,
    log: &mut Vec<Decision>,
    blocked: &mut Vec<Vec<FaceId>>,
) -> Result<(), ColorError> {
    let mut rounds = map.face_count();
    while let Some(cycle) = shortest_odd_white_cycle(map, col) {
        if rounds == 0 {
            return Err(ColorError::BlockingFailed { ring: cycle });
        }
        rounds -= 1;
        let mut budget = map.face_count().pow(2);
        let next = block_with_budget(map, col, &cycle, &mut budget)?;
        log_changes(log, "block", col, &next, "odd-ring");
        *col = next;
        blocked.push(cycle);
    }
    Ok(())
}

/// Step 3: two-colour every White component, larger side Light Blue.
pub fn step3_complete(
    map: &NormalMap,
    coloring: &PartialMapColoring,
) -> Result<PartialMapColoring, ColorError> {
    step3_logged(map, coloring, &mut Vec::new())
}

fn step3_logged(
    map: &NormalMap,
    coloring: &PartialMapColoring,
    log: &mut Vec<Decision>,
) -> Result<PartialMapColoring, ColorError> {
    let n = map.face_count();
    let mut out = coloring.clone();
    let mut side = vec![u8::MAX; n];
    for s in 0..n {
        if coloring.get(s) != MapColor::White || side[s] != u8::MAX {
            continue;
        }
        side[s] = 0;
        let comp = component(map, s, |g| coloring.get(g) == MapColor::White);
        for &f in &comp {
            for &g in map.neighbors(f) {
                if coloring.get(g) != MapColor::White {
                    continue;
                }
                if side[g] == u8::MAX && side[f] != u8::MAX {
                    side[g] = 1 - side[f];
                }
            }
        }
        // `comp` is in BFS order, so every member got a side from an earlier
        // member; now check consistency.
        for &f in &comp {
            for &g in map.neighbors(f) {
                if coloring.get(g) == MapColor::White && side[g] == side[f] {
                    return Err(ColorError::NotBipartite {
                        cycle: shortest_odd_white_cycle(map, coloring).unwrap_or_default(),
                    });
                }
            }
        }
        let zeros = comp.iter().filter(|&&f| side[f] == 0).count();
        let ones = comp.len() - zeros;
        // `s` is the lowest id of its component and sits on side 0.
        let light = if ones > zeros { 1 } else { 0 };
        for &f in &comp {
            let c = if side[f] == light {
                MapColor::LightBlue
            } else {
                MapColor::DarkBlue
            };
            out.set(f, c);
            decide(log, "step3", f, c, "bipartite");
        }
    }
    Ok(out)
}

/// Coloured regions all of whose neighbours are White.
pub fn detect_islands(map: &NormalMap, coloring: &PartialMapColoring) -> Vec<FaceId> {
    (0..map.face_count())
        .filter(|&f| {
            coloring.get(f) != MapColor::White
                && map
                    .neighbors(f)
                    .iter()
                    .all(|&g| coloring.get(g) == MapColor::White)
        })
        .collect()
}

/// Connected components of coloured regions.
pub fn colored_submaps(map: &NormalMap, coloring: &PartialMapColoring) -> Vec<Vec<FaceId>> {
    let mut seen = vec![false; map.face_count()];
    let mut out = Vec::new();
    for f in 0..map.face_count() {
        if seen[f] || coloring.get(f) == MapColor::White {
            continue;
        }
        let comp = component(map, f, |g| coloring.get(g) != MapColor::White);
        for &g in &comp {
            seen[g] = true;
        }
        out.push(comp);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityLabels {
    /// `|r| mod 2` per region
    pub f: Vec<u8>,
    pub components: Vec<Vec<FaceId>>,
    /// sum of `f` over each coloured component, mod 2
    pub component_parity: Vec<u8>,
    pub odd_white: Vec<FaceId>,
    pub odd_brown: Vec<FaceId>,
    pub odd_green: Vec<FaceId>,
}

pub fn parity_labels(map: &NormalMap, coloring: &PartialMapColoring) -> ParityLabels {
    let f: Vec<u8> = (0..map.face_count())
        .map(|r| (map.face_size(r) % 2) as u8)
        .collect();
    let components = colored_submaps(map, coloring);
    let component_parity = components
        .iter()
        .map(|c| c.iter().map(|&r| f[r]).sum::<u8>() % 2)
        .collect();
    let odd_of = |c: MapColor| {
        (0..map.face_count())
            .filter(|&r| f[r] == 1 && coloring.get(r) == c)
            .collect()
    };
    ParityLabels {
        odd_white: odd_of(MapColor::White),
        odd_brown: odd_of(MapColor::Brown),
        odd_green: odd_of(MapColor::Green),
        f,
        components,
        component_parity,
    }
}

/// The sub-map together with everything it encloses: every region not
/// connected to the outer region once the sub-map is removed.
pub fn enclosed_region(map: &NormalMap, submap: &[FaceId]) -> Result<Vec<bool>, ColorError> {
    let n = map.face_count();
    if submap.is_empty() {
        return Err(ColorError::InvalidSubmap);
    }
    let mut member = vec![false; n];
    for &f in submap {
        member[f] = true;
    }
    if component(map, submap[0], |g| member[g]).len() != submap.len() {
        return Err(ColorError::InvalidSubmap);
    }
    if member[map.outer()] {
        return Err(ColorError::NoSurroundingRing);
    }
    let outside = component(map, map.outer(), |g| !member[g]);
    let mut inside = vec![true; n];
    for f in outside {
        inside[f] = false;
    }
    Ok(inside)
}

/// Walks the boundary of the enclosed region and lists the outside regions
/// met along it, in order. This is the ring around the sub-map.
pub fn surrounding_ring(map: &NormalMap, submap: &[FaceId]) -> Result<Vec<FaceId>, ColorError> {
    let inside = enclosed_region(map, submap)?;
    let rs = map.embedding();
    let is_boundary =
        |d: crate::embedding::Dart| inside[rs.dart_face(d)] && !inside[rs.dart_face(d.twin())];
    let start = (0..rs.dart_count())
        .map(crate::embedding::Dart)
        .find(|&d| is_boundary(d))
        .ok_or(ColorError::NoSurroundingRing)?;
    let mut seq = Vec::new();
    let mut d = start;
    loop {
        seq.push(rs.dart_face(d.twin()));
        let mut e = rs.face_next(d);
        while !is_boundary(e) {
            e = rs.face_next(e.twin());
        }
        d = e;
        if d == start {
            break;
        }
    }
    let mut ring: Vec<FaceId> = Vec::with_capacity(seq.len());
    for &f in &seq {
        if ring.last() != Some(&f) {
            ring.push(f);
        }
    }
    while ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    if ring.len() < 3 {
        return Err(ColorError::NoSurroundingRing);
    }
    Ok(ring)
}

/// Parity of the ring around a connected coloured sub-map, from labels only:
/// the sum of `f` over the sub-map and everything it encloses, plus the
/// number of corners strictly inside that region, mod 2.
pub fn ring_parity_by_labels(
    map: &NormalMap,
    coloring: &PartialMapColoring,
    submap: &[FaceId],
) -> Result<u8, ColorError> {
    if submap.iter().any(|&f| coloring.get(f) == MapColor::White) {
        return Err(ColorError::InvalidSubmap);
    }
    let inside = enclosed_region(map, submap)?;
    let labels: usize = (0..map.face_count())
        .filter(|&f| inside[f])
        .map(|f| map.face_size(f) % 2)
        .sum();
    let interior_corners = (0..map.vertex_count())
        .filter(|&v| map.vertex_faces(v).iter().all(|&f| inside[f]))
        .count();
    Ok(((labels + interior_corners) % 2) as u8)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourColorOptions {
    /// Report failure instead of falling back to the oracle.
    pub strict: bool,
    pub direction: Direction,
}

impl Default for FourColorOptions {
    fn default() -> Self {
        FourColorOptions {
            strict: false,
            direction: Direction::Clockwise,
        }
    }
}

/// One run of the heuristic with a given outer region and direction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    pub outer: FaceId,
    pub direction: Direction,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct RunReport {
    pub attempts: Vec<Attempt>,
    pub faces: usize,
    pub contracted_faces: usize,
    pub contractions: usize,
    pub degenerate: bool,
    pub chains: Vec<Vec<FaceId>>,
    pub brown: Vec<FaceId>,
    pub green: Vec<FaceId>,
    pub spots_after_step1: usize,
    pub spots_acyclic_after_step1: bool,
    pub spots_after_step2: Option<usize>,
    pub white_triangles_after_step2: Option<usize>,
    pub islands_after_step2: Vec<FaceId>,
    pub submaps_after_step2: usize,
    pub rings_blocked: Vec<Vec<FaceId>>,
    pub fallback_used: bool,
    pub failure: Option<String>,
    pub colors_used: usize,
    /// Step and rule that first brought the number of colours to four.
    pub fourth_color: Option<String>,
    pub decisions: Vec<Decision>,
}

impl RunReport {
    /// Plain-text log, one line per decision after a short header.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let list = |v: &[FaceId]| {
            v.iter()
                .map(|f| f.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(s, "faces {}", self.faces);
        let _ = writeln!(
            s,
            "contracted {} faces after {} contractions{}",
            self.contracted_faces,
            self.contractions,
            if self.degenerate { " (degenerate)" } else { "" }
        );
        for (i, c) in self.chains.iter().enumerate() {
            let _ = writeln!(s, "chain {} : {}", i + 1, list(c));
        }
        let _ = writeln!(s, "brown {}", list(&self.brown));
        let _ = writeln!(s, "green {}", list(&self.green));
        let _ = writeln!(
            s,
            "spots after step1 {} acyclic {}",
            self.spots_after_step1, self.spots_acyclic_after_step1
        );
        if let Some(n) = self.spots_after_step2 {
            let _ = writeln!(s, "spots after step2 {n}");
        }
        if let Some(n) = self.white_triangles_after_step2 {
            let _ = writeln!(s, "white 3-rings after step2 {n}");
        }
        let _ = writeln!(
            s,
            "islands {} submaps {}",
            list(&self.islands_after_step2),
            self.submaps_after_step2
        );
        for r in &self.rings_blocked {
            let _ = writeln!(s, "blocked ring {}", list(r));
        }
        for a in &self.attempts {
            let dir = match a.direction {
                Direction::Clockwise => "cw",
                Direction::Counterclockwise => "ccw",
            };
            let _ = writeln!(
                s,
                "attempt outer {} {} {}",
                a.outer,
                dir,
                a.failure.as_deref().unwrap_or("ok")
            );
        }
        if let Some(f) = &self.failure {
            let _ = writeln!(s, "heuristic failure {f}");
        }
        let _ = writeln!(s, "fallback {}", self.fallback_used);
        let _ = writeln!(s, "colors used {}", self.colors_used);
        if let Some(f) = &self.fourth_color {
            let _ = writeln!(s, "fourth color introduced by {f}");
        }
        for d in &self.decisions {
            let _ = writeln!(
                s,
                "{} face {} {} rule={}",
                d.step,
                d.face,
                d.color.name(),
                d.rule
            );
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourColorOutcome {
    pub coloring: PartialMapColoring,
    pub report: RunReport,
}

/// Runs the heuristic on a digon- and triangle-free map.
fn heuristic(
    map: &NormalMap,
    direction: Direction,
    report: &mut RunReport,
    log: &mut Vec<Decision>,
) -> Result<PartialMapColoring, ColorError> {
    let spiral = spiral_order(map, direction);
    report.chains = spiral.chains.clone();
    let m_b = step1_logged(map, &spiral, log);
    let spots = compute_spots(map, &m_b);
    report.spots_after_step1 = spots.len();
    report.spots_acyclic_after_step1 = spots_acyclic(map, &spots);
    report.brown = m_b.faces_with(MapColor::Brown);
    let mut col = step2_logged(map, &m_b, &spiral, log)?;
    report.brown = col.faces_with(MapColor::Brown);
    report.green = col.faces_with(MapColor::Green);
    report.spots_after_step2 = Some(spot_count(map, &col));
    report.white_triangles_after_step2 = Some(count_white_triangles(map, &col));
    report.islands_after_step2 = detect_islands(map, &col);
    report.submaps_after_step2 = colored_submaps(map, &col).len();
    block_all(map, &mut col, log, &mut report.rings_blocked)?;
    step3_logged(map, &col, log)
}

/// Number of other outer regions tried after both spiral directions fail.
pub const REDRAW_ATTEMPTS: usize = 3;

/// The designated outer region in the requested direction, then the other
/// direction, then the largest other regions redrawn as the outside.
fn attempt_plan(map: &NormalMap, direction: Direction) -> Vec<(FaceId, Direction)> {
    let other = match direction {
        Direction::Clockwise => Direction::Counterclockwise,
        Direction::Counterclockwise => Direction::Clockwise,
    };
    let mut plan = vec![(map.outer(), direction), (map.outer(), other)];
    let mut rest: Vec<FaceId> = (0..map.face_count())
        .filter(|&f| f != map.outer())
        .collect();
    rest.sort_by_key(|&f| (Reverse(map.face_size(f)), f));
    plan.extend(
        rest.into_iter()
            .take(REDRAW_ATTEMPTS)
            .map(|f| (f, direction)),
    );
    plan
}

/// Contract, spiral, three steps with ring blocking, expand, verify.
pub fn four_color(
    map: &NormalMap,
    options: FourColorOptions,
) -> Result<FourColorOutcome, ColorError> {
    let (contracted, clog) = contract_small_faces(map)?;
    let mut report = RunReport {
        faces: map.face_count(),
        contracted_faces: contracted.face_count(),
        contractions: clog.steps.len(),
        degenerate: clog.degenerate,
        spots_acyclic_after_step1: true,
        ..RunReport::default()
    };
    let mut log = Vec::new();
    for step in &clog.steps {
        decide(
            &mut log,
            "contract",
            step.face,
            MapColor::White,
            "small-face",
        );
    }
    let small = contracted.faces().iter().any(|f| f.len() < 4);
    let coloring = if clog.degenerate || small {
        // At most three regions remain, all pairwise adjacent.
        let mut col = PartialMapColoring::all_white(contracted.face_count());
        for f in 0..contracted.face_count() {
            col.set(f, MapColor::PALETTE[f]);
            decide(&mut log, "residue", f, MapColor::PALETTE[f], "distinct");
        }
        col
    } else {
        let mut outcome = None;
        for (outer, direction) in attempt_plan(&contracted, options.direction) {
            let redrawn = contracted.clone().with_outer(outer)?;
            let mut trial = report.clone();
            let mut trial_log = log.clone();
            let result = heuristic(&redrawn, direction, &mut trial, &mut trial_log);
            report.attempts.push(Attempt {
                outer: clog.labels[outer],
                direction,
                failure: result.as_ref().err().map(|e| e.to_string()),
            });
            let attempts = std::mem::take(&mut report.attempts);
            report = trial;
            report.attempts = attempts;
            if let Ok(col) = result {
                log = trial_log;
                outcome = Some(col);
                break;
            }
        }
        match outcome {
            Some(col) => col,
            None => {
                let reason = report
                    .attempts
                    .last()
                    .and_then(|a| a.failure.clone())
                    .unwrap_or_default();
                report.failure = Some(reason.clone());
                if options.strict {
                    return Err(ColorError::HeuristicFailed(reason));
                }
                report.fallback_used = true;
                let adj = contracted.adjacency();
                let c = oracle::backtrack_four_color(adj).ok_or(ColorError::VerificationFailed)?;
                let col = PartialMapColoring::from_colors(
                    c.into_iter().map(MapColor::from_index).collect(),
                );
                for f in 0..col.len() {
                    decide(&mut log, "fallback", f, col.get(f), "oracle");
                }
                col
            }
        }
    };
    if !coloring.is_proper(&contracted) || !coloring.is_complete() {
        return Err(ColorError::VerificationFailed);
    }
    let full = expand_small_faces(&coloring, &clog)?;
    for step in clog.steps.iter().rev() {
        decide(&mut log, "expand", step.face, full.get(step.face), "spare");
    }

    // Decisions on the contracted map refer to its own face ids.
    let relabel = |f: FaceId| clog.labels[f];
    for d in &mut log {
        if !matches!(d.step.as_str(), "contract" | "expand") {
            d.face = relabel(d.face);
        }
    }
    let relabel_all = |v: &mut Vec<FaceId>| {
        for f in v.iter_mut() {
            *f = relabel(*f);
        }
    };
    for c in &mut report.chains {
        relabel_all(c);
    }
    relabel_all(&mut report.brown);
    relabel_all(&mut report.green);
    relabel_all(&mut report.islands_after_step2);
    for r in &mut report.rings_blocked {
        relabel_all(r);
    }

    if !oracle::verify_proper(map.adjacency(), &full.oracle_colors()) {
        return Err(ColorError::VerificationFailed);
    }
    report.colors_used = full.colors_used();
    report.fourth_color = fourth_color_origin(&log);
    report.decisions = log;
    Ok(FourColorOutcome {
        coloring: full,
        report,
    })
}

fn fourth_color_origin(log: &[Decision]) -> Option<String> {
    let mut seen = Vec::new();
    for d in log {
        if d.color != MapColor::White && !seen.contains(&d.color) {
            seen.push(d.color);
            if seen.len() == 4 {
                return Some(format!("{} ({}) at face {}", d.step, d.rule, d.face));
            }
        }
    }
    None
}
