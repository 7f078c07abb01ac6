//! Brute-force engines used to check the heuristics: exact colouring,
//! properness, bipartite decomposition, equitable and strong colourings,
//! hamiltonicity and 3-colourability.
//!
//! Colours are `1..=k`; `0` means uncoloured.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::FaceId;
use crate::planar_map::NormalMap;

pub type Adjacency = [Vec<usize>];

pub const UNCOLORED: u8 = 0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("coloring is not proper")]
    ImproperColoring,
    #[error("search budget exhausted")]
    BudgetExhausted,
    #[error("graph has {vertices} vertices, bound is {bound}")]
    TooLarge { vertices: usize, bound: usize },
}

/// True iff every vertex is coloured and no edge joins equal colours.
pub fn verify_proper(adj: &Adjacency, colors: &[u8]) -> bool {
    colors.len() == adj.len()
        && colors.iter().all(|&c| c != UNCOLORED)
        && adj
            .iter()
            .enumerate()
            .all(|(v, ns)| ns.iter().all(|&w| w == v || colors[v] != colors[w]))
}

struct Search<'a> {
    adj: &'a Adjacency,
    k: u8,
    colors: Vec<u8>,
    /// forbidden[v][c] counts coloured neighbours of v with colour c
    forbidden: Vec<[u16; 8]>,
    nodes: u64,
    budget: u64,
}

impl<'a> Search<'a> {
    fn new(adj: &'a Adjacency, k: u8, budget: u64) -> Self {
        assert!((1..=7).contains(&k));
        Search {
            adj,
            k,
            colors: vec![UNCOLORED; adj.len()],
            forbidden: vec![[0; 8]; adj.len()],
            nodes: 0,
            budget,
        }
    }

    fn saturation(&self, v: usize) -> usize {
        (1..=self.k)
            .filter(|&c| self.forbidden[v][c as usize] > 0)
            .count()
    }

    /// Uncoloured vertex with the most distinct neighbour colours, then the
    /// highest degree, then the lowest id.
    fn pick(&self) -> Option<usize> {
        let mut best: Option<(usize, usize, usize)> = None;
        for v in 0..self.adj.len() {
            if self.colors[v] != UNCOLORED {
                continue;
            }
            let key = (self.saturation(v), self.adj[v].len(), usize::MAX - v);
            if best.is_none_or(|b| key > (b.0, b.1, b.2)) {
                best = Some((key.0, key.1, key.2));
            }
        }
        best.map(|(_, _, inv)| usize::MAX - inv)
    }

    fn assign(&mut self, v: usize, c: u8) {
        self.colors[v] = c;
        for &w in &self.adj[v] {
            self.forbidden[w][c as usize] += 1;
        }
    }

    fn unassign(&mut self, v: usize) {
        let c = self.colors[v];
        for &w in &self.adj[v] {
            self.forbidden[w][c as usize] -= 1;
        }
        self.colors[v] = UNCOLORED;
    }

    /// Visits proper colourings in which colour `c` is used only after
    /// `c - 1` (each colouring up to renaming is seen once). The visitor
    /// returns `true` to stop.
    fn run<F: FnMut(&[u8]) -> bool>(&mut self, max_used: u8, visit: &mut F) -> Result<bool, ()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        let Some(v) = self.pick() else {
            return Ok(visit(&self.colors));
        };
        let top = (max_used + 1).min(self.k);
        for c in 1..=top {
            if self.forbidden[v][c as usize] > 0 || self.adj[v].contains(&v) {
                continue;
            }
            self.assign(v, c);
            let stop = self.run(max_used.max(c), visit);
            self.unassign(v);
            if stop? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Exact k-colouring by saturation-ordered backtracking, or `None` if the
/// graph is not k-colourable.
pub fn backtrack_color(adj: &Adjacency, k: u8) -> Option<Vec<u8>> {
    let mut s = Search::new(adj, k, u64::MAX);
    let mut found = None;
    let _ = s.run(0, &mut |c: &[u8]| {
        found = Some(c.to_vec());
        true
    });
    found
}

pub fn backtrack_four_color(adj: &Adjacency) -> Option<Vec<u8>> {
    backtrack_color(adj, 4)
}

/// Visits every proper k-colouring up to renaming of colours, stopping early
/// when the visitor returns `true`. Returns `Err` if the node budget runs out.
pub fn for_each_coloring<F: FnMut(&[u8]) -> bool>(
    adj: &Adjacency,
    k: u8,
    budget: u64,
    mut visit: F,
) -> Result<bool, OracleError> {
    let mut s = Search::new(adj, k, budget);
    s.run(0, &mut visit)
        .map_err(|_| OracleError::BudgetExhausted)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PairChoice {
    /// {1,2} and {3,4}
    #[default]
    OneTwo,
    /// {1,3} and {2,4}
    OneThree,
    /// {1,4} and {2,3}
    OneFour,
}

impl PairChoice {
    fn partner(self, c: u8) -> u8 {
        let pairs: [(u8, u8); 2] = match self {
            PairChoice::OneTwo => [(1, 2), (3, 4)],
            PairChoice::OneThree => [(1, 3), (2, 4)],
            PairChoice::OneFour => [(1, 4), (2, 3)],
        };
        for (a, b) in pairs {
            if c == a {
                return b;
            }
            if c == b {
                return a;
            }
        }
        unreachable!("colour {c} outside 1..=4")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition2Bipartite {
    pub h1: Vec<(usize, usize)>,
    pub h2: Vec<(usize, usize)>,
}

/// Two-colours the graph given by an edge list, or reports failure.
pub fn is_bipartite(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut side = vec![u8::MAX; n];
    for s in 0..n {
        if side[s] != u8::MAX {
            continue;
        }
        side[s] = 0;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if side[w] == u8::MAX {
                    side[w] = 1 - side[v];
                    stack.push(w);
                } else if side[w] == side[v] {
                    return false;
                }
            }
        }
    }
    true
}

/// Splits the edges of a properly 4-coloured graph into two bipartite parts:
/// edges inside one colour pairing, and the rest.
pub fn bipartite_decomposition(
    adj: &Adjacency,
    colors: &[u8],
    pairing: PairChoice,
) -> Result<Decomposition2Bipartite, OracleError> {
    if !verify_proper(adj, colors) || colors.iter().any(|&c| c > 4) {
        return Err(OracleError::ImproperColoring);
    }
    let mut h1 = Vec::new();
    let mut h2 = Vec::new();
    for (v, ns) in adj.iter().enumerate() {
        for &w in ns {
            if v < w {
                if pairing.partner(colors[v]) == colors[w] {
                    h1.push((v, w));
                } else {
                    h2.push((v, w));
                }
            }
        }
    }
    h1.sort_unstable();
    h1.dedup();
    h2.sort_unstable();
    h2.dedup();
    let n = adj.len();
    if !is_bipartite(n, &h1) || !is_bipartite(n, &h2) {
        return Err(OracleError::ImproperColoring);
    }
    Ok(Decomposition2Bipartite { h1, h2 })
}

pub fn class_sizes(colors: &[u8]) -> [usize; 4] {
    let mut s = [0; 4];
    for &c in colors {
        if (1..=4).contains(&c) {
            s[c as usize - 1] += 1;
        }
    }
    s
}

/// Three of the four class sizes lie pairwise within one of each other.
pub fn is_equitable_like(colors: &[u8]) -> bool {
    let s = class_sizes(colors);
    (0..4).any(|skip| {
        let rest: Vec<usize> = (0..4).filter(|&i| i != skip).map(|i| s[i]).collect();
        rest.iter().max().unwrap() - rest.iter().min().unwrap() <= 1
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquitableVerdict {
    Witness(Vec<u8>),
    /// Every proper 4-colouring was examined; none qualifies.
    NoneExists,
    /// Budget ran out before a verdict.
    Unknown,
}

/// Looks for a proper 4-colouring whose class sizes satisfy
/// [`is_equitable_like`].
pub fn equitable_claim_search(adj: &Adjacency, budget: u64) -> EquitableVerdict {
    let mut found = None;
    match for_each_coloring(adj, 4, budget, |c| {
        if is_equitable_like(c) {
            found = Some(c.to_vec());
            true
        } else {
            false
        }
    }) {
        Ok(_) => found.map_or(EquitableVerdict::NoneExists, EquitableVerdict::Witness),
        Err(_) => EquitableVerdict::Unknown,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongColoringWitness {
    /// Colour per face, `1..=4`; sides use {1,2} and {3,4}.
    pub coloring: Vec<u8>,
    pub side_a: Vec<FaceId>,
    pub side_b: Vec<FaceId>,
}

/// Union-find over faces, cloned on each search branch.
#[derive(Clone)]
struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Checks that `members` induce a tree in the dual multigraph.
pub fn induces_tree(map: &NormalMap, members: &[bool]) -> bool {
    let count = members.iter().filter(|&&m| m).count();
    if count == 0 {
        return false;
    }
    let mut dsu = Dsu::new(map.face_count());
    let mut edges = 0;
    for (a, b) in map.dual_edges() {
        if members[a] && members[b] {
            if !dsu.union(a, b) {
                return false;
            }
            edges += 1;
        }
    }
    edges + 1 == count
}

#[derive(Clone)]
struct StrongState {
    side: Vec<u8>,
    dsu: [Dsu; 2],
}

struct StrongSearch<'a> {
    map: &'a NormalMap,
    /// per face: (neighbour, multiplicity) over the dual multigraph
    nbrs: Vec<Vec<FaceId>>,
    nodes: u64,
    budget: u64,
}

const FREE: u8 = 2;

impl StrongSearch<'_> {
    /// Assigns `f` to `s` and propagates: no corner may have all three of
    /// its regions on one side, and no side may close a cycle.
    fn assign(&self, st: &mut StrongState, f: FaceId, s: u8) -> bool {
        let mut queue = vec![(f, s)];
        while let Some((f, s)) = queue.pop() {
            if st.side[f] == s {
                continue;
            }
            if st.side[f] != FREE {
                return false;
            }
            st.side[f] = s;
            for &g in &self.nbrs[f] {
                if st.side[g] == s && !st.dsu[s as usize].union(f, g) {
                    return false;
                }
            }
            for v in self.map.face_vertices(f) {
                let fs = self.map.vertex_faces(v);
                let same = fs.iter().filter(|&&x| st.side[x] == s).count();
                if same == 3 {
                    return false;
                }
                if same == 2 {
                    if let Some(&x) = fs.iter().find(|&&x| st.side[x] == FREE) {
                        queue.push((x, 1 - s));
                    }
                }
            }
            // A free neighbour touching one component twice cannot join it.
            for &g in &self.nbrs[f] {
                if st.side[g] != FREE {
                    continue;
                }
                let mut roots = Vec::new();
                for &h in &self.nbrs[g] {
                    if st.side[h] == s {
                        roots.push(st.dsu[s as usize].find(h));
                    }
                }
                let len = roots.len();
                roots.sort_unstable();
                roots.dedup();
                if roots.len() < len {
                    queue.push((g, 1 - s));
                }
            }
        }
        self.components_can_connect(st)
    }

    /// Every component of a side must still be able to grow towards the
    /// others, unless it is the whole side.
    fn components_can_connect(&self, st: &mut StrongState) -> bool {
        let n = st.side.len();
        for s in 0..2u8 {
            let mut open = vec![false; n];
            let mut roots = Vec::new();
            for f in 0..n {
                if st.side[f] != s {
                    continue;
                }
                let r = st.dsu[s as usize].find(f);
                roots.push(r);
                if self.nbrs[f].iter().any(|&g| st.side[g] == FREE) {
                    open[r] = true;
                }
            }
            roots.sort_unstable();
            roots.dedup();
            if roots.len() > 1 && roots.iter().any(|&r| !open[r]) {
                return false;
            }
        }
        true
    }

    fn pick(&self, st: &StrongState) -> Option<FaceId> {
        let mut best: Option<(usize, FaceId)> = None;
        for f in 0..st.side.len() {
            if st.side[f] != FREE {
                continue;
            }
            let fixed = self.nbrs[f].iter().filter(|&&g| st.side[g] != FREE).count();
            if best.is_none_or(|(b, _)| fixed > b) {
                best = Some((fixed, f));
            }
        }
        best.map(|(_, f)| f)
    }

    fn run(&mut self, st: StrongState) -> Result<Option<StrongState>, OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::BudgetExhausted);
        }
        let Some(f) = self.pick(&st) else {
            let a: Vec<bool> = st.side.iter().map(|&s| s == 0).collect();
            let b: Vec<bool> = st.side.iter().map(|&s| s == 1).collect();
            let ok = induces_tree(self.map, &a) && induces_tree(self.map, &b);
            return Ok(ok.then_some(st));
        };
        for s in [0u8, 1] {
            let mut next = st.clone();
            if self.assign(&mut next, f, s) {
                if let Some(done) = self.run(next)? {
                    return Ok(Some(done));
                }
            }
        }
        Ok(None)
    }
}

/// Default node budget for [`strong_coloring_search`].
pub const STRONG_BUDGET: u64 = 200_000_000;

/// Searches for a strong four colouring: a split of the regions into two
/// sides, each inducing a tree in the dual multigraph, each 2-coloured by
/// its own colour pair. `Ok(None)` means the search space was exhausted.
pub fn strong_coloring_search(
    map: &NormalMap,
    budget: u64,
) -> Result<Option<StrongColoringWitness>, OracleError> {
    let n = map.face_count();
    let mut nbrs = vec![Vec::new(); n];
    for (a, b) in map.dual_edges() {
        nbrs[a].push(b);
        nbrs[b].push(a);
    }
    let mut search = StrongSearch {
        map,
        nbrs,
        nodes: 0,
        budget,
    };
    let mut st = StrongState {
        side: vec![FREE; n],
        dsu: [Dsu::new(n), Dsu::new(n)],
    };
    // The outer region may be placed on side A without loss of generality.
    if !search.assign(&mut st, map.outer(), 0) {
        return Ok(None);
    }
    let Some(done) = search.run(st)? else {
        return Ok(None);
    };
    let side_a: Vec<FaceId> = (0..n).filter(|&f| done.side[f] == 0).collect();
    let side_b: Vec<FaceId> = (0..n).filter(|&f| done.side[f] == 1).collect();
    let mut coloring = vec![UNCOLORED; n];
    for (side, base) in [(&side_a, 1u8), (&side_b, 3u8)] {
        let start = side[0];
        coloring[start] = base;
        let mut stack = vec![start];
        while let Some(f) = stack.pop() {
            for &g in &search.nbrs[f] {
                if coloring[g] == UNCOLORED && done.side[g] == done.side[f] {
                    coloring[g] = if coloring[f] == base { base + 1 } else { base };
                    stack.push(g);
                }
            }
        }
    }
    Ok(Some(StrongColoringWitness {
        coloring,
        side_a,
        side_b,
    }))
}

pub const HAMILTONIAN_BOUND: usize = 60;

#[derive(Clone)]
struct HamState {
    /// per edge: 0 unknown, 1 in, 2 out
    edge: Vec<u8>,
    ins: Vec<u8>,
    outs: Vec<u8>,
    in_count: usize,
    dsu: Dsu,
}

struct HamSearch {
    n: usize,
    ends: Vec<(usize, usize)>,
    incident: Vec<Vec<usize>>,
    nodes: u64,
    budget: u64,
}

impl HamSearch {
    fn set(&self, st: &mut HamState, e: usize, val: u8) -> bool {
        let mut queue = vec![(e, val)];
        while let Some((e, val)) = queue.pop() {
            if st.edge[e] == val {
                continue;
            }
            if st.edge[e] != 0 {
                return false;
            }
            st.edge[e] = val;
            let (a, b) = self.ends[e];
            if val == 1 {
                st.in_count += 1;
                if !st.dsu.union(a, b) && st.in_count < self.n {
                    return false;
                }
                st.ins[a] += 1;
                st.ins[b] += 1;
            } else {
                st.outs[a] += 1;
                st.outs[b] += 1;
            }
            for v in [a, b] {
                let deg = self.incident[v].len();
                if st.ins[v] > 2 || deg - (st.outs[v] as usize) < 2 {
                    return false;
                }
                let fill = if st.ins[v] == 2 {
                    2
                } else if deg - st.outs[v] as usize == 2 {
                    1
                } else {
                    continue;
                };
                for &f in &self.incident[v] {
                    if st.edge[f] == 0 {
                        queue.push((f, fill));
                    }
                }
            }
        }
        true
    }

    fn run(&mut self, st: HamState) -> Result<bool, OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::BudgetExhausted);
        }
        if st.in_count == self.n {
            return Ok(true);
        }
        // Branch at a path end if there is one, else at the lowest vertex
        // with an undecided edge.
        let v = (0..self.n)
            .find(|&v| st.ins[v] == 1)
            .or_else(|| (0..self.n).find(|&v| st.ins[v] < 2));
        let Some(v) = v else { return Ok(false) };
        for &e in &self.incident[v] {
            if st.edge[e] != 0 {
                continue;
            }
            let mut next = st.clone();
            if self.set(&mut next, e, 1) && self.run(next)? {
                return Ok(true);
            }
            // Later branches may assume this edge is excluded.
            let mut st2 = st.clone();
            if !self.set(&mut st2, e, 2) {
                return Ok(false);
            }
            return self.run(st2);
        }
        Ok(false)
    }
}

/// Exact hamiltonicity test by edge-decision search with degree propagation
/// and early subcycle rejection.
pub fn is_hamiltonian(adj: &Adjacency, bound: usize) -> Result<bool, OracleError> {
    let n = adj.len();
    if n > bound {
        return Err(OracleError::TooLarge { vertices: n, bound });
    }
    hamiltonian_with_budget(adj, u64::MAX)
}

pub fn hamiltonian_with_budget(adj: &Adjacency, budget: u64) -> Result<bool, OracleError> {
    let n = adj.len();
    if n < 3 {
        return Ok(false);
    }
    let mut ends = Vec::new();
    let mut incident = vec![Vec::new(); n];
    for (v, ns) in adj.iter().enumerate() {
        for &w in ns {
            if v < w {
                incident[v].push(ends.len());
                incident[w].push(ends.len());
                ends.push((v, w));
            }
        }
    }
    let mut search = HamSearch {
        n,
        ends,
        incident,
        nodes: 0,
        budget,
    };
    let st = HamState {
        edge: vec![0; search.ends.len()],
        ins: vec![0; n],
        outs: vec![0; n],
        in_count: 0,
        dsu: Dsu::new(n),
    };
    for v in 0..n {
        if search.incident[v].len() < 2 {
            return Ok(false);
        }
    }
    let mut st = st;
    // Vertices of degree two force both their edges.
    for v in 0..n {
        if search.incident[v].len() == 2 {
            for e in search.incident[v].clone() {
                if !search.set(&mut st, e, 1) {
                    return Ok(false);
                }
            }
        }
    }
    search.run(st)
}

/// Every region has an even number of sides.
pub fn three_colorable_by_heawood(map: &NormalMap) -> bool {
    map.faces().iter().all(|f| f.len() % 2 == 0)
}

pub fn brute_force_three_colorable(adj: &Adjacency) -> bool {
    backtrack_color(adj, 3).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Vec<Vec<usize>> {
        (0..n)
            .map(|v| (0..n).filter(|&w| w != v).collect())
            .collect()
    }

    #[test]
    fn k4_and_k5() {
        let c = backtrack_four_color(&complete(4)).unwrap();
        assert!(verify_proper(&complete(4), &c));
        let mut sorted = c.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2, 3, 4]);
        assert!(backtrack_four_color(&complete(5)).is_none());
    }

    #[test]
    fn verify_rejects_monochromatic_edge_and_white() {
        let adj = vec![vec![1], vec![0]];
        assert!(!verify_proper(&adj, &[1, 1]));
        assert!(!verify_proper(&adj, &[1, 0]));
        assert!(verify_proper(&adj, &[1, 2]));
    }

    #[test]
    fn k4_decomposition() {
        let adj = complete(4);
        let d = bipartite_decomposition(&adj, &[1, 2, 3, 4], PairChoice::OneTwo).unwrap();
        assert_eq!(d.h1, vec![(0, 1), (2, 3)]);
        assert_eq!(d.h2.len(), 4);
        let empty: Vec<Vec<usize>> = vec![vec![], vec![]];
        let d = bipartite_decomposition(&empty, &[1, 1], PairChoice::OneTwo).unwrap();
        assert!(d.h1.is_empty() && d.h2.is_empty());
    }

    #[test]
    fn hamiltonian_small() {
        assert!(is_hamiltonian(&complete(4), HAMILTONIAN_BOUND).unwrap());
        // Cube graph.
        let cube: Vec<Vec<usize>> = (0..8usize)
            .map(|v| (0..3).map(|b| v ^ (1 << b)).collect())
            .collect();
        assert!(is_hamiltonian(&cube, HAMILTONIAN_BOUND).unwrap());
        // Petersen graph is not.
        let mut pet = vec![Vec::new(); 10];
        for i in 0..5 {
            for (a, b) in [(i, (i + 1) % 5), (i, i + 5), (i + 5, (i + 2) % 5 + 5)] {
                pet[a].push(b);
                pet[b].push(a);
            }
        }
        assert!(!is_hamiltonian(&pet, HAMILTONIAN_BOUND).unwrap());
        assert!(matches!(
            is_hamiltonian(&complete(4), 3),
            Err(OracleError::TooLarge { .. })
        ));
    }

    #[test]
    fn equitable_octahedron() {
        let oct: Vec<Vec<usize>> = (0..6usize)
            .map(|v| (0..6).filter(|&w| w != v && w != (v + 3) % 6).collect())
            .collect();
        match equitable_claim_search(&oct, 1_000_000) {
            EquitableVerdict::Witness(c) => {
                assert!(verify_proper(&oct, &c));
                assert!(is_equitable_like(&c));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn three_colouring() {
        assert!(brute_force_three_colorable(&complete(3)));
        assert!(!brute_force_three_colorable(&complete(4)));
    }
}
