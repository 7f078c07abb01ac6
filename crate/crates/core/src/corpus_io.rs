//! Instance files, the built-in corpus with load-time property checks, and
//! SVG / DOT renderers.
//!
//! File grammar (one item per line, `#` lines only after the header):
//!
//! ```text
//! fourcolor-map 1
//! # free comment
//! kind map|graph
//! vertices N
//! outer F                 (optional, maps only)
//! rotation
//! v: x y z ...            (N lines, v = 0..N-1 in order)
//! labels                  (optional)
//! id: text
//! coloring                (optional)
//! id: colour-name
//! end
//! ```
//!
//! For `kind map` the rotation lists edge ids around each cubic vertex; for
//! `kind graph` it lists neighbour vertices of a plane triangulation. Label
//! and colouring ids are faces for maps and vertices for graphs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_traits::Float;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::color_steps::{MapColor, PartialMapColoring};
use crate::embedding::{FaceId, RotationSystem, VertexId};
use crate::kempe_vertex::{
    self, build_generator_graph, derive_twin_bad_examples, MaximalPlanarGraph, VColor,
    VertexColoring,
};
use crate::oracle;
use crate::planar_map::{random_normal_map, validate_normal_map, NormalMap};

pub const FORMAT_HEADER: &str = "fourcolor-map 1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("cannot read input")]
    Io(#[from] std::io::Error),
    #[error("unknown corpus instance {0}")]
    UnknownInstance(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Map,
    Graph,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFile {
    pub kind: Kind,
    pub comments: Vec<String>,
    pub vertices: usize,
    pub outer: Option<usize>,
    pub rotation: Vec<Vec<usize>>,
    pub labels: Vec<(usize, String)>,
    pub coloring: Vec<(usize, String)>,
}

struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    /// Next line with its 1-based number; EOF is an error.
    fn next(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        match self.lines.get(self.pos) {
            Some(l) => {
                self.pos += 1;
                Ok((self.pos, l.trim_end_matches('\r')))
            }
            None => Err(self.err(
                self.lines.len() + 1,
                1,
                format!("unexpected end of file, expected {what}"),
            )),
        }
    }

    fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).map(|l| l.trim_end_matches('\r'))
    }
}

fn keyword_value(line: &str, no: usize, key: &str) -> Result<usize, ParseError> {
    let rest = line
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| ParseError {
            line: no,
            column: 1,
            message: format!("expected `{key} <number>`"),
        })?;
    rest.trim().parse().map_err(|_| ParseError {
        line: no,
        column: key.len() + 2,
        message: format!("invalid number `{}`", rest.trim()),
    })
}

/// Splits `id: rest`, checking the id.
fn id_line(line: &str, no: usize) -> Result<(usize, &str, usize), ParseError> {
    let colon = line.find(':').ok_or_else(|| ParseError {
        line: no,
        column: 1,
        message: "expected `id: ...`".into(),
    })?;
    let id = line[..colon].trim().parse().map_err(|_| ParseError {
        line: no,
        column: 1,
        message: format!("invalid id `{}`", &line[..colon]),
    })?;
    Ok((id, &line[colon + 1..], colon + 2))
}

impl MapFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut it = Lines {
            lines: text.lines().collect(),
            pos: 0,
        };
        let (no, header) = it.next("header")?;
        if header != FORMAT_HEADER {
            return Err(it.err(no, 1, format!("expected `{FORMAT_HEADER}`")));
        }
        let mut comments = Vec::new();
        while let Some(l) = it.peek() {
            if let Some(c) = l.strip_prefix('#') {
                comments.push(c.strip_prefix(' ').unwrap_or(c).to_string());
                it.pos += 1;
            } else {
                break;
            }
        }
        let (no, kind_line) = it.next("kind")?;
        let kind = match kind_line {
            "kind map" => Kind::Map,
            "kind graph" => Kind::Graph,
            _ => return Err(it.err(no, 1, "expected `kind map` or `kind graph`")),
        };
        let (no, l) = it.next("vertices")?;
        let vertices = keyword_value(l, no, "vertices")?;
        let mut outer = None;
        if it.peek().is_some_and(|l| l.starts_with("outer")) {
            let (no, l) = it.next("outer")?;
            outer = Some(keyword_value(l, no, "outer")?);
        }
        let (no, l) = it.next("rotation")?;
        if l != "rotation" {
            return Err(it.err(no, 1, "expected `rotation`"));
        }
        let mut rotation = Vec::with_capacity(vertices);
        for v in 0..vertices {
            let (no, l) = it.next("rotation line")?;
            let (id, rest, col) = id_line(l, no)?;
            if id != v {
                return Err(it.err(no, 1, format!("expected vertex {v}, found {id}")));
            }
            let mut row = Vec::new();
            let mut i = 0;
            for tok in rest.split(' ') {
                if !tok.is_empty() {
                    let x = tok
                        .parse()
                        .map_err(|_| it.err(no, col + i, format!("invalid entry `{tok}`")))?;
                    row.push(x);
                }
                i += tok.len() + 1;
            }
            if row.is_empty() {
                return Err(it.err(no, col, "empty rotation"));
            }
            rotation.push(row);
        }
        let mut labels = Vec::new();
        let mut coloring = Vec::new();
        let mut section: Option<&str> = None;
        loop {
            let (no, l) = it.next("`end`")?;
            match l {
                "end" => break,
                "labels" | "coloring" => {
                    section = Some(if l == "labels" { "labels" } else { "coloring" })
                }
                _ => {
                    let (id, rest, col) = id_line(l, no)?;
                    let value = rest.trim().to_string();
                    match section {
                        Some("labels") => labels.push((id, value)),
                        Some("coloring") => {
                            let known = match kind {
                                Kind::Map => MapColor::from_name(&value).is_some(),
                                Kind::Graph => VColor::from_name(&value).is_some(),
                            };
                            if !known {
                                return Err(it.err(
                                    no,
                                    col + 1,
                                    format!("unknown colour `{value}`"),
                                ));
                            }
                            coloring.push((id, value));
                        }
                        _ => return Err(it.err(no, 1, "expected `labels`, `coloring` or `end`")),
                    }
                }
            }
        }
        if let Some((no, l)) = it.peek().map(|l| (it.pos + 1, l)) {
            if !l.trim().is_empty() {
                return Err(it.err(no, 1, "content after `end`"));
            }
        }
        Ok(MapFile {
            kind,
            comments,
            vertices,
            outer,
            rotation,
            labels,
            coloring,
        })
    }

    pub fn serialize(&self) -> String {
        let mut s = String::new();
        s.push_str(FORMAT_HEADER);
        s.push('\n');
        for c in &self.comments {
            let _ = writeln!(s, "# {c}");
        }
        let kind = match self.kind {
            Kind::Map => "map",
            Kind::Graph => "graph",
        };
        let _ = writeln!(s, "kind {kind}");
        let _ = writeln!(s, "vertices {}", self.vertices);
        if let Some(f) = self.outer {
            let _ = writeln!(s, "outer {f}");
        }
        s.push_str("rotation\n");
        for (v, row) in self.rotation.iter().enumerate() {
            let row: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "{v}: {}", row.join(" "));
        }
        if !self.labels.is_empty() {
            s.push_str("labels\n");
            for (id, l) in &self.labels {
                let _ = writeln!(s, "{id}: {l}");
            }
        }
        if !self.coloring.is_empty() {
            s.push_str("coloring\n");
            for (id, c) in &self.coloring {
                let _ = writeln!(s, "{id}: {c}");
            }
        }
        s.push_str("end\n");
        s
    }

    pub fn sha256(&self) -> String {
        let digest = Sha256::digest(self.serialize().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_map(
        map: &NormalMap,
        coloring: Option<&PartialMapColoring>,
        comments: &[&str],
    ) -> Self {
        MapFile {
            kind: Kind::Map,
            comments: comments.iter().map(|c| c.to_string()).collect(),
            vertices: map.vertex_count(),
            outer: (map.outer() != 0).then_some(map.outer()),
            rotation: map.embedding().edge_rotations(),
            labels: Vec::new(),
            coloring: coloring
                .map(|c| {
                    c.colors()
                        .iter()
                        .enumerate()
                        .map(|(f, col)| (f, col.name().to_string()))
                        .collect()
                })
                .unwrap_or_default(),
        }
    }

    pub fn from_graph(
        g: &MaximalPlanarGraph,
        coloring: Option<&VertexColoring>,
        comments: &[&str],
    ) -> Self {
        MapFile {
            kind: Kind::Graph,
            comments: comments.iter().map(|c| c.to_string()).collect(),
            vertices: g.n(),
            outer: None,
            rotation: (0..g.n()).map(|v| g.rotation(v)).collect(),
            labels: Vec::new(),
            coloring: coloring
                .map(|c| {
                    c.colors()
                        .iter()
                        .enumerate()
                        .map(|(v, col)| (v, col.name().to_string()))
                        .collect()
                })
                .unwrap_or_default(),
        }
    }

    /// Validates the file into a map or a graph.
    pub fn to_instance(&self) -> Result<Instance, CorpusError> {
        match self.kind {
            Kind::Map => {
                let rs = RotationSystem::from_edge_rotations(&self.rotation)
                    .map_err(|e| CorpusError::Validation(e.to_string()))?;
                let map = validate_normal_map(rs, self.outer)
                    .map_err(|e| CorpusError::Validation(e.to_string()))?;
                let coloring = if self.coloring.is_empty() {
                    None
                } else {
                    let mut c = PartialMapColoring::all_white(map.face_count());
                    for (f, name) in &self.coloring {
                        if *f >= map.face_count() {
                            return Err(CorpusError::Validation(format!(
                                "colour for missing face {f}"
                            )));
                        }
                        c.set(*f, MapColor::from_name(name).expect("checked by parser"));
                    }
                    Some(c)
                };
                let mut labels = BTreeMap::new();
                for (f, l) in &self.labels {
                    if *f >= map.face_count() {
                        return Err(CorpusError::Validation(format!(
                            "label for missing face {f}"
                        )));
                    }
                    labels.insert(l.clone(), *f);
                }
                Ok(Instance::Map {
                    map,
                    coloring,
                    labels,
                })
            }
            Kind::Graph => {
                let graph = MaximalPlanarGraph::from_neighbor_rotations(&self.rotation)
                    .map_err(|e| CorpusError::Validation(e.to_string()))?;
                let coloring = if self.coloring.is_empty() {
                    None
                } else {
                    let mut colors = vec![VColor::White; graph.n()];
                    for (v, name) in &self.coloring {
                        if *v >= graph.n() {
                            return Err(CorpusError::Validation(format!(
                                "colour for missing vertex {v}"
                            )));
                        }
                        colors[*v] = VColor::from_name(name).expect("checked by parser");
                    }
                    Some(VertexColoring::from_colors(colors))
                };
                Ok(Instance::Graph { graph, coloring })
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum Instance {
    Map {
        map: NormalMap,
        coloring: Option<PartialMapColoring>,
        /// Named faces.
        labels: BTreeMap<String, FaceId>,
    },
    Graph {
        graph: MaximalPlanarGraph,
        coloring: Option<VertexColoring>,
    },
}

pub fn parse_instance(text: &str) -> Result<Instance, CorpusError> {
    MapFile::parse(text)?.to_instance()
}

pub fn load_map(path: &Path) -> Result<Instance, CorpusError> {
    parse_instance(&std::fs::read_to_string(path)?)
}

/// A property checked when a corpus instance is loaded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expect {
    Vertices(usize),
    Faces(usize),
    /// Exactly one undecided vertex, and Kempe's argument is stuck there.
    Impasse,
    /// The cubic graph of the map has no Hamiltonian cycle.
    NonHamiltonian,
    /// Every face has even size, so the map is 3-colourable.
    ThreeColorable,
    /// Every proper 4-colouring gives the two labelled faces one colour.
    SameColor(String, String),
    /// SHA-256 of the canonical serialization.
    Checksum(String),
}

#[derive(Debug, Clone)]
pub struct CorpusInstance {
    pub name: &'static str,
    pub description: &'static str,
    /// Where the data comes from, including surrogate notes.
    pub provenance: &'static str,
    pub file: MapFile,
    pub expect: Vec<Expect>,
}

impl CorpusInstance {
    pub fn kind(&self) -> Kind {
        self.file.kind
    }

    pub fn instance(&self) -> Result<Instance, CorpusError> {
        self.file.to_instance()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub property: String,
    pub ok: bool,
    pub detail: String,
}

/// Budget for the same-colour enumeration.
const ENUMERATION_BUDGET: u64 = 50_000_000;

pub fn check_instance(inst: &CorpusInstance) -> Result<Vec<CheckResult>, CorpusError> {
    let loaded = inst.instance()?;
    let mut out = Vec::new();
    for e in &inst.expect {
        let (ok, detail) = match (e, &loaded) {
            (Expect::Vertices(n), Instance::Graph { graph, .. }) => {
                (graph.n() == *n, format!("{} vertices", graph.n()))
            }
            (Expect::Vertices(n), Instance::Map { map, .. }) => (
                map.vertex_count() == *n,
                format!("{} vertices", map.vertex_count()),
            ),
            (Expect::Faces(n), Instance::Map { map, .. }) => (
                map.face_count() == *n,
                format!("{} faces", map.face_count()),
            ),
            (Expect::Impasse, Instance::Graph { graph, coloring }) => match coloring {
                Some(c) => match kempe_vertex::is_impasse(graph, c) {
                    Ok((imp, ev)) => (
                        imp && graph.degree(ev.vertex) == 5,
                        format!(
                            "vertex {} degree {}, {} attempts",
                            ev.vertex,
                            graph.degree(ev.vertex),
                            ev.attempts.len()
                        ),
                    ),
                    Err(err) => (false, err.to_string()),
                },
                None => (false, "no colouring".into()),
            },
            (Expect::NonHamiltonian, Instance::Map { map, .. }) => {
                let adj = map.embedding().simple_adjacency();
                match oracle::is_hamiltonian(&adj, oracle::HAMILTONIAN_BOUND) {
                    Ok(h) => (!h, format!("hamiltonian = {h}")),
                    Err(err) => (false, err.to_string()),
                }
            }
            (Expect::ThreeColorable, Instance::Map { map, .. }) => {
                let h = oracle::three_colorable_by_heawood(map);
                let b = oracle::brute_force_three_colorable(map.adjacency());
                (h && b, format!("even faces = {h}, brute force = {b}"))
            }
            (Expect::SameColor(a, b), Instance::Map { map, labels, .. }) => {
                match (labels.get(a), labels.get(b)) {
                    (Some(&fa), Some(&fb)) => {
                        let mut count = 0u64;
                        let mut differ = false;
                        let res = oracle::for_each_coloring(
                            map.adjacency(),
                            4,
                            ENUMERATION_BUDGET,
                            |c| {
                                count += 1;
                                differ = c[fa] != c[fb];
                                differ
                            },
                        );
                        match res {
                            Ok(_) => (
                                !differ && count > 0,
                                format!("{count} colourings enumerated"),
                            ),
                            Err(err) => (false, err.to_string()),
                        }
                    }
                    _ => (false, format!("labels {a} or {b} missing")),
                }
            }
            (Expect::Checksum(h), _) => {
                let got = inst.file.sha256();
                (&got == h, got)
            }
            (e, _) => (false, format!("{e:?} does not apply to this kind")),
        };
        out.push(CheckResult {
            property: format!("{e:?}"),
            ok,
            detail,
        });
    }
    Ok(out)
}

/// Seeds and sizes of the generated large maps.
pub const GARDNER_FACES: usize = 110;
pub const GARDNER_SEED: u64 = 1975;
pub const APPEL_HAKEN_FACES: usize = 76;
pub const APPEL_HAKEN_SEED: u64 = 1976;
pub const GARDNER_SHA256: &str = "b18a804bffee811c054923e8225ebb613758e1a7a7d4760cbf81813852206a54";
pub const APPEL_HAKEN_SHA256: &str =
    "ec7e698d5b1c14ec647a51f1c6fce79d79ad26d43506779f88e0ccb92899d9b7";

fn file(text: &str) -> MapFile {
    MapFile::parse(text).expect("bundled corpus file parses")
}

fn generated_map(faces: usize, seed: u64, note: &str) -> MapFile {
    let map = random_normal_map(faces, seed).expect("generator yields a normal map");
    MapFile::from_map(&map, None, &[note])
}

fn twin_file(ring: usize, which: usize) -> MapFile {
    let gen = build_generator_graph(ring).expect("ring size is supported");
    let (g1, g2) = derive_twin_bad_examples(&gen).expect("twins build");
    let t = if which == 1 { g1 } else { g2 };
    let note = format!("twin bad example G{which} from the ring-{ring} generator");
    MapFile::from_graph(&t.graph, Some(&t.coloring), &[&note])
}

pub fn builtin_corpus() -> Vec<CorpusInstance> {
    use Expect::*;
    let bad = |n| vec![Vertices(n), Impasse];
    vec![
        CorpusInstance {
            name: "fritsch",
            description: "nine-vertex Kempe bad example",
            provenance: "surrogate: one of the two 9-vertex triangulations admitting a Kempe impasse, found by exhaustive enumeration",
            file: file(include_str!("../corpus/fritsch.graph")),
            expect: bad(9),
        },
        CorpusInstance {
            name: "soifer",
            description: "nine-vertex Kempe bad example",
            provenance: "surrogate: the other 9-vertex triangulation admitting a Kempe impasse, found by exhaustive enumeration",
            file: file(include_str!("../corpus/soifer.graph")),
            expect: bad(9),
        },
        CorpusInstance {
            name: "errera",
            description: "Errera graph with an impasse colouring",
            provenance: "standard Errera edge list; impasse colouring found by search with neighbour colours B,G,R,G,Y",
            file: file(include_str!("../corpus/errera.graph")),
            expect: bad(17),
        },
        CorpusInstance {
            name: "poussin",
            description: "Poussin graph with an impasse colouring",
            provenance: "standard Poussin edge list; impasse colouring found by search",
            file: file(include_str!("../corpus/poussin.graph")),
            expect: bad(15),
        },
        CorpusInstance {
            name: "kittell",
            description: "Kittell graph with an impasse colouring",
            provenance: "standard Kittell edge list; impasse colouring found by search",
            file: file(include_str!("../corpus/kittell.graph")),
            expect: bad(23),
        },
        CorpusInstance {
            name: "heawood",
            description: "25-vertex Kempe bad example",
            provenance: "surrogate: the 17-vertex hex twin grown by eight face insertions that keep the impasse",
            file: file(include_str!("../corpus/heawood.graph")),
            expect: bad(25),
        },
        CorpusInstance {
            name: "twin-hex-g1",
            description: "twin bad example, trouble in the inner face, ring 6",
            provenance: "generated by the triangulated-ring construction",
            file: twin_file(6, 1),
            expect: bad(17),
        },
        CorpusInstance {
            name: "twin-hex-g2",
            description: "twin bad example, trouble in the outer face, ring 6",
            provenance: "generated by the triangulated-ring construction",
            file: twin_file(6, 2),
            expect: bad(17),
        },
        CorpusInstance {
            name: "twin-square-g1",
            description: "twin bad example, trouble in the inner face, ring 4",
            provenance: "generated by the triangulated-ring construction",
            file: twin_file(4, 1),
            expect: bad(13),
        },
        CorpusInstance {
            name: "twin-square-g2",
            description: "twin bad example, trouble in the outer face, ring 4",
            provenance: "generated by the triangulated-ring construction",
            file: twin_file(4, 2),
            expect: bad(13),
        },
        CorpusInstance {
            name: "gardner",
            description: "110-region map standing in for the April Fool map",
            provenance: "surrogate: random normal map with the same region count (seed 1975); the original drawing is not transcribable",
            file: generated_map(GARDNER_FACES, GARDNER_SEED, "random 110-region normal map, seed 1975"),
            expect: vec![Faces(GARDNER_FACES), Checksum(GARDNER_SHA256.into())],
        },
        CorpusInstance {
            name: "appel-haken",
            description: "map standing in for the hardest-case map",
            provenance: "surrogate, best effort: random normal map (seed 1976); the scanned figure is not transcribable",
            file: generated_map(APPEL_HAKEN_FACES, APPEL_HAKEN_SEED, "random 76-region normal map, seed 1976"),
            expect: vec![Faces(APPEL_HAKEN_FACES), Checksum(APPEL_HAKEN_SHA256.into())],
        },
        CorpusInstance {
            name: "tutte",
            description: "Tutte graph as a 25-region map",
            provenance: "standard Tutte graph edge list, planar embedding",
            file: file(include_str!("../corpus/tutte.map")),
            expect: vec![Vertices(46), Faces(25), NonHamiltonian],
        },
        CorpusInstance {
            name: "heawood-map",
            description: "17-region map with every region even",
            provenance: "surrogate: dual of an Eulerian triangulation on 17 vertices found by flip search",
            file: file(include_str!("../corpus/heawood-map.map")),
            expect: vec![Faces(17), ThreeColorable],
        },
        CorpusInstance {
            name: "referee",
            description: "map without triangles where regions x, a, b, c are mutually adjacent",
            provenance: "surrogate: smallest-found map whose x, a, b, c form K4 and whose outer region y touches a, b, c",
            file: file(include_str!("../corpus/referee.map")),
            expect: vec![SameColor("x".into(), "y".into())],
        },
        CorpusInstance {
            name: "cube",
            description: "cube as a 6-region map",
            provenance: "standard",
            file: file(include_str!("../corpus/cube.map")),
            expect: vec![Vertices(8), Faces(6)],
        },
        CorpusInstance {
            name: "dodecahedron",
            description: "dodecahedron as a 12-region map",
            provenance: "standard",
            file: file(include_str!("../corpus/dodecahedron.map")),
            expect: vec![Vertices(20), Faces(12)],
        },
        CorpusInstance {
            name: "k4map",
            description: "tetrahedron: four mutually adjacent triangles",
            provenance: "standard",
            file: file(include_str!("../corpus/k4map.map")),
            expect: vec![Vertices(4), Faces(4)],
        },
    ]
}

pub fn corpus_instance(name: &str) -> Result<CorpusInstance, CorpusError> {
    builtin_corpus()
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| CorpusError::UnknownInstance(name.to_string()))
}

/// Reads `corpus:<name>` from the built-in corpus, anything else from disk.
pub fn resolve_source(source: &str) -> Result<MapFile, CorpusError> {
    match source.strip_prefix("corpus:") {
        Some(name) => Ok(corpus_instance(name)?.file),
        None => Ok(MapFile::parse(&std::fs::read_to_string(source)?)?),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("layout failure: {0}")]
    LayoutFailure(String),
}

pub type Layout = Vec<[f64; 2]>;

/// Tutte barycentric layout of the map's vertices: the outer region on a
/// regular polygon, every other vertex at the mean of its neighbours.
pub fn tutte_layout_generic<T: Float>(map: &NormalMap) -> Result<Vec<[T; 2]>, RenderError> {
    let rs = map.embedding();
    let n = rs.vertex_count();
    let outer: Vec<VertexId> = map.face_vertices(map.outer()).collect();
    let mut fixed = vec![false; n];
    let mut pos = vec![[T::zero(), T::zero()]; n];
    let k = T::from(outer.len()).unwrap();
    let tau = T::from(std::f64::consts::TAU).unwrap();
    for (i, &v) in outer.iter().enumerate() {
        if fixed[v] {
            return Err(RenderError::LayoutFailure(
                "outer region repeats a vertex".into(),
            ));
        }
        let a = tau * T::from(i).unwrap() / k;
        pos[v] = [a.cos(), a.sin()];
        fixed[v] = true;
    }
    let adj = rs.simple_adjacency();
    let eps = T::from(1e-12).unwrap();
    for _ in 0..20_000 {
        let mut delta = T::zero();
        for v in 0..n {
            if fixed[v] {
                continue;
            }
            let d = T::from(adj[v].len()).unwrap();
            let mut p = [T::zero(), T::zero()];
            for &w in &adj[v] {
                p[0] = p[0] + pos[w][0];
                p[1] = p[1] + pos[w][1];
            }
            p = [p[0] / d, p[1] / d];
            delta = delta.max((p[0] - pos[v][0]).abs() + (p[1] - pos[v][1]).abs());
            pos[v] = p;
        }
        if delta < eps {
            break;
        }
    }
    let tol = T::from(1e-6).unwrap();
    for a in 0..n {
        for b in a + 1..n {
            if (pos[a][0] - pos[b][0]).abs() + (pos[a][1] - pos[b][1]).abs() < tol {
                return Err(RenderError::LayoutFailure(format!(
                    "vertices {a} and {b} coincide"
                )));
            }
        }
    }
    Ok(pos)
}

pub fn tutte_layout(map: &NormalMap) -> Result<Layout, RenderError> {
    tutte_layout_generic::<f64>(map)
}

pub fn fill(c: MapColor) -> &'static str {
    match c {
        MapColor::White => "#ffffff",
        MapColor::Brown => "#8b5a2b",
        MapColor::Green => "#3cb043",
        MapColor::LightBlue => "#9fd3f0",
        MapColor::DarkBlue => "#1f3f99",
    }
}

/// SVG drawing: the outer region fills the background, every other region
/// is a filled polygon labelled with its id.
pub fn render_svg(map: &NormalMap, coloring: &PartialMapColoring) -> Result<String, RenderError> {
    const SIZE: f64 = 600.0;
    let pos = tutte_layout(map)?;
    let xy = |v: VertexId| {
        let p = pos[v];
        (
            SIZE / 2.0 + p[0] * SIZE * 0.45,
            SIZE / 2.0 - p[1] * SIZE * 0.45,
        )
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{SIZE}" height="{SIZE}" fill="{}" stroke="black"/>"#,
        fill(coloring.get(map.outer()))
    );
    for f in 0..map.face_count() {
        if f == map.outer() {
            continue;
        }
        let pts: Vec<String> = map
            .face_vertices(f)
            .map(|v| {
                let (x, y) = xy(v);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{}" stroke="black" stroke-width="1"/>"#,
            pts.join(" "),
            fill(coloring.get(f))
        );
        let (mut cx, mut cy, mut k) = (0.0, 0.0, 0.0);
        for v in map.face_vertices(f) {
            let (x, y) = xy(v);
            cx += x;
            cy += y;
            k += 1.0;
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="9" text-anchor="middle">{f}</text>"#,
            cx / k,
            cy / k + 3.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// DOT export of the dual graph, regions filled with their colours.
pub fn dual_dot(map: &NormalMap, coloring: Option<&PartialMapColoring>) -> String {
    let mut s = String::from("graph dual {\n  node [style=filled];\n");
    for f in 0..map.face_count() {
        let c = coloring.map_or(MapColor::White, |c| c.get(f));
        let _ = writeln!(s, "  {f} [fillcolor=\"{}\"];", fill(c));
    }
    for (a, b) in map.dual_edges() {
        let _ = writeln!(s, "  {a} -- {b};");
    }
    s.push_str("}\n");
    s
}
