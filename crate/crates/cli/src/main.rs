use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use fourcolor::color_steps::{four_color, FourColorOptions, MapColor, PartialMapColoring};
use fourcolor::corpus_io::{
    builtin_corpus, check_instance, corpus_instance, render_svg, resolve_source, Instance, Kind,
    MapFile,
};
use fourcolor::kempe_vertex::{
    build_generator_graph, derive_twin_bad_examples, is_impasse, kempe_four_color, oracle_coloring,
    resolve_impasse, KempeOutcome, MaximalPlanarGraph, VertexColoring, RESOLVE_MOVES,
};
use fourcolor::oracle;
use fourcolor::planar_map::{euler_polygon_check, NormalMap};
use fourcolor::spiral::{spiral_order, Direction};

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "fourcolor",
    version,
    about = "Four-colour planar maps and study Kempe chains"
)]
struct Cli {
    /// Structured JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Four-colour a map with the spiral heuristic.
    Color {
        /// Map file or `corpus:<name>`.
        map: String,
        /// Fail instead of falling back to the exact solver.
        #[arg(long)]
        strict: bool,
        /// Spiral counterclockwise.
        #[arg(long)]
        ccw: bool,
        /// Write the run report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write an SVG drawing here.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write the colouring (`face: colour` lines) here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a colouring file against a map.
    Verify { map: String, coloring: PathBuf },
    /// Print the spiral order of a map.
    Spiral {
        map: String,
        #[arg(long)]
        ccw: bool,
    },
    /// Kempe's algorithm on a triangulation, or impasse analysis when the
    /// file carries a partial colouring.
    Kempe {
        graph: String,
        /// Print every switch attempted.
        #[arg(long)]
        trace: bool,
        /// Exit 1 on an impasse instead of resolving it.
        #[arg(long)]
        strict: bool,
    },
    /// Build the ring generator and its twin bad examples.
    GenerateBad {
        #[arg(long, value_parser = ["4", "6"])]
        ring: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact 4-colouring by backtracking.
    Oracle { input: String },
    /// Structural analyses of a map; all of them when no flag is given.
    Analyze {
        map: String,
        #[arg(long)]
        euler: bool,
        #[arg(long)]
        strong: bool,
        #[arg(long)]
        hamiltonian: bool,
        #[arg(long)]
        heawood3: bool,
    },
    /// The built-in corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    List,
    Check,
    Export {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// An error from reading or validating input.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn input<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| anyhow!(InputError(e)))
}

fn load(source: &str) -> Result<Instance> {
    input(
        resolve_source(source)
            .and_then(|f| f.to_instance())
            .with_context(|| format!("reading {source}")),
    )
}

fn load_map(source: &str) -> Result<NormalMap> {
    match load(source)? {
        Instance::Map { map, .. } => Ok(map),
        Instance::Graph { .. } => input(Err(anyhow!("{source} is a graph, expected a map"))),
    }
}

fn load_graph(source: &str) -> Result<(MaximalPlanarGraph, Option<VertexColoring>)> {
    match load(source)? {
        Instance::Graph { graph, coloring } => Ok((graph, coloring)),
        Instance::Map { .. } => input(Err(anyhow!("{source} is a map, expected a graph"))),
    }
}

fn emit(json: bool, value: serde_json::Value, text: impl FnOnce() -> String) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("json value")
        );
    } else {
        print!("{}", text());
    }
}

fn coloring_text(c: &PartialMapColoring) -> String {
    c.colors()
        .iter()
        .enumerate()
        .map(|(f, col)| format!("{f}: {}\n", col.name()))
        .collect()
}

fn parse_coloring(text: &str, faces: usize) -> Result<PartialMapColoring> {
    let mut c = PartialMapColoring::all_white(faces);
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, name) = line
            .split_once(':')
            .ok_or_else(|| anyhow!("line {}: expected `face: colour`", i + 1))?;
        let f: usize = id
            .trim()
            .parse()
            .map_err(|_| anyhow!("line {}: invalid face `{}`", i + 1, id.trim()))?;
        if f >= faces {
            bail!("line {}: face {f} out of range", i + 1);
        }
        let col = MapColor::from_name(name.trim())
            .ok_or_else(|| anyhow!("line {}: unknown colour `{}`", i + 1, name.trim()))?;
        c.set(f, col);
    }
    Ok(c)
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

fn direction(ccw: bool) -> Direction {
    if ccw {
        Direction::Counterclockwise
    } else {
        Direction::Clockwise
    }
}

fn run(cli: Cli) -> Result<u8> {
    let json = cli.json;
    match cli.command {
        Command::Color {
            map,
            strict,
            ccw,
            report,
            svg,
            out,
        } => {
            let m = load_map(&map)?;
            let options = FourColorOptions {
                strict,
                direction: direction(ccw),
            };
            let outcome = match four_color(&m, options) {
                Ok(o) => o,
                Err(e) => {
                    emit(json, json!({"ok": false, "error": e.to_string()}), || {
                        format!("failed: {e}\n")
                    });
                    return Ok(EXIT_FAIL);
                }
            };
            let verified = outcome.coloring.is_complete() && outcome.coloring.is_proper(&m);
            if let Some(p) = report {
                let body = if json {
                    outcome.report.to_json()
                } else {
                    outcome.report.to_text()
                };
                write_file(&p, &body)?;
            }
            if let Some(p) = svg {
                write_file(&p, &render_svg(&m, &outcome.coloring)?)?;
            }
            if let Some(p) = out {
                write_file(&p, &coloring_text(&outcome.coloring))?;
            }
            let r = &outcome.report;
            emit(
                json,
                json!({
                    "ok": verified,
                    "faces": m.face_count(),
                    "colors_used": r.colors_used,
                    "fallback_used": r.fallback_used,
                    "failure": r.failure,
                    "attempts": r.attempts.len(),
                    "coloring": outcome.coloring.colors().iter().map(|c| c.name()).collect::<Vec<_>>(),
                }),
                || {
                    let mut s = format!(
                        "faces {} colours {} verified {}{}\n",
                        m.face_count(),
                        r.colors_used,
                        verified,
                        if r.fallback_used {
                            " (exact fallback)"
                        } else {
                            ""
                        }
                    );
                    if let Some(f) = &r.failure {
                        s.push_str(&format!("heuristic failure: {f}\n"));
                    }
                    s.push_str(&coloring_text(&outcome.coloring));
                    s
                },
            );
            Ok(if verified { 0 } else { EXIT_FAIL })
        }
        Command::Verify { map, coloring } => {
            let m = load_map(&map)?;
            let text = input(
                fs::read_to_string(&coloring)
                    .with_context(|| format!("reading {}", coloring.display())),
            )?;
            let c = input(parse_coloring(&text, m.face_count()))?;
            let complete = c.is_complete();
            let proper = c.is_proper(&m);
            let ok = complete && proper;
            emit(
                json,
                json!({"ok": ok, "complete": complete, "proper": proper, "colors_used": c.colors_used()}),
                || {
                    format!(
                        "complete {complete} proper {proper} colours {}\n",
                        c.colors_used()
                    )
                },
            );
            Ok(if ok { 0 } else { EXIT_FAIL })
        }
        Command::Spiral { map, ccw } => {
            let m = load_map(&map)?;
            let s = spiral_order(&m, direction(ccw));
            emit(json, json!({"order": s.order, "chains": s.chains}), || {
                let mut t = format!("order {}\n", join(&s.order));
                for (i, c) in s.chains.iter().enumerate() {
                    t.push_str(&format!("chain {} {}\n", i + 1, join(c)));
                }
                t
            });
            Ok(0)
        }
        Command::Kempe {
            graph,
            trace,
            strict,
        } => {
            let (g, partial) = load_graph(&graph)?;
            match partial.filter(|c| !c.is_complete()) {
                Some(c) => kempe_partial(&g, &c, trace, strict, json),
                None => kempe_full(&g, trace, strict, json),
            }
        }
        Command::GenerateBad { ring, out } => {
            let k: usize = ring.parse().expect("validated by clap");
            let gen = build_generator_graph(k)?;
            let (g1, g2) = derive_twin_bad_examples(&gen)?;
            let mut rows = Vec::new();
            for (name, t) in [("g1", &g1), ("g2", &g2)] {
                let (imp, _) = is_impasse(&t.graph, &t.coloring)?;
                let colorable = oracle_coloring(&t.graph).is_some();
                rows.push(json!({
                    "name": name,
                    "vertices": t.graph.n(),
                    "apex": t.apex,
                    "pentagon": t.pentagon.iter().map(|&v| t.coloring.get(v).name()).collect::<Vec<_>>(),
                    "impasse": imp,
                    "four_colorable": colorable,
                }));
                if let Some(dir) = &out {
                    fs::create_dir_all(dir)?;
                    let note = format!("twin bad example {name}, ring {k}");
                    let file = MapFile::from_graph(&t.graph, Some(&t.coloring), &[&note]);
                    write_file(
                        &dir.join(format!("ring{k}-{name}.graph")),
                        &file.serialize(),
                    )?;
                }
            }
            if let Some(dir) = &out {
                let file = MapFile::from_graph(
                    &gen.graph,
                    Some(&gen.coloring),
                    &[&format!("generator, ring {k}")],
                );
                write_file(
                    &dir.join(format!("ring{k}-generator.graph")),
                    &file.serialize(),
                )?;
            }
            emit(
                json,
                json!({"ring": k, "generator_vertices": gen.graph.n(), "twins": rows}),
                || {
                    let mut s = format!("generator ring {k}: {} vertices\n", gen.graph.n());
                    for r in &rows {
                        s.push_str(&format!(
                            "{}: {} vertices, pentagon {}, impasse {}, four-colourable {}\n",
                            r["name"].as_str().unwrap(),
                            r["vertices"],
                            r["pentagon"],
                            r["impasse"],
                            r["four_colorable"]
                        ));
                    }
                    s
                },
            );
            Ok(0)
        }
        Command::Oracle { input: source } => {
            let (adj, what) = match load(&source)? {
                Instance::Map { map, .. } => (map.adjacency().to_vec(), "face"),
                Instance::Graph { graph, .. } => (graph.adjacency().to_vec(), "vertex"),
            };
            match oracle::backtrack_four_color(&adj) {
                Some(c) => {
                    let ok = oracle::verify_proper(&adj, &c);
                    emit(json, json!({"ok": ok, "colors": c}), || {
                        c.iter()
                            .enumerate()
                            .map(|(i, x)| format!("{what} {i}: {x}\n"))
                            .collect()
                    });
                    Ok(if ok { 0 } else { EXIT_FAIL })
                }
                None => {
                    emit(json, json!({"ok": false}), || "no 4-colouring\n".into());
                    Ok(EXIT_FAIL)
                }
            }
        }
        Command::Analyze {
            map,
            euler,
            strong,
            hamiltonian,
            heawood3,
        } => {
            let m = load_map(&map)?;
            let all = !(euler || strong || hamiltonian || heawood3);
            let mut result = serde_json::Map::new();
            let mut text = String::new();
            if all || euler {
                let (stats, ok) = euler_polygon_check(&m);
                result.insert(
                    "euler".into(),
                    json!({"holds": ok, "lhs": stats.lhs(), "rhs": stats.rhs()}),
                );
                text.push_str(&format!("euler {ok} ({} = {})\n", stats.lhs(), stats.rhs()));
            }
            if all || hamiltonian {
                let adj = m.embedding().simple_adjacency();
                let v = match oracle::is_hamiltonian(&adj, oracle::HAMILTONIAN_BOUND) {
                    Ok(h) => json!(h),
                    Err(e) => json!(e.to_string()),
                };
                text.push_str(&format!("hamiltonian {}\n", plain(&v)));
                result.insert("hamiltonian".into(), v);
            }
            if all || strong {
                let v = match oracle::strong_coloring_search(&m, oracle::STRONG_BUDGET) {
                    Ok(Some(w)) => json!({"found": true, "side_a": w.side_a, "side_b": w.side_b}),
                    Ok(None) => json!({"found": false}),
                    Err(e) => json!({"found": null, "error": e.to_string()}),
                };
                text.push_str(&format!("strong {}\n", plain(&v["found"])));
                result.insert("strong".into(), v);
            }
            if all || heawood3 {
                let h = oracle::three_colorable_by_heawood(&m);
                result.insert("heawood3".into(), json!(h));
                text.push_str(&format!("three-colourable {h}\n"));
            }
            emit(json, serde_json::Value::Object(result), || text);
            Ok(0)
        }
        Command::Corpus { action } => corpus(action, json),
    }
}

fn plain(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn join(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn kempe_full(g: &MaximalPlanarGraph, trace: bool, strict: bool, json: bool) -> Result<u8> {
    match kempe_four_color(g) {
        KempeOutcome::Colored(c) => {
            let ok = c.is_complete() && c.is_proper(g);
            emit(
                json,
                json!({"ok": ok, "impasse": false, "coloring": c.colors()}),
                || format!("coloured by Kempe's algorithm, verified {ok}\n"),
            );
            Ok(if ok { 0 } else { EXIT_FAIL })
        }
        KempeOutcome::Impasse(t) => {
            let mut s = format!("impasse at vertex {}\n", t.vertex);
            if trace {
                for a in &t.attempts {
                    s.push_str(&format!(
                        "  {} proper {} freed {}\n",
                        a.description, a.proper, a.freed
                    ));
                }
            }
            if strict {
                emit(
                    json,
                    json!({"ok": false, "impasse": true, "trace": t}),
                    || s,
                );
                return Ok(EXIT_FAIL);
            }
            let r = resolve_impasse(g, &t.coloring, RESOLVE_MOVES);
            finish_resolution(g, r, json!({"impasse": true, "trace": t}), s, json)
        }
    }
}

fn kempe_partial(
    g: &MaximalPlanarGraph,
    c: &VertexColoring,
    trace: bool,
    strict: bool,
    json: bool,
) -> Result<u8> {
    let (imp, ev) = input(is_impasse(g, c).map_err(anyhow::Error::from))?;
    let mut s = format!("vertex {} impasse {imp}\n", ev.vertex);
    if trace {
        for a in &ev.attempts {
            s.push_str(&format!(
                "  {} proper {} freed {}\n",
                a.description, a.proper, a.freed
            ));
        }
    }
    if strict && imp {
        emit(
            json,
            json!({"ok": false, "impasse": true, "evidence": ev}),
            || s,
        );
        return Ok(EXIT_FAIL);
    }
    let r = resolve_impasse(g, c, RESOLVE_MOVES);
    finish_resolution(g, r, json!({"impasse": imp, "evidence": ev}), s, json)
}

fn finish_resolution(
    g: &MaximalPlanarGraph,
    r: Result<fourcolor::kempe_vertex::Resolution, fourcolor::kempe_vertex::KempeError>,
    mut value: serde_json::Value,
    mut s: String,
    json: bool,
) -> Result<u8> {
    match r {
        Ok(res) => {
            let ok = res.coloring.is_complete() && res.coloring.is_proper(g);
            for m in &res.moves {
                s.push_str(&format!("move: {m}\n"));
            }
            s.push_str(&format!("resolved, verified {ok}\n"));
            value["ok"] = json!(ok);
            value["moves"] = json!(res.moves);
            value["coloring"] = json!(res.coloring.colors());
            emit(json, value, || s);
            Ok(if ok { 0 } else { EXIT_FAIL })
        }
        Err(e) => {
            s.push_str(&format!("not resolved: {e}\n"));
            value["ok"] = json!(false);
            value["error"] = json!(e.to_string());
            emit(json, value, || s);
            Ok(EXIT_FAIL)
        }
    }
}

fn corpus(action: CorpusAction, json: bool) -> Result<u8> {
    match action {
        CorpusAction::List => {
            let items: Vec<_> = builtin_corpus()
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "kind": c.kind(),
                        "description": c.description,
                        "provenance": c.provenance,
                    })
                })
                .collect();
            emit(json, json!(items), || {
                builtin_corpus()
                    .iter()
                    .map(|c| {
                        let kind = if c.kind() == Kind::Map {
                            "map"
                        } else {
                            "graph"
                        };
                        format!("{:<16} {:<5} {}\n", c.name, kind, c.description)
                    })
                    .collect()
            });
            Ok(0)
        }
        CorpusAction::Check => {
            let mut all_ok = true;
            let mut rows = Vec::new();
            let mut text = String::new();
            for inst in builtin_corpus() {
                let results = check_instance(&inst)?;
                for r in &results {
                    all_ok &= r.ok;
                    text.push_str(&format!(
                        "{} {} {} ({})\n",
                        if r.ok { "PASS" } else { "FAIL" },
                        inst.name,
                        r.property,
                        r.detail
                    ));
                }
                rows.push(json!({"name": inst.name, "checks": results}));
            }
            emit(json, json!({"ok": all_ok, "instances": rows}), || text);
            Ok(if all_ok { 0 } else { EXIT_FAIL })
        }
        CorpusAction::Export { name, out } => {
            let inst = input(corpus_instance(&name).map_err(anyhow::Error::from))?;
            let text = inst.file.serialize();
            match out {
                Some(p) => write_file(&p, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
    }
}
