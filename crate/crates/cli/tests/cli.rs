use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fourcolor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn color_gardner_succeeds() {
    let o = run(&["color", "corpus:gardner"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(
        out.starts_with("faces 110 colours 4 verified true"),
        "{out}"
    );
    assert_eq!(out.lines().count(), 111);
}

#[test]
fn color_k4_strict_uses_contraction() {
    let o = run(&["color", "corpus:k4map", "--strict"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verified true"));
}

#[test]
fn analyze_tutte_is_not_hamiltonian() {
    let o = run(&["analyze", "corpus:tutte", "--hamiltonian"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "hamiltonian false");
}

#[test]
fn json_output_parses() {
    let o = run(&["--json", "color", "corpus:cube"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["faces"], 6);
    assert_eq!(v["coloring"].as_array().unwrap().len(), 6);
}

#[test]
fn color_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cube.col");
    let p = path.to_str().unwrap();
    assert_eq!(
        run(&["color", "corpus:cube", "--out", p]).status.code(),
        Some(0)
    );
    let o = run(&["verify", "corpus:cube", p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("proper true"));

    let bad = dir.path().join("bad.col");
    let text: String = (0..6).map(|f| format!("{f}: brown\n")).collect();
    std::fs::write(&bad, text).unwrap();
    let o = run(&["verify", "corpus:cube", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn svg_output_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cube.svg");
    let o = run(&["color", "corpus:cube", "--svg", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polygon").count(), 5);
}

#[test]
fn kempe_reports_and_resolves_impasse() {
    let o = run(&["kempe", "corpus:errera"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("impasse true"), "{out}");
    assert!(out.contains("verified true"), "{out}");
    assert_eq!(
        run(&["kempe", "corpus:errera", "--strict"]).status.code(),
        Some(1)
    );
}

#[test]
fn generate_bad_writes_three_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&["generate-bad", "--ring", "6", "--out", d]);
    assert_eq!(o.status.code(), Some(0));
    for name in ["ring6-g1.graph", "ring6-g2.graph", "ring6-generator.graph"] {
        let path = dir.path().join(name);
        assert!(path.exists(), "{name}");
        let o = run(&["kempe", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}");
    }
}

#[test]
fn generate_bad_rejects_other_ring_sizes_as_usage() {
    assert_eq!(
        run(&["generate-bad", "--ring", "5"]).status.code(),
        Some(64)
    );
}

#[test]
fn oracle_and_corpus_commands() {
    let o = run(&["oracle", "corpus:cube"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 6);
    let o = run(&["corpus", "list"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 18);
    assert_eq!(run(&["corpus", "check"]).status.code(), Some(0));
    let o = run(&["corpus", "export", "cube"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("fourcolor-map 1"));
}

#[test]
fn exported_file_colours_like_the_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tutte.map");
    let p = path.to_str().unwrap();
    assert_eq!(
        run(&["corpus", "export", "tutte", "--out", p])
            .status
            .code(),
        Some(0)
    );
    let a = run(&["color", p]);
    let b = run(&["color", "corpus:tutte"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(run(&["color", "/nonexistent/map"]).status.code(), Some(2));
    assert_eq!(run(&["color", "corpus:nowhere"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.map");
    std::fs::write(
        &path,
        "fourcolor-map 1\nkind map\nvertices 4\nrotation\n0: 1 2\n",
    )
    .unwrap();
    let o = run(&["color", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn usage_errors_exit_with_sixty_four() {
    assert_eq!(run(&["bogus"]).status.code(), Some(64));
    assert_eq!(run(&["color"]).status.code(), Some(64));
    assert_eq!(run(&[]).status.code(), Some(64));
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}
