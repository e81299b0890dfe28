use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use twwlab_core::census::{enumerate_avoiding, ForbiddenSet, Universe};
use twwlab_core::minors::{check_mixed_witness, TypeMatrix, WitnessDoc};
use twwlab_core::semigrid::{generate_semigrid, GraphScheme};
use twwlab_core::OrderedStructure;

const NE_SCHEME: &str = "ne/</independent/{}";

fn twwlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twwlab"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(name);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&doc).unwrap()
}

fn assert_valid(schema_name: &str, doc: &Value) {
    let s = schema(schema_name);
    let msgs: Vec<String> = match s.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors
            .map(|e| format!("{} at {}", e, e.instance_path))
            .collect(),
    };
    panic!("{schema_name}: {msgs:?}\n{doc:#}");
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn ne_id() -> usize {
    NE_SCHEME.parse::<GraphScheme>().unwrap().index()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Runs with `--json`, checks exit 0 and the report schema, returns the outcome.
fn report(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.push("--json");
    let o = twwlab(&full);
    assert!(o.status.success(), "{args:?}: {}", stderr(&o));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("run_report.schema.json", &doc);
    doc["outcome"].clone()
}

#[test]
fn single_vertex_has_width_zero() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "one.obs",
        &OrderedStructure::graph(1, &[]).unwrap().to_obs(),
    );
    let o = twwlab(&["tww-exact", s(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn graph_scheme_count() {
    let o = twwlab(&["semigrid", "schemes", "--sig", "graph"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "256");
    let listed = twwlab(&["semigrid", "schemes", "--list"]);
    assert_eq!(stdout(&listed).lines().count(), 257);
}

#[test]
fn algo_on_unequal_semigrid_gives_witness() {
    let dir = TempDir::new().unwrap();
    let g = generate_semigrid(NE_SCHEME.parse().unwrap(), 6, 6).unwrap();
    let p = write(&dir, "ne.obs", &g.to_obs());
    let o = twwlab(&["algo", "--k", "1", "--t", "2", s(&p)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid("witness.schema.json", &doc);
    let w = WitnessDoc::from_json(&stdout(&o))
        .unwrap()
        .into_mixed()
        .unwrap();
    check_mixed_witness(&TypeMatrix::from_structure(&g), &w).unwrap();
    assert_eq!(
        report(&["algo", "--k", "1", "--t", "2", s(&p)])["kind"],
        "witness"
    );
}

#[test]
fn written_structures_reparse_byte_exact() {
    let dir = TempDir::new().unwrap();
    for id in [0, 37, 128, ne_id(), 255] {
        let out = dir.path().join(format!("{id}.obs"));
        let o = twwlab(&[
            "semigrid",
            "gen",
            "--scheme",
            &id.to_string(),
            "--m",
            "2",
            "--n",
            "3",
            "--out",
            s(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let text = std::fs::read_to_string(&out).unwrap();
        assert_eq!(OrderedStructure::from_obs(&text).unwrap().to_obs(), text);
    }
    let general = dir.path().join("general.obs");
    let o = twwlab(&[
        "semigrid",
        "gen",
        "--sig",
        "E:2 F:2",
        "--scheme",
        "5",
        "--m",
        "2",
        "--n",
        "2",
        "--out",
        s(&general),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&general).unwrap();
    assert_eq!(OrderedStructure::from_obs(&text).unwrap().to_obs(), text);
    assert_eq!(
        report(&["semigrid", "classify", s(&general)])["scheme"]["family"],
        "general"
    );
}

#[test]
fn every_json_report_matches_schema() {
    let dir = TempDir::new().unwrap();
    let p5 = write(&dir, "p5.obs", &OrderedStructure::path(5).to_obs());
    let seq = dir.path().join("p5.seq");
    let out = report(&["tww-exact", s(&p5), "--seq", s(&seq)]);
    assert_eq!(out["twinWidth"], 1);
    assert_eq!(
        stdout(&twwlab(&["verify-seq", s(&p5), s(&seq)])).trim(),
        "1"
    );
    report(&["verify-seq", s(&p5), s(&seq)]);
    report(&["tww-approx", s(&p5)]);
    report(&["tww-approx", s(&p5), "--profile", "exp8"]);
    report(&["algo", "--k", "3", "--t", "3", s(&p5)]);

    let id = write(&dir, "id.txt", "1000\n0100\n0010\n0001\n");
    let grid = report(&["minors", "grid", s(&id), "--t", "2"]);
    assert!(grid["witness"].is_null() && grid["exhaustive"] == true);
    let ones = write(&dir, "ones.txt", "1111\n1111\n1111\n1111\n");
    assert_eq!(
        report(&["minors", "grid", s(&ones), "--t", "2"])["witness"]["rowCuts"],
        serde_json::json!([1])
    );
    report(&["minors", "mixed", s(&id), "--k", "2", "--t", "2"]);
    report(&["minors", "mixed", s(&p5), "--k", "2", "--t", "2"]);
    let bad = report(&["minors", "bad", s(&id), "--rows", "0:4", "--k", "2"]);
    assert!(!bad["intervals"].as_array().unwrap().is_empty());

    let gen = report(&[
        "semigrid",
        "gen",
        "--scheme",
        &ne_id().to_string(),
        "--m",
        "3",
        "--n",
        "3",
    ]);
    let ne = write(&dir, "ne.obs", gen["obs"].as_str().unwrap());
    let c = report(&["semigrid", "classify", s(&ne)]);
    assert_eq!(
        (c["m"].clone(), c["n"].clone(), c["scheme"]["id"].clone()),
        (3.into(), 3.into(), ne_id().into())
    );
    let cells = write(&dir, "cells.txt", "1 2\n2 3\n");
    let gs = dir.path().join("gs.obs");
    assert!(twwlab(&[
        "semigrid",
        "gen",
        "--scheme",
        &ne_id().to_string(),
        "--m",
        "2",
        "--n",
        "3",
        "--cells",
        s(&cells),
        "--out",
        s(&gs)
    ])
    .status
    .success());
    let d = report(&[
        "semigrid",
        "decode",
        s(&gs),
        "--scheme",
        &ne_id().to_string(),
    ]);
    assert_eq!(d["cells"], serde_json::json!([[1, 2], [2, 3]]));
    report(&["semigrid", "schemes", "--sig", "E:2 P:1"]);

    let f = write(&dir, "f.sexp", "(forall x (exists y (or (E x y) (= x y))))");
    assert_eq!(
        report(&["mc", "--formula", s(&f), "--structure", s(&p5)])["value"],
        true
    );
    let open = write(&dir, "open.sexp", "(E x y)");
    let mc = twwlab(&[
        "mc",
        "--formula",
        s(&open),
        "--structure",
        s(&p5),
        "--assign",
        "x=1",
        "--assign",
        "y=2",
    ]);
    assert_eq!(stdout(&mc).trim(), "true");

    let forbid = dir.path().join("forbid");
    std::fs::create_dir(&forbid).unwrap();
    write(&dir, "forbid/p3.obs", &OrderedStructure::path(3).to_obs());
    let counts = report(&["census", "--forbid", s(&forbid), "--n-max", "4"]);
    assert_eq!(counts["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn census_csv_matches_library_and_thread_count() {
    let dir = TempDir::new().unwrap();
    let forbid = dir.path().join("forbid");
    std::fs::create_dir(&forbid).unwrap();
    write(&dir, "forbid/p3.obs", &OrderedStructure::path(3).to_obs());
    let csv = dir.path().join("growth.csv");
    let o = twwlab(&[
        "census",
        "--forbid",
        s(&forbid),
        "--n-max",
        "6",
        "--out",
        s(&csv),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,count,millis"));
    let f = ForbiddenSet::new(vec![OrderedStructure::path(3)]).unwrap();
    let counts: Vec<String> = lines
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect();
    let want: Vec<String> = (0..=6)
        .map(|n| {
            enumerate_avoiding(&Universe::Graphs, &f, n)
                .unwrap()
                .to_string()
        })
        .collect();
    assert_eq!(counts, want);
    let single = Command::new(env!("CARGO_BIN_EXE_twwlab"))
        .args(["census", "--forbid", s(&forbid), "--n-max", "6", "--json"])
        .env("TWWLAB_THREADS", "1")
        .output()
        .unwrap();
    let doc: Value = serde_json::from_str(&stdout(&single)).unwrap();
    assert_eq!(doc["config"]["threads"], 1);
    let single_counts: Vec<String> = doc["outcome"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["count"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(single_counts, want);
}

#[test]
fn usage_errors_exit_2_and_name_the_flag() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.obs", &OrderedStructure::path(4).to_obs());
    let cases: [(&[&str], &str); 6] = [
        (&["algo", "--t", "2", s(&p)], "--k"),
        (&["algo", "--k", "x", "--t", "2", s(&p)], "--k"),
        (&["algo", "--k", "1", "--t", "0", s(&p)], "--t"),
        (
            &["semigrid", "gen", "--scheme", "256", "--m", "2", "--n", "2"],
            "--scheme",
        ),
        (&["tww-approx", s(&p), "--profile", "cubic"], "--profile"),
        (
            &["minors", "bad", s(&p), "--rows", "2-3", "--k", "1"],
            "--rows",
        ),
    ];
    for (args, flag) in cases {
        let o = twwlab(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(flag), "{args:?}: {}", stderr(&o));
    }
    let o = Command::new(env!("CARGO_BIN_EXE_twwlab"))
        .args(["semigrid", "schemes"])
        .env("TWWLAB_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("TWWLAB_THREADS"));
}

#[test]
fn domain_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.obs", &OrderedStructure::path(5).to_obs());
    let junk = write(&dir, "junk.obs", "not a structure\n");
    let seq = write(
        &dir,
        "bad.seq",
        "n 5\nmerge 0 1\nmerge 0 1\nmerge 2 3\nmerge 3 4\n",
    );
    let big = write(&dir, "big.obs", &OrderedStructure::path(12).to_obs());
    let cases: [&[&str]; 5] = [
        &["semigrid", "classify", s(&p)],
        &["tww-exact", s(&junk)],
        &["verify-seq", s(&p), s(&seq)],
        &["tww-exact", s(&big)],
        &["tww-exact", "/nonexistent/file.obs"],
    ];
    for args in cases {
        let o = twwlab(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}
