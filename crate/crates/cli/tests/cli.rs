use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyglue")).args(args).output().expect("runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polyglue-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn lists_fixtures() {
    let out = run(&["fixtures"]);
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<String> = serde_json::from_value(report(&out)["fixtures"].clone()).unwrap();
    for n in ["square-torus", "cube-3-torus", "benoist-triangles", "hexagon-torus", "right-isosceles-wallpaper", "dodecahedron"] {
        assert!(names.iter().any(|m| m == n), "{n}");
    }
}

#[test]
fn classify_exact_and_float() {
    let out = run(&["classify", "pentagon"]);
    assert_eq!(out.status.code(), Some(0));
    let c = &report(&out)["classification"];
    assert_eq!(c["triangular"], false);
    assert_eq!(c["thin"], false);

    for eps in ["1e-12", "1e-6"] {
        let out = run(&["--eps", eps, "classify", "icosahedron"]);
        let r = report(&out);
        assert_eq!(r["backend"], "float");
        assert_eq!(r["classification"]["thin"], true);
        assert_eq!(r["classification"]["f_vector"], serde_json::json!([12, 30, 20]));
    }
}

#[test]
fn check_exit_codes() {
    assert_eq!(run(&["check", "square-torus"]).status.code(), Some(0));
    let out = run(&["check", "hexagon-torus"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["report"]["residually_convex"], false);
    assert_eq!(run(&["check", "no-such-thing"]).status.code(), Some(3));

    let bad = tmp("bad.json");
    std::fs::write(&bad, r#"{"dimension": 2, "polytopes": [{"name": "A", "vertices": [["1/0", 0, 1]]}]}"#).unwrap();
    let out = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("$.polytopes[0].vertices[0][0]"));
}

#[test]
fn develop_reports_benoist_wrap() {
    let out = run(&["--no-timing", "develop", "benoist-triangles", "--depth", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let r = &report(&out)["report"];
    assert_eq!(r["injective"], false);
    assert!(r["wrap_certificate"]["cells"].as_u64().unwrap() <= 40);
}

#[test]
fn certify_square_torus_and_write_json() {
    let path = tmp("certify.json");
    let out = run(&["--no-timing", "--json-out", path.to_str().unwrap(), "certify", "square-torus", "--depth", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["report"]["certified"], true);
    assert_eq!(r["report"]["proper_convexity"]["simplex"], Value::Null);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written, r);
}

#[test]
fn gallery_trace() {
    let out = run(&["gallery", "square-torus", "--facet", "0", "--steps", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &report(&out)["report"];
    assert_eq!(r["cells"].as_array().unwrap().len(), 4);
    assert_eq!(r["checks"]["convex"], true);
    assert_eq!(run(&["gallery", "square-torus", "--facet", "9"]).status.code(), Some(3));
}

#[test]
fn reports_and_svg_are_deterministic() {
    let a = run(&["--no-timing", "develop", "right-isosceles-wallpaper", "--depth", "2"]);
    let b = run(&["--no-timing", "develop", "right-isosceles-wallpaper", "--depth", "2"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(1));
    assert!(!report(&a)["report"]["strong_audit"]["bad"].as_array().unwrap().is_empty());

    let (p, q) = (tmp("a.svg"), tmp("b.svg"));
    for f in [&p, &q] {
        let out = run(&["--svg", f.to_str().unwrap(), "render", "square-torus", "--depth", "3", "--gallery", "0"]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (sa, sb) = (std::fs::read(&p).unwrap(), std::fs::read(&q).unwrap());
    assert_eq!(sa, sb);
    assert_eq!(String::from_utf8(sa).unwrap().matches("<polygon").count(), 49);
    assert_eq!(run(&["render", "cube-3-torus"]).status.code(), Some(3));
}
