use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn repvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repvol")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> Value {
    let out = repvol(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn run_fixture(command: &str, file: &str) -> Value {
    run_ok(&[command, "--input", fixture(file).to_str().unwrap()])
}

fn write_input(dir: &tempfile::TempDir, name: &str, doc: &Value) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, serde_json::to_string(doc).unwrap()).unwrap();
    p
}

#[test]
fn entropy_examples() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[usize], &[f64], f64); 3] = [(&[3, 3], &[1.0, 1.0], 2.0 * 2f64.sqrt()), (&[3, 4], &[0.8612, 1.1187], 3.5477), (&[5], &[1.0], 4.0)];
    for (dims, a, e) in cases {
        let p = write_input(&dir, "e.json", &json!({ "dims": dims }));
        let v = run_ok(&["entropy", "--input", p.to_str().unwrap()]);
        let r = &v["result"];
        for (got, want) in r["alphas"].as_array().unwrap().iter().zip(a) {
            assert!((got.as_f64().unwrap() - want).abs() <= 1e-4, "{dims:?}: {r}");
        }
        assert!((r["entropy_min"].as_f64().unwrap() - e).abs() <= 1e-4, "{dims:?}: {r}");
    }
}

#[test]
fn output_carries_provenance() {
    let path = fixture("entropy_3_4.json");
    let v = run_ok(&["entropy", "--input", path.to_str().unwrap(), "--seed", "17"]);
    assert_eq!(v["command"], "entropy");
    let prov = &v["provenance"];
    assert_eq!(prov["seed"], 17);
    assert_eq!(prov["config_sha256"].as_str().unwrap().len(), 64);
    assert!(prov["tolerances"].is_object());
    assert_eq!(prov["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn ideal_triangle_and_tetrahedron() {
    let v = run_fixture("simplex", "ideal_triangle.json");
    assert!((v["result"]["volume"].as_f64().unwrap() - PI).abs() <= 1e-12);
    let v = run_fixture("simplex", "regular_ideal_tetrahedron.json");
    assert!((v["result"]["volume"].as_f64().unwrap() - 1.0149416064).abs() <= 1e-9);
}

#[test]
fn schlafli_document_is_within_tolerance() {
    let v = run_fixture("schlafli", "schlafli_h3.json");
    assert_eq!(v["result"]["within_tolerance"], true, "{v}");
}

#[test]
fn barycenter_document_converges() {
    let v = run_fixture("barycenter", "barycenter_h2.json");
    assert!(v["result"]["gradient_norm"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn representation_volumes() {
    let v = run_fixture("repvolume", "genus2_repvolume.json");
    assert!((v["result"]["volume"].as_f64().unwrap() - 4.0 * PI).abs() <= 1e-6);
    assert_eq!(v["result"]["degrees_integral"], true);
    for f in ["genus2_flip_repvolume.json", "parabolic_repvolume.json", "s3_repvolume.json"] {
        let v = run_fixture("repvolume", f);
        assert!(v["result"]["volume"].as_f64().unwrap().abs() <= 1e-6, "{f}: {v}");
    }
}

#[test]
fn conjugation_scan_is_constant() {
    let v = run_fixture("scan", "genus2_conjugation_scan.json");
    assert!(v["result"]["max_deviation"].as_f64().unwrap() <= 1e-9);
    assert!(v["result"]["csv"].as_str().unwrap().starts_with("t,"));
}

#[test]
fn scan_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bending.csv");
    let out = repvol(&["scan", "--input", fixture("genus2_bending_scan.json").to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("t,"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 50);
    for row in &rows {
        let field = row.split(',').nth(1).unwrap();
        let mantissa = field.split('e').next().unwrap();
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{field}");
        let vol: f64 = field.parse().unwrap();
        assert!((vol - 4.0 * PI).abs() <= 1e-6, "{row}");
    }
    let summary: Value = serde_json::from_str(&fs::read_to_string(csv.with_extension("json")).unwrap()).unwrap();
    assert_eq!(summary["result"]["within_tolerance"], true);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let input = fixture("genus2_repvolume.json");
    let a = repvol(&["repvolume", "--input", input.to_str().unwrap(), "--seed", "5"]);
    let b = repvol(&["repvolume", "--input", input.to_str().unwrap(), "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bundled_fixtures_match_checked_in_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = repvol(&["fixtures", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut count = 0;
    for entry in fs::read_dir(dir.path()).unwrap() {
        let entry = entry.unwrap();
        let name = entry.file_name();
        let fresh = fs::read(entry.path()).unwrap();
        let stored = fs::read(fixture(name.to_str().unwrap())).unwrap();
        assert_eq!(fresh, stored, "{name:?}");
        count += 1;
    }
    assert_eq!(count, 12);
}

#[test]
fn invalid_input_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("bad.json");
    fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(repvol(&["entropy", "--input", garbage.to_str().unwrap()]).status.code(), Some(2));
    let bad_dim = write_input(&dir, "dim.json", &json!({ "dims": [1] }));
    assert_eq!(repvol(&["entropy", "--input", bad_dim.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(repvol(&["entropy"]).status.code(), Some(2));
    assert_eq!(repvol(&["nonsense"]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(repvol(&["entropy", "--input", missing.to_str().unwrap()]).status.code(), Some(2));
    let tol = fixture("entropy_3_4.json");
    assert_eq!(repvol(&["entropy", "--input", tol.to_str().unwrap(), "--tol", "-1"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(fixture("barycenter_h2.json")).unwrap()).unwrap();
    doc["max_iter"] = json!(1);
    doc["initial"] = json!([[27.308232836016487, 27.289917197127753, 0.0]]);
    let p = write_input(&dir, "slow.json", &doc);
    let out = repvol(&["barycenter", "--input", p.to_str().unwrap(), "--tol", "1e-14"]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}
