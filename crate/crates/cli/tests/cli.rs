use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_commutant")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write_matrix(dir: &Path, name: &str, rows: usize, data: &[[f64; 2]]) -> String {
    let path = dir.join(name);
    let doc = serde_json::json!({ "rows": rows, "cols": rows, "data": data });
    std::fs::write(&path, doc.to_string()).unwrap();
    path.display().to_string()
}

fn identity(n: usize) -> Vec<[f64; 2]> {
    (0..n * n).map(|k| if k % (n + 1) == 0 { [1.0, 0.0] } else { [0.0, 0.0] }).collect()
}

/// `F₂ ⊗ I₂` as 8×8 data.
fn swap_id() -> Vec<[f64; 2]> {
    let mut d = vec![[0.0, 0.0]; 64];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                let row = (a * 2 + b) * 2 + c;
                let col = (b * 2 + a) * 2 + c;
                d[row * 8 + col] = [1.0, 0.0];
            }
        }
    }
    d
}

fn swap2() -> Vec<[f64; 2]> {
    let mut d = vec![[0.0, 0.0]; 16];
    for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        d[r * 4 + c] = [1.0, 0.0];
    }
    d
}

#[test]
fn commutant_two_factor_adjoint() {
    let out = run(&["commutant", "--word", "U,U^H", "--dim", "U=3", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["commutant"]["dim"], 1);
    assert_eq!(v["result"]["recognized_span"], serde_json::json!(["I"]));
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["config"]["word"], "U,U^H");
}

#[test]
fn commutant_three_factor() {
    let out = run(&["commutant", "--word", "U,U,U^H", "--dim", "U=2", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["commutant"]["dim"], 2);
    assert_eq!(v["result"]["recognized_span"], serde_json::json!(["I", "F⊗I"]));
    assert_eq!(v["result"]["recognition"]["verdict"], "exact_span");
}

#[test]
fn orthogonal_word_reports_dimension_and_flag() {
    let out = run(&["commutant", "--word", "U,U^T", "--dim", "U=2", "--group", "U=orthogonal"]);
    assert_eq!(out.status.code(), Some(0));
    let o = &json_of(&out)["result"]["orthogonal"];
    assert_eq!(o["dim"], 2);
    assert_eq!(o["dim_exceeds_two"], false);
    assert_eq!(o["probe_dim"], 2);
    assert!(o["m_tensor_m_residual"].as_f64().unwrap() < 1e-10);

    // U ⊗ U over O(2) has dim 3 and must be flagged.
    let out = run(&["commutant", "--word", "U,U", "--dim", "U=2", "--group", "U=orthogonal"]);
    let o = &json_of(&out)["result"]["orthogonal"];
    assert_eq!(o["dim"], 3);
    assert_eq!(o["dim_exceeds_two"], true);
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = run(&["commutant", "--word", "U,U,U", "--dim", "2", "--seed", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (ra, rb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    // The configs differ only in the recorded output path.
    let strip = |bytes: &[u8], p: &Path| String::from_utf8_lossy(bytes).replace(p.to_str().unwrap(), "OUT");
    assert_eq!(strip(&ra, &a), strip(&rb, &b));

    let x = run(&["twirl", "--word", "U,U^H", "--dim", "U=2", "-N", "50", &write_matrix(dir.path(), "i.json", 4, &identity(4))]);
    let y = run(&["twirl", "--word", "U,U^H", "--dim", "U=2", "-N", "50", &write_matrix(dir.path(), "i.json", 4, &identity(4))]);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn verify_pass_and_fail() {
    let dir = tempfile::tempdir().unwrap();
    let id = write_matrix(dir.path(), "id.json", 8, &identity(8));
    let out = run(&["verify", "--word", "U,U,U^H", "--dim", "U=2", &id]);
    assert_eq!(out.status.code(), Some(0));

    let fi = write_matrix(dir.path(), "fi.json", 8, &swap_id());
    let out = run(&["verify", "--word", "U,U,U^H", "--dim", "U=2", &fi]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["result"]["passed"], true);

    let f = write_matrix(dir.path(), "f.json", 4, &swap2());
    let out = run(&["verify", "--word", "U,U^H", "--dim", "U=2", &f]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["result"]["passed"], false);
    assert!(v["result"]["residual"].as_f64().unwrap() > 0.1);

    // wrong size for the word
    let out = run(&["verify", "--word", "U,U^H", "--dim", "U=3", &f]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn twirl_matches_exact_projection() {
    let dir = tempfile::tempdir().unwrap();
    // E₁₁ ⊗ E₁₁ twirls to I/4.
    let mut d = vec![[0.0, 0.0]; 16];
    d[0] = [1.0, 0.0];
    let m = write_matrix(dir.path(), "e.json", 4, &d);
    let csv = dir.path().join("conv.csv");
    let out = run(&[
        "twirl",
        "--word",
        "U,U^H",
        "--dim",
        "U=2",
        "-N",
        "1000",
        "--schedule",
        "100,300,1000",
        "--csv",
        csv.to_str().unwrap(),
        &m,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    let r = &v["result"];
    assert!(r["twirl"]["mc_error"].as_f64().unwrap() < 0.1);
    let exact = &r["exact_projection"]["data"];
    assert!((exact[0][0].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((r["twirl"]["trace_out"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("N,error\n100,"));
    assert_eq!(table.lines().count(), 4);
}

#[test]
fn region_cone_and_grid_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("grid.csv");
    let out = run(&["region", "--direction", "F", "--dim", "2", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["region"]["description"], "x >= |y|");
    assert_eq!(v["result"]["grid_disagreements"], 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x,y,min_eigenvalue,inside\n"));
    assert_eq!(text.lines().count(), 1 + 21 * 21);

    let out = run(&["region", "--direction", "F⊗I", "--dim", "2", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# config "));
    assert!(text.contains("x >= |y|"));
}

#[test]
fn report_runs_block_checks() {
    let out = run(&["report", "--word", "U,U^H", "--dim", "U=3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["result"]["blocks"]["status"], "pass");
    let out = run(&["report", "--word", "U,U", "--dim", "U=2"]);
    assert_eq!(json_of(&out)["result"]["blocks"]["status"], "not_applicable");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["commutant", "--word", "U,U^H"]).status.code(), Some(5));
    assert_eq!(run(&["commutant", "--word", "U,,U", "--dim", "2"]).status.code(), Some(5));
    assert_eq!(run(&["commutant", "--no-such-flag"]).status.code(), Some(5));
    assert_eq!(run(&["commutant", "--word", "U", "--dim", "2", "--tol", "bogus=1"]).status.code(), Some(5));
    assert_eq!(run(&["region", "--direction", "Q", "--dim", "2"]).status.code(), Some(5));
    assert_eq!(run(&["verify", "--word", "U", "--dim", "2", "/nonexistent/m.json"]).status.code(), Some(4));
    // A gap requirement no spectrum can meet.
    assert_eq!(run(&["commutant", "--word", "U,U^H", "--dim", "2", "--tol", "gap=1e30"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"rows\": 2").unwrap();
    assert_eq!(run(&["verify", "--word", "U", "--dim", "2", bad.to_str().unwrap()]).status.code(), Some(5));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
