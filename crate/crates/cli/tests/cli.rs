use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_starga")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn csv(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone()).unwrap().lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

fn temp_json(name: &str, body: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("starga-cli-{}-{name}.json", std::process::id()));
    std::fs::File::create(&path).unwrap().write_all(body.as_bytes()).unwrap();
    path
}

#[test]
fn so3_table_has_minus_epsilon_and_minus_delta() {
    let out = run(&["algebra", "so3"]);
    assert!(out.status.success());
    let v = json(&out);
    let c = &v["structure_constants"];
    assert_eq!(c[0][1][2], "-1/1");
    assert_eq!(c[1][0][2], "1/1");
    assert_eq!(c[1][2][0], "-1/1");
    assert_eq!(c[2][0][1], "-1/1");
    assert_eq!(c[0][0][0], "0/1");
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(v["killing"][i][j], if i == j { "-1/1" } else { "0/1" });
        }
    }
}

#[test]
fn u1_is_a_single_abelian_generator() {
    let v = json(&run(&["algebra", "un:1"]));
    assert_eq!(v["dim"], 1);
    assert_eq!(v["structure_constants"][0][0][0], "0/1");
}

#[test]
fn euclidean_clifford_table_is_eight_by_eight() {
    let out = run(&["algebra", "clifford:3:euclid", "--format", "csv"]);
    assert!(out.status.success());
    let rows = csv(&out);
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.len() == 9));
    assert_eq!(rows[0][1..4], ["1", "e1", "e2"]);
    // e1 e2 = e1^e2 and e2 e1 = -e1^e2
    assert_eq!(rows[2][3], "1/1 e1^e2");
    assert_eq!(rows[3][2], "-1/1 e1^e2");
    assert_eq!(rows[2][2], "1/1");
}

#[test]
fn unknown_algebra_is_a_usage_error() {
    let out = run(&["algebra", "so5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn brst_presets_pass() {
    for preset in ["oscillator", "cubic", "quartic"] {
        let out = run(&["brst", "--preset", preset]);
        assert!(out.status.success(), "{preset}");
        let v = json(&out);
        assert_eq!(v["brackets"].as_array().unwrap().len(), 5);
        assert_eq!(v["equations_of_motion"].as_array().unwrap().len(), 8);
        assert!(v["brackets"].as_array().unwrap().iter().all(|b| b["zero"] == true));
    }
}

#[test]
fn zero_hamiltonian_gives_a_zero_report() {
    let v = json(&run(&["brst", "--preset", "zero"]));
    assert_eq!(v["hamiltonian"], "0");
    assert_eq!(v["extended_hamiltonian"]["display"], "0");
    assert_eq!(v["extended_hamiltonian"]["value"]["blades"].as_array().unwrap().len(), 0);
}

#[test]
fn brst_reads_a_monomial_list() {
    let path = temp_json(
        "h",
        r#"{"dof": 2, "with_hbar": true, "terms": [{"coeff": "1/2", "q": [2, 0]}, {"coeff": "-3/4", "q": [1, 1], "p": [0, 2]}]}"#,
    );
    let out = run(&["brst", "--input", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["equations_of_motion"].as_array().unwrap().len(), 16);
    assert!(v["variables"].as_array().unwrap().contains(&Value::from("hbar")));
}

#[test]
fn malformed_hamiltonians_are_rejected() {
    let bad = [
        r#"{"dof": 1, "terms": [], "extra": 0}"#,
        r#"{"dof": 1, "terms": [{"coeff": "1/0", "q": [1]}]}"#,
        r#"{"dof": 1, "terms": [{"coeff": "1", "q": [1, 1]}]}"#,
        r#"{"dof": 0, "terms": []}"#,
        r#"{"dof": 1, "terms": [{"coeff": "x", "q": [1]}]}"#,
    ];
    for (k, body) in bad.iter().enumerate() {
        let path = temp_json(&format!("bad{k}"), body);
        let out = run(&["brst", "--input", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{body}");
    }
}

#[test]
fn sphere_grid_has_unit_curvature() {
    let out = run(&["geometry", "--chart", "sphere:1", "--grid", "12", "--format", "csv"]);
    assert!(out.status.success());
    let rows = csv(&out);
    let k = rows[0].iter().position(|h| h == "K").unwrap();
    assert_eq!(rows.len(), 1 + 144);
    for r in &rows[1..] {
        let v: f64 = r[k].parse().unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{v}");
    }
}

#[test]
fn plane_grid_has_zero_christoffel_columns() {
    let rows = csv(&run(&["geometry", "--chart", "plane:2", "--grid", "4", "--format", "csv"]));
    let cols: Vec<usize> = (0..rows[0].len()).filter(|&i| rows[0][i].starts_with("Gamma")).collect();
    assert_eq!(cols.len(), 6);
    for r in &rows[1..] {
        for &c in &cols {
            assert_eq!(r[c].parse::<f64>().unwrap(), 0.0);
        }
    }
}

#[test]
fn chart_json_matches_chart_string() {
    let path = temp_json("torus", r#"{"family": "torus", "R": 3, "r": 1}"#);
    let a = run(&["geometry", "--input", path.to_str().unwrap(), "--grid", "5"]);
    let b = run(&["geometry", "--chart", "torus:3:1", "--grid", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let bad = temp_json("torus-bad", r#"{"family": "torus", "R": 1, "r": 3}"#);
    assert_eq!(run(&["geometry", "--input", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn margin_inside_the_pole_guard_is_refused() {
    let out = run(&["geometry", "--chart", "sphere:1", "--margin", "0.01"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rigid_body_csv_conserves() {
    let dir = std::env::temp_dir().join(format!("starga-cli-{}-traj.csv", std::process::id()));
    let out = run(&[
        "rigid-body",
        "--inertia",
        "1,2,3",
        "--L0",
        "0.7,-0.4,0.5",
        "--dt",
        "1e-3",
        "--steps",
        "2000",
        "--every",
        "100",
        "--format",
        "csv",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&dir).unwrap();
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(text.lines().next().unwrap(), "t,L1,L2,L3,energy,casimir,R0,R23,R31,R12,spatial_L_drift,rotor_defect");
    assert_eq!(rows.len(), 21);
    for r in &rows {
        assert!((r[5] - rows[0][5]).abs() < 1e-10);
        assert!((r[4] - rows[0][4]).abs() < 1e-8);
        assert!(r[10] < 1e-6);
    }
}

#[test]
fn failed_checks_exit_one_with_a_failure_list() {
    let out = run(&["rigid-body", "--dt", "0.5", "--steps", "20"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).expect("failure list is JSON");
    let list = err["failures"].as_array().unwrap();
    assert!(!list.is_empty());
    assert!(list.iter().all(|f| f["value"].as_f64().unwrap() > f["limit"].as_f64().unwrap()));
    // the report is still written
    assert!(json(&out)["rows"].as_array().unwrap().len() == 21);
}

#[test]
fn tolerance_flag_scales_limits() {
    assert!(run(&["property-suite", "--group", "4"]).status.success());
    let out = run(&["property-suite", "--group", "4", "--tol", "1e-6"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(run(&["property-suite", "--tol", "0"]).status.code() == Some(2));
}

#[test]
fn suite_config_rejects_unknown_fields() {
    let good = temp_json("suite", r#"{"groups": [2, 5], "vector_pairs": 10, "hamiltonians": 3}"#);
    let out = run(&["property-suite", "--input", good.to_str().unwrap(), "--seed", "3"]);
    assert!(out.status.success());
    let v = json(&out);
    let ids: Vec<u64> = v["groups"].as_array().unwrap().iter().map(|g| g["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, [2, 5]);
    let bad = temp_json("suite-bad", r#"{"group": [2]}"#);
    assert_eq!(run(&["property-suite", "--input", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn seed_is_recorded_and_verdicts_hold_across_seeds() {
    let a = run(&["property-suite", "--group", "5", "--seed", "1"]);
    let b = run(&["property-suite", "--group", "5", "--seed", "2"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(json(&a)["seed"], 1);
    assert_eq!(json(&b)["seed"], 2);
}
