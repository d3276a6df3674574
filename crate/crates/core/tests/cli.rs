use std::path::Path;
use std::process::{Command, Output};

use lz_integrability::harness::{emit, run_batch, Emitted, Format, Scenario};
use lz_integrability::{run_scenario, HalfInteger, ModelSpec, Task};

fn lzint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lzint")).args(args).output().unwrap()
}

fn scenario_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios"))
}

const LZ: &str = r#"{"kind": "su2_spin", "coupling": 1.0, "spin": 0.5}"#;

#[test]
fn json_report_is_deterministic() {
    let text = std::fs::read_to_string(scenario_dir().join("bow_tie.json")).unwrap();
    let s = Scenario::from_json(&text).unwrap();
    let render = || match emit(&run_scenario(&s).unwrap(), Format::Json).unwrap() {
        Emitted::Json(j) => j,
        Emitted::Csv(_) => unreachable!(),
    };
    assert_eq!(render(), render());
}

#[test]
fn bundled_scenarios_pass() {
    let mut batch = Vec::new();
    for entry in std::fs::read_dir(scenario_dir()).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        batch.push(Scenario::from_json(&text).unwrap());
    }
    let kinds: std::collections::HashSet<_> = batch.iter().map(|s| s.model.kind()).collect();
    assert_eq!(kinds.len(), 7);
    for report in run_batch(&batch) {
        let report = report.unwrap();
        assert!(report.all_passed(), "{} failed", report.name);
    }
}

#[test]
fn propagate_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    let out = lzint(&["propagate", "--model", LZ, "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "from,m=1/2,m=-1/2");
    let p: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((p - (-std::f64::consts::PI / 2.0).exp()).abs() < 1e-3);
    assert!(lines[3].starts_with("row_defect,"));
}

#[test]
fn spectrum_csv_header() {
    let model = r#"{"kind": "bow_tie", "couplings": [1, 1, 1], "slopes": [1, 2, 3]}"#;
    let out = lzint(&["spectrum", "--model", model, "--u=-1,0.5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("u,root_1,root_2,root_3,root_4,residual\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn model_dump_and_json_out() {
    let out = lzint(&["model", "--model", LZ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["dim"], 2);

    let out = lzint(&["verify", "--model", r#"{"kind": "bow_tie", "couplings": [1, 0.5, 2], "slopes": [1, -1, 2]}"#, "--out", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"][0]["task"], "verify_commutant");
    assert_eq!(v["results"][0]["symmetry_dim"], 1);
}

#[test]
fn report_csv_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario_dir().join("equal_slope.json");
    let out = lzint(&["report", "--config", cfg.to_str().unwrap(), "--format", "csv", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["01_verify_commutant.csv", "02_spectrum.csv", "03_propagate.csv"]);
}

#[test]
fn exit_codes() {
    let bad_model = lzint(&["verify", "--model", r#"{"kind": "bow_tie", "couplings": [1], "slopes": [0]}"#]);
    assert_eq!(bad_model.status.code(), Some(2));

    let wrong_task = lzint(&["compare", "--model", r#"{"kind": "bow_tie", "couplings": [1, 1], "slopes": [1, 2]}"#]);
    assert_eq!(wrong_task.status.code(), Some(2));

    let missing = lzint(&["report", "--config", "/nonexistent/scenario.json"]);
    assert_eq!(missing.status.code(), Some(4));

    // A tolerance no propagation can meet is a failed check, not an error.
    let dir = tempfile::tempdir().unwrap();
    let mut s = Scenario::new(
        ModelSpec::Su2Spin {
            coupling: 1.0,
            spin: HalfInteger::from_twice(1),
        },
        vec![Task::Propagate, Task::CompareClosedForm],
    );
    s.settings.compare_tol = 1e-15;
    let cfg = dir.path().join("strict.json");
    std::fs::write(&cfg, serde_json::to_string(&s).unwrap()).unwrap();
    let out_path = dir.path().join("r.json");
    let strict = lzint(&["report", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(strict.status.code(), Some(3));
    assert!(out_path.exists());
}
