use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

struct Run {
    code: i32,
    report: Value,
    dir: TempDir,
}

fn syzq(sub: &str, config: &Value, extra: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    fs::write(&cfg, config.to_string()).unwrap();
    let out = dir.path().join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_syzq"))
        .arg(sub)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .unwrap();
    let report: Value = serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    let run = Run {
        code: status.status.code().unwrap(),
        report,
        dir,
    };
    run.assert_consistent();
    run
}

impl Run {
    fn out(&self) -> std::path::PathBuf {
        self.dir.path().join("out")
    }

    fn result(&self, key: &str) -> &Value {
        &self.report["results"][key]
    }

    /// Exit 0 exactly when the summary passes, and the summary passes
    /// exactly when every check does and no error was raised.
    fn assert_consistent(&self) {
        let checks = self.report["checks"].as_array().unwrap();
        let all = checks.iter().all(|c| c["pass"] == json!(true));
        let pass = self.report["summary"]["pass"].as_bool().unwrap();
        assert_eq!(pass, all && self.report["error"].is_null(), "{}", self.report);
        assert_eq!(self.code == 0, pass, "{}", self.report);
        assert_eq!(self.report["summary"]["total"], json!(checks.len()));
    }
}

fn plane(lambda: [i64; 3]) -> Value {
    json!({
        "mode": "toric",
        "datum": {
            "n": 2,
            "generators": [[1, 0], [0, 1], [-1, -1]],
            "max_cones": [[0, 1], [1, 2], [2, 0]],
            "lambda": lambda,
        }
    })
}

fn line(k: i64) -> Value {
    json!({
        "datum": { "n": 1, "generators": [[1], [-1]], "max_cones": [[0], [1]], "lambda": [0, k] },
        "emit": { "character_grid": true }
    })
}

fn metadata(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(String::from)
        .collect()
}

#[test]
fn degree_two_polarization_on_the_circle() {
    let config = json!({
        "mode": "abelian",
        "datum": { "Omega": [[1.0]], "Q": [[2.0]] },
        "emit": { "theta_grid": true, "concentration_table": true }
    });
    let r = syzq("abelian", &config, &[]);
    assert_eq!(r.code, 0);
    assert_eq!(r.result("detQ"), &json!(2));
    assert_eq!(r.result("num_points"), &json!(2));
    assert_eq!(r.result("rank"), &json!(2));
    assert!(r.result("dbar_residual").as_f64().unwrap() <= 1e-6);
    for k in 0..2 {
        let meta = metadata(&r.out().join(format!("theta_grid_{k}.csv")));
        assert!(meta.iter().any(|l| l.starts_with("# truncation_bound=")), "{meta:?}");
        assert!(meta.iter().any(|l| l.starts_with("# residual_tol=")), "{meta:?}");
    }
    let meta = metadata(&r.out().join("concentration_table.csv"));
    assert!(meta.iter().any(|l| l.starts_with("# truncation=")));
}

#[test]
fn non_commuting_pair_exits_with_invalid_input() {
    let config = json!({ "datum": { "Omega": [[2.0, 0.0], [0.0, 3.0]], "Q": [[1.0, 1.0], [1.0, 2.0]] } });
    let r = syzq("abelian", &config, &[]);
    assert_eq!(r.code, 2);
    assert_eq!(r.report["error"]["kind"], json!("DoNotCommute"));
    assert_eq!(r.report["error"]["check"], json!("validate"));
}

#[test]
fn principal_polarization_has_one_theta() {
    let config = json!({ "datum": { "Omega": [[1.0, 0.5], [0.5, 1.0]], "Q": [[1.0, 0.0], [0.0, 1.0]] } });
    let r = syzq("abelian", &config, &[]);
    assert_eq!(r.code, 0);
    assert_eq!(r.result("num_points"), &json!(1));
    assert_eq!(r.result("rank"), &json!(1));
}

#[test]
fn projective_line_of_degree_two() {
    let r = syzq("toric", &line(2), &[]);
    assert_eq!(r.code, 0);
    for key in ["lattice", "bs_fibers", "rank"] {
        assert_eq!(r.result(key), &json!(3), "{key}");
    }
    let fibers: Value = serde_json::from_slice(&fs::read(r.out().join("bs_fibers.json")).unwrap()).unwrap();
    let locations: Vec<_> = fibers["fibers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["location"].clone())
        .collect();
    assert_eq!(locations, [json!("boundary"), json!("interior"), json!("boundary")]);
    for u in 0..3 {
        let meta = metadata(&r.out().join(format!("character_{u}.csv")));
        assert!(meta.contains(&"# truncation=8".to_string()), "{meta:?}");
    }
}

#[test]
fn projective_plane_of_degree_three() {
    let r = syzq("toric", &plane([0, 0, 3]), &[]);
    let brute = (0..=3)
        .flat_map(|a| (0..=3).map(move |b| (a, b)))
        .filter(|(a, b)| a + b <= 3)
        .count();
    let interior = (1..3)
        .flat_map(|a| (1..3).map(move |b| (a, b)))
        .filter(|(a, b)| a + b < 3)
        .count();
    assert_eq!(r.code, 0);
    assert_eq!(r.result("lattice"), &json!(brute));
    assert_eq!(r.result("bs_fibers"), &json!(brute));
    assert_eq!(r.result("interior"), &json!(interior));
    let csv = fs::read_to_string(r.out().join("lattice_points.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), brute + 1);
}

#[test]
fn point_polytope_is_handled() {
    let r = syzq("toric", &plane([0, 0, 0]), &[]);
    assert_eq!(r.code, 0);
    assert_eq!(r.result("lattice"), &json!(1));
    assert_eq!(r.result("rank"), &json!(1));
}

#[test]
fn demo_matches_monomial_degrees() {
    let r = syzq("demo", &json!({ "demo": { "k": [0, 3, -2] } }), &[]);
    assert_eq!(r.code, 0);
    let degrees: Vec<i64> = r
        .result("table")
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row["degree"].as_i64().unwrap())
        .collect();
    assert_eq!(degrees, [0, 3, -2]);
    let table = fs::read_to_string(r.out().join("demo_table.csv")).unwrap();
    assert!(table.lines().any(|l| l.starts_with("-2,-2,")), "{table}");
}

#[test]
fn reports_are_byte_stable() {
    let a = syzq("toric", &line(3), &["--seed", "11"]);
    let b = syzq("toric", &line(3), &["--seed", "11"]);
    for name in ["report.json", "bs_fibers.json", "lattice_points.csv", "character_2.csv"] {
        assert_eq!(
            fs::read(a.out().join(name)).unwrap(),
            fs::read(b.out().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn overrides_reach_the_provenance_and_hash() {
    let config = json!({ "datum": { "Omega": [[1.0]], "Q": [[1.0]] } });
    let base = syzq("abelian", &config, &[]);
    let r = syzq(
        "abelian",
        &config,
        &["--truncation", "6", "--grid", "32", "--hbar", "0.5"],
    );
    assert_eq!(r.code, 0);
    let p = &r.report["provenance"];
    assert_eq!(p["truncation"], json!(6));
    assert_eq!(p["grid"], json!(32));
    assert_eq!(p["hbar"], json!(0.5));
    assert_ne!(p["config_sha256"], base.report["provenance"]["config_sha256"]);
}

#[test]
fn invalid_numerics_and_mode_mismatch_exit_two() {
    let config = json!({ "datum": { "Omega": [[1.0]], "Q": [[1.0]] } });
    let r = syzq("abelian", &config, &["--fd-step", "0.5"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.report["error"]["kind"], json!("InvalidNumerics"));

    let r = syzq("demo", &plane([0, 0, 1]), &[]);
    assert_eq!(r.code, 2);
    assert_eq!(r.report["error"]["kind"], json!("InvalidConfig"));
}

#[test]
fn malformed_toric_payload_exits_two() {
    let config = json!({ "datum": { "n": 1, "generators": [[1], [-1]], "max_cones": [[0], [1]], "lambda": [0, 1],
        "c": { "(0)": -1.0 } } });
    let r = syzq("toric", &config, &[]);
    assert_eq!(r.code, 2);
    assert_eq!(r.report["error"]["kind"], json!("NonPositiveCoefficient"));
}
