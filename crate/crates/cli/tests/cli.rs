use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn eqdet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqdet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

const QUICK: &[&str] = &[
    "--check",
    "ybe_elliptic",
    "--check",
    "qdet_closed_form",
    "--points",
    "2",
];

#[test]
fn same_seed_gives_byte_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let mut args = vec![
            "verify",
            "--n",
            "2",
            "--seed",
            "7",
            "--points",
            "2",
            "--out",
            out.to_str().unwrap(),
        ];
        args.extend(["--format", "json"]);
        let run = eqdet(&args);
        assert!(matches!(code(&run), 0 | 1), "{}", String::from_utf8_lossy(&run.stderr));
    }
    assert_eq!(read(&a.join("verify.json")), read(&b.join("verify.json")));

    for out in [&a, &b] {
        let run = eqdet(&[
            "matrix",
            "--kind",
            "elliptic",
            "--n",
            "3",
            "--seed",
            "5",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&run), 0);
    }
    assert_eq!(
        read(&a.join("matrix_elliptic.dat")),
        read(&b.join("matrix_elliptic.dat"))
    );
}

#[test]
fn run_directories_are_write_once() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let mut args = vec!["verify", "--seed", "1", "--out", out];
    args.extend(QUICK);
    assert_eq!(code(&eqdet(&args)), 0);
    let again = eqdet(&args);
    assert_eq!(code(&again), 2);
    assert!(String::from_utf8_lossy(&again.stderr).contains("write-once"));
}

#[test]
fn nome_outside_the_disc_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let run = eqdet(&["verify", "--n", "2", "--p", "1.2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 2);
    assert!(String::from_utf8_lossy(&run.stderr).contains("|p|"));
    assert!(!out.join("verify.json").exists());

    assert_eq!(code(&eqdet(&["verify", "--q", "0.5+0.2j"])), 2);
    assert_eq!(code(&eqdet(&["matrix", "--kind", "belavin"])), 2);
    assert_eq!(code(&eqdet(&["matrix", "--kind", "eightvertex", "--n", "3"])), 2);
}

#[test]
fn poles_are_numerical_errors() {
    let run = eqdet(&["matrix", "--kind", "elliptic", "--q", "0.5", "--p", "0.2", "--z", "1"]);
    assert_eq!(code(&run), 3);
    assert!(String::from_utf8_lossy(&run.stderr).contains("pole"));
}

fn dump_rows(text: &str) -> Vec<(usize, usize, f64, f64)> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split(", ").collect();
            assert_eq!(f.len(), 4, "{l}");
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
                f[3].parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn eightvertex_dump_has_sixteen_rows_and_eight_zeros() {
    let run = eqdet(&["matrix", "--kind", "eightvertex", "--n", "2", "--seed", "11"]);
    assert_eq!(code(&run), 0);
    let text = String::from_utf8(run.stdout).unwrap();
    for key in ["kind", "N", "q", "p", "z", "truncation", "version"] {
        assert!(
            text.lines().any(|l| l.starts_with(&format!("# {key}: "))),
            "header lacks {key}"
        );
    }
    let rows = dump_rows(&text);
    assert_eq!(rows.len(), 16);
    assert_eq!(rows.iter().filter(|r| r.2 == 0.0 && r.3 == 0.0).count(), 8);
    // 17 significant digits: one leading digit and 16 decimals.
    let first = text.lines().find(|l| !l.starts_with('#')).unwrap();
    let re = first.split(", ").nth(2).unwrap();
    let mantissa = re.trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.len(), 18, "{re}");
}

#[test]
fn elliptic_dump_obeys_the_selection_rule_at_n3() {
    let run = eqdet(&["matrix", "--kind", "elliptic", "--n", "3", "--seed", "2"]);
    assert_eq!(code(&run), 0);
    let rows = dump_rows(&String::from_utf8(run.stdout).unwrap());
    assert_eq!(rows.len(), 81);
    for (i, j, re, im) in rows {
        let (a, c) = ((i - 1) / 3, (i - 1) % 3);
        let (b, d) = ((j - 1) / 3, (j - 1) % 3);
        let nonzero = re != 0.0 || im != 0.0;
        assert_eq!(nonzero, (a + c) % 3 == (b + d) % 3, "entry ({i}, {j})");
    }
}

#[test]
fn quantum_determinant_is_one_at_five_points() {
    let run = eqdet(&["qdet", "--n", "2", "--seed", "4", "--points", "5"]);
    assert_eq!(code(&run), 0);
    let doc = json(&run);
    let results = doc["results"].as_array().unwrap();
    assert_eq!(results.len(), 5);
    for r in results {
        for m in r["m_k"].as_array().unwrap() {
            let (re, im) = (m[0].as_f64().unwrap(), m[1].as_f64().unwrap());
            assert!(((re - 1.0).powi(2) + im * im).sqrt() < 1e-8);
        }
        assert_eq!(r["passed"], Value::Bool(true));
    }
}

#[test]
fn limit_residuals_decrease() {
    let run = eqdet(&["limits", "--n", "3", "--seed", "6", "--p-seq", "1e-2,1e-4,1e-6"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let doc = json(&run);
    let table = doc["table"].as_array().unwrap();
    assert_eq!(table.len(), 3);
    let residuals: Vec<f64> = table.iter().map(|row| row[1].as_f64().unwrap()).collect();
    assert!(residuals.windows(2).all(|w| w[1] < w[0]), "{residuals:?}");
    let details = &doc["reports"][0]["details"];
    assert!(details["fitted_s_re"].is_number());
}

#[test]
fn scan_grid_gives_sixteen_deterministic_reports() {
    let args = ["scan", "--n", "2", "--grid", "4x4", "--seed", "9", "--points", "1"];
    let (a, b) = (eqdet(&args), eqdet(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["reports"].as_array().unwrap().len(), 16);
}

#[test]
fn report_objects_carry_the_stable_fields() {
    let mut args = vec!["verify", "--seed", "3"];
    args.extend(QUICK);
    let doc = json(&eqdet(&args));
    let report = &doc["reports"][0];
    for key in [
        "check",
        "params",
        "sample_points",
        "residual",
        "tolerance",
        "passed",
        "runtime_ms",
        "seed",
        "version",
    ] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    for key in ["N", "q", "p", "c"] {
        assert!(report["params"].get(key).is_some(), "missing params.{key}");
    }
    assert!(report["runtime_ms"].is_null());
    assert_eq!(report["seed"], 3);

    args.push("--timings");
    let timed = json(&eqdet(&args));
    assert!(timed["reports"][0]["runtime_ms"].is_number());
}

#[test]
fn exit_status_tracks_non_canary_failures() {
    // The eight-vertex cross-check fails by an overall sign on four entries.
    let failing = eqdet(&[
        "verify",
        "--n",
        "2",
        "--seed",
        "7",
        "--check",
        "eightvertex_agreement",
        "--points",
        "2",
    ]);
    assert_eq!(code(&failing), 1);

    // The transpose canary fails at N = 3 without affecting the status.
    let canary = eqdet(&[
        "verify",
        "--n",
        "3",
        "--seed",
        "7",
        "--check",
        "transpose_symmetry",
        "--points",
        "2",
        "--format",
        "text",
    ]);
    assert_eq!(code(&canary), 0);
    assert!(String::from_utf8_lossy(&canary.stdout).contains("CANARY-OK"));

    let csv = eqdet(&[
        "verify",
        "--seed",
        "7",
        "--check",
        "ybe_elliptic",
        "--points",
        "1",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("check,N,"));
}

#[test]
fn genericity_warning_does_not_stop_the_run() {
    let run = eqdet(&[
        "verify",
        "--n",
        "3",
        "--q",
        "0.99",
        "--p",
        "0.2",
        "--check",
        "ybe_homogeneous",
        "--points",
        "1",
    ]);
    assert!(String::from_utf8_lossy(&run.stderr).contains("warning"));
    assert!(matches!(code(&run), 0 | 1));
    assert_eq!(json(&run)["reports"].as_array().unwrap().len(), 1);
}
