use std::fs;
use std::io::{BufRead, BufReader};
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn jdomain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jdomain")).args(args).env_remove("JDOMAIN_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn golden(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden").join(name);
    fs::read_to_string(p).unwrap()
}

#[test]
fn validate_exit_codes() {
    for name in ["vinberg5", "dI21", "rank1"] {
        let o = jdomain(&["validate", "--builtin", name]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        assert!(stdout(&o).ends_with("valid\n"));
    }
    let dir = tempfile::tempdir().unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&golden("vinberg5_lie_algebra.json")).unwrap();
    let triples = v["payload"]["triples"].as_array_mut().unwrap();
    let t = triples.iter_mut().find(|t| t[0] == 0 && t[1] == 8 && t[2] == 8).unwrap();
    t[3] = serde_json::json!("1");
    let bad = dir.path().join("bad.json");
    fs::write(&bad, v.to_string()).unwrap();
    let o = jdomain(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("jacobi                   FAIL  fails on ("), "{}", stdout(&o));

    let malformed = dir.path().join("malformed.json");
    fs::write(&malformed, "{\"version\": 1, \"kind\": ").unwrap();
    assert_eq!(code(&jdomain(&["validate", malformed.to_str().unwrap()])), 2);
    assert_eq!(code(&jdomain(&["validate", "--builtin", "nope"])), 2);
    assert_eq!(code(&jdomain(&["validate"])), 2);
}

#[test]
fn validate_json_schema() {
    let o = jdomain(&["validate", "--builtin", "vinberg5", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    for c in v["checks"].as_array().unwrap() {
        let keys: Vec<&str> = c.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["detail", "name", "passed"]);
    }
}

#[test]
fn roots_table_marks_missing_rows() {
    let o = jdomain(&["roots", "--builtin", "vinberg5"]);
    let text = stdout(&o);
    assert!(text.starts_with("rank r = 3\n"));
    let dim_of = |root: &str| -> usize {
        let line = text.lines().find(|l| l.starts_with(&format!("{root} "))).unwrap();
        line.split_whitespace().rev().nth(1).unwrap().parse().unwrap()
    };
    assert_eq!(dim_of("(alpha2-alpha1)/2"), 0);
    assert_eq!(dim_of("(alpha2+alpha1)/2"), 0);
    for r in ["(alpha3-alpha1)/2", "(alpha3+alpha1)/2", "(alpha3-alpha2)/2", "(alpha3+alpha2)/2"] {
        assert_eq!(dim_of(r), 1);
    }
    let v: serde_json::Value =
        serde_json::from_slice(&jdomain(&["roots", "--builtin", "vinberg5", "--json"]).stdout).unwrap();
    assert_eq!(v["rank"], 3);
    let total: u64 = v["roots"].as_array().unwrap().iter().map(|r| r["dim"].as_u64().unwrap()).sum();
    assert_eq!(total, 10);
}

#[test]
fn di21_grade_table_has_five_rows() {
    let text = stdout(&jdomain(&["grade", "--builtin", "dI21"]));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 5, "{text}");
    let grades: Vec<&str> = rows.iter().map(|r| r.split_whitespace().next().unwrap()).collect();
    assert_eq!(grades, ["-1", "-1/2", "0", "1/2", "1"]);
}

#[test]
fn brackets_match_golden() {
    for name in ["vinberg5", "dI21"] {
        assert_eq!(stdout(&jdomain(&["brackets", "--builtin", name])), golden(&format!("{name}_brackets.txt")));
    }
}

#[test]
fn classify_single_and_grid() {
    let o = jdomain(&["classify", "--x", "-1", "--y", "0", "--n", "1", "--nprime", "1"]);
    assert_eq!(stdout(&o), "xi(-1, 0, 1, 1): unitarizable, B:minus, G:minus(n=1,n'=1)\n");
    let o = jdomain(&["classify", "--x", "0", "--y", "3", "--n", "0", "--nprime", "2"]);
    assert_eq!(stdout(&o), "xi(0, 3, 0, 2): unitarizable, B:zero(y=3,n=0,n'=2), G:zero(y=3,n=0,n'=2)\n");
    let o = jdomain(&["classify", "--x", "0.5", "--y", "0", "--n", "1", "--nprime", "1"]);
    assert_eq!(stdout(&o), "xi(1/2, 0, 1, 1): not unitarizable\n");
    let o = jdomain(&["classify", "--x", "-1", "--n", "1", "--nprime", "1", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["G_class"], "G:minus(n=1,n'=1)");
    assert_eq!(code(&jdomain(&["classify", "--x", "-1", "--n", "1.5", "--nprime", "1"])), 2);
    assert_eq!(code(&jdomain(&["classify", "--x", "-1"])), 2);
    assert_eq!(stdout(&jdomain(&["classify", "--grid", "default"])), golden("classify_grid.jsonl"));
}

#[test]
fn closed_stdout_is_not_an_error() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_jdomain"))
        .args(["classify", "--grid", "default"])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut first = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut first).unwrap();
    assert!(first.starts_with("{\"xi\":"));
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stderr.is_empty(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn classify_grid_from_a_batch_file() {
    let dir = tempfile::tempdir().unwrap();
    let batch = dir.path().join("batch.json");
    fs::write(
        &batch,
        r#"{"version": 1, "kind": "xi_batch", "payload": [["-1", "0", 2, 3], ["0", "7", 0, 0], ["1/2", "0", 1, 1]]}"#,
    )
    .unwrap();
    let text = stdout(&jdomain(&["classify", "--grid", batch.to_str().unwrap()]));
    let flags: Vec<bool> = text
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["unitarizable"].as_bool().unwrap())
        .collect();
    assert_eq!(flags, [true, true, false]);
}

fn delta(args: &[&str]) -> (i32, String) {
    let mut all = vec!["delta"];
    all.extend_from_slice(args);
    let o = jdomain(&all);
    (code(&o), stdout(&o).trim().to_string())
}

#[test]
fn delta_values_and_errors() {
    assert_eq!(delta(&["--xi=-1,0,1,1", "--point", "E"]), (0, "1.0".into()));
    // Closed form z1^-n z2^-n' (det/(z1 z2))^(2x) at 2E.
    for (xi, x, n, np) in [("-1,0,1,1", -1.0, 1.0, 1.0), ("-1/2,3,2,5", -0.5, 2.0, 5.0), ("0,1,0,4", 0.0, 0.0, 4.0)] {
        let expected = 2f64.powf(-n) * 2f64.powf(-np) * 2f64.powf(2.0 * x);
        let (c, out) = delta(&["--xi", xi, "--point", "2E"]);
        assert_eq!(c, 0);
        let got: f64 = out.parse().unwrap();
        assert!((got - expected).abs() <= 1e-14 * expected, "{xi}: {got} vs {expected}");
    }
    assert_eq!(delta(&["--xi=-1,0,1,1", "--point=-1,1,1,0,0"]).0, 1);
    assert_eq!(delta(&["--xi=-1,0,1,1", "--point=1,1,1,1,1"]).0, 1);
    assert_eq!(delta(&["--xi=-1,0,1,1", "--point", "1,1"]).0, 2);
    assert_eq!(delta(&["--xi=-1,0,1.5,1", "--point", "E"]).0, 2);
    let (c, k) = delta(&["--xi=-1,0,1,1", "--point", "ref", "--w", "ref"]);
    assert_eq!((c, k.as_str()), (0, "0.0625"));
    assert_eq!(delta(&["--xi=-1,0,1,1", "--point", "ref", "--w=0,0,0,0,0"]).0, 1);
}

#[test]
fn suite_reports_and_exit_codes() {
    let o = jdomain(&["suite", "--builtin", "dI21", "--samples", "20"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).ends_with("all checks passed\n"));
    let o = jdomain(&["suite", "--builtin", "vinberg5", "--samples", "20", "--tolerance", "1e-30"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("delta_law              FAIL"));
    assert_eq!(code(&jdomain(&["suite", "--builtin", "rank1", "--tolerance", "-1"])), 2);
}

#[test]
fn export_import_suite_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["vinberg5", "dI21", "rank1"] {
        let path = dir.path().join(format!("{name}.json"));
        let o = jdomain(&["export", "--builtin", name, "--kind", "fields", "-o", path.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        assert_eq!(code(&jdomain(&["validate", path.to_str().unwrap()])), 0);
        let from_file = jdomain(&["suite", path.to_str().unwrap(), "--json", "--samples", "25"]);
        let from_builtin = jdomain(&["suite", "--builtin", name, "--json", "--samples", "25"]);
        assert_eq!(code(&from_file), 0);
        assert_eq!(from_file.stdout, from_builtin.stdout, "{name}");
    }
    for kind in ["lie_algebra", "normal_j", "domain"] {
        let path = dir.path().join(format!("{kind}.json"));
        jdomain(&["export", "--builtin", "vinberg5", "--kind", kind, "-o", path.to_str().unwrap()]);
        assert_eq!(code(&jdomain(&["validate", path.to_str().unwrap()])), 0, "{kind}");
    }
    assert_eq!(code(&jdomain(&["export", "--builtin", "vinberg5", "--kind", "cone"])), 2);
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_jdomain"))
            .args(["suite", "--builtin", "vinberg5", "--samples", "20"])
            .env("JDOMAIN_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.stdout, run("4").stdout);
    assert_eq!(code(&run("many")), 2);
}
