use std::process::{Command, Output};

fn wsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsum"))
        .args(args)
        .env_remove("WSUM_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn approx_sqrt2() {
    let o = wsum(&["approx", "--alpha", "sqrt2", "--P", "10000"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["a"], 8119);
    assert_eq!(v["q"], 5741);
    assert_eq!(v["satisfied"], true);
}

#[test]
fn approx_with_arc_and_continued_fraction() {
    let o = wsum(&["approx", "--alpha", "7/5", "--P", "100", "--Q", "10", "--terms", "4"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["classification"]["arc"], "major");
    assert_eq!(v["classification"]["q"], 5);
    assert_eq!(v["continued_fraction"]["terminated"], true);
    assert_eq!(v["continued_fraction"]["quotients"], serde_json::json!([1, 2, 2]));
}

#[test]
fn validation_errors_exit_1() {
    for args in [
        &["approx", "--alpha", "1/0", "--P", "10"][..],
        &["sum", "--poly", "x^^2", "--N", "100"],
        &["decompose", "--poly", "sqrt2*x^2", "--N", "10", "--U", "10", "--V", "10"],
        &["frobnicate"],
        &["search", "--poly", "sqrt2*x^2", "--N", "100", "--eps", "0"],
    ] {
        let o = wsum(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn budget_rejections_exit_2() {
    for args in [
        &["sum", "--poly", "sqrt2*x^2", "--N", "1e11"][..],
        &["sum", "--poly", "pi*x^12", "--N", "1e8", "--weight", "one"],
    ] {
        assert_eq!(wsum(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn help_and_version_exit_0() {
    assert!(wsum(&["--help"]).status.success());
    let v = wsum(&["--version"]);
    assert!(v.status.success());
    assert!(stdout(&v).contains("256-bit"));
}

#[test]
fn output_is_independent_of_thread_count() {
    let cases: [&[&str]; 4] = [
        &["sum", "--poly", "golden*x^3 + 1/7*x", "--N", "300000", "--weight", "musq"],
        &["decompose", "--poly", "sqrt2*x^2", "--N", "50000", "--weight", "musq"],
        &["scan", "--poly", "e*x^2", "--grid", "2^10..2^15"],
        &["search", "--poly", "pi*x^3", "--N", "1e5", "--variant", "squarefree", "--cap", "50"],
    ];
    for args in cases {
        let run = |t: &str| {
            let mut full = vec!["--threads", t];
            full.extend_from_slice(args);
            let o = wsum(&full);
            assert!(o.status.success(), "{args:?}");
            o.stdout
        };
        assert_eq!(run("1"), run("8"), "{args:?}");
    }
}

#[test]
fn search_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let hits = dir.path().join("hits.jsonl");
    let hits_arg = hits.to_str().unwrap();
    let poly = "sqrt2*x^2 + 1/3*x";
    let o = wsum(&["--out", hits_arg, "search", "--poly", poly, "--N", "20000", "--cap", "500"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&hits).unwrap();
    assert_eq!(text.lines().count(), 500);

    let v = wsum(&["verify", "--poly", poly, "--input", hits_arg]);
    assert!(v.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&v)).unwrap();
    assert_eq!(report["checked"], 500);
    assert_eq!(report["passed"], 500);

    // A tampered distance must be caught.
    let first = text.lines().next().unwrap();
    let mut hit: serde_json::Value = serde_json::from_str(first).unwrap();
    hit["dist"] = serde_json::json!(hit["dist"].as_f64().unwrap() * 0.5);
    std::fs::write(&hits, format!("{hit}\n")).unwrap();
    let v = wsum(&["verify", "--poly", poly, "--input", hits_arg]);
    assert_eq!(v.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&v)).unwrap();
    assert_eq!(report["failed"], serde_json::json!([hit["n"]]));
}

#[test]
fn cache_round_trip_gives_identical_sums() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["--cache", cache, "sum", "--poly", "sqrt2*x^2", "--N", "20000", "--weight", "tau3"];
    let first = wsum(&args);
    assert!(dir.path().join("tau3_20000.tbl").exists());
    let second = wsum(&args);
    assert!(first.status.success() && second.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, wsum(&args[2..]).stdout);
}

#[test]
fn criterion_and_pipeline() {
    let o = wsum(&["criterion", "--poly", "sqrt2*x^2", "--N", "1000", "--H", "3", "--filter", "in-a"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["H"], 3);
    assert!(v["holds"].is_boolean());

    let o = wsum(&["criterion", "--pipeline", "--poly", "sqrt2*x^2", "--N", "10000", "--cap", "5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["range_start"], 101);

    let rational = wsum(&["criterion", "--pipeline", "--poly", "1/3*x^2", "--N", "10000"]);
    assert_eq!(rational.status.code(), Some(1));
}

#[test]
fn selftest_passes() {
    let o = wsum(&["selftest", "--seed", "42"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}
