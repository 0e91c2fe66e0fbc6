use fracprop_core::spectral::{SolutionBundle, SpectralField};
use fracprop_core::Complex64;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fracprop-cli-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracprop"))
        .args(args)
        .env_remove("FRACPROP_WORKERS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

/// A fixture with a textual substitution, written into `dir`.
fn variant(dir: &Path, base: &str, from: &str, to: &str) -> PathBuf {
    let src = std::fs::read_to_string(fixture(base)).unwrap();
    assert!(src.contains(from), "{from}");
    let path = dir.join(base);
    std::fs::write(&path, src.replacen(from, to, 1)).unwrap();
    path
}

#[test]
fn shipped_fixtures_validate() {
    for f in ["heat.json", "two_equation.json", "showcase.json"] {
        let o = run(&["validate", "--config", fixture(f).to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{f}: {}", text(&o.stdout));
        assert!(text(&o.stdout).contains("p* ="));
    }
}

#[test]
fn order_out_of_range_is_an_invalid_system() {
    let dir = scratch("beta");
    let cfg = variant(&dir, "two_equation.json", "[0.5, 0.7]", "[0.5, 1.5]");
    let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(text(&o.stdout).contains("(0,1]"), "{}", text(&o.stdout));
}

#[test]
fn upper_entry_is_malformed() {
    let dir = scratch("upper");
    let cfg = variant(
        &dir,
        "two_equation.json",
        r#""i": 2, "j": 1"#,
        r#""i": 1, "j": 2"#,
    );
    let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = text(&o.stderr);
    assert!(err.contains("entries[1]") && err.contains("i < j"), "{err}");
}

#[test]
fn syntax_errors_point_at_the_line() {
    let dir = scratch("syntax");
    let cfg = variant(&dir, "heat.json", r#""times": [0.0"#, r#""tims": [0.0"#);
    let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(text(&o.stderr).contains("line 10"), "{}", text(&o.stderr));
    assert_eq!(
        code(&run(&["validate", "--config", "/nonexistent.json"])),
        2
    );
    assert_eq!(code(&run(&["validate"])), 2);
}

#[test]
fn heat_solution_decays_mode_by_mode() {
    let o = run(&["solve", "--config", fixture("heat.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let csv = text(&o.stdout);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,component,x1,value"));
    let mut rows = 0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let (t, x, value) = (v[0], v[2], v[3]);
        let want = x.cos() * (-t).exp() + 0.5 * (2.0 * x).cos() * (-4.0 * t).exp();
        assert!((value - want).abs() < 1e-12, "{line}");
        for field in line.split(',').filter(|f| f.contains('e')) {
            let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.replace('.', "").len(), 17, "{field}");
        }
        rows += 1;
    }
    assert_eq!(rows, 4 * 16);
}

#[test]
fn empty_times_are_malformed() {
    let dir = scratch("times");
    let cfg = variant(&dir, "heat.json", "[0.0, 0.25, 0.5, 1.0]", "[]");
    let o = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(text(&o.stderr).contains("times"));
}

#[test]
fn tolerance_failures_name_frequency_and_time() {
    let dir = scratch("tol");
    let cfg = variant(
        &dir,
        "showcase.json",
        r#"{"kind": "constant", "value": 1.0}"#,
        r#"{"kind": "sampled", "times": [0.0, 0.3, 0.30001, 1.0], "values": [0.0, 0.0, 1.0, 1.0]}"#,
    );
    let o = run(&["solve", "--config", cfg.to_str().unwrap(), "--tol", "1e-11"]);
    assert_eq!(code(&o), 1);
    let err = text(&o.stderr);
    assert!(err.contains("ξ = [") && err.contains("t = "), "{err}");
}

#[test]
fn worker_count_does_not_change_the_output() {
    let dir = scratch("workers");
    let cfg = fixture("showcase.json");
    let one = dir.join("one");
    let three = dir.join("three");
    let a = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "--output",
        one.to_str().unwrap(),
    ]);
    assert_eq!(code(&a), 0);
    let b = Command::new(env!("CARGO_BIN_EXE_fracprop"))
        .args([
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--format",
            "json",
            "--output",
            three.to_str().unwrap(),
        ])
        .env("FRACPROP_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&b), 0);
    assert!(text(&b.stderr).contains("3 workers"));
    let sa = std::fs::read_to_string(one.join("solution.json")).unwrap();
    let sb = std::fs::read_to_string(three.join("solution.json")).unwrap();
    let ba = SolutionBundle::from_json_str(&sa).unwrap();
    let bb = SolutionBundle::from_json_str(&sb).unwrap();
    assert!(ba.same_values(&bb));
    assert!(one.join("timings.csv").exists());
}

#[test]
fn solution_at_zero_reingests_as_initial_data() {
    let dir = scratch("roundtrip");
    let cfg = fixture("two_equation.json");
    let o = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.join("solution.csv")).unwrap();
    // t = 0 rows of component 1 as a grid file
    let mut grid = String::from("x1,value\n");
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols[0].parse::<f64>().unwrap() == 0.0 && cols[1] == "1" {
            grid.push_str(&format!("{},{}\n", cols[2], cols[3]));
        }
    }
    std::fs::write(dir.join("phi1.csv"), grid).unwrap();
    let src = std::fs::read_to_string(&cfg).unwrap();
    let inline = r#"{"period": 6.283185307179586, "modes": [{"k": [1], "re": 0.5}, {"k": [-1], "re": 0.5}]}"#;
    assert!(src.contains(inline));
    let again = src
        .replacen(
            inline,
            r#"{"period": 6.283185307179586, "grid_csv": "phi1.csv"}"#,
            1,
        )
        .replace("[0.0, 0.25, 1.0]", "[0.0]");
    std::fs::write(dir.join("again.json"), again).unwrap();
    let out2 = dir.join("out2");
    let o = run(&[
        "solve",
        "--config",
        dir.join("again.json").to_str().unwrap(),
        "--format",
        "json",
        "--output",
        out2.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let b = SolutionBundle::from_json_str(
        &std::fs::read_to_string(out2.join("solution.json")).unwrap(),
    )
    .unwrap();
    let f: &SpectralField = &b.fields[0][0];
    for (k, want) in [(1, 0.5), (-1, 0.5), (0, 0.0), (2, 0.0)] {
        assert!(
            (f.get(&[k]) - Complex64::new(want, 0.0)).norm() < 1e-12,
            "k = {k}"
        );
    }
}

#[test]
fn verify_passes_on_the_two_equation_fixture() {
    let dir = scratch("verify");
    let o = run(&[
        "verify",
        "--config",
        fixture("two_equation.json").to_str().unwrap(),
        "--output",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", text(&o.stdout));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("verify_report.json")).unwrap())
            .unwrap();
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(names.contains(&"laplace") && names.contains(&"residual"));
}

#[test]
fn only_runs_a_single_check() {
    let o = run(&[
        "verify",
        "--config",
        fixture("showcase.json").to_str().unwrap(),
        "--only",
        "laplace",
    ]);
    assert_eq!(code(&o), 0);
    let out = text(&o.stdout);
    let checks: Vec<&str> = out
        .lines()
        .filter(|l| l.starts_with("PASS") || l.starts_with("FAIL") || l.starts_with("DIAG"))
        .collect();
    assert_eq!(checks.len(), 1);
    assert!(checks[0].contains("laplace"));
    assert_eq!(
        code(&run(&[
            "verify",
            "--config",
            fixture("heat.json").to_str().unwrap(),
            "--only",
            "nonsense"
        ])),
        2
    );
}

#[test]
fn failing_check_sets_the_exit_code_and_diagnostics_do_not() {
    let dir = scratch("laplace-fail");
    let cfg = variant(
        &dir,
        "two_equation.json",
        r#""tau": 0.6,"#,
        r#""tau": 0.6, "laplace": {"beta": 0.5, "lambda": 1.0, "s": [1.0]},"#,
    );
    let strict_dir = scratch("laplace-strict");
    let strict = variant(
        &strict_dir,
        "two_equation.json",
        r#""times": [0.0, 0.25, 1.0],"#,
        r#""times": [0.0, 0.25, 1.0], "tolerances": {"laplace": 1e-30},"#,
    );
    assert_eq!(
        code(&run(&[
            "verify",
            "--config",
            cfg.to_str().unwrap(),
            "--only",
            "laplace"
        ])),
        0
    );
    assert_eq!(
        code(&run(&[
            "verify",
            "--config",
            strict.to_str().unwrap(),
            "--only",
            "laplace"
        ])),
        1
    );
    // the bound probe is a diagnostic only
    assert_eq!(
        code(&run(&[
            "verify",
            "--config",
            cfg.to_str().unwrap(),
            "--only",
            "probe"
        ])),
        0
    );
}

#[test]
fn corrupted_solution_fails_the_residual() {
    let dir = scratch("corrupt");
    let times: Vec<String> = (0..=64)
        .map(|i| format!("{:.16e}", (i as f64 / 64.0).powi(3)))
        .collect();
    let cfg = variant(
        &dir,
        "two_equation.json",
        "[0.0, 0.25, 1.0]",
        &format!("[{}]", times.join(", ")),
    );
    let o = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "--output",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let good = std::fs::read_to_string(dir.join("solution.json")).unwrap();
    let with_solution = |name: &str| {
        let src = std::fs::read_to_string(&cfg).unwrap();
        let path = dir.join(format!("{name}.json"));
        std::fs::write(
            &path,
            src.replacen(
                "\"tau\": 0.6,",
                &format!("\"tau\": 0.6, \"solution\": \"{name}.solution.json\","),
                1,
            ),
        )
        .unwrap();
        path
    };
    std::fs::write(dir.join("good.solution.json"), &good).unwrap();
    let ok = with_solution("good");
    assert_eq!(
        code(&run(&[
            "verify",
            "--config",
            ok.to_str().unwrap(),
            "--only",
            "residual"
        ])),
        0
    );

    let mut bundle = SolutionBundle::from_json_str(&good).unwrap();
    let s = bundle.times.len() - 10;
    let f = &mut bundle.fields[s][0];
    let v = f.get(&[1]);
    f.add_mode(vec![1], v * 0.01).unwrap();
    std::fs::write(
        dir.join("bad.solution.json"),
        bundle.to_json_value().to_string(),
    )
    .unwrap();
    let bad = with_solution("bad");
    let o = run(&[
        "verify",
        "--config",
        bad.to_str().unwrap(),
        "--only",
        "residual",
    ]);
    assert_eq!(code(&o), 1, "{}", text(&o.stdout));
    assert!(text(&o.stdout).contains("FAIL residual"));
}

#[test]
fn ml_prints_one_value() {
    let o = run(&["ml", "--beta", "0.5", "--mu", "1", "--x", "-1"]);
    assert_eq!(code(&o), 0);
    let out = text(&o.stdout);
    assert_eq!(out.lines().count(), 1);
    let v: f64 = out.trim().parse().unwrap();
    assert!((v - 0.427583576155807).abs() < 1e-12);
    assert_eq!(
        out.trim().split('e').next().unwrap().replace('.', "").len(),
        17
    );
    assert_eq!(
        code(&run(&["ml", "--beta", "0.5", "--mu", "1", "--x", "2"])),
        1
    );
}

#[test]
fn bench_writes_a_timing_table() {
    let dir = scratch("bench");
    let o = run(&[
        "bench",
        "--config",
        fixture("showcase.json").to_str().unwrap(),
        "--workers",
        "2",
        "--output",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let csv = std::fs::read_to_string(dir.join("bench.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "kind,m,workers,modes,terms,seconds,seconds_per_mode"
    );
    // three leading blocks, then solves with 1 and 2 workers
    assert_eq!(lines.len(), 1 + 3 + 2);
    let terms: Vec<&str> = lines[1..4]
        .iter()
        .map(|l| l.split(',').nth(4).unwrap())
        .collect();
    assert_eq!(terms, ["0", "1", "4"]);
}
