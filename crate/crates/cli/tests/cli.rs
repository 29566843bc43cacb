use std::path::PathBuf;
use std::process::{Command, Output};

use covarkit::report::{CheckReport, FixpointReport, OracleRun, SearchReport};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn covarkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covarkit"))
        .args(args)
        .env_remove("COVARKIT_SEED")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn check_exit_codes() {
    let cases = [
        ("wavelet.problem", 0),
        ("wavelet_third.problem", 1),
        ("middle_cell_holds.problem", 0),
        ("middle_cell_fails.problem", 1),
        ("pointeval_k1.problem", 0),
        ("composition_reflection.problem", 0),
        ("composition_escape.problem", 65),
        ("malformed.problem", 64),
        ("three_cells.family", 64),
    ];
    for (name, want) in cases {
        let out = covarkit(&["check", &fixture(name)]);
        assert_eq!(code(&out), want, "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(code(&covarkit(&["check", "/nonexistent.problem"])), 64);
    assert_eq!(code(&covarkit(&["frobnicate"])), 64);
    assert_eq!(code(&covarkit(&["--help"])), 0);
}

#[test]
fn failing_check_prints_a_witness() {
    let out = covarkit(&["check", &fixture("middle_cell_fails.problem")]);
    let text = stdout(&out);
    assert!(text.contains("verdict: Fails"), "{text}");
    assert!(
        text.contains("witness: sides differ on (0.3333333333333333, 0.5)"),
        "{text}"
    );
    assert!(text.contains("CONSISTENT"), "{text}");
}

#[test]
fn check_json_round_trips() {
    let out = covarkit(&["check", &fixture("wavelet.problem"), "--json"]);
    assert_eq!(code(&out), 0);
    let report: CheckReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report.verdict.is_holds());
    assert!(report.oracle.residual <= 1e-12);
    assert_eq!(report.exit_code, 0);
    let again: CheckReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(report, again);
}

#[test]
fn oracle_table_and_flags() {
    let out = covarkit(&[
        "oracle",
        &fixture("middle_cell_fails.problem"),
        "--grid",
        "1024",
        "--norm",
        "2",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let run: OracleRun = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(run.config.grid, 1024);
    assert_eq!(run.report.grid, 1024);
    let one = run.report.rows.iter().find(|r| r.function == "1").unwrap();
    assert!(one.residual > 0.0);

    let out = covarkit(&["oracle", &fixture("zero_b.problem")]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("max residual 0.000e0"), "{}", stdout(&out));

    let bad = covarkit(&[
        "oracle",
        &fixture("zero_b.problem"),
        "--tau-pass",
        "1e-3",
        "--tau-fail",
        "1e-4",
    ]);
    assert_eq!(code(&bad), 64);
    assert_eq!(
        code(&covarkit(&["oracle", &fixture("zero_b.problem"), "--norm", "3"])),
        64
    );
}

#[test]
fn seed_variable_overrides_the_flag() {
    let run = |env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_covarkit"));
        cmd.args(["oracle", &fixture("wavelet.problem"), "--seed", "7", "--json"]);
        match env {
            Some(v) => cmd.env("COVARKIT_SEED", v),
            None => cmd.env_remove("COVARKIT_SEED"),
        };
        cmd.output().unwrap()
    };
    let flag: OracleRun = serde_json::from_str(&stdout(&run(None))).unwrap();
    assert_eq!(flag.config.seed, 7);
    let env: OracleRun = serde_json::from_str(&stdout(&run(Some("99")))).unwrap();
    assert_eq!(env.config.seed, 99);
    assert_eq!(code(&run(Some("not a number"))), 64);
}

#[test]
fn search_lists_four_cases() {
    let out = covarkit(&["search", &fixture("three_cells.family"), "--json"]);
    assert_eq!(code(&out), 0);
    let report: SearchReport = serde_json::from_str(&stdout(&out)).unwrap();
    let sol = report.solutions.unwrap();
    assert_eq!(sol.cases.len(), 4);
    assert_eq!(sol.fix.unwrap().points, vec![-1.0, 0.0, 1.0]);

    let out = covarkit(&["search", &fixture("wavelet.problem")]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("single case: Holds"), "{}", stdout(&out));
}

#[test]
fn fixpoints_inline_and_from_file() {
    let out = covarkit(&["fixpoints", "0,0,0,1", "--json"]);
    assert_eq!(code(&out), 0);
    let report: FixpointReport = serde_json::from_str(&stdout(&out)).unwrap();
    let points = report.fixed.unwrap().points;
    assert_eq!(points.len(), 3);
    for (got, want) in points.iter().zip([-1.0, 0.0, 1.0]) {
        assert!((got - want).abs() < 1e-12);
    }

    let out = covarkit(&["fixpoints", "0,1"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("all reals"));

    let out = covarkit(&["fixpoints", &fixture("three_cells.family")]);
    assert!(stdout(&out).contains("Fix(F) = {-1, 0, 1}"), "{}", stdout(&out));

    assert_eq!(code(&covarkit(&["fixpoints", "1,x"])), 64);
    assert_eq!(code(&covarkit(&["fixpoints", "0,0,1", "--tol", "0"])), 64);
}
