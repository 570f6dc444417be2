use std::path::Path;
use std::process::{Command, Output};

const SCALAR: &str = r#"{
  "format_version": 1,
  "theorem": "frame-check",
  "alg_dim": 1,
  "source_len": 1,
  "operators": {
    "K": { "alg_dim": 1, "src_len": 1, "dst_len": 1, "matrix": [[[1.0, 0.0]]] }
  },
  "families": {
    "upsilon": {
      "weights": [1.0],
      "members": [{ "alg_dim": 1, "src_len": 1, "dst_len": 1, "matrix": [[[2.0, 0.0]]] }]
    }
  }
}"#;

fn kgframes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgframes"))
        .args(args)
        .env_remove("KGFRAMES_TOL")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn fuzz_output_is_byte_identical_across_runs() {
    for format in ["text", "structured"] {
        let args = [
            "fuzz",
            "--theorem",
            "2.6",
            "--trials",
            "25",
            "--seed",
            "9",
            "--format",
            format,
        ];
        let (a, b) = (kgframes(&args), kgframes(&args));
        assert_eq!(
            a.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout);
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn check_passes_on_scalar_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "scalar.json", SCALAR);
    let o = kgframes(&["check", &path]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict    pass"), "{}", stdout(&o));
    let o = kgframes(&[
        "--format",
        "structured",
        "construct",
        "--theorem",
        "1.9",
        &path,
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_start().starts_with('{'));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(
        dir.path(),
        "broken.json",
        "{ \"format_version\": 1,\n  \"theorem\": }",
    );
    let negative = write(
        dir.path(),
        "negative.json",
        &SCALAR.replace("[1.0]", "[-1.0]"),
    );
    let scalar = write(dir.path(), "scalar.json", SCALAR);
    let missing = dir.path().join("absent.json");
    let cases: [&[&str]; 7] = [
        &["check", &broken],
        &["check", &negative],
        &["check", missing.to_str().unwrap()],
        &["construct", "--theorem", "9.9", &scalar],
        &["fuzz", "--theorem", "2.1", "--dims", "1,2,3"],
        &["--tol", "-1", "check", &scalar],
        &["frobnicate"],
    ];
    for args in cases {
        let o = kgframes(args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let o = kgframes(&["check", &negative]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("families.upsilon.weights[0]"));
    let o = kgframes(&["check", &broken]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn report_rerenders_saved_output_and_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("run.json");
    let args = ["fuzz", "--theorem", "3.1i", "--trials", "12", "--seed", "4"];
    let text = kgframes(&args);
    let o = kgframes(
        &[
            &args[..],
            &[
                "--format",
                "structured",
                "--output",
                saved.to_str().unwrap(),
            ],
        ]
        .concat(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let rendered = kgframes(&["report", saved.to_str().unwrap()]);
    assert_eq!(rendered.status.code(), Some(0));
    assert_eq!(rendered.stdout, text.stdout);

    // A report recording a failed trial makes `report` exit with the hard-failure code.
    let json = std::fs::read_to_string(&saved).unwrap();
    let failed = json
        .replacen("\"passed\": 12", "\"passed\": 11", 1)
        .replacen("\"failed\": 0", "\"failed\": 1", 1)
        .replacen("\"status\": \"pass\"", "\"status\": \"fail\"", 1);
    assert_ne!(failed, json);
    let path = write(dir.path(), "failed.json", &failed);
    let o = kgframes(&["report", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn tolerance_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let scalar = write(dir.path(), "scalar.json", SCALAR);
    let o = Command::new(env!("CARGO_BIN_EXE_kgframes"))
        .args([
            "fuzz",
            "--theorem",
            "frame-check",
            "--trials",
            "2",
            "--seed",
            "1",
        ])
        .env("KGFRAMES_TOL", "1e-8")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("tolerance    1e-8"), "{}", stdout(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_kgframes"))
        .args(["check", &scalar])
        .env("KGFRAMES_TOL", "nonsense")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
