use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lowthrust_mpc::analysis::{ScenarioFile, DV_PRIME_SVG, ELEMENTS_SVG, OUT_DIR_ENV};
use lowthrust_mpc::guidance::{read_csv, GuidanceLog};

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowthrust-mpc"))
        .args(args)
        .env_remove(OUT_DIR_ENV)
        .env("RUST_LOG", "off")
        .output()
        .expect("binary runs")
}

/// A 6 km lowering with thrust errors; runs in about a second.
fn tiny(dir: &Path, seed: u64) -> PathBuf {
    let mut sc = ScenarioFile::load(&scenarios().join("downleg_short.json")).unwrap();
    sc.name = "tiny".into();
    sc.target.a_km = 6973.85;
    sc.errors.p_misthrust = 0.1;
    sc.errors.sigma_t = 0.07;
    sc.errors.sigma_beta_deg = 7.0;
    sc.errors.seed = seed;
    let path = dir.join("tiny.json");
    std::fs::write(&path, sc.to_json().unwrap()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_log_csv_and_plots() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = tiny(tmp.path(), 3);
    let out = tmp.path().join("out");
    let o = cli(&["--out-dir", s(&out), "run", s(&scenario)]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    for f in ["log.json", "trajectory.csv", ELEMENTS_SVG, DV_PRIME_SVG] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let log =
        GuidanceLog::from_json(&std::fs::read_to_string(out.join("log.json")).unwrap()).unwrap();
    assert!(!log.segments.is_empty());
    assert!(log.summary.da_km.abs() < 0.5);
    let rows = read_csv(std::fs::File::open(out.join("trajectory.csv")).unwrap()).unwrap();
    assert_eq!(rows, log.nodes);

    // Redrawing from the saved log gives the same images.
    let again = tmp.path().join("again");
    let o = cli(&["--out-dir", s(&again), "plot", s(&out.join("log.json"))]);
    assert_eq!(o.status.code(), Some(0));
    for f in [ELEMENTS_SVG, DV_PRIME_SVG] {
        assert_eq!(
            std::fs::read(out.join(f)).unwrap(),
            std::fs::read(again.join(f)).unwrap()
        );
    }
}

#[test]
fn same_seed_gives_identical_log_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = tiny(tmp.path(), 11);
    let (a, b, c) = (
        tmp.path().join("a"),
        tmp.path().join("b"),
        tmp.path().join("c"),
    );
    assert_eq!(
        cli(&["--out-dir", s(&a), "run", s(&scenario)])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        cli(&["--out-dir", s(&b), "run", s(&scenario)])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        cli(&["--out-dir", s(&c), "--seed", "12", "run", s(&scenario)])
            .status
            .code(),
        Some(0)
    );
    let read = |d: &Path| std::fs::read(d.join("log.json")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn env_var_sets_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = tiny(tmp.path(), 3);
    let out = tmp.path().join("from_env");
    let o = Command::new(env!("CARGO_BIN_EXE_lowthrust-mpc"))
        .args([
            "nonlinearity",
            s(&scenario),
            "--orbits",
            "1",
            "--samples",
            "8",
        ])
        .env(OUT_DIR_ENV, &out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("nonlinearity.csv").is_file());
    assert!(out.join("nonlinearity.svg").is_file());
}

#[test]
fn nonlinearity_json_output() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = tiny(tmp.path(), 3);
    let o = cli(&[
        "--out-dir",
        s(tmp.path()),
        "--format",
        "json",
        "nonlinearity",
        s(&scenario),
        "--orbits",
        "2",
        "--samples",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("nonlinearity.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(v["curves"].as_array().unwrap().len(), 5);
}

#[test]
fn schema_errors_exit_2_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut sc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(scenarios().join("upleg_ci.json")).unwrap())
            .unwrap();
    sc["spacecraft"]["isp"] = serde_json::json!(-1300.0);
    let neg = tmp.path().join("neg_isp.json");
    std::fs::write(&neg, serde_json::to_string_pretty(&sc).unwrap()).unwrap();
    let out = tmp.path().join("out");
    let o = cli(&["--out-dir", s(&out), "run", s(&neg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("isp"));
    assert!(!out.exists());

    sc["spacecraft"]["isp"] = serde_json::json!(1300.0);
    sc["guidance"]["typo"] = serde_json::json!(1);
    let unknown = tmp.path().join("unknown.json");
    std::fs::write(&unknown, serde_json::to_string_pretty(&sc).unwrap()).unwrap();
    let o = cli(&["--out-dir", s(&out), "run", s(&unknown)]);
    assert_eq!(o.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("typo") && msg.contains("line"), "{msg}");
    assert!(!out.exists());

    let o = cli(&[
        "--out-dir",
        s(&out),
        "sweep-dc",
        s(&scenarios().join("upleg_ci.json")),
        "--values",
        "0.3,0.7",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn infeasible_transfer_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let mut sc = ScenarioFile::load(&scenarios().join("upleg_ci.json")).unwrap();
    sc.target.i_deg = Some(5.0);
    let path = tmp.path().join("plane.json");
    std::fs::write(&path, sc.to_json().unwrap()).unwrap();
    let out = tmp.path().join("out");
    let o = cli(&["--out-dir", s(&out), "run", s(&path)]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(!out.exists());
}

#[test]
fn io_errors_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let o = cli(&["run", s(&tmp.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(4));

    let scenario = tiny(tmp.path(), 3);
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let o = cli(&[
        "--out-dir",
        s(&blocker.join("sub")),
        "nonlinearity",
        s(&scenario),
        "--orbits",
        "1",
        "--samples",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn plot_of_empty_log_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = tiny(tmp.path(), 3);
    let out = tmp.path().join("out");
    assert_eq!(
        cli(&["--out-dir", s(&out), "run", s(&scenario)])
            .status
            .code(),
        Some(0)
    );
    let mut log =
        GuidanceLog::from_json(&std::fs::read_to_string(out.join("log.json")).unwrap()).unwrap();
    log.segments.clear();
    let empty = tmp.path().join("empty.json");
    std::fs::write(&empty, log.to_json().unwrap()).unwrap();
    let dir = tmp.path().join("plots");
    let o = cli(&["--out-dir", s(&dir), "plot", s(&empty)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("no flown segments"));
    assert!(!dir.join(ELEMENTS_SVG).exists());

    let o = cli(&["plot", s(&scenario)]);
    assert_eq!(o.status.code(), Some(2), "a scenario is not a log");
}
