use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_interchange")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn missing_seed_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run(&["bounds", "--d", "10", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("error[config]"), "{err}");
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "seed = 3\nbogus = 1\n").unwrap();
    let (code, _, err) = run(&["bounds", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn odd_degree_sum_is_precondition_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run(&["generate", "--n", "7", "--d", "3", "--seed", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("error[precondition]"), "{err}");
}

#[test]
fn oracle_state_guard_is_resource_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run(&["oracle", "--graph", "cycle:12", "--seed", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 4, "{err}");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# bounds for one degree\nseed = 5\ntheta = 3\nd = 10\n").unwrap();
    let out = dir.path().join("out");
    let (code, _, err) =
        run(&["bounds", "--config", cfg.to_str().unwrap(), "--theta", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(out.join("bounds.csv")).unwrap();
    assert!(csv.contains("# theta = 2"), "{csv}");
    assert!(out.join("manifest.json").exists());
}
