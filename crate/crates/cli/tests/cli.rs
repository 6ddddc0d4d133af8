use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kiu(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kiu"))
        .args(args)
        .current_dir(dir)
        .env_remove("KIU_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn check_condition_on_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let o = kiu(&["check-condition", "--fixture", "symmetric_jump", "--out", "a"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "holds / TO-integral-finite");
    let o = kiu(&["check-condition", "--fixture", "heavy_tail_oscillating", "--out", "b"], dir.path());
    assert_eq!(stdout(&o).trim(), "fails / TO-integral-divergent");
    let record = fs::read_to_string(dir.path().join("b/condition.csv")).unwrap();
    assert!(record.starts_with("holds,reason,regime,integral,detail\nfalse,TO-integral-divergent,T-oscillating,"));
}

#[test]
fn simulate_deterministic_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let o = kiu(&["simulate", "--fixture", "deterministic", "--out", "sim"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("sim/path-0000.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,Z,sign"));
    let mut count = 0;
    for l in lines {
        let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((f[1] - (1.0 + f[0])).abs() < 1e-9, "{l}");
        count += 1;
    }
    assert_eq!(count, 101);
}

#[test]
fn unknown_key_is_a_config_error_naming_the_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "[spec]\nfixture = \"exp_jump\"\n\n[overshoot]\nlevel = [1.0]\n").unwrap();
    let o = kiu(&["overshoot", "--config", "bad.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("bad.toml") && e.contains("level"), "{e}");
}

#[test]
fn bad_spec_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.toml"), "[spec]\nfile = \"spec.toml\"\n").unwrap();
    fs::write(dir.path().join("spec.toml"), "states = 2\n").unwrap();
    let o = kiu(&["check-condition", "--config", "cfg.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("spec.toml"), "{}", stderr(&o));
}

#[test]
fn missing_spec_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = kiu(&["simulate"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn refused_entrance_is_a_run_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = kiu(&["entrance", "--fixture", "c_failing"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let e = stderr(&o);
    assert!(e.contains("cannot be normalized") && e.contains("witness"), "{e}");
}

#[test]
fn failing_checks_exit_with_acceptance_status() {
    // escaping overshoots fail the stationarity check
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.toml"),
        "[spec]\nfixture = \"c_failing\"\n\n[overshoot]\nlevels = [2.0, 8.0, 32.0]\nn = 2000\n",
    )
    .unwrap();
    let o = kiu(&["overshoot", "--config", "cfg.toml", "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(dir.path().join("o/overshoot.csv").exists());
}

#[test]
fn seed_flag_beats_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str, flag: Option<&str>, env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_kiu"));
        c.args(["simulate", "--fixture", "exp_jump", "--out", out]).current_dir(dir.path());
        if let Some(s) = flag {
            c.args(["--seed", s]);
        }
        match env {
            Some(s) => c.env("KIU_SEED", s),
            None => c.env_remove("KIU_SEED"),
        };
        assert!(c.output().unwrap().status.success());
        fs::read_to_string(dir.path().join(out).join("events-0000.csv")).unwrap()
    };
    let flag = run("a", Some("5"), Some("6"));
    let env5 = run("b", None, Some("5"));
    let env6 = run("c", None, Some("6"));
    assert_eq!(flag, env5);
    assert_ne!(flag, env6);
    let resolved = fs::read_to_string(dir.path().join("a/config.resolved.toml")).unwrap();
    assert!(resolved.starts_with("seed = 5\n"), "{resolved}");
}

#[test]
fn resolved_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.toml"), "seed = 3\n[spec]\nfixture = \"exp_jump\"\n[simulate]\nhorizon = 2.0\n").unwrap();
    assert!(kiu(&["simulate", "--config", "cfg.toml", "--out", "r"], dir.path()).status.success());
    let first = fs::read_to_string(dir.path().join("r/config.resolved.toml")).unwrap();
    fs::write(dir.path().join("again.toml"), &first).unwrap();
    assert!(kiu(&["simulate", "--config", "again.toml", "--out", "r2"], dir.path()).status.success());
    let second = fs::read_to_string(dir.path().join("r2/config.resolved.toml")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn resolved_config_reproduces_a_fixture_run() {
    let dir = tempfile::tempdir().unwrap();
    assert!(kiu(&["simulate", "--fixture", "two_state_jump", "--seed", "4", "--out", "f"], dir.path()).status.success());
    let resolved = fs::read_to_string(dir.path().join("f/config.resolved.toml")).unwrap();
    assert!(resolved.contains("[spec.inline"), "{resolved}");
    assert!(kiu(&["simulate", "--config", "f/config.resolved.toml", "--out", "g"], dir.path()).status.success());
    for name in ["events-0000.csv", "path-0000.csv", "config.resolved.toml"] {
        let x = fs::read(dir.path().join("f").join(name)).unwrap();
        let y = fs::read(dir.path().join("g").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}

#[test]
fn verify_all_subset_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| ["verify-all", "--criteria", "1,4,5,12", "--scale", "0.2", "--seed", "11", "--out", out];
    let a = kiu(&args("a"), dir.path());
    assert_eq!(a.status.code(), Some(0), "{}{}", stdout(&a), stderr(&a));
    assert_eq!(stdout(&a).lines().count(), 4);
    assert!(kiu(&args("b"), dir.path()).status.success());
    for name in ["summary.csv", "criterion-01.csv", "criterion-04.csv", "criterion-05.csv", "criterion-12.csv"] {
        let x = fs::read(dir.path().join("a").join(name)).unwrap();
        let y = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let summary = fs::read_to_string(dir.path().join("a/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
}

#[test]
fn report_indexes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    assert!(kiu(&["simulate", "--fixture", "deterministic", "--out", "s"], dir.path()).status.success());
    let o = kiu(&["report", "--from", "s"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let manifest = fs::read_to_string(dir.path().join("s/manifest.csv")).unwrap();
    assert!(manifest.contains("path-0000.csv,path,101,1"), "{manifest}");
    assert!(dir.path().join("s/plot.py").exists());
}

#[test]
fn usage_errors_exit_with_config_status() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(kiu(&["no-such-command"], dir.path()).status.code(), Some(2));
    assert_eq!(kiu(&["verify-all", "--criteria", "16"], dir.path()).status.code(), Some(2));
}
