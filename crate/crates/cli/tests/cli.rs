use std::path::Path;
use std::process::{Command, Output};

use scoreprior_cli::config::{config_load, ConfigError, Experiment, RunConfig};

fn bin(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_scoreprior"));
    cmd.args(args).env_remove(scoreprior_cli::OUT_ENV);
    if let Some(dir) = out_env {
        cmd.env(scoreprior_cli::OUT_ENV, dir);
    }
    cmd.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn score_check_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["score-check", "--out", dir.path().to_str().unwrap()], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let run = dir.path().join("score-check-seed7");
    let csv = std::fs::read_to_string(run.join("checks.csv")).unwrap();
    assert!(csv.starts_with("check,value,threshold,relation,pass\n"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")), "{csv}");
    let manifest = std::fs::read_to_string(run.join("manifest.txt")).unwrap();
    for key in ["experiment: score-check", "seed: 7", "dataset_sha256: none", "wall_time_secs:", "version:"] {
        assert!(manifest.contains(key), "{key} missing from\n{manifest}");
    }
}

#[test]
fn output_root_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["prior-table", "--a", "2"], Some(dir.path()));
    assert!(o.status.success(), "{}", stderr(&o));
    let table = std::fs::read_to_string(dir.path().join("prior-table-seed7/quantiles.csv")).unwrap();
    // median of a/(a+x)^2 is a
    assert!(table.lines().any(|l| l.starts_with("0.5,2,")), "{table}");
}

#[test]
fn invalid_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bin(&["sim-scale", "--sigma", "abc", "--out", out], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sigma"));
    let o = bin(&["sim-scale", "--burn-in", "7000", "--out", out], None);
    assert_eq!(o.status.code(), Some(1));
    let o = bin(&["no-such-experiment"], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_galaxy_file_exits_2_with_instructions() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.txt");
    let o = bin(
        &["galaxy-dic", "--galaxy", missing.to_str().unwrap(), "--out", dir.path().to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--galaxy"));
}

#[test]
fn config_file_then_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.cfg");
    std::fs::write(&file, "M: 20\nsigma: 1\nn_iter: 600\nburn_in: 100\n").unwrap();
    let out = dir.path().join("out");
    let o = bin(
        &[
            "sim-scale",
            "--config",
            file.to_str().unwrap(),
            "--M",
            "5",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = std::fs::read_to_string(out.join("sim-scale-seed7/manifest.txt")).unwrap();
    assert!(manifest.contains("M: 5\n") && manifest.contains("n_iter: 600\n"), "{manifest}");
    let reps = std::fs::read_to_string(out.join("sim-scale-seed7/replicates_score_1.csv")).unwrap();
    assert_eq!(reps.lines().count(), 6);
    assert!(reps.starts_with("replicate,"));
}

#[test]
fn config_load_examples() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.cfg");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(
        config_load(&empty, Experiment::SimScale).unwrap(),
        RunConfig::defaults(Experiment::SimScale)
    );
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "sigma: abc\n").unwrap();
    match config_load(&bad, Experiment::SimScale) {
        Err(ConfigError::Type { key, .. }) => assert_eq!(key, "sigma"),
        other => panic!("{other:?}"),
    }
    let unknown = dir.path().join("unknown.cfg");
    std::fs::write(&unknown, "colour: red\nseed: 3\nshape: 2\n").unwrap();
    match config_load(&unknown, Experiment::SimScale) {
        Err(ConfigError::UnknownKeys(keys)) => assert_eq!(keys, ["colour", "shape"]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn replay_rejects_changed_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let galaxy = dir.path().join("g.txt");
    std::fs::copy(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/galaxies.txt"), &galaxy).unwrap();
    let out = dir.path().join("out");
    let args = [
        "galaxy-dic",
        "--galaxy",
        galaxy.to_str().unwrap(),
        "--k",
        "2",
        "--n-iter",
        "1000",
        "--burn-in",
        "200",
        "--thin",
        "10",
        "--out",
        out.to_str().unwrap(),
    ];
    let o = bin(&args, None);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = out.join("galaxy-dic-seed7/manifest.txt");
    let text = std::fs::read_to_string(galaxy.as_path()).unwrap();
    std::fs::write(&galaxy, text.replacen("9.172", "9.173", 1)).unwrap();
    let o = bin(&["replay", manifest.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("checksum"), "{}", stderr(&o));
}
