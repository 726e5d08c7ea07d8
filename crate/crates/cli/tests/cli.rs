use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rescaledexp"));
    cmd.env_remove("RESCALEDEXP_OUT_DIR");
    cmd
}

fn toy(dir: &Path) -> PathBuf {
    let path = dir.join("toy.libsvm");
    std::fs::write(&path, "+1 1:1 2:0.5\n-1 1:-0.5 2:-1\n".repeat(10)).unwrap();
    path
}

fn error_json(out: &Output) -> serde_json::Value {
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().expect("stderr is empty");
    serde_json::from_str(line).unwrap_or_else(|e| panic!("not json: {line}: {e}"))
}

#[test]
fn run_writes_csv_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy(dir.path());
    let out = bin()
        .args([
            "run",
            "--algo",
            "adagrad",
            "--hyper",
            "0.1",
            "--no-timing",
            "--dataset",
        ])
        .arg(&data)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("algorithm,variant,hyperparameter"));
    let row = lines.next().unwrap();
    assert!(
        row.starts_with("adagrad,standard,0.1,toy,0,file,20,"),
        "{row}"
    );
    assert!(row.ends_with(",,"), "{row}");
}

#[test]
fn run_without_timing_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy(dir.path());
    let outputs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let path = dir.path().join(format!("r{i}.csv"));
            let status = bin()
                .args([
                    "run",
                    "--algo",
                    "rescaledexp",
                    "--order",
                    "shuffle",
                    "--seed",
                    "7",
                    "--no-timing",
                ])
                .arg("--dataset")
                .arg(&data)
                .arg("--out")
                .arg(&path)
                .status()
                .unwrap();
            assert!(status.success());
            std::fs::read(path).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn out_dir_env_sets_default_location() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy(dir.path());
    let target = dir.path().join("results");
    let out = bin()
        .env("RESCALEDEXP_OUT_DIR", &target)
        .args(["run", "--algo", "rescaledexp", "--dataset"])
        .arg(&data)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(target.join("run_rescaledexp_toy.csv").exists());
}

#[test]
fn sweep_then_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy(dir.path());
    let mut inputs = Vec::new();
    for algo in ["rescaledexp", "adagrad"] {
        let path = dir.path().join(format!("{algo}.csv"));
        let out = bin()
            .args(["sweep", "--algo", algo, "--no-timing", "--dataset"])
            .arg(&data)
            .arg("--out")
            .arg(&path)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        inputs.push(path);
    }
    let rows = std::fs::read_to_string(&inputs[1]).unwrap().lines().count();
    assert_eq!(rows, 1 + 15);
    let table = dir.path().join("table.csv");
    let out = bin()
        .arg("aggregate")
        .arg("--in")
        .args(&inputs)
        .arg("--out")
        .arg(&table)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(table).unwrap();
    assert!(text.starts_with("algorithm,dataset,best_hyperparameter,best_loss,normalized_loss"));
    assert!(text.lines().any(|l| l.starts_with("rescaledexp,mean,")));
}

#[test]
fn adversary_default_reports_crossing() {
    let out = bin().arg("adversary").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("rescaledexp,1,1,0.25,400,crossed,0,"));
}

#[test]
fn errors_are_json() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy(dir.path());

    let v = error_json(
        &bin()
            .args([
                "run",
                "--algo",
                "adagrad",
                "--dataset",
                "/no/such/file",
                "--hyper",
                "1",
            ])
            .output()
            .unwrap(),
    );
    assert_eq!(v["error"]["kind"], "io");

    let v = error_json(
        &bin()
            .args(["run", "--algo", "nonsense", "--dataset"])
            .arg(&data)
            .output()
            .unwrap(),
    );
    assert_eq!(v["error"]["kind"], "usage");

    let v = error_json(
        &bin()
            .args(["run", "--algo", "adam", "--dataset"])
            .arg(&data)
            .output()
            .unwrap(),
    );
    assert!(!v["error"]["message"].as_str().unwrap().is_empty());

    let bad = dir.path().join("bad.libsvm");
    std::fs::write(&bad, "+1 1:1\n+1 3:1 2:1\n").unwrap();
    let v = error_json(
        &bin()
            .args(["run", "--algo", "rescaledexp", "--dataset"])
            .arg(&bad)
            .output()
            .unwrap(),
    );
    assert_eq!(v["error"]["kind"], "parse");
    assert!(v["error"]["message"].as_str().unwrap().contains('2'));

    let v = error_json(&bin().args(["adversary", "--eps", "0.7"]).output().unwrap());
    assert!(v["error"]["kind"].is_string());
}

#[test]
fn help_and_version_succeed() {
    for flag in ["--help", "--version"] {
        let out = bin().arg(flag).output().unwrap();
        assert!(out.status.success());
        assert!(!out.stdout.is_empty());
    }
}
