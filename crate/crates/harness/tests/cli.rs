//! End-to-end checks of the `ftrlm` binary: exit codes, determinism, and
//! the plumbing between subcommands.

use std::path::Path;
use std::process::{Command, Output};

fn ftrlm(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ftrlm"));
    cmd.args(args);
    cmd.env_remove("FTRLM_DATA_DIR");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("exp.cfg");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL_CONFIG: &str = "\
# quick synthetic run
dataset = synth
n = 40
d = 5
margin = 0.5
data_seed = 3
loss = squared_hinge
algos = ftrlm;adaftrlm
grid = 0.1;1
epochs = 3
seeds = 2
scale = mean
";

#[test]
fn run_emits_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_CONFIG);

    let first = ftrlm(&["run", "--config", &cfg], &[]);
    assert!(first.status.success(), "stderr: {}", stderr_of(&first));
    let text = stdout_of(&first);
    assert!(text.starts_with("algo,schedule,seed,epoch,objective\n"));
    // 2 algos x 2 grid points x (2 seeds + mean) x 4 epoch rows.
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 3 * 4);
    assert!(text.contains("adaftrlm,adaptive-coord c=0.1 eps=1e-8,mean,3,"));

    // Same config again, this time through --out: identical bytes.
    let out_path = dir.path().join("run.csv");
    let second = ftrlm(
        &[
            "run",
            "--config",
            &cfg,
            "--out",
            out_path.to_str().unwrap(),
            "--threads",
            "2",
        ],
        &[],
    );
    assert!(second.status.success());
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), text);
}

#[test]
fn run_resolves_datasets_against_the_env_fallback() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tiny.libsvm"), "+1 1:1 2:-2\n-1 2:3\n").unwrap();
    let cfg = write_config(
        dir.path(),
        "dataset = tiny.libsvm\nalgos = ftrlm\ngrid = 0.5\nepochs = 1\nseeds = 1\n",
    );

    let missing = ftrlm(&["run", "--config", &cfg], &[]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr_of(&missing).contains("tiny.libsvm"));

    let found = ftrlm(
        &["run", "--config", &cfg],
        &[("FTRLM_DATA_DIR", dir.path().to_str().unwrap())],
    );
    assert!(found.status.success(), "stderr: {}", stderr_of(&found));
    assert!(stdout_of(&found).contains("ftrlm,gamma=c/sqrt(t) c=0.5,0,1,"));
}

#[test]
fn lowerbound_single_cell_exit_codes() {
    // High momentum: realized gap clears the floor.
    let good = ftrlm(
        &[
            "lowerbound",
            "--T",
            "100",
            "--beta",
            "0.9",
            "--alpha",
            "0.5",
        ],
        &[],
    );
    assert!(good.status.success(), "stderr: {}", stderr_of(&good));
    let text = stdout_of(&good);
    assert!(text.starts_with("T,beta,alpha,c,L,observed_gap,theoretical_floor,ratio\n"));
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("100,0.9,0.5,1,1,"));

    // No momentum: the gap misses the floor and the process says so.
    let bad = ftrlm(
        &["lowerbound", "--T", "100", "--beta", "0", "--alpha", "0"],
        &[],
    );
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr_of(&bad).contains("below the predicted floor"));

    // Construction parameters out of range: operational failure, not a
    // verdict.
    let invalid = ftrlm(
        &["lowerbound", "--T", "100", "--beta", "1.5", "--alpha", "0"],
        &[],
    );
    assert_eq!(invalid.status.code(), Some(1));

    let partial = ftrlm(&["lowerbound", "--T", "100"], &[]);
    assert_eq!(partial.status.code(), Some(1));
    assert!(stderr_of(&partial).contains("--beta"));
}

#[test]
fn slopes_reads_run_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "dataset = synth\nn = 60\nd = 8\nmargin = 0.3\nalgos = ftrlm\ngrid = 1\nepochs = 24\nseeds = 3\nscale = mean\n",
    );
    let csv_path = dir.path().join("run.csv");
    let run = ftrlm(
        &["run", "--config", &cfg, "--out", csv_path.to_str().unwrap()],
        &[],
    );
    assert!(run.status.success(), "stderr: {}", stderr_of(&run));

    let slopes = ftrlm(
        &[
            "slopes",
            "--csv",
            csv_path.to_str().unwrap(),
            "--window",
            "0.75",
        ],
        &[],
    );
    assert!(slopes.status.success(), "stderr: {}", stderr_of(&slopes));
    let text = stdout_of(&slopes);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "algo,schedule,slope");
    assert_eq!(lines.len(), 2);
    let slope: f64 = lines[1].rsplit(',').next().unwrap().parse().unwrap();
    assert!(
        slope < -0.2,
        "separable squared hinge should drop fast, slope = {slope}"
    );

    let missing = ftrlm(&["slopes", "--csv", "/definitely/not/here.csv"], &[]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn bad_configs_exit_one_with_context() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "dataset = synth\nepochs = banana\n");
    let out = ftrlm(&["run", "--config", &cfg], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("epochs"));

    let missing = ftrlm(&["run", "--config", "/nope/exp.cfg"], &[]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr_of(&missing).contains("/nope/exp.cfg"));
}
