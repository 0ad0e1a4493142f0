use std::fs;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_noisy-parity"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn noisy-parity")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const EXPERIMENT: &[&str] = &[
    "experiment",
    "--learner",
    "quantum_majority",
    "--n",
    "24",
    "--noise",
    "depolarizing",
    "--eta",
    "0.2",
    "--trials",
    "12",
    "--seed",
    "2024",
];

#[test]
fn experiment_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let mut args = EXPERIMENT.to_vec();
        args.extend(["--out", path.to_str().unwrap()]);
        let o = run(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (a, b) = (fs::read(a).unwrap(), fs::read(b).unwrap());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "trial_index,n,noise_model,eta,learner,queries_used,retained,success,wall_time_ms,seed"
    );
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 12);
    for (i, row) in rows.iter().enumerate() {
        let cols: Vec<_> = row.split(',').collect();
        assert_eq!(cols.len(), 10);
        assert_eq!(cols[0], i.to_string());
        assert_eq!(cols[2], "depolarizing");
        assert_eq!(cols[4], "quantum_majority");
        assert_eq!(cols[8], "0");
        assert_eq!(cols[9], "2024");
    }
}

#[test]
fn different_seeds_differ() {
    let mut args = EXPERIMENT.to_vec();
    let a = stdout(&run(&args));
    *args.last_mut().unwrap() = "2025";
    let b = stdout(&run(&args));
    assert_ne!(a, b);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "learner = \"noiseless_classical\"\nn = 12\ntrials = 5\nseed = 7\nrounds = 1\n",
    )
    .unwrap();
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "experiment",
        "--trials",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 4);
    for row in text.lines().skip(1) {
        let cols: Vec<_> = row.split(',').collect();
        assert_eq!(cols[1], "12");
        assert_eq!(cols[5], "12");
        assert_eq!(cols[9], "7");
    }
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "n = 4\ncolour = \"red\"\n").unwrap();
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "verify",
        "--suite",
        "bounds",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_pairings_exit_two() {
    let o = run(&[
        "experiment",
        "--learner",
        "quantum_nonzero",
        "--n",
        "8",
        "--noise",
        "depolarizing",
        "--eta",
        "0.1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let o = run(&[
        "experiment",
        "--learner",
        "quantum_majority",
        "--n",
        "8",
        "--trials",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "learn",
        "--learner",
        "lpn_bkw",
        "--n",
        "8",
        "--noise",
        "classification",
        "--eta",
        "0.7",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["learn", "--n", "8"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_suites_pass() {
    for suite in ["bounds", "solvers"] {
        let o = run(&["verify", "--suite", suite]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).contains("0 failed"));
    }
}

#[test]
fn sample_emits_requested_rows() {
    let o = run(&[
        "sample",
        "--kind",
        "quantum",
        "--concept",
        "1011",
        "--count",
        "50",
        "--seed",
        "1",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m_or_x,b_or_y"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 50);
    // Noiseless quantum outcomes are (0000, 0) or (1011, 1).
    assert!(rows.iter().all(|r| *r == "0000,0" || *r == "1011,1"));

    let o = run(&[
        "sample",
        "--kind",
        "classical",
        "--concept",
        "1011",
        "--count",
        "50",
        "--seed",
        "1",
    ]);
    for row in stdout(&o).lines().skip(1) {
        let (x, y) = row.split_once(',').unwrap();
        let parity = x
            .chars()
            .zip("1011".chars())
            .filter(|&(a, b)| a == '1' && b == '1')
            .count()
            % 2;
        assert_eq!(y, parity.to_string());
    }
}

#[test]
fn learn_reports_estimate() {
    let o = run(&[
        "learn",
        "--learner",
        "lpn_bruteforce",
        "--n",
        "10",
        "--noise",
        "classification",
        "--eta",
        "0.1",
        "--lpn-examples",
        "300",
        "--seed",
        "5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let concept = text
        .lines()
        .find_map(|l| l.strip_prefix("concept="))
        .unwrap();
    let a_hat = text.lines().find_map(|l| l.strip_prefix("a_hat=")).unwrap();
    assert_eq!(concept, a_hat);
    assert!(text.contains("queries_used=300"));
}

#[test]
fn separation_small() {
    let o = run(&[
        "separation",
        "--n-list",
        "16,32",
        "--trials",
        "2",
        "--lpn-n-list",
        "8",
        "--lpn-trials",
        "2",
        "--bkw-budget",
        "262144",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().next().unwrap().starts_with("n,learner,"));
}
