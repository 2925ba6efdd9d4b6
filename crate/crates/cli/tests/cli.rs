use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn capradii(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capradii"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn two_blobs(dir: &Path) {
    let out = capradii(
        dir,
        &["gen", "blobs", "--centers", "0,0;10,0", "--sizes", "5,5", "--spread", "0.5", "--caps", "const:5", "--k", "2", "--seed", "4", "--out", "blobs.txt"],
    );
    assert_eq!(code(&out), 0, "{out:?}");
}

#[test]
fn solve_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    two_blobs(d);
    let out = capradii(d, &["solve-uniform", "--in", "blobs.txt", "--out", "u.txt", "--budget", "300"]);
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(stdout(&out).contains("best_cost: "));
    let out = capradii(d, &["check", "--solution", "u.txt", "--in", "blobs.txt"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("solution: valid"));

    for extra in [&["--base"][..], &["--alpha", "0.5"][..], &[][..]] {
        let mut args = vec!["solve", "--in", "blobs.txt", "--out", "n.txt", "--budget", "300", "--p", "2"];
        args.extend(extra);
        let out = capradii(d, &args);
        assert_eq!(code(&out), 0, "{out:?}");
        assert!(stdout(&out).contains("objective: 2"));
    }
}

#[test]
fn oracle_witness_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    two_blobs(d);
    let out = capradii(d, &["oracle", "--in", "blobs.txt", "--out", "opt.txt"]);
    assert_eq!(code(&out), 0);
    let opt: f64 = stdout(&out).lines().next().unwrap().strip_prefix("opt_cost: ").unwrap().parse().unwrap();
    let out = capradii(d, &["check", "--solution", "opt.txt", "--in", "blobs.txt"]);
    assert_eq!(code(&out), 0);
    let tight: f64 = stdout(&out)
        .lines()
        .find_map(|l| l.strip_prefix("tight_cost: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((tight - opt).abs() < 1e-9);

    let out = capradii(d, &["oracle", "--in", "blobs.txt", "--out", "x.txt", "--ceiling", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn check_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("line.txt"), "capradii-instance v1\n3 2 L1\n2 2 2\neuclidean 1\n0\n1\n5\n").unwrap();
    fs::write(d.join("ok.txt"), "capradii-solution v1\n0 1 2 0 1\n2 0 1 2\n").unwrap();
    assert_eq!(code(&capradii(d, &["check", "--solution", "ok.txt", "--in", "line.txt"])), 0);
    // Member 7 does not exist.
    fs::write(d.join("bad.txt"), "capradii-solution v1\n0 1 2 0 7\n2 0 1 2\n").unwrap();
    let out = capradii(d, &["check", "--solution", "bad.txt", "--in", "line.txt"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("out of range"));
    // An empty cluster is legal.
    fs::write(d.join("empty.txt"), "capradii-solution v1\n1 5 2 1 2\n0 0 1 0\n").unwrap();
    assert_eq!(code(&capradii(d, &["check", "--solution", "empty.txt", "--in", "line.txt"])), 0);
    fs::write(d.join("none.txt"), "capradii-solution v1\n0 5 2 0 1\n1 0 0\n").unwrap();
    let out = capradii(d, &["check", "--solution", "none.txt", "--in", "line.txt"]);
    assert_eq!(code(&out), 1);
    fs::write(d.join("garbled.txt"), "capradii-solution v1\n0 x\n").unwrap();
    let out = capradii(d, &["check", "--solution", "garbled.txt", "--in", "line.txt"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn gadget_and_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("k3.txt"), "3 3\n0 1\n1 2\n0 2\n").unwrap();
    assert_eq!(code(&capradii(d, &["gen", "vc", "--graph", "k3.txt", "--out", "g.txt"])), 0);
    let out = capradii(d, &["oracle", "--in", "g.txt", "--out", "o.txt"]);
    assert!(stdout(&out).starts_with("opt_cost: 3\n"));
    let count = capradii(d, &["profiles", "--in", "g.txt", "--eps", "0.5", "--count"]);
    let listed = capradii(d, &["profiles", "--in", "g.txt", "--eps", "0.5"]);
    let n: usize = stdout(&count).trim().parse().unwrap();
    assert_eq!(stdout(&listed).lines().count(), n);
}

#[test]
fn bench_exit_codes_and_stable_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("empty.cfg"), "# nothing yet\n").unwrap();
    let out = capradii(d, &["bench", "empty.cfg"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "instance,solver,eps,alpha,budget,seed,best_cost,oracle_cost,ratio,iterations,successes,wall_ms\n"
    );

    let cell = "id = blobs\nblobs = 0,0; 10,0\nsizes = 5,5\nspread = 0.5\ncaps = const:5\nk = 2\ngen_seed = 4\nsolver = uniform\nbudget = 300\noracle = true\n";
    fs::write(d.join("ok.cfg"), format!("{cell}bound = 3.3\n")).unwrap();
    let a = capradii(d, &["bench", "ok.cfg"]);
    let b = capradii(d, &["bench", "ok.cfg", "--out", "ok.csv"]);
    assert_eq!(code(&a), 0, "{a:?}");
    assert_eq!(code(&b), 0);
    assert_eq!(stdout(&a), fs::read_to_string(d.join("ok.csv")).unwrap());

    fs::write(d.join("tight.cfg"), format!("{cell}bound = 1.0\n")).unwrap();
    let out = capradii(d, &["bench", "tight.cfg"]);
    let row = stdout(&out).lines().nth(1).unwrap().to_string();
    let ratio: f64 = row.split(',').nth(8).unwrap().parse().unwrap();
    assert_eq!(code(&out), if ratio > 1.0 { 1 } else { 0 });

    fs::write(d.join("broken.cfg"), "id = a\n\nid = b\nbudget = lots\n").unwrap();
    let out = capradii(d, &["bench", "broken.cfg"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&capradii(dir.path(), &["solve"])), 2);
    assert_eq!(code(&capradii(dir.path(), &["frobnicate"])), 2);
    assert_eq!(code(&capradii(dir.path(), &["oracle", "--in", "missing.txt", "--out", "x"])), 2);
}
