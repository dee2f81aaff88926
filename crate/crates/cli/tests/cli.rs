use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reconstruct"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn sphere_xyz(n: usize, sigma: f64, seed: u64) -> String {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for _ in 0..n {
        let dir = loop {
            let v = [gaussian(&mut rng), gaussian(&mut rng), gaussian(&mut rng)];
            let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if len > 1e-9 {
                break [v[0] / len, v[1] / len, v[2] / len];
            }
        };
        out.push_str(&format!(
            "{} {} {}\n",
            dir[0] + sigma * gaussian(&mut rng),
            dir[1] + sigma * gaussian(&mut rng),
            dir[2] + sigma * gaussian(&mut rng)
        ));
    }
    out
}

#[test]
fn reconstructs_a_sphere_and_exports_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sphere.xyz");
    fs::write(&input, sphere_xyz(400, 0.005, 11)).unwrap();
    let out = dir.path().join("run");

    let res = run(&[
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--export-pd",
    ]);
    assert!(
        res.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&res.stderr)
    );
    assert!(out.join("component_1.obj").is_file());
    assert!(out.join("diagram.csv").is_file());
    assert!(out.join("report.json").is_file());
    assert!(!out.join("component_2.obj").exists());

    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("1 component(s)"), "stdout: {}", stdout);

    let csv = fs::read_to_string(out.join("diagram.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("dim,birth,death,pos_simplex,neg_simplex,significant")
    );
    assert!(csv.lines().skip(1).any(|l| l.ends_with(",true")));

    let report = fs::read_to_string(out.join("report.json")).unwrap();
    assert!(report.contains("\"rms_history\""));
    assert!(report.contains("\"topology_seconds\""));
}

#[test]
fn identical_runs_export_identical_mesh_and_diagram_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sphere.xyz");
    fs::write(&input, sphere_xyz(300, 0.01, 4)).unwrap();

    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let res = run(&[
            input.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--export-pd",
            "--seed",
            "9",
        ]);
        assert!(
            res.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&res.stderr)
        );
    }
    let bytes = |dir: &Path, name: &str| fs::read(dir.join(name)).unwrap();
    assert_eq!(bytes(&out_a, "component_1.obj"), bytes(&out_b, "component_1.obj"));
    assert_eq!(bytes(&out_a, "diagram.csv"), bytes(&out_b, "diagram.csv"));
}

#[test]
fn degenerate_input_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("line.xyz");
    fs::write(&input, "0 0 0\n1 0 0\n2 0 0\n").unwrap();
    let res = run(&[input.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("degenerate"));
}

#[test]
fn io_failures_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.xyz");
    let res = run(&[missing.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));

    let bad = dir.path().join("bad.xyz");
    fs::write(&bad, "0 0 zero\n").unwrap();
    let res = run(&[bad.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 1"));
}

#[test]
fn out_of_range_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pts.xyz");
    fs::write(&input, "0 0 0\n").unwrap();
    for args in [
        ["--ratio", "1.5"],
        ["--ratio", "0"],
        ["--eps", "-1"],
        ["--max-iters", "0"],
    ] {
        let res = run(&[input.to_str().unwrap(), args[0], args[1]]);
        assert_eq!(res.status.code(), Some(2), "args: {:?}", args);
    }
}
