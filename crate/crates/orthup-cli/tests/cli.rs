//! End-to-end tests of the command-line interface: each test drives the
//! compiled binary through temporary files and checks stdout, stderr,
//! exit codes, and written outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use orthup::{
    read_matrix, read_report, write_matrix, write_update_stream, Matrix, OrthonormalFactor,
    OutcomeKind, RankOneUpdate, Vector,
};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orthup"))
        .args(args)
        .output()
        .expect("the binary launches")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("the binary exits normally")
}

/// Writes the 2×1 factors U = e₁, W = [1], returning their paths.
fn write_hand_factors(dir: &Path) -> (PathBuf, PathBuf) {
    let u_path = dir.join("u.txt");
    let w_path = dir.join("w.txt");
    let u = Matrix::from_vec(2, 1, vec![1.0, 0.0]).expect("2x1 shape");
    write_matrix(&u_path, &u).expect("writing U succeeds");
    write_matrix(&w_path, &Matrix::identity(1)).expect("writing W succeeds");
    (u_path, w_path)
}

/// Writes an update stream with the given records.
fn write_stream(dir: &Path, name: &str, n: usize, p: usize, records: &[(&[f64], &[f64])]) -> PathBuf {
    let path = dir.join(name);
    let updates: Vec<RankOneUpdate> = records
        .iter()
        .map(|(a, b)| RankOneUpdate {
            a: Vector::from_vec(a.to_vec()).expect("nonempty a"),
            b: Vector::from_vec(b.to_vec()).expect("nonempty b"),
        })
        .collect();
    write_update_stream(&path, n, p, &updates).expect("writing the stream succeeds");
    path
}

#[test]
fn update_applies_the_hand_case() {
    let dir = TempDir::new().expect("temp dir");
    let (u, w) = write_hand_factors(dir.path());
    let ab = write_stream(dir.path(), "ab.txt", 2, 1, &[(&[0.0, 1.0], &[1.0])]);
    let out_u = dir.path().join("u_new.txt");
    let out_w = dir.path().join("w_new.txt");
    let out = run(&[
        "update",
        "--u",
        u.to_str().unwrap(),
        "--w",
        w.to_str().unwrap(),
        "--ab",
        ab.to_str().unwrap(),
        "--out-u",
        out_u.to_str().unwrap(),
        "--out-w",
        out_w.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));
    let stdout = stdout_of(&out);
    let distance: f64 = stdout
        .lines()
        .find_map(|line| line.strip_prefix("distance_rad="))
        .expect("a distance_rad line is printed")
        .parse()
        .expect("the distance parses");
    assert!(
        (distance - std::f64::consts::FRAC_PI_4).abs() <= 1e-15,
        "expected the quarter-turn distance, got: {stdout}"
    );
    assert!(
        stdout.contains("kind=Generic"),
        "expected a generic outcome, got: {stdout}"
    );
    let u_new = read_matrix(&out_u).expect("updated U was written");
    let s = 0.5f64.sqrt();
    assert!(
        (u_new.at(0, 0) - s).abs() <= 1e-12 && (u_new.at(1, 0) - s).abs() <= 1e-12,
        "expected U_new = (1/sqrt(2), 1/sqrt(2)), got ({}, {})",
        u_new.at(0, 0),
        u_new.at(1, 0)
    );
    let w_new = read_matrix(&out_w).expect("updated W was written");
    assert!(
        (w_new.at(0, 0) - 2.0f64.sqrt()).abs() <= 1e-12,
        "expected W_new = sqrt(2), got {}",
        w_new.at(0, 0)
    );
}

#[test]
fn update_with_zero_b_is_a_no_op() {
    let dir = TempDir::new().expect("temp dir");
    let (u, w) = write_hand_factors(dir.path());
    let ab = write_stream(dir.path(), "ab.txt", 2, 1, &[(&[0.0, 1.0], &[0.0])]);
    let out_u = dir.path().join("u_new.txt");
    let out_w = dir.path().join("w_new.txt");
    let out = run(&[
        "update",
        "--u",
        u.to_str().unwrap(),
        "--w",
        w.to_str().unwrap(),
        "--ab",
        ab.to_str().unwrap(),
        "--out-u",
        out_u.to_str().unwrap(),
        "--out-w",
        out_w.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));
    let stdout = stdout_of(&out);
    assert!(
        stdout.lines().any(|line| line == "distance_rad=0"),
        "expected zero distance, got: {stdout}"
    );
    assert!(
        stdout.contains("kind=NoOp"),
        "expected a no-op outcome, got: {stdout}"
    );
}

#[test]
fn update_rejects_a_deflating_update() {
    let dir = TempDir::new().expect("temp dir");
    let (u, w) = write_hand_factors(dir.path());
    let ab = write_stream(dir.path(), "ab.txt", 2, 1, &[(&[1.0, 0.0], &[-1.0])]);
    let out = run(&[
        "update",
        "--u",
        u.to_str().unwrap(),
        "--w",
        w.to_str().unwrap(),
        "--ab",
        ab.to_str().unwrap(),
        "--out-u",
        dir.path().join("u_new.txt").to_str().unwrap(),
        "--out-w",
        dir.path().join("w_new.txt").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1, "a rank-dropping update is a domain error");
    assert!(
        stderr_of(&out).contains("error: deflating update"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn update_rejects_multiple_records() {
    let dir = TempDir::new().expect("temp dir");
    let (u, w) = write_hand_factors(dir.path());
    let ab = write_stream(
        dir.path(),
        "ab.txt",
        2,
        1,
        &[(&[0.0, 1.0], &[1.0]), (&[1.0, 1.0], &[0.5])],
    );
    let out = run(&[
        "update",
        "--u",
        u.to_str().unwrap(),
        "--w",
        w.to_str().unwrap(),
        "--ab",
        ab.to_str().unwrap(),
        "--out-u",
        dir.path().join("u_new.txt").to_str().unwrap(),
        "--out-w",
        dir.path().join("w_new.txt").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2, "a multi-record stream is a usage error");
    assert!(
        stderr_of(&out).contains("expected exactly one update record"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn update_with_a_missing_input_exits_two() {
    let dir = TempDir::new().expect("temp dir");
    let (u, w) = write_hand_factors(dir.path());
    let out = run(&[
        "update",
        "--u",
        u.to_str().unwrap(),
        "--w",
        w.to_str().unwrap(),
        "--ab",
        dir.path().join("missing.txt").to_str().unwrap(),
        "--out-u",
        dir.path().join("u_new.txt").to_str().unwrap(),
        "--out-w",
        dir.path().join("w_new.txt").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2, "a missing file is not a domain error");
    assert!(
        stderr_of(&out).starts_with("error:"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn dist_prints_the_hand_distance() {
    let dir = TempDir::new().expect("temp dir");
    let s = 0.5f64.sqrt();
    let u_path = dir.path().join("u.txt");
    let v_path = dir.path().join("v.txt");
    write_matrix(&u_path, &Matrix::from_vec(2, 1, vec![1.0, 0.0]).unwrap()).unwrap();
    write_matrix(&v_path, &Matrix::from_vec(2, 1, vec![s, s]).unwrap()).unwrap();
    let out = run(&["dist", "--u", u_path.to_str().unwrap(), "--v", v_path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));
    assert_eq!(
        stdout_of(&out).trim(),
        "0.7853981633974483",
        "one-column spans at 45 degrees sit a quarter turn apart"
    );
}

#[test]
fn dist_with_angles_prints_them_ascending() {
    let dir = TempDir::new().expect("temp dir");
    let s = 0.5f64.sqrt();
    let u_path = dir.path().join("u.txt");
    let v_path = dir.path().join("v.txt");
    let u = Matrix::from_vec(3, 2, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
    let v = Matrix::from_vec(3, 2, vec![1.0, 0.0, 0.0, 0.0, s, s]).unwrap();
    write_matrix(&u_path, &u).unwrap();
    write_matrix(&v_path, &v).unwrap();
    let out = run(&[
        "dist",
        "--u",
        u_path.to_str().unwrap(),
        "--v",
        v_path.to_str().unwrap(),
        "--angles",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));
    let stdout = stdout_of(&out);
    let values: Vec<f64> = stdout
        .lines()
        .map(|line| line.parse().expect("every output line is a number"))
        .collect();
    assert_eq!(values.len(), 3, "distance plus one angle per column: {stdout}");
    let quarter = std::f64::consts::FRAC_PI_4;
    assert!(
        (values[0] - quarter).abs() <= 1e-12,
        "distance {} should equal pi/4",
        values[0]
    );
    assert!(
        values[1] <= values[2],
        "angles must print ascending, got {} then {}",
        values[1],
        values[2]
    );
    assert!(values[1] <= 1e-7, "shared direction has angle {}", values[1]);
    assert!(
        (values[2] - quarter).abs() <= 1e-12,
        "rotated direction has angle {}, expected pi/4",
        values[2]
    );
}

#[test]
fn dist_rejects_mismatched_shapes() {
    let dir = TempDir::new().expect("temp dir");
    let u_path = dir.path().join("u.txt");
    let v_path = dir.path().join("v.txt");
    let u = Matrix::from_vec(3, 2, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
    let v = Matrix::from_vec(3, 1, vec![1.0, 0.0, 0.0]).unwrap();
    write_matrix(&u_path, &u).unwrap();
    write_matrix(&v_path, &v).unwrap();
    let out = run(&["dist", "--u", u_path.to_str().unwrap(), "--v", v_path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2, "mismatched widths are a usage error");
    assert!(
        stderr_of(&out).starts_with("error:"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn track_writes_one_row_per_update() {
    let dir = TempDir::new().expect("temp dir");
    let (u, w) = write_hand_factors(dir.path());
    let stream = write_stream(
        dir.path(),
        "stream.txt",
        2,
        1,
        &[
            (&[0.0, 1.0], &[1.0]),
            (&[0.3, -0.2], &[0.5]),
            (&[-1.0, 2.0], &[2.0]),
        ],
    );
    let report = dir.path().join("report.csv");
    let out_u = dir.path().join("u_final.txt");
    let out_w = dir.path().join("w_final.txt");
    let out = run(&[
        "track",
        "--u",
        u.to_str().unwrap(),
        "--w",
        w.to_str().unwrap(),
        "--stream",
        stream.to_str().unwrap(),
        "--method",
        "geodesic",
        "--reorth-every",
        "2",
        "--report",
        report.to_str().unwrap(),
        "--out-u",
        out_u.to_str().unwrap(),
        "--out-w",
        out_w.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));
    assert!(
        stdout_of(&out).contains("tracked 3 updates"),
        "stdout: {}",
        stdout_of(&out)
    );
    let rows = read_report(&report).expect("the report parses back");
    assert_eq!(rows.len(), 3, "one report row per update");
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.step_index, i + 1, "steps are numbered from 1");
        assert_eq!(row.kind, OutcomeKind::Generic, "all three updates are generic");
        assert!(row.distance > 0.0, "a generic update moves the subspace");
    }
    let u_final = read_matrix(&out_u).expect("final U was written");
    assert!(
        OrthonormalFactor::new(u_final).is_ok(),
        "the final basis is orthonormal"
    );
    assert!(read_matrix(&out_w).is_ok(), "final W was written");
}

#[test]
fn track_reports_the_failing_step() {
    let dir = TempDir::new().expect("temp dir");
    let (u, w) = write_hand_factors(dir.path());
    let stream = write_stream(
        dir.path(),
        "stream.txt",
        2,
        1,
        &[(&[0.0, 1.0], &[1.0]), (&[1.0, 1.0], &[-1.0])],
    );
    let out = run(&[
        "track",
        "--u",
        u.to_str().unwrap(),
        "--w",
        w.to_str().unwrap(),
        "--stream",
        stream.to_str().unwrap(),
        "--report",
        dir.path().join("report.csv").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1, "a rank-dropping step is a domain error");
    let stderr = stderr_of(&out);
    assert!(
        stderr.contains("update 2") && stderr.contains("deflating update"),
        "stderr should name the failing step: {stderr}"
    );
}

#[test]
fn track_rejects_an_unknown_method() {
    let dir = TempDir::new().expect("temp dir");
    let (u, w) = write_hand_factors(dir.path());
    let stream = write_stream(dir.path(), "stream.txt", 2, 1, &[(&[0.0, 1.0], &[1.0])]);
    let out = run(&[
        "track",
        "--u",
        u.to_str().unwrap(),
        "--w",
        w.to_str().unwrap(),
        "--stream",
        stream.to_str().unwrap(),
        "--method",
        "sneaky",
        "--report",
        dir.path().join("report.csv").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2, "an unknown method is a usage error");
    assert!(
        stderr_of(&out).contains("unknown method"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn bench_prints_a_csv_grid() {
    let out = run(&[
        "bench", "--n", "60,120", "--p", "4", "--reps", "3", "--method", "geodesic", "--seed",
        "7",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));
    let stdout = stdout_of(&out);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 3, "header plus one row per shape: {stdout}");
    assert_eq!(lines[0], "n,p,method,median_ns,mean_ns");
    for (line, prefix) in lines[1..].iter().zip(["60,4,geodesic,", "120,4,geodesic,"]) {
        assert!(line.starts_with(prefix), "row {line:?} should start with {prefix:?}");
        let timings: Vec<u64> = line[prefix.len()..]
            .split(',')
            .map(|field| field.parse().expect("timings are integers"))
            .collect();
        assert_eq!(timings.len(), 2, "median and mean: {line}");
        assert!(timings.iter().all(|&t| t > 0), "timings are positive: {line}");
    }
}

#[test]
fn bench_rejects_zero_reps() {
    let out = run(&["bench", "--n", "60", "--p", "4", "--reps", "0"]);
    assert_eq!(exit_code(&out), 2, "zero repetitions is a usage error");
    assert!(
        stderr_of(&out).starts_with("error:"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn unknown_flags_are_rejected() {
    let out = run(&["dist", "--bogus", "x"]);
    assert_eq!(exit_code(&out), 2, "unknown flags are usage errors");
}
