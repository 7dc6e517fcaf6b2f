//! End-to-end runs of the `phwarm` binary on temporary files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn phwarm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phwarm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = phwarm(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Report rows keyed by header name.
fn report(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| header.iter().map(|h| h.to_string()).zip(l.split(',').map(str::to_owned)).collect())
        .collect()
}

#[test]
fn two_point_cloud() {
    let dir = TempDir::new().unwrap();
    let input = path(&dir, "two.txt");
    fs::write(&input, "0,0\n3,4\n").unwrap();
    let bars = ok(&["compute", s(&input), "--complex", "rips", "--max-dim", "1"]);
    assert_eq!(bars, "0 0 5 1 2\n0 0 inf 0 -\n");
}

#[test]
fn synthetic_image_has_one_component() {
    let dir = TempDir::new().unwrap();
    let img = path(&dir, "s2d.txt");
    ok(&["synth", "--kind", "s2d", "--n", "32", "--sigma", "0.01", "--seed", "4", "--out", s(&img)]);
    for complex in ["freudenthal", "cubical"] {
        let bars = ok(&["compute", s(&img), "--complex", complex]);
        let essential_h0 = bars.lines().filter(|l| l.starts_with("0 ") && l.contains(" inf ")).count();
        assert_eq!(essential_h0, 1, "{complex}");
    }
}

#[test]
fn enclosing_flag_matches_explicit_radius() {
    let dir = TempDir::new().unwrap();
    let pts = path(&dir, "pts.txt");
    ok(&["synth", "--kind", "circle", "--n", "25", "--sigma", "0.05", "--seed", "2", "--out", s(&pts)]);
    let points = phwarm::formats::parse_points(&fs::read_to_string(&pts).unwrap()).unwrap();
    let dist = phwarm::filtration::DistanceMatrix::from_points(&points).unwrap();
    let r = format!("{:?}", phwarm::filtration::enclosing_radius(&dist).unwrap());
    let enc = ok(&["compute", s(&pts), "--complex", "rips", "--rmax", "enc"]);
    let explicit = ok(&["compute", s(&pts), "--complex", "rips", "--rmax", &r]);
    assert_eq!(enc, explicit);
}

#[test]
fn identical_update_is_free() {
    let dir = TempDir::new().unwrap();
    let img = path(&dir, "a.txt");
    let state = path(&dir, "state.bin");
    let rep = path(&dir, "report.csv");
    ok(&["synth", "--kind", "s2d", "--n", "12", "--sigma", "0.1", "--out", s(&img)]);
    let first = ok(&["compute", s(&img), "--complex", "freudenthal", "--basis", "--state", s(&state)]);
    let again = ok(&["update", s(&img), "--state", s(&state), "--report", s(&rep)]);
    assert_eq!(first, again);
    let row = &report(&fs::read_to_string(&rep).unwrap())[0];
    assert_eq!(row["d_k"], "0.0");
    assert_eq!((row["inserted"].as_str(), row["deleted"].as_str()), ("0", "0"));
    assert_eq!(row["total"], "0");
}

#[test]
fn image_update_matches_compute() {
    let dir = TempDir::new().unwrap();
    let (base, noisy) = (path(&dir, "base.txt"), path(&dir, "noisy.txt"));
    ok(&["synth", "--kind", "s2d", "--n", "24", "--out", s(&base)]);
    ok(&["synth", "--kind", "s2d", "--n", "24", "--sigma", "0.01", "--seed", "9", "--out", s(&noisy)]);
    for (mode, extra) in [("homology", None), ("cohomology", Some("--clearing"))] {
        for format in ["binary", "text"] {
            let state = path(&dir, &format!("{mode}.{format}"));
            let mut args = vec!["compute", s(&base), "--complex", "freudenthal", "--basis", "--mode", mode];
            args.extend(["--state", s(&state), "--state-format", format]);
            args.extend(extra);
            ok(&args);
            let updated = ok(&["update", s(&noisy), "--state", s(&state), "--report", s(&path(&dir, "r.csv"))]);
            let mut fresh = vec!["compute", s(&noisy), "--complex", "freudenthal", "--mode", mode];
            fresh.extend(extra);
            assert_eq!(updated, ok(&fresh), "{mode} {format}");
            let saved = fs::read(&state).unwrap();
            assert_eq!(saved.starts_with(b"PHWS"), format == "binary");
        }
    }
}

#[test]
fn rips_update_crossing_the_threshold() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.txt"), path(&dir, "b.txt"));
    ok(&["synth", "--kind", "eight", "--n", "30", "--sigma", "0.001", "--seed", "1", "--out", s(&a)]);
    let moved: String = fs::read_to_string(&a)
        .unwrap()
        .lines()
        .enumerate()
        .map(|(i, l)| {
            let xy: Vec<f64> = l.split(',').map(|t| t.parse().unwrap()).collect();
            let k = 1.0 + 0.1 * ((i * 7 % 5) as f64 - 2.0);
            format!("{:?},{:?}\n", xy[0] * k, xy[1])
        })
        .collect();
    fs::write(&b, moved).unwrap();
    let state = path(&dir, "s.bin");
    let rep = path(&dir, "r.csv");
    ok(&["compute", s(&a), "--complex", "rips", "--rmax", "0.6", "--basis", "--mode", "cohomology", "--state", s(&state)]);
    let updated = ok(&["update", s(&b), "--state", s(&state), "--report", s(&rep)]);
    let row = &report(&fs::read_to_string(&rep).unwrap())[0];
    assert!(row["add_fraction"].parse::<f64>().unwrap() > 0.0);
    assert!(row["del_fraction"].parse::<f64>().unwrap() > 0.0);
    let fresh = ok(&["compute", s(&b), "--complex", "rips", "--rmax", "0.6", "--mode", "cohomology"]);
    assert_eq!(updated, fresh);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.txt");
    fs::write(&bad, "0,0\n1,oops\n").unwrap();
    let out = phwarm(&["compute", s(&bad), "--complex", "rips"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2, column 3"));

    assert_eq!(phwarm(&["compute", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(phwarm(&["compute", s(&bad), "--complex", "rips", "--field", "4"]).status.code(), Some(1));
    assert_eq!(phwarm(&["--help"]).status.code(), Some(0));

    let good = path(&dir, "good.txt");
    let state = path(&dir, "state.bin");
    fs::write(&good, "0,0\n1,0\n").unwrap();
    ok(&["compute", s(&good), "--complex", "rips", "--state", s(&state)]);
    // a state without a basis cannot be updated
    assert_eq!(phwarm(&["update", s(&good), "--state", s(&state)]).status.code(), Some(1));
    fs::write(&state, b"PHWS\x01\x00\x00\x00garbage").unwrap();
    assert_eq!(phwarm(&["update", s(&good), "--state", s(&state)]).status.code(), Some(2));
}

#[test]
fn key_space_mismatch_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let (small, large, state) = (path(&dir, "s.txt"), path(&dir, "l.txt"), path(&dir, "st.bin"));
    ok(&["synth", "--kind", "s2d", "--n", "6", "--out", s(&small)]);
    ok(&["synth", "--kind", "s2d", "--n", "7", "--out", s(&large)]);
    ok(&["compute", s(&small), "--complex", "cubical", "--basis", "--state", s(&state)]);
    assert_eq!(phwarm(&["update", s(&large), "--state", s(&state)]).status.code(), Some(1));
}

#[test]
fn outputs_are_deterministic() {
    let synth = ["synth", "--kind", "sphere2", "--n", "40", "--sigma", "0.01", "--seed", "5"];
    assert_eq!(ok(&synth), ok(&synth));
    let strip = |csv: String| -> Vec<String> {
        // drop the two wall-clock columns
        csv.lines().map(|l| l.rsplitn(3, ',').nth(2).unwrap().to_owned()).collect()
    };
    let bench = |jobs: &str| strip(ok(&["bench", "--suite", "rips", "--trials", "4", "--n", "16", "--seed", "3", "--jobs", jobs]));
    let serial = bench("1");
    assert_eq!(serial.len(), 5);
    assert_eq!(serial, bench("3"));
}

#[test]
fn optimize_writes_trajectories() {
    let dir = TempDir::new().unwrap();
    let zero = path(&dir, "zero");
    ok(&["optimize", "--n", "12", "--steps", "0", "--seed", "2", "--out-dir", s(&zero)]);
    assert_eq!(
        fs::read_to_string(zero.join("initial.txt")).unwrap(),
        fs::read_to_string(zero.join("final.txt")).unwrap()
    );
    let losses = |update: &str| -> Vec<String> {
        let out = path(&dir, update);
        ok(&["optimize", "--n", "15", "--steps", "20", "--seed", "2", "--update", update, "--out-dir", s(&out)]);
        let text = fs::read_to_string(out.join("loss.csv")).unwrap();
        text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().to_owned()).collect()
    };
    let warm = losses("warm");
    assert_eq!(warm.len(), 21);
    assert_eq!(warm, losses("scratch"));
}
