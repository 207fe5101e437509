use std::path::PathBuf;
use std::process::{Command, Output};

use unfolder_cli::report::RunReport;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn unfolder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unfolder")).args(args).env_remove("UNFOLDER_EPS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_report(path: &std::path::Path) -> RunReport {
    RunReport::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn info_counts() {
    let o = unfolder(&["info", "--mesh", &fixture("tetrahedron.off")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("V=4 E=6 F=4\n"));
    assert_eq!(stdout(&o).matches("total angle").count(), 4);

    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("info.json");
    let o = unfolder(&["info", "--mesh", &fixture("cube.obj"), "--out-json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = read_report(&json);
    assert_eq!((r.num_vertices, r.num_edges, r.num_faces), (Some(8), Some(12), Some(6)));
    assert!(r.gauss_bonnet_residual.unwrap() < 1e-12);
}

#[test]
fn non_convex_mesh_is_a_validation_error() {
    let o = unfolder(&["info", "--mesh", &fixture("dented.off")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not convex"));
}

#[test]
fn missing_file_is_an_io_error() {
    let o = unfolder(&["info", "--mesh", "/nonexistent/mesh.off"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn unfold_cube_writes_a_simple_net() {
    let dir = tempfile::tempdir().unwrap();
    let (svg, json) = (dir.path().join("net.svg"), dir.path().join("net.json"));
    let o = unfolder(&[
        "unfold",
        "--mesh",
        &fixture("cube.off"),
        "--u",
        "0.3,0.2,1",
        "--tree",
        "downhill",
        "--out-svg",
        svg.to_str().unwrap(),
        "--out-json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_report(&json);
    assert!(r.simplicity.unwrap().simple);
    assert_eq!(r.input_digest.as_ref().map(|d| d.len()), Some(64));
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 6);
}

#[test]
fn unfold_flags_the_overlapping_tree() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = unfolder(&[
        "unfold",
        "--mesh",
        &fixture("squat_truncated_tetrahedron.off"),
        "--tree",
        &fixture("overlapping_tree.txt"),
        "--out-json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("overlaps"));
    let s = read_report(&json).simplicity.unwrap();
    assert!(!s.simple && s.first_violation.is_some());
}

#[test]
fn bad_tree_file_is_a_validation_error() {
    let o = unfolder(&["unfold", "--mesh", &fixture("cube.off"), "--u", "0.3,0.2,1", "--tree", &fixture("short_tree.txt")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid cut tree"));
}

#[test]
fn axis_aligned_cube_is_not_in_general_position() {
    let o = unfolder(&["unfold", "--mesh", &fixture("cube.off")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stretch_makes_the_overlapping_tree_simple() {
    let dir = tempfile::tempdir().unwrap();
    let (svg, json) = (dir.path().join("s.svg"), dir.path().join("s.json"));
    let o = unfolder(&[
        "stretch",
        "--mesh",
        &fixture("squat_truncated_tetrahedron.off"),
        "--tree",
        &fixture("overlapping_tree.txt"),
        "--certify",
        "--out-svg",
        svg.to_str().unwrap(),
        "--out-json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = read_report(&json);
    let s = r.stretch.unwrap();
    assert!(s.simple && s.lambda.value() > 1.0 && s.c1_certified && s.c2_certified);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<path"));
}

#[test]
fn stretch_of_a_simple_unfolding_stays_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("s.json");
    let o = unfolder(&["stretch", "--mesh", &fixture("tetrahedron.off"), "--out-json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_report(&json).stretch.unwrap().lambda.value(), 1.0);
}

#[test]
fn stretch_cap_hit_exits_three() {
    let args = [
        "stretch",
        "--mesh",
        &fixture("squat_truncated_tetrahedron.off"),
        "--tree",
        &fixture("overlapping_tree.txt"),
        "--lambda-cap",
        "0",
    ];
    let a = unfolder(&args);
    let b = unfolder(&args);
    assert_eq!(a.status.code(), Some(3));
    assert_eq!(b.status.code(), Some(3));
}

#[test]
fn sweep_counts() {
    let o = unfolder(&["sweep", "--mesh", &fixture("cube.off")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "384 trees: 384 simple, 0 overlapping\n");
    let o = unfolder(&["sweep", "--mesh", &fixture("tetrahedron.off")]);
    assert_eq!(stdout(&o), "16 trees: 16 simple, 0 overlapping\n");
    let o = unfolder(&["sweep", "--mesh", &fixture("cube.off"), "--limit", "7"]);
    assert_eq!(stdout(&o), "7 trees (truncated): 7 simple, 0 overlapping\n");
}

#[test]
fn verify_default_corpus_passes() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("v.json");
    let o = unfolder(&["verify", "--seed", "3", "--trials", "10", "--out-json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r = read_report(&json);
    assert_eq!(r.suites.len(), 9);
    assert!(r.suites.iter().all(|s| s.passed()));
    assert_eq!(r.seed, Some(3));
}

#[test]
fn verify_with_zero_trials_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("v.json");
    let o = unfolder(&["verify", "--trials", "0", "--out-json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(read_report(&json).suites.is_empty());
}

#[test]
fn verify_on_a_mesh() {
    let o = unfolder(&["verify", "--mesh", &fixture("cube.off"), "--trials", "4", "--seed", "9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("[PASS]").count(), 9);
}

#[test]
fn reports_reproduce_apart_from_timings() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let json = dir.path().join(name);
        let o = unfolder(&["verify", "--mesh", &fixture("cube.off"), "--trials", "3", "--seed", "5", "--out-json", json.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let mut r = read_report(&json);
        r.timings.clear();
        r
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn eps_override_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_unfolder"))
        .args(["info", "--mesh", &fixture("cube.off")])
        .env("UNFOLDER_EPS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_unfolder"))
        .args(["info", "--mesh", &fixture("cube.off")])
        .env("UNFOLDER_EPS", "1e-7")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}
