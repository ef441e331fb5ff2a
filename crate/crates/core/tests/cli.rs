use std::path::Path;
use std::process::Command;

use shearlet_transport::cli::Table;
use shearlet_transport::geometry::mesh_io::read_mesh;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shearlet-transport"))
}

fn run(args: &[&str]) -> (i32, Vec<u8>) {
    let out = bin().args(args).output().expect("spawn");
    (out.status.code().unwrap_or(-1), out.stdout)
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["solve", "--problem", "boundary", "--max-cycles", "2"]).0, 0);
    assert_eq!(run(&["solve", "--theta", "1.5"]).0, 2);
    assert_eq!(run(&["solve", "--problem", "nowhere"]).0, 2);
    assert_eq!(run(&["solve", "--unknown-flag"]).0, 2);
    // the target error is out of reach in two cycles
    assert_eq!(run(&["solve", "--eps", "1e-9", "--max-cycles", "2"]).0, 3);
}

#[test]
fn config_file_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "problem=boundary\n\nK=0\n").unwrap();
    let out = bin().args(["solve", "--config", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    // a flag overrides the bad value
    let out = bin().args(["solve", "--config", path.to_str().unwrap(), "--K", "2", "--max-cycles", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn solve_outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("solve.csv");
    let mesh = dir.path().join("mesh.jsonl");
    let (code, _) = run(&[
        "solve",
        "--problem",
        "curve",
        "--max-cycles",
        "3",
        "--csv",
        csv.to_str().unwrap(),
        "--mesh-dump",
        mesh.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let t = Table::read(std::fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(t.header, ["n", "delta", "error", "rate"]);
    assert_eq!(t.rows.len(), 3);
    assert!(t.rows[0][3].is_nan());
    let expect = (t.rows[0][2] / t.rows[1][2]).log2() / (t.rows[1][0] / t.rows[0][0]).log2();
    assert!((t.rows[1][3] - expect).abs() < 1e-4 * expect.abs().max(1.0));
    let recs = read_mesh(std::io::BufReader::new(std::fs::File::open(&mesh).unwrap())).unwrap();
    let area: f64 = recs.iter().map(|r| shearlet_transport::geometry::polygon::area(&r.vertices.iter().map(|v| shearlet_transport::geometry::Point2::new(v[0], v[1])).collect::<Vec<_>>())).sum();
    assert!((area - 1.0).abs() < 1e-12);
}

fn same_bytes(args: &[&str], dir: &Path) {
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for p in [&a, &b] {
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--csv", p.to_str().unwrap()]);
        assert_eq!(run(&full).0, 0, "{args:?}");
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{args:?}");
}

#[test]
fn small_runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    same_bytes(&["solve", "--problem", "boundary", "--max-cycles", "4"], dir.path());
    same_bytes(&["delta", "--problem", "curve", "--max-cycles", "3", "--mode", "iso"], dir.path());
    same_bytes(&["cartoon-bench", "--j-min", "6", "--j-max", "7"], dir.path());
    same_bytes(&["bisect-bench", "--j-min", "6", "--j-max", "8"], dir.path());
    same_bytes(&["parametric", "--L", "2"], dir.path());
}
