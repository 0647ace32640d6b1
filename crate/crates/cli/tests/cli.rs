use std::path::PathBuf;
use std::process::{Command, Output};

use num_rational::Rational64;
use ribbonzeta::io::write_graph;
use ribbonzeta::ribbon::theta_graph;
use ribbonzeta::MetricRibbonGraph;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ribbonzeta"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str, contents: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn theta_file(name: &str) -> PathBuf {
    let third = Rational64::new(1, 3);
    let g = MetricRibbonGraph::with_exact_lengths(theta_graph(true), vec![third; 3]).unwrap();
    tmp(name, &write_graph(&g))
}

fn data_rows(s: &str) -> Vec<&str> {
    s.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn delta_on_equilateral_theta() {
    let f = theta_file("theta_delta.rg");
    for method in ["spectral", "polynomial"] {
        let o = run(&["delta", f.to_str().unwrap(), "--method", method]);
        assert!(o.status.success());
        let out = stdout(&o);
        assert!(out.contains("2.07944154"), "{method}: {out}");
    }
}

#[test]
fn verify_passes() {
    let f = theta_file("theta_verify.rg");
    let o = run(&["verify", f.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn malformed_input_is_a_parse_error() {
    let f = tmp("broken.rg", "halfedges 3\ntwin: 0 1\n");
    let o = run(&["validate", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: parse:"));
    let o = run(&["validate", "/nonexistent/graph.rg"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: io:"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["delta"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn cells_lists_known_counts() {
    let o = run(&["cells", "0", "4"]);
    assert_eq!(data_rows(&stdout(&o)).len(), 6);
    let o = run(&["cells", "1", "2"]);
    assert_eq!(data_rows(&stdout(&o)).len(), 5);
}

#[test]
fn sampling_is_reproducible_and_thread_independent() {
    let args = ["sample", "0", "4", "1", "2", "2", "3", "300", "--seed", "17"];
    let a = bin().args(args).env("RIBBONZETA_THREADS", "1").output().unwrap();
    let b = bin().args(args).env("RIBBONZETA_THREADS", "4").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(data_rows(&stdout(&a)).len(), 300);
    let mut other = args.to_vec();
    other[8] = "18";
    assert_ne!(run(&other).stdout, a.stdout);
}

#[test]
fn wasserstein_between_sample_files() {
    let a = tmp("w_a.csv", "delta\n1.0\n2.0\n");
    let b = tmp("w_b.csv", "# comment\n1.5\n2.5\n");
    let o = run(&["wasserstein", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).lines().filter(|l| !l.starts_with('#')).next_back().unwrap().trim().parse().unwrap();
    assert!((v - 0.5).abs() < 1e-12);
}

#[test]
fn output_flag_writes_file() {
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cells_out.csv");
    let o = run(&["cells", "1", "1", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&out).unwrap().contains("cell_id"));
}
