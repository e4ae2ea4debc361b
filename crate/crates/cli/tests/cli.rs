use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_elimsolve"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn derive_fef_verify() {
    let o = run(&["derive", "fef", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("2 generators: degree 3, degree 5"));
    assert!(out.contains("verification passed"));
}

#[test]
fn derive_writes_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["derive", "--problem", "ef", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let written = std::fs::read_to_string(dir.path().join("ef.gens")).unwrap();
    let bundled = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/ef.gens")).unwrap();
    assert_eq!(written, bundled);
}

#[test]
fn unknown_problem_is_usage_error() {
    assert_eq!(run(&["derive", "xyz"]).status.code(), Some(2));
    assert_eq!(run(&["derive"]).status.code(), Some(2));
}

#[test]
fn resource_cap_exit_code() {
    let o = run(&["derive", "fef", "--max-pairs", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pairs_processed"));
}

#[test]
fn verify_subcommand() {
    let o = run(&["verify", "ef", "--instances", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("9 standard monomials"));
}

#[test]
fn template_matches_bundled() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ef.json");
    let o = run(&["template", "ef", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("template 6x15 (reference 6x15)"));
    assert!(out.contains("same as bundled: true"));
    // the written template drives the solver
    let o = run(&["solve", "ef", "-i", data("ef_7.csv").to_str().unwrap(), "--template", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

fn solutions(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("solution JSON")
}

#[test]
fn solve_bundled_scenes() {
    for p in ["fef", "ef", "efk", "hf"] {
        let scene: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(data(&format!("{p}_7.json"))).unwrap()).unwrap();
        let f_gt = scene["focal_right"].as_f64().unwrap();
        let o = run(&["solve", p, "-i", data(&format!("{p}_7.csv")).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{p}");
        let v = solutions(&o);
        assert_eq!(v["config"]["problem"], p);
        let sols = v["solutions"].as_array().unwrap();
        assert!(!sols.is_empty() && v["count"].as_u64() == Some(sols.len() as u64));
        assert!(sols.iter().all(|s| s["focal"].as_f64().unwrap() > 0.0));
        assert!(sols.iter().any(|s| (s["focal"].as_f64().unwrap() - f_gt).abs() <= 1e-6 * f_gt), "{p}");
    }
}

fn write_csv(dir: &Path, rows: &[&str]) -> PathBuf {
    let path = dir.join("in.csv");
    std::fs::write(&path, format!("x1,y1,x2,y2\n{}\n", rows.join("\n"))).unwrap();
    path
}

#[test]
fn solve_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("fef_7.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();

    let five = write_csv(dir.path(), &rows[..5]);
    assert_eq!(run(&["solve", "fef", "-i", five.to_str().unwrap()]).status.code(), Some(2));

    let dup = write_csv(dir.path(), &[rows[0], rows[1], rows[2], rows[3], rows[4], rows[4]]);
    assert_eq!(run(&["solve", "fef", "-i", dup.to_str().unwrap()]).status.code(), Some(5));

    let bad = write_csv(dir.path(), &["1,2,3", "4,5,6,7"]);
    assert_eq!(run(&["solve", "fef", "-i", bad.to_str().unwrap()]).status.code(), Some(6));

    let header = dir.path().join("header.csv");
    std::fs::write(&header, "a,b,c,d\n1,2,3,4\n").unwrap();
    assert_eq!(run(&["solve", "fef", "-i", header.to_str().unwrap()]).status.code(), Some(6));

    let missing = dir.path().join("missing.csv");
    assert_eq!(run(&["solve", "fef", "-i", missing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn solve_with_options_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sol.json");
    let o = run(&["solve", "--problem", "fef", "-i", data("fef_7.csv").to_str().unwrap(), "--polish", "--tol-imag", "1e-8", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["config"]["solve"]["polish"], true);
    assert_eq!(v["config"]["solve"]["imag_tol"], 1e-8);
    assert_eq!(run(&["solve", "fef", "-i", data("fef_7.csv").to_str().unwrap(), "--tol-imag", "-1"]).status.code(), Some(2));
}

#[test]
fn bench_summary_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["bench", "fef", "-n", "50", "--sigma", "0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("template 21x36 (reference 21x36)"), "{out}");
    assert!(out.contains("nonzeros"));
    assert!(out.contains("median"));
    let metrics = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    let mut lines = metrics.lines();
    assert_eq!(lines.next(), Some("problem,seed,sigma,n_solutions,log10_rel_f,log10_rel_lambda,failure"));
    let seeds: Vec<u64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(seeds, (0..50).collect::<Vec<_>>());
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["instances"], 50);
    assert!(summary["levels"][0]["log10_rel_f"]["median"].as_f64().unwrap() <= -6.0);
}

#[test]
fn bench_is_reproducible_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(&a, "1"), (&b, "3")] {
        let o = run(&["bench", "ef", "-n", "20", "--sigma", "0,0.5", "--threads", threads, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let read = |d: &tempfile::TempDir| std::fs::read_to_string(d.path().join("metrics.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn bench_efk_lambda_table() {
    let o = run(&["bench", "efk", "-n", "30", "--sigma", "0.5", "--lambda", "-0.3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("lambda estimates (ground truth -0.3)"), "{out}");
    assert!(out.contains("template 51x70 (reference 51x70)"));
}

#[test]
fn bench_usage_errors() {
    assert_eq!(run(&["bench", "fef", "-n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["bench", "fef", "-n", "5", "--sigma", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["bench", "fef", "-n", "5", "--focal", "-2"]).status.code(), Some(2));
}

#[test]
fn synth_writes_scene_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["synth", "hf", "--seed", "3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("hf_3.json").exists());
    let csv = std::fs::read_to_string(dir.path().join("hf_3.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    let o = run(&["synth", "fef", "--seed", "3"]);
    assert_eq!(stdout(&o).lines().count(), 7);
    assert_eq!(stdout(&o), stdout(&run(&["synth", "fef", "--seed", "3"])));
}
