use std::path::Path;
use std::process::Command;

fn fastast(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_fastast")).args(args).output().unwrap()
}

fn read_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

#[test]
fn solve_writes_csv_with_expected_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = fastast(&["--n", "16", "--k", "2", "--trials", "3", "--variant", "both", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["trial", "n", "snr_db", "variant", "iters", "wall_ms", "gap", "f_obj", "nmse", "oracle_nmse", "success", "freq_mse", "status"]
    );
    assert_eq!(read_rows(&out).len(), 6);
}

#[test]
fn runs_are_reproducible_apart_from_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for (p, jobs) in [(&a, "1"), (&b, "2")] {
        let o = fastast(&["--mode", "sweep-SNR", "--n", "16", "--snr-db", "10,20", "--trials", "2", "--seed", "7", "--jobs", jobs, "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    let strip = |rows: Vec<csv::StringRecord>| -> Vec<Vec<String>> {
        rows.iter()
            .map(|r| r.iter().enumerate().filter(|(i, _)| *i != 5).map(|(_, f)| f.to_string()).collect())
            .collect()
    };
    assert_eq!(strip(read_rows(&a)), strip(read_rows(&b)));
}

#[test]
fn trace_mode_writes_reference_and_per_variant_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let reference = dir.path().join("ref.json");
    let o = fastast(&[
        "--mode", "trace", "--n", "16", "--k", "2", "--variant", "both",
        "--trace-ref", reference.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(reference.exists());
    for name in ["t_newton.csv", "t_lbfgs.csv"] {
        let rows = read_rows(&dir.path().join(name));
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|r| !r[5].is_empty()));
    }
}

#[test]
fn invalid_configuration_exits_with_code_2() {
    let o = fastast(&["--n", "16,32", "--out", "unused.csv"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fastast(&["--gamma", "0.5", "--out", "unused.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unconverged_solves_exit_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    // eight frequencies 4 pi / 16 apart cannot be placed by rejection sampling
    let o = fastast(&["--n", "16", "--k", "8", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert!(v[0]["status"].as_str().unwrap().starts_with("error"));
}
