use qcauchy_cli::{emit_plot_data, PlotError, PlotKind};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn algebra_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = verify(&["--suite", "algebra", "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let jsonl = fs::read_to_string(dir.path().join("report.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 4);
    for l in jsonl.lines() {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        for k in [
            "suite",
            "check_name",
            "anchor",
            "max_abs_err",
            "max_rel_err",
            "tolerance",
            "pass",
            "runtime_ms",
        ] {
            assert!(keys.iter().any(|x| x == k), "missing {k}");
        }
        assert_eq!(v["pass"], true);
    }
    assert!(dir.path().join("report.csv").is_file());
}

#[test]
fn unknown_suite_is_usage_error() {
    let out = verify(&["--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_suite_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = verify(&["--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("report.jsonl").exists());
}

#[test]
fn bad_config_file_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "suite = \"algebra\"\nunknown_key = 1\n").unwrap();
    let out = verify(&["--config", cfg.to_str().unwrap(), "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    fs::write(&cfg, "suite = \"algebra\"\n[tolerances]\nno_such_check = 1.0\n").unwrap();
    let out = verify(&["--config", cfg.to_str().unwrap(), "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_tolerance_fails_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = verify(&[
        "--suite",
        "algebra",
        "--tolerance",
        "mul_associativity_distributivity=0",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout
        .lines()
        .any(|l| l.starts_with("FAIL") && l.contains("mul_associativity_distributivity")));
}

#[test]
fn config_file_applies_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    fs::write(
        &cfg,
        format!(
            "suite = \"algebra\"\nseed = 1\noutput_dir = {:?}\n",
            a.to_str().unwrap()
        ),
    )
    .unwrap();
    assert_eq!(verify(&["--config", cfg.to_str().unwrap()]).status.code(), Some(0));
    assert!(a.join("report.jsonl").is_file());
    let out = verify(&["--config", cfg.to_str().unwrap(), "--seed", "2", "--out", &out_arg(&b)]);
    assert_eq!(out.status.code(), Some(0));
    // a different seed draws different samples
    assert_ne!(
        fs::read(a.join("report.jsonl")).unwrap(),
        fs::read(b.join("report.jsonl")).unwrap()
    );
}

#[test]
fn reruns_are_byte_identical() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let out = verify(&["--suite", "kernel", "--seed", "7", "--out", &out_arg(d.path())]);
        assert_eq!(out.status.code(), Some(0));
    }
    for f in [
        "report.jsonl",
        "report.csv",
        "kernel_profile.json",
        "kernel_profile.csv",
    ] {
        assert_eq!(
            fs::read(dirs[0].path().join(f)).unwrap(),
            fs::read(dirs[1].path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn plot_data_needs_reports() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        emit_plot_data(dir.path(), PlotKind::SingularValues),
        Err(PlotError::EmptyDirectory(_))
    ));
    assert!(matches!(
        emit_plot_data(&dir.path().join("absent"), PlotKind::KernelProfile),
        Err(PlotError::MissingDirectory(_))
    ));
    fs::write(dir.path().join("report.jsonl"), "").unwrap();
    assert!(matches!(
        emit_plot_data(dir.path(), PlotKind::SchattenSums),
        Err(PlotError::MissingSource(_))
    ));
    let out = verify(&["--emit-plot", "kernel-profile", "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kernel_profile_plot_from_suite_output() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        verify(&["--suite", "kernel", "--out", &out_arg(dir.path())])
            .status
            .code(),
        Some(0)
    );
    fs::remove_file(dir.path().join("kernel_profile.csv")).unwrap();
    let out = verify(&["--emit-plot", "kernel-profile", "--out", &out_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("kernel_profile.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,closed,series,rel_err"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 60);
    // the series is skipped next to the singular sphere |q| = |p|
    assert!(rows.iter().any(|r| r.ends_with(",,")));
}

#[test]
fn spectrum_flags_literal_value_and_emits_plot_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = verify(&["--suite", "spectrum", "--out", &out_arg(dir.path())]);
    // the operator norm bound fails at the truncations tested
    assert_eq!(out.status.code(), Some(1));

    let mut rdr = csv::Reader::from_path(dir.path().join("spectral_report_k0.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let flag = headers.iter().position(|h| h == "literal_discrepant").unwrap();
    let n = headers.iter().position(|h| h == "n").unwrap();
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 7);
    let row1 = rows.iter().find(|r| &r[n] == "1").unwrap();
    assert_eq!(&row1[flag], "true");

    let sv = fs::read_to_string(dir.path().join("singular_values.csv")).unwrap();
    assert_eq!(sv.lines().next(), Some("n,k0,k1,k2"));
    let ss = fs::read_to_string(dir.path().join("schatten_sums.csv")).unwrap();
    assert_eq!(ss.lines().next(), Some("truncation,kappa_1,kappa_2.5,kappa_3"));

    let d: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("discrepancies.json")).unwrap()).unwrap();
    let lit = d
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["item"] == "singular_value_literal_power")
        .unwrap();
    assert_eq!(lit["supported"], "sqrt_lambda");
}
