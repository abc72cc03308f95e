use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morh2w"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn norms_of_first_order_lag() {
    let o = run(&["norms", "--plant", "fixtures/scalar1.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "h2=0.707107"), "{}", stdout(&o));
}

#[test]
fn reduce_reports_iterations() {
    let o = run(&[
        "reduce", "--plant", "fixtures/illus6.json", "--wi", "fixtures/wi.json", "--wo", "fixtures/wo.json", "-r", "2",
        "--method", "fwhmor", "--init", "fixtures/init2.json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("converged in 4 iterations"));
}

#[test]
fn compare_writes_reference_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&[
        "compare", "--plant", "fixtures/illus6.json", "--wi", "fixtures/wi.json", "--wo", "fixtures/wo.json", "-r", "2",
        "--out", out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
    let table = morh2w_harness::ComparisonTable::from_csv(&text).unwrap();
    for row in &table.rows {
        let s = row.outcome.as_ref().unwrap();
        let h2 = if row.method == morh2w_core::reducers::Method::Fwbt { 0.0080 } else { 0.0061 };
        assert!((s.h2 - h2).abs() <= 2e-4 && (s.hinf - 0.0471).abs() <= 2e-4, "{row:?}");
    }
}

#[test]
fn sigma_and_report_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let o = run(&["sigma", "--plant", "fixtures/scalar1.json", "--band", "0.1:10", "--points", "5", "--out", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let data = morh2w_core::norms::SigmaData::from_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(data.frequencies.len(), 5);
    let o = run(&["report", "--plant", "fixtures/illus6.json", "--wi", "fixtures/wi.json", "--wo", "fixtures/wo.json", "--rom", "fixtures/init2.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("dev_A=") && text.contains("gal_P=NaN"), "{text}");
}

#[test]
fn usage_errors_exit_one_with_help() {
    for args in [&["frobnicate"][..], &["reduce", "--plant", "x.json"], &["sigma", "--plant", "fixtures/scalar1.json", "--band", "5:1"], &[]] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"), "{args:?}");
    }
    let o = run(&["norms", "--plant", "fixtures/missing.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!Path::new("fixtures/missing.json").exists());
}

#[test]
fn numerical_failures_exit_two() {
    let o = run(&["reduce", "--plant", "fixtures/illus6.json", "-r", "3", "--method", "fwhmor"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert!(String::from_utf8_lossy(&o.stderr).contains("UnstableIterate"));
}
