use heatlab::report::{emit_csv, load_csv, SuiteReport};
use heatlab::suites::{run_suite, SuiteConfig};

fn assert_same(a: &SuiteReport, b: &SuiteReport) {
    assert_eq!(a.suite, b.suite);
    assert_eq!(a.rows.len(), b.rows.len());
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!(x.check, y.check);
        assert_eq!(x.pass, y.pass);
        assert_eq!(x.oracle.to_bits(), y.oracle.to_bits());
        assert_eq!(x.bound.to_bits(), y.bound.to_bits());
        assert_eq!(x.ratio.to_bits(), y.ratio.to_bits());
        assert_eq!(x.params.len(), y.params.len());
        for (p, q) in x.params.iter().zip(&y.params) {
            assert_eq!(p.0, q.0);
            assert_eq!(p.1.to_bits(), q.1.to_bits());
        }
    }
}

#[test]
fn suite_reports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["quotient", "riesz", "thresholds"] {
        let rep = run_suite(&SuiteConfig::new(name).unwrap()).unwrap();
        let path = dir.path().join(format!("{name}.csv"));
        emit_csv(&rep, &path).unwrap();
        let back = load_csv(&path).unwrap();
        assert_eq!(back.len(), 1);
        assert_same(&rep, &back[0]);
    }
}

#[test]
fn empty_report_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    emit_csv(&SuiteReport::new("none"), &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 1);
    assert!(load_csv(&path).unwrap().is_empty());
}

#[test]
fn repeated_runs_identical() {
    let mut cfg = SuiteConfig::new("theorem2").unwrap();
    cfg.order = Some(0);
    let a = run_suite(&cfg).unwrap();
    let b = run_suite(&cfg).unwrap();
    assert_same(&a, &b);
}

#[test]
fn unwritable_path_reports_path() {
    let rep = SuiteReport::new("x");
    let err = emit_csv(&rep, std::path::Path::new("/nonexistent-dir/out.csv")).unwrap_err();
    assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
}
