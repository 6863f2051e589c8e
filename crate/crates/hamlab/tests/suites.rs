use std::time::Instant;

use hamlab::suite::{run_suite, Suite, SuiteConfig};

fn check(config: SuiteConfig) {
    let suite = config.suite;
    let start = Instant::now();
    let report = run_suite(&config).unwrap();
    println!(
        "{suite}: cases={} max={:.3e} order={:?} pass={} ({:.1?})",
        report.cases,
        report.max_discrepancy,
        report.convergence_order,
        report.pass,
        start.elapsed()
    );
    let worst = report.results.iter().max_by(|a, b| a.discrepancy.total_cmp(&b.discrepancy)).unwrap();
    assert!(report.pass, "worst case: {worst:?}");
}

#[test]
fn energy_suite() {
    // coarser grid with the tolerance scaled by the observed h² error
    check(SuiteConfig { resolution: 1.0 / 128.0, tol: 4e-6, cases: 12, ..SuiteConfig::new(Suite::Energy, 7) });
}

#[test]
fn actiondiff_suite() {
    check(SuiteConfig { resolution: 1.0 / 128.0, cases: 6, ..SuiteConfig::new(Suite::ActionDiff, 7) });
}

#[test]
fn hofer_suite() {
    check(SuiteConfig::new(Suite::Hofer, 7));
}

#[test]
fn hat_suite() {
    check(SuiteConfig::new(Suite::Hat, 7));
}

#[test]
fn gauge_suite() {
    check(SuiteConfig::new(Suite::Gauge, 7));
}

#[test]
fn telescoping_suite() {
    check(SuiteConfig { resolution: 1.0 / 128.0, tol: 4e-6, cases: 6, ..SuiteConfig::new(Suite::Telescoping, 7) });
}

#[test]
fn reports_are_reproducible() {
    let config = SuiteConfig { cases: 4, ..SuiteConfig::new(Suite::Hat, 11) };
    let a = format!("{:?}", run_suite(&config).unwrap());
    let b = format!("{:?}", run_suite(&config).unwrap());
    assert_eq!(a, b);
}
