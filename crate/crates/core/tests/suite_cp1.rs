//! Full verification suite on the projective-line chart: every curvature
//! term is active here, so this run exercises the whole engine.

use dq_core::geom::models;
use dq_core::verify::{default_levels, run_suite};
use std::sync::Arc;

#[test]
fn cp1_full_suite() {
    let chart = Arc::new(models::fubini_study_chart());
    let report = run_suite(chart, 4, default_levels(), "all", 3).expect("known suite");
    for c in &report.checks {
        println!(
            "{} {:28} [{} @ {}] {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.id,
            c.model,
            c.cap,
            c.detail
        );
    }
    assert!(report.all_pass, "cp1 suite must pass");
}
