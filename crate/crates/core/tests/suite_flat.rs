//! Full verification suite on the flat chart: every identity collapses to
//! an exact zero with mostly trivial content, which pins the conventions
//! before the curved models run.

use dq_core::geom::models;
use dq_core::verify::{default_levels, run_suite};
use std::sync::Arc;

#[test]
fn flat_c1_full_suite() {
    let chart = Arc::new(models::flat_cn(1));
    let report = run_suite(chart, 4, default_levels(), "all", 4).expect("known suite");
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
    assert!(report.all_pass, "flat-chart suite must pass");
}
