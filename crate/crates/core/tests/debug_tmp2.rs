use dq_core::geom::models;
use dq_core::verify::*;
use std::sync::Arc;
use std::time::Instant;

#[test]
fn timing_checks_cp1() {
    let chart = Arc::new(models::fubini_study_chart());
    let ctx = SuiteContext::new(chart, 4, default_levels(), 3);
    for id in suite_check_ids("all").unwrap() {
        let t0 = Instant::now();
        let c = run_check(&ctx, &id);
        println!("{:7.2?}  {} {}", t0.elapsed(), if c.pass { "PASS" } else { "FAIL" }, c.id);
    }
}
