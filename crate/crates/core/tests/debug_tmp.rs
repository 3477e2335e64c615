use dq_core::fedosov::*;
use dq_core::gauss::Gauss;
use dq_core::geom::models;
use dq_core::modact::*;
use dq_core::ratfun::Rat;
use dq_core::weyl::*;
use std::sync::Arc;
use std::time::Instant;

#[test]
fn timing_cp1() {
    let chart = Arc::new(models::fubini_study_chart());
    let t0 = Instant::now();
    let fed = Arc::new(fedosov_kahler(chart.clone(), 7));
    println!("fedosov_kahler cap7: {:?}", t0.elapsed());
    let t0 = Instant::now();
    let res = fed.residual();
    println!("residual: {:?} (zero {})", t0.elapsed(), res.is_zero());
    let k = Gauss::from_int(1);
    let t0 = Instant::now();
    let lm = LineModule::new(chart.clone(), fed.clone(), &k);
    println!("LineModule::new: {:?} (gamma_k terms {})", t0.elapsed(), lm.gamma_k.terms.len());
    let s = WeylElement::fiber_w(chart.vars(), 7, 0)
        .wedge(&WeylElement::fiber_w(chart.vars(), 7, 0))
        .scale(&Rat::var(2, 1));
    let t0 = Instant::now();
    let d1 = lm.d_line(Sign::Plus, &s);
    println!("d_line: {:?} (terms {})", t0.elapsed(), d1.terms.len());
    let t0 = Instant::now();
    let d2 = lm.d_line(Sign::Plus, &d1);
    println!("d_line^2: {:?} (zero mod 4: {})", t0.elapsed(), d2.truncate(4).is_zero());
    let t0 = Instant::now();
    let lift = lm.flat_lift(Sign::Plus, &Rat::var(2, 0));
    println!("flat_lift: {:?} (terms {})", t0.elapsed(), lift.terms.len());
    let t0 = Instant::now();
    let bim = Bimodule::new(chart.clone(), &k, 7);
    println!("Bimodule::new: {:?}", t0.elapsed());
    let t0 = Instant::now();
    let db = bim.d_line(&s);
    println!("d_bi: {:?} (terms {})", t0.elapsed(), db.terms.len());
    let t0 = Instant::now();
    let db2 = bim.d_line(&db);
    println!("d_bi^2: {:?} (zero mod 4: {})", t0.elapsed(), db2.truncate(4).is_zero());
    let t0 = Instant::now();
    let o = flat_section(&(&Rat::var(2,0) * &Rat::var(2,1)), &fed);
    println!("flat_section(zzb): {:?} (terms {})", t0.elapsed(), o.el.terms.len());
    let t0 = Instant::now();
    let dflat = fed.connection(&o.el);
    println!("connection: {:?} (zero mod 6: {})", t0.elapsed(), dflat.truncate(6).is_zero());
}
