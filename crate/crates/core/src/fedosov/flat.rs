//! Flat sections of a Fedosov connection, the induced star product, and
//! non-formal evaluation at a quantization level.

use super::{FedChart, FedosovData};
use crate::gauss::Gauss;
use crate::ratfun::Rat;
use crate::weyl::{commutator, commutator_div_hbar, Part, WeylElement};
use crate::VarKind;

/// A flat section together with its scalar shadow `π₀(O) = f`.
#[derive(Clone, Debug)]
pub struct FlatSection {
    pub f: Rat,
    pub el: WeylElement,
}

/// The star product of two chart functions as an ℏ-series of coefficients
/// `C_0, C_1, ...` with `C_0 = f g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarSeries {
    pub coeffs: Vec<Rat>,
}

impl StarSeries {
    pub fn order(&self, r: usize) -> Rat {
        self.coeffs
            .get(r)
            .cloned()
            .unwrap_or_else(|| Rat::zero(self.coeffs[0].nvars()))
    }
}

/// The unique `D`-flat element with `π₀(O) = f`, solved by the
/// weight-graded fixed point `O = f + δ⁻¹(∇O + (1/ℏ)[corr, O])`.
pub fn flat_section(f: &Rat, data: &FedosovData) -> FlatSection {
    let vars = data.vars();
    let base = WeylElement::scalar(vars, data.cap, f.clone());
    // the recursion map is linear and raises weight, so the fixed point is
    // the terminating sum of its iterates on the seed
    let mut total = base.clone();
    let mut piece = base;
    for _ in 0..=(data.cap + 2) {
        let comm = commutator_div_hbar(&data.corr, &piece, &data.kernel, data.cap);
        piece = data.chart.nabla(&piece).add(&comm).delta_inv(Part::Full);
        if piece.is_zero() {
            return FlatSection { f: f.clone(), el: total };
        }
        total = total.add(&piece);
    }
    unreachable!("flat-section recursion is weight-graded and must stabilize");
}

/// For holomorphic `f` the flat section collapses to
/// `O_f = Σ_r (∇̃^{1,0})^r f`, a section with unbarred fiber symbols only.
/// Panics if `f` is not holomorphic.
pub fn holomorphic_series(f: &Rat, data: &FedosovData) -> FlatSection {
    let FedChart::Kahler(chart) = &data.chart else {
        panic!("holomorphic series requires a Kähler chart");
    };
    let n = chart.n;
    for b in 0..n {
        assert!(
            f.derive(n + b).is_zero(),
            "holomorphic series input must be holomorphic"
        );
    }
    let el = nabla_tilde_sum(
        &WeylElement::scalar(data.vars(), data.cap, f.clone()),
        data,
    );
    FlatSection { f: f.clone(), el }
}

/// The flat section attached to a holomorphic vector field `ξ = ξ^μ ∂_μ`
/// through the chart potential:
/// `O = Σ_r (∇̃^{1,0})^r ( -i·ξ^μ ∂ρ₀_μ − ℏ·ξ^μ ∂ρ₁_μ + ξ^η ω_{ην̄} w̄^ν )`.
/// Panics if some component is not holomorphic.
pub fn xi_rho_section(xi: &[Rat], data: &FedosovData) -> WeylElement {
    let FedChart::Kahler(chart) = &data.chart else {
        panic!("vector-field sections require a Kähler chart");
    };
    let n = chart.n;
    let vars = data.vars();
    for comp in xi {
        for b in 0..n {
            assert!(
                comp.derive(n + b).is_zero(),
                "vector field components must be holomorphic"
            );
        }
    }
    let minus_i = Gauss::i_times(-1, 1);
    let mut rho_part = Rat::zero(2 * n);
    let mut rho1_part = Rat::zero(2 * n);
    for mu in 0..n {
        rho_part = &rho_part + &(&xi[mu] * &chart.drho0[mu]);
        rho1_part = &rho1_part + &(&xi[mu] * &chart.drho1[mu]);
    }
    let mut base = WeylElement::scalar(vars, data.cap, rho_part.scale(&minus_i));
    base = base.add(
        &WeylElement::scalar(vars, data.cap, rho1_part)
            .mul_hbar(1)
            .neg(),
    );
    // ξ̂ = ξ^η ω_{ην̄} w̄^ν
    for nu in 0..n {
        let mut coeff = Rat::zero(2 * n);
        for eta in 0..n {
            coeff = &coeff + &(&xi[eta] * &chart.omega[eta][nu]);
        }
        base = base.add(&WeylElement::fiber_wb(vars, data.cap, nu).scale(&coeff));
    }
    nabla_tilde_sum(&base, data)
}

/// `Σ_r (∇̃^{1,0})^r a` with `∇̃^{1,0} = (δ^{1,0})⁻¹ ∘ ∇^{1,0}`.
pub fn nabla_tilde_sum(a: &WeylElement, data: &FedosovData) -> WeylElement {
    let mut total = a.clone();
    let mut piece = a.clone();
    loop {
        piece = data.chart.nabla_holo(&piece).delta_inv(Part::Holo);
        if piece.is_zero() {
            return total;
        }
        total = total.add(&piece);
    }
}

/// The star product `π₀(O_f ⋆ O_g)`, reported through ℏ-order `⌊cap/2⌋`.
pub fn star(f: &Rat, g: &Rat, data: &FedosovData) -> StarSeries {
    let of = flat_section(f, data);
    let og = flat_section(g, data);
    let prod = crate::weyl::fiber_product(&of.el, &og.el, &data.kernel);
    let orders = (data.cap / 2) as usize;
    let coeffs = (0..=orders)
        .map(|r| prod.scalar_coefficient(r as u16))
        .collect();
    StarSeries { coeffs }
}

/// Evaluate a formal element at `ℏ = i/k`. The element must be polynomial
/// in ℏ and the barred fiber symbols, which the weight cap guarantees;
/// `k` must be nonzero.
pub fn ev_k(el: &WeylElement, k: &Gauss) -> WeylElement {
    assert!(!k.is_zero(), "evaluation level k must be nonzero");
    let v = &Gauss::i() * &k.inv();
    el.eval_hbar(&v)
}

/// The non-formal connection `D_k a = ∇a − δa + (k/i)[corr_k, a]_{⋆_k}`
/// obtained by evaluating the Fedosov connection at `ℏ = i/k`.
pub struct LevelConnection {
    pub k: Gauss,
    pub hbar_value: Gauss,
    pub kernel: crate::weyl::ProductKernel,
    pub corr_k: WeylElement,
    pub gamma_k: WeylElement,
}

impl LevelConnection {
    pub fn new(data: &FedosovData, k: &Gauss) -> Self {
        assert!(!k.is_zero(), "evaluation level k must be nonzero");
        let FedChart::Kahler(chart) = &data.chart else {
            panic!("level evaluation requires a Kähler chart");
        };
        let hbar_value = &Gauss::i() * &k.inv();
        let kernel = chart.anti_wick_kernel(crate::weyl::HbarUse::Value(hbar_value.clone()));
        LevelConnection {
            k: k.clone(),
            hbar_value,
            kernel,
            corr_k: ev_k(&data.corr, k),
            gamma_k: ev_k(&data.gamma, k),
        }
    }

    /// `k/i = -i·k`, the evaluated `1/ℏ`.
    pub fn inv_hbar(&self) -> Gauss {
        self.hbar_value.inv()
    }

    pub fn apply(&self, data: &FedosovData, a: &WeylElement) -> WeylElement {
        assert_eq!(a.vars.kind, VarKind::Kahler);
        let comm =
            commutator(&self.corr_k, a, &self.kernel).scale_gauss(&self.inv_hbar());
        data.chart.nabla(a).sub(&a.delta(Part::Full)).add(&comm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fedosov::{fedosov_kahler, fedosov_real};
    use crate::geom::models::flat_cn;
    use crate::geom::{realify, SymplecticChart};
    use crate::parse::parse_expr;
    use crate::VarSpec;
    use std::sync::Arc;

    fn flat_real_chart() -> Arc<SymplecticChart> {
        // ω = dx1 ∧ dx2 on ℝ², flat connection
        let one = Rat::one(2);
        let zero = Rat::zero(2);
        let omega = vec![vec![zero.clone(), one.clone()], vec![-&one, zero.clone()]];
        let gamma = vec![vec![vec![zero.clone(); 2]; 2]; 2];
        Arc::new(SymplecticChart::new("flat-r2", crate::VarKind::Real, 2, omega, gamma).unwrap())
    }

    #[test]
    fn flat_real_taylor_sections() {
        // On the flat chart the flat section is the fibrewise Taylor series:
        // f = x1 x2 lifts to x1x2 + x2 y1 + x1 y2 + y1 y2
        let chart = flat_real_chart();
        let cap = 6;
        let zero = WeylElement::zero(chart.vars(), cap);
        let data = fedosov_real(chart.clone(), &zero, &zero, cap).unwrap();
        assert!(data.a_part.is_zero());
        let vars = chart.vars();
        let f = &Rat::var(2, 0) * &Rat::var(2, 1);
        let o = flat_section(&f, &data);
        let expect = WeylElement::scalar(vars, cap, f.clone())
            .add(&WeylElement::fiber_w(vars, cap, 0).scale(&Rat::var(2, 1)))
            .add(&WeylElement::fiber_w(vars, cap, 1).scale(&Rat::var(2, 0)))
            .add(&WeylElement::fiber_w(vars, cap, 0).wedge(&WeylElement::fiber_w(vars, cap, 1)));
        assert_eq!(o.el, expect);
        assert!(data.connection(&o.el).is_zero());
        // f = 1 lifts to 1
        let one = flat_section(&Rat::one(2), &data);
        assert_eq!(one.el, WeylElement::one(vars, cap));
    }

    #[test]
    fn flat_kahler_sections_and_star() {
        let chart = Arc::new(flat_cn(1));
        let cap = 6;
        let data = fedosov_kahler(chart.clone(), cap);
        assert!(data.a_part.is_zero());
        assert!(data.b_part.as_ref().unwrap().is_zero());
        let vars = chart.vars();
        // O_z = z + w, matching the closed holomorphic series
        let z = Rat::var(2, 0);
        let o = flat_section(&z, &data);
        let expect =
            WeylElement::scalar(vars, cap, z.clone()).add(&WeylElement::fiber_w(vars, cap, 0));
        assert_eq!(o.el, expect);
        assert_eq!(holomorphic_series(&z, &data).el, o.el);
        // O_{z²} = z² + 2 z w + w², the Taylor expansion
        let z2 = z.pow(2);
        let o2 = holomorphic_series(&z2, &data);
        let w = WeylElement::fiber_w(vars, cap, 0);
        let expect2 = WeylElement::scalar(vars, cap, z2.clone())
            .add(&w.scale(&z.scale(&Gauss::from_int(2))))
            .add(&w.wedge(&w));
        assert_eq!(o2.el, expect2);
        assert_eq!(flat_section(&z2, &data).el, o2.el);
    }

    #[test]
    fn star_separation_of_variables_flat() {
        let chart = Arc::new(flat_cn(1));
        let data = fedosov_kahler(chart, 6);
        let vars = VarSpec::kahler(1);
        let z = parse_expr("z1", &vars).unwrap();
        let zb = parse_expr("zb1", &vars).unwrap();
        // holomorphic left factor: star(z, g) = z·g exactly
        let s = star(&z, &zb, &data);
        assert_eq!(s.order(0), &z * &zb);
        for r in 1..s.coeffs.len() {
            assert!(s.order(r).is_zero());
        }
        // star(z̄, z) − star(z, z̄) sees the Poisson bracket at first order
        let a = star(&zb, &z, &data);
        let comm1 = &a.order(1) - &s.order(1);
        let chart = flat_cn(1);
        assert_eq!(comm1, chart.poisson(&zb, &z));
        assert!(!comm1.is_zero());
    }

    #[test]
    fn evaluation_at_level() {
        let vars = VarSpec::kahler(1);
        let one = WeylElement::one(vars, 6);
        let h = one.mul_hbar(1);
        // ev_k(ℏ·1) = (i/k)·1
        let e = ev_k(&h, &Gauss::from_int(2));
        assert_eq!(e, one.scale_gauss(&Gauss::i_times(1, 2)));
        // no ℏ: unchanged
        let chart = Arc::new(flat_cn(1));
        let data = fedosov_kahler(chart, 6);
        let oz = flat_section(&Rat::var(2, 0), &data);
        assert_eq!(ev_k(&oz.el, &Gauss::from_int(1)), oz.el);
    }

    #[test]
    fn realified_cp1_flat_sections() {
        // the realified Kähler chart runs through the Moyal recursion
        let kc = crate::geom::models::fubini_study_chart();
        let sc = Arc::new(realify(&kc).unwrap());
        let cap = 5;
        let zero = WeylElement::zero(sc.vars(), cap);
        let data = fedosov_real(sc.clone(), &zero, &zero, cap).unwrap();
        assert!(data.residual().truncate(cap - 1).is_zero());
        let f = Rat::var(2, 0);
        let o = flat_section(&f, &data);
        assert!(data.connection(&o.el).truncate(cap - 1).is_zero());
    }
}
