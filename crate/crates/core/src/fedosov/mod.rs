//! Fedosov connections: the curvature-equation recursions in real,
//! holomorphic and Kähler chart modes, and the data they produce.
//!
//! In every mode the connection has the shape `D = ∇ − δ + (1/ℏ)[corr, ·]`
//! and the certified identity is the curvature equation
//! `R + ∇γ + (1/(2ℏ))[γ, γ] = target` with `γ = −ω̃ + corr`, the target
//! being `−ω + ω_ℏ` (real/holomorphic, Moyal product) or
//! `−(ω + (ℏ/i)·ω₁)` (Kähler, anti-Wick product).
//!
//! The real/holomorphic correction is solved by the weight-graded fixed
//! point `A = δs + δ⁻¹(R − ω_ℏ + ∇A + (1/(2ℏ))[A,A])`; the Kähler one is
//! assembled from the closed forms
//! `A_(r) = (∇̃^{1,0})^{r-2} (δ^{1,0})⁻¹ R` and
//! `B_(r) = (∇̃^{1,0})^{r-1} (δ^{1,0})⁻¹ ((1/i)·ω₁)`
//! with `∇̃^{1,0} = (δ^{1,0})⁻¹ ∘ ∇^{1,0}`, and the two routes cross-check
//! each other in the verification suite.

mod flat;
mod restrict;

pub use flat::{ev_k, flat_section, holomorphic_series, nabla_tilde_sum, star, xi_rho_section,
    FlatSection, LevelConnection, StarSeries};
pub use restrict::{kahler_element_from_real, restrict_to_chart};

use crate::gauss::Gauss;
use crate::geom::{KahlerChart, SymplecticChart};
use crate::weyl::{commutator_div_hbar, HbarUse, Part, ProductKernel, WeylElement};
use crate::VarKind;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FedosovError {
    #[error("normalization datum s must be a 0-form of weight ≥ 3 with π₀(s) = 0")]
    BadNormalization,
    #[error("ω_ℏ must be a fiber-free closed 2-form with ℏ-order ≥ 1")]
    BadOmegaH,
    #[error("recursion did not stabilize (internal error)")]
    NoFixedPoint,
}

/// Which chart a Fedosov datum was built on.
#[derive(Clone)]
pub enum FedChart {
    Kahler(Arc<KahlerChart>),
    Symp(Arc<SymplecticChart>),
}

impl FedChart {
    pub fn vars(&self) -> crate::VarSpec {
        match self {
            FedChart::Kahler(c) => c.vars(),
            FedChart::Symp(c) => c.vars(),
        }
    }

    pub fn weyl_curvature(&self, cap: u32) -> WeylElement {
        match self {
            FedChart::Kahler(c) => c.weyl_curvature(cap),
            FedChart::Symp(c) => c.weyl_curvature(cap),
        }
    }

    pub fn weyl_omega(&self, cap: u32) -> WeylElement {
        match self {
            FedChart::Kahler(c) => c.weyl_omega(cap),
            FedChart::Symp(c) => c.weyl_omega(cap),
        }
    }

    pub fn weyl_omega_tilde(&self, cap: u32) -> WeylElement {
        match self {
            FedChart::Kahler(c) => c.weyl_omega_tilde(cap),
            FedChart::Symp(c) => c.weyl_omega_tilde(cap),
        }
    }

    pub fn nabla(&self, a: &WeylElement) -> WeylElement {
        match self {
            FedChart::Kahler(c) => a.nabla(&c.conn_view()),
            FedChart::Symp(c) => a.nabla(&c.conn_view()),
        }
    }

    pub fn nabla_holo(&self, a: &WeylElement) -> WeylElement {
        match self {
            FedChart::Kahler(c) => a.nabla_holo(&c.conn_view()),
            FedChart::Symp(c) => a.nabla_holo(&c.conn_view()),
        }
    }
}

/// A solved Fedosov connection on a chart.
pub struct FedosovData {
    pub chart: FedChart,
    /// The fibrewise product the connection differentiates (anti-Wick on
    /// Kähler charts, Moyal otherwise), with formal ℏ.
    pub kernel: ProductKernel,
    pub cap: u32,
    /// Full solution `γ = −ω̃ + corr`.
    pub gamma: WeylElement,
    /// The correction `A` (real/holomorphic) or `A + ℏB` (Kähler).
    pub corr: WeylElement,
    /// The `A` part alone; in Kähler mode also its graded pieces `A_(2..)`.
    pub a_part: WeylElement,
    pub a_graded: Vec<WeylElement>,
    /// Kähler mode: `B` (without the ℏ factor) and its graded pieces.
    pub b_part: Option<WeylElement>,
    pub b_graded: Vec<WeylElement>,
    /// The 2-form datum shifting the target (zero in Kähler mode).
    pub omega_h: WeylElement,
    /// The prescribed value of `δ⁻¹ corr` (real mode input).
    pub s: WeylElement,
    /// Right-hand side of the curvature equation.
    pub target: WeylElement,
}

impl FedosovData {
    /// The curvature-equation residual
    /// `R + ∇γ + (1/(2ℏ))[γ,γ] − target`; identically zero modulo the cap
    /// when the recursion is correct.
    pub fn residual(&self) -> WeylElement {
        let r = self.chart.weyl_curvature(self.cap);
        let half = Gauss::from_ratio(1, 2);
        let quad = commutator_div_hbar(&self.gamma, &self.gamma, &self.kernel, self.cap)
            .scale_gauss(&half);
        r.add(&self.chart.nabla(&self.gamma))
            .add(&quad)
            .sub(&self.target)
    }

    /// The flat connection `D a = ∇a − δa + (1/ℏ)[corr, a]`.
    ///
    /// The commutator is computed with a lifted cap so the ℏ-division does
    /// not eat into the certified range: the result is exact for weights
    /// `≤ cap − 1` (the weight-`cap` component would need data beyond the
    /// cap).
    pub fn connection(&self, a: &WeylElement) -> WeylElement {
        let comm = commutator_div_hbar(&self.corr, a, &self.kernel, self.cap);
        self.chart.nabla(a).sub(&a.delta(Part::Full)).add(&comm)
    }

    pub fn vars(&self) -> crate::VarSpec {
        self.chart.vars()
    }
}

/// Solve the real-mode (or holomorphic-mode) curvature equation for the
/// unique `A` with `δ⁻¹A = s`.
pub fn fedosov_real(
    chart: Arc<SymplecticChart>,
    omega_h: &WeylElement,
    s: &WeylElement,
    cap: u32,
) -> Result<FedosovData, FedosovError> {
    let vars = chart.vars();
    let s = s.truncate(cap);
    let omega_h = omega_h.truncate(cap);
    if !s.is_zero() {
        let ok = s.is_form_free()
            && s.pi0(Part::Full).is_zero()
            && s.min_weight().map_or(true, |w| w >= 3);
        if !ok {
            return Err(FedosovError::BadNormalization);
        }
    }
    if !omega_h.is_zero() {
        let ok = omega_h.is_fiber_free()
            && omega_h
                .terms
                .keys()
                .all(|k| k.form_degree() == 2 && k.h >= 1)
            && omega_h.exterior_d().is_zero();
        if !ok {
            return Err(FedosovError::BadOmegaH);
        }
    }
    let kernel = chart.moyal_kernel(HbarUse::Formal);
    let conn = chart.conn_view();
    let r_el = chart.weyl_curvature(cap);
    let omega_el = chart.weyl_omega(cap);
    let omega_tilde = chart.weyl_omega_tilde(cap);
    let delta_s = s.delta(Part::Full);
    let half = Gauss::from_ratio(1, 2);

    let mut a = WeylElement::zero(vars, cap);
    let mut stabilized = false;
    for _ in 0..=(cap + 2) {
        let quad = commutator_div_hbar(&a, &a, &kernel, cap).scale_gauss(&half);
        let rhs = r_el.sub(&omega_h).add(&a.nabla(&conn)).add(&quad);
        let next = delta_s.add(&rhs.delta_inv(Part::Full));
        if next == a {
            stabilized = true;
            break;
        }
        a = next;
    }
    if !stabilized {
        return Err(FedosovError::NoFixedPoint);
    }
    let gamma = omega_tilde.neg().add(&a);
    let target = omega_el.neg().add(&omega_h);
    Ok(FedosovData {
        chart: FedChart::Symp(chart),
        kernel,
        cap,
        gamma,
        corr: a.clone(),
        a_part: a,
        a_graded: Vec::new(),
        b_part: None,
        b_graded: Vec::new(),
        omega_h,
        s,
        target,
    })
}

/// Solve the holomorphic-mode curvature equation (chart of kind `Holo`,
/// normalization `δ⁻¹A = 0`).
pub fn fedosov_holomorphic(
    chart: Arc<SymplecticChart>,
    omega_h: &WeylElement,
    cap: u32,
) -> Result<FedosovData, FedosovError> {
    assert_eq!(chart.kind, VarKind::Holo);
    let zero = WeylElement::zero(chart.vars(), cap);
    fedosov_real(chart, omega_h, &zero, cap)
}

/// Assemble the Kähler-mode solution from its closed forms.
pub fn fedosov_kahler(chart: Arc<KahlerChart>, cap: u32) -> FedosovData {
    let vars = chart.vars();
    let kernel = chart.anti_wick_kernel(HbarUse::Formal);
    let conn = chart.conn_view();
    let omega_el = chart.weyl_omega(cap);
    let omega1_el = chart.weyl_omega1(cap);
    let omega_tilde = chart.weyl_omega_tilde(cap);
    let r_el = chart.weyl_curvature(cap);

    // A_(r) for r ≥ 2, each one more application of ∇̃^{1,0}
    let mut a_graded = Vec::new();
    let mut piece = r_el.delta_inv(Part::Holo);
    while !piece.is_zero() {
        a_graded.push(piece.clone());
        piece = piece.nabla_holo(&conn).delta_inv(Part::Holo);
    }
    // B_(r) for r ≥ 1
    let minus_i = Gauss::i_times(-1, 1);
    let mut b_graded = Vec::new();
    let mut piece = omega1_el.scale_gauss(&minus_i).delta_inv(Part::Holo);
    while !piece.is_zero() {
        b_graded.push(piece.clone());
        piece = piece.nabla_holo(&conn).delta_inv(Part::Holo);
    }
    let mut a_part = WeylElement::zero(vars, cap);
    for p in &a_graded {
        a_part = a_part.add(p);
    }
    let mut b_part = WeylElement::zero(vars, cap);
    for p in &b_graded {
        b_part = b_part.add(p);
    }
    let corr = a_part.add(&b_part.mul_hbar(1));
    let gamma = omega_tilde.neg().add(&corr);
    // target: −(ω + (ℏ/i)·ω₁) = −ω + i·ℏ·ω₁
    let target = omega_el
        .neg()
        .add(&omega1_el.mul_hbar(1).scale_gauss(&Gauss::i()));
    FedosovData {
        chart: FedChart::Kahler(chart),
        kernel,
        cap,
        gamma,
        corr,
        a_part,
        a_graded,
        b_part: Some(b_part),
        b_graded,
        omega_h: WeylElement::zero(vars, cap),
        s: WeylElement::zero(vars, cap),
        target,
    }
}
