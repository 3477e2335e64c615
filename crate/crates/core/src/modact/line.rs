//! Line-bundle connections at a fixed level, flat lifts, the distinguished
//! frame lift, and the bimodule with its pairing.

use super::action::{circledast, Sign};
use crate::fedosov::{ev_k, fedosov_kahler, FedosovData};
use crate::gauss::Gauss;
use crate::geom::KahlerChart;
use crate::ratfun::Rat;
use crate::weyl::{HbarUse, Part, ProductKernel, WeylElement};
use std::sync::Arc;

/// Which line bundle a section coefficient belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Variant {
    Plus,
    Minus,
    Bimodule,
}

/// One chart, one level: the non-formal data acting on plus/minus
/// variant sections over that chart.
pub struct LineModule {
    pub chart: Arc<KahlerChart>,
    pub fed: Arc<FedosovData>,
    pub k: Gauss,
    /// `ℏ = i/k`.
    pub hbar: Gauss,
    /// Anti-Wick product evaluated at the level.
    pub kernel: ProductKernel,
    /// `γ` evaluated at the level.
    pub gamma_k: WeylElement,
    /// `A + ℏB` evaluated at the level.
    pub corr_k: WeylElement,
    pub cap: u32,
}

impl LineModule {
    pub fn new(chart: Arc<KahlerChart>, fed: Arc<FedosovData>, k: &Gauss) -> Self {
        assert!(!k.is_zero(), "level k must be nonzero");
        let hbar = &Gauss::i() * &k.inv();
        let kernel = chart.anti_wick_kernel(HbarUse::Value(hbar.clone()));
        let gamma_k = ev_k(&fed.gamma, k);
        let corr_k = ev_k(&fed.corr, k);
        let cap = fed.cap;
        LineModule {
            chart,
            fed,
            k: k.clone(),
            hbar,
            kernel,
            gamma_k,
            corr_k,
            cap,
        }
    }

    /// `k/i`, the evaluated `1/ℏ`.
    pub fn inv_hbar(&self) -> Gauss {
        self.hbar.inv()
    }

    /// The connection 1-form of the variant's bundle in its frame:
    /// `∂(±kρ₀ + ρ₁)` for the plus/minus variants. The bimodule frame is
    /// the product `σ₊ ⊗ σ̌₋` of the plus frame with the transported
    /// conjugate minus frame (the square-root twists cancel): its form is
    /// the plus form together with the relabeled conjugate minus form, a
    /// mixed-type rational 1-form with the curvature `(2k/i)·ω` of the
    /// squared bundle. The holomorphic frame of the squared bundle differs
    /// from this one by a non-rational gauge factor and is never used.
    pub fn connection_form(&self, variant: Variant) -> WeylElement {
        let n = self.chart.n;
        let vars = self.chart.vars();
        let mut theta = WeylElement::zero(vars, self.cap);
        for alpha in 0..n {
            let coeff = match variant {
                Variant::Plus | Variant::Bimodule => {
                    &self.chart.drho0[alpha].scale(&self.k) + &self.chart.drho1[alpha]
                }
                Variant::Minus => {
                    &self.chart.drho1[alpha] - &self.chart.drho0[alpha].scale(&self.k)
                }
            };
            theta = theta.add(&WeylElement::form_dz(vars, self.cap, alpha).scale(&coeff));
        }
        if variant == Variant::Bimodule {
            for beta in 0..n {
                let coeff = &self
                    .chart
                    .conjugate_fn(&self.chart.drho1[beta])
                    - &self
                        .chart
                        .conjugate_fn(&self.chart.drho0[beta])
                        .scale(&self.k);
                theta =
                    theta.add(&WeylElement::form_dzb(vars, self.cap, beta).scale(&coeff));
            }
        }
        theta
    }

    /// `dθ − (curvature target)`: zero when the frame connection has the
    /// required curvature `(1/i)(±kω + ω₁)` resp. `(2k/i)ω`.
    pub fn curvature_residual(&self, variant: Variant) -> WeylElement {
        let theta = self.connection_form(variant);
        let minus_i = Gauss::i().inv();
        let target = match variant {
            Variant::Plus => self
                .chart
                .weyl_omega(self.cap)
                .scale_gauss(&self.k)
                .add(&self.chart.weyl_omega1(self.cap))
                .scale_gauss(&minus_i),
            Variant::Minus => self
                .chart
                .weyl_omega(self.cap)
                .scale_gauss(&(-&self.k))
                .add(&self.chart.weyl_omega1(self.cap))
                .scale_gauss(&minus_i),
            Variant::Bimodule => self
                .chart
                .weyl_omega(self.cap)
                .scale_gauss(&(&(&self.k * &Gauss::from_int(2)) * &minus_i)),
        };
        theta.exterior_d().sub(&target)
    }

    /// The non-formal flat connection `D_k` on quantizable-function space:
    /// `D_k a = ∇a − δa + (k/i)[corr_k, a]_{⋆_k}`.
    pub fn d_level(&self, a: &WeylElement) -> WeylElement {
        let comm = crate::weyl::commutator(&self.corr_k, a, &self.kernel)
            .scale_gauss(&self.inv_hbar());
        a.nabla(&self.chart.conn_view())
            .sub(&a.delta(Part::Full))
            .add(&comm)
    }

    /// The evaluated action `a ⊛ₖ± s`.
    pub fn act(&self, sign: Sign, a: &WeylElement, s: &WeylElement) -> WeylElement {
        circledast(
            sign,
            a,
            s,
            &self.chart.omega_inv,
            &HbarUse::Value(self.hbar.clone()),
        )
    }

    /// The line-bundle connection on variant sections (in-frame):
    /// `D^L_{±,k} s = ∇s ± (k/i)·(γ_k ⊛ₖ± s) + θ_± ∧ s`.
    pub fn d_line(&self, sign: Sign, s: &WeylElement) -> WeylElement {
        assert!(s.has_no_wbar(), "plus/minus sections carry only w-fibers");
        assert!(s.has_no_hbar(), "sections at a level are ℏ-free");
        let variant = match sign {
            Sign::Plus => Variant::Plus,
            Sign::Minus => Variant::Minus,
        };
        let scale = &sign.as_gauss() * &self.inv_hbar();
        let gamma_act = self.act(sign, &self.gamma_k, s).scale_gauss(&scale);
        let theta = self.connection_form(variant);
        s.nabla(&self.chart.conn_view())
            .add(&gamma_act)
            .add(&theta.wedge(s))
    }

    /// The unique `D^L`-flat section with scalar part `s0` (holomorphic),
    /// solved by the fiber-degree recursion
    /// `s = s0 + (δ^{1,0})⁻¹ (D^L s − (∂̄ − δ^{1,0}) s)`.
    pub fn flat_lift(&self, sign: Sign, s0: &Rat) -> WeylElement {
        let n = self.chart.n;
        for b in 0..n {
            assert!(
                s0.derive(n + b).is_zero(),
                "plus/minus lifts need a holomorphic scalar part"
            );
        }
        let vars = self.chart.vars();
        let base = WeylElement::scalar(vars, self.cap, s0.clone());
        // linear recursion map raising fiber degree: sum its iterates
        let mut total = base.clone();
        let mut piece = base;
        for _ in 0..=(self.cap + 2) {
            let reduced = self
                .d_line(sign, &piece)
                .sub(&piece.dbar_coeff())
                .add(&piece.delta(Part::Holo));
            piece = reduced.delta_inv(Part::Holo);
            if piece.is_zero() {
                return total;
            }
            total = total.add(&piece);
        }
        unreachable!("the lift recursion raises fiber degree and must stabilize");
    }

    /// `Φ± = Σ_{r≥1} (∇̃^{1,0})^r (±kρ₀ + ρ₁)`, assembled from the stored
    /// first derivatives (the sum starts at r = 1, so the potentials
    /// themselves are never needed).
    pub fn phi(&self, sign: Sign) -> WeylElement {
        let n = self.chart.n;
        let vars = self.chart.vars();
        let mut t = WeylElement::zero(vars, self.cap);
        for alpha in 0..n {
            let v = match sign {
                Sign::Plus => {
                    &self.chart.drho0[alpha].scale(&self.k) + &self.chart.drho1[alpha]
                }
                Sign::Minus => {
                    &self.chart.drho1[alpha] - &self.chart.drho0[alpha].scale(&self.k)
                }
            };
            t = t.add(&WeylElement::fiber_w(vars, self.cap, alpha).scale(&v));
        }
        let conn = self.chart.conn_view();
        let mut total = t.clone();
        let mut piece = t;
        loop {
            piece = piece.nabla_holo(&conn).delta_inv(Part::Holo);
            if piece.is_zero() {
                return total;
            }
            total = total.add(&piece);
        }
    }

    /// The distinguished flat frame lift `e^{Φ±}` (coefficient of
    /// `e^{Φ±} ⊗ σ±`).
    pub fn phi_frame(&self, sign: Sign) -> WeylElement {
        let phi = self.phi(sign);
        let mut out = WeylElement::one(self.chart.vars(), self.cap);
        let mut power = WeylElement::one(self.chart.vars(), self.cap);
        let mut m: u32 = 0;
        let mut mfact = Gauss::one();
        loop {
            power = power.wedge(&phi);
            if power.is_zero() {
                return out;
            }
            m += 1;
            mfact = &mfact * &Gauss::from_int(m as i64);
            out = out.add(&power.scale_gauss(&mfact.inv()));
        }
    }

    /// Act by a level-`k` quantizable function on a holomorphic section
    /// coefficient through its flat lift; returns the frame coefficient of
    /// the result plus the flatness residual of the acted section.
    pub fn tdo_apply(&self, sign: Sign, q: &WeylElement, s0: &Rat) -> (Rat, WeylElement) {
        let lift = self.flat_lift(sign, s0);
        let res = self.act(sign, q, &lift);
        let flat_res = self.d_line(sign, &res);
        (res.scalar_coefficient(0), flat_res)
    }
}

/// The two-sided structure on a chart: the plus action of the chart's own
/// quantizable functions and the minus action of the conjugate chart's,
/// acting on full Weyl-coefficient sections of the squared bundle.
pub struct Bimodule {
    pub side: LineModule,
    pub conj: LineModule,
}

impl Bimodule {
    pub fn new(chart: Arc<KahlerChart>, k: &Gauss, cap: u32) -> Self {
        let fed = Arc::new(fedosov_kahler(chart.clone(), cap));
        let conj_chart = Arc::new(chart.conjugate_chart().expect("conjugate chart data"));
        let conj_fed = Arc::new(fedosov_kahler(conj_chart.clone(), cap));
        Bimodule {
            side: LineModule::new(chart, fed, k),
            conj: LineModule::new(conj_chart, conj_fed, k),
        }
    }

    /// Left action `a ⊛ₖ⁺ s` by a chart-side element.
    pub fn act_plus(&self, a: &WeylElement, s: &WeylElement) -> WeylElement {
        self.side.act(Sign::Plus, a, s)
    }

    /// Right action `ǎ ⊛̌ₖ⁻ s` by a conjugate-side element (stored on the
    /// conjugate chart): the section is re-expressed in the conjugate
    /// chart's labels, acted on there, and relabeled back. The transport is
    /// ℂ-linear, so the level's ℏ-factors pass through unchanged.
    pub fn act_minus_conj(&self, a_conj: &WeylElement, s: &WeylElement) -> WeylElement {
        self.conj
            .act(Sign::Minus, a_conj, &s.relabel_conjugate())
            .relabel_conjugate()
    }

    /// The bimodule connection
    /// `D^L_k s = ∇s + (k/i)(γ_k ⊛ₖ⁺ s) − (k/i)(γ̌_k ⊛̌ₖ⁻ s) + θ ∧ s`.
    pub fn d_line(&self, s: &WeylElement) -> WeylElement {
        assert!(s.has_no_hbar(), "sections at a level are ℏ-free");
        let scale = self.side.inv_hbar();
        let plus = self
            .act_plus(&self.side.gamma_k, s)
            .scale_gauss(&scale);
        let minus = self
            .act_minus_conj(&self.conj.gamma_k, s)
            .scale_gauss(&scale);
        let theta = self.side.connection_form(Variant::Bimodule);
        s.nabla(&self.side.chart.conn_view())
            .add(&plus)
            .sub(&minus)
            .add(&theta.wedge(s))
    }

    /// Flat lift of an arbitrary chart function: the fiber-degree recursion
    /// `s = s0 + δ⁻¹ (D^L s + δ s)`.
    pub fn flat_lift(&self, s0: &Rat) -> WeylElement {
        let vars = self.side.chart.vars();
        let cap = self.side.cap;
        let base = WeylElement::scalar(vars, cap, s0.clone());
        let mut total = base.clone();
        let mut piece = base;
        for _ in 0..=(cap + 2) {
            let reduced = self.d_line(&piece).add(&piece.delta(Part::Full));
            piece = reduced.delta_inv(Part::Full);
            if piece.is_zero() {
                return total;
            }
            total = total.add(&piece);
        }
        unreachable!("the bimodule lift raises fiber degree and must stabilize");
    }

    /// The natural pairing: a plus-variant section on the chart against a
    /// minus-variant section on the conjugate chart, landing in the
    /// bimodule (the canonical-twist frames cancel).
    pub fn pairing(&self, s: &WeylElement, s_conj: &WeylElement) -> WeylElement {
        s.wedge(&s_conj.relabel_conjugate())
    }
}
